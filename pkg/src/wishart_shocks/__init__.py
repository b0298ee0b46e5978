"""Diffusing complex Wishart matrices: spectral flow, complex Burgers characteristics,
exact finite-N characteristic polynomials and universal edge profiles."""

from .analytic_spectrum import (
    HARD_EDGE,
    CharacteristicLine,
    ShockPoint,
    SpectralParams,
    burgers_residual,
    find_shocks,
    implicit_residual,
    joint_density_small_n,
    mp_bin_masses,
    mp_density,
    r_transform,
    resolvent_antiwishart,
    resolvent_chiral,
    resolvent_wishart,
    spectrum_edges,
    trace_characteristic,
)
from .errors import (
    AccuracyError,
    BoundaryValueError,
    DomainError,
    InputDomainError,
    PoleError,
    RangeError,
    StepSizeError,
    UnsupportedError,
    WishartError,
)
from .linalg_core import Spectrum, characteristic_value, svd, svd_singular_values, wishart_spectrum
from .orthopoly import (
    MonicTimePoly,
    PolyParams,
    ScaledTimeMap,
    cauchy_pde_residual,
    cauchy_transform,
    charpoly,
    cole_hopf,
    f_pde_residual,
    laguerre_eval,
    meq_residual,
    monic_coeffs,
    monic_eval,
)
from .special_functions import (
    EdgePrediction,
    airy_ai,
    airy_ai_prime,
    bessel_j,
    bessel_j_prime,
    hard_edge_prediction,
    soft_edge_prediction,
)
from .stochastic_engine import (
    EnsembleConfig,
    Histogram,
    SpectraBatch,
    TimeConvention,
    empirical_density,
    sample_spectra,
    step_eigenvalue_sde,
    step_matrix_brownian,
    step_singvalue_sde,
)

__version__ = "0.1.0"
