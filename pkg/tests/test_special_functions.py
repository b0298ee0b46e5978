import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from wishart_shocks.analytic_spectrum import SpectralParams
from wishart_shocks.errors import DomainError, PoleError, RangeError
from wishart_shocks.special_functions import (
    HARD_S_GRID,
    SOFT_S_GRID,
    airy_ai,
    airy_ai_prime,
    airy_layer_residual,
    airy_log_derivative,
    airy_series_derivatives,
    bessel_j,
    bessel_j_prime,
    bessel_layer_residual,
    bessel_log_derivative,
    decay_exponent,
    hard_edge_chi,
    hard_edge_error,
    hard_edge_params,
    hard_edge_pole,
    matching_check_hard,
    matching_check_soft,
    soft_edge_error,
    soft_edge_params,
    soft_edge_prediction,
)

AI0 = 1 / (3 ** (2 / 3) * math.gamma(2 / 3))
AIP0 = -1 / (3 ** (1 / 3) * math.gamma(1 / 3))
P11 = SpectralParams(1.0, 1.0)


def test_airy_at_zero():
    assert airy_ai(0.0) == pytest.approx(AI0, abs=1e-15)
    assert airy_ai_prime(0.0) == pytest.approx(AIP0, abs=1e-15)
    assert airy_series_derivatives(0.0)[2] == 0.0


def test_airy_against_scipy():
    x = np.linspace(-10, 10, 401)
    ai, aip, _, _ = special.airy(x)
    assert max(abs(airy_ai(v) - a) for v, a in zip(x, ai)) < 1e-10
    assert max(abs(airy_ai_prime(v) - a) for v, a in zip(x, aip)) < 1e-10


@pytest.mark.parametrize("x", [-40.0, -12.0, 8.0, 25.0, 60.0])
def test_airy_against_mpmath(x):
    with mpmath.workdps(30):
        ai = float(mpmath.airyai(x))
        aip = float(mpmath.airyai(x, derivative=1))
    assert airy_ai(x) == pytest.approx(ai, rel=1e-9, abs=1e-12)
    assert airy_ai_prime(x) == pytest.approx(aip, rel=1e-9, abs=1e-12)
    if x > 0:
        assert airy_log_derivative(x) == pytest.approx(aip / ai, rel=1e-10)


def test_airy_branch_switch_continuous():
    for x in (6.5, -6.5):
        lo, hi = np.nextafter(x, -np.inf), np.nextafter(x, np.inf)
        assert abs(airy_ai(lo) - airy_ai(hi)) < 1e-11
        assert abs(airy_ai_prime(lo) - airy_ai_prime(hi)) < 1e-11


def test_airy_range_and_poles():
    with pytest.raises(RangeError):
        airy_ai(150.0)
    # first zero of Ai
    a1 = float(mpmath.airyaizero(1))
    with pytest.raises(PoleError):
        airy_log_derivative(a1)


@settings(max_examples=80, deadline=None)
@given(x=st.floats(-9.5, 9.5))
def test_airy_ode_residual(x):
    # Ai'' = x Ai by central differences of Ai'
    h = 1e-4
    d2 = (airy_ai_prime(x + h) - airy_ai_prime(x - h)) / (2 * h)
    assert abs(d2 - x * airy_ai(x)) < 1e-7


def test_bessel_against_scipy():
    for nu in range(0, 11):
        for x in np.linspace(0.0, 50.0, 101):
            assert abs(bessel_j(nu, x) - special.jv(nu, x)) < 1e-10
            assert abs(bessel_j_prime(nu, x) - special.jvp(nu, x)) < 1e-9


def test_bessel_complex_against_mpmath():
    for z in (3 + 1j, 10 + 3j, 28.6 + 8.6j, 50 + 40j, 20 - 15j):
        for nu in (0, 1, 3):
            ref = complex(mpmath.besselj(nu, z))
            assert abs(bessel_j(nu, z) - ref) <= 1e-11 * max(1.0, abs(ref))


def test_bessel_first_zero():
    j0 = float(mpmath.besseljzero(0, 1))
    assert abs(bessel_j(0, j0)) < 1e-12
    with pytest.raises(PoleError):
        bessel_log_derivative(0, j0)


@settings(max_examples=80, deadline=None)
@given(nu=st.integers(0, 6), x=st.floats(0.5, 40))
def test_bessel_ode_residual(nu, x):
    # x^2 J'' + x J' + (x^2 - nu^2) J = 0, J'' by central differences of J'
    h = 1e-5
    d2 = (bessel_j_prime(nu, x + h) - bessel_j_prime(nu, x - h)) / (2 * h)
    res = x * x * d2 + x * bessel_j_prime(nu, x) + (x * x - nu * nu) * bessel_j(nu, x)
    assert abs(res) < 1e-5 * max(1.0, x * x)


def test_edge_params():
    e = soft_edge_params(P11)
    assert (e.z_edge, e.z_star, e.A_tau) == (4.0, 16.0, 0.5)
    assert e.scale == pytest.approx(16 ** (1 / 3))
    with pytest.raises(DomainError):
        soft_edge_params(P11, "left")
    left = soft_edge_params(SpectralParams(0.25, 1.0), "left")
    assert left.z_star < 0
    h = hard_edge_params(0, 1.0)
    assert (h.A_tau, h.delta, h.gamma, h.sing_exponent) == (0.5, 2.0, -1.0, -0.5)


def test_soft_prediction_example():
    pred = soft_edge_prediction(0.0, 64, P11)
    expect = 0.5 + 64 ** (-1 / 3) * AIP0 / AI0 / 16 ** (1 / 3)
    assert pred == pytest.approx(expect, rel=1e-13)


def test_hard_pole():
    j0 = float(mpmath.besseljzero(0, 1))
    s = hard_edge_pole(0, 1.0)
    assert abs(s - j0 * j0 / 4) < 1e-12
    assert hard_edge_pole(0, 2.0) == pytest.approx(j0 * j0 / 2, rel=1e-12)
    with pytest.raises(PoleError):
        hard_edge_chi(s, 0, 1.0)


def test_hard_chi_small_s():
    # chi(s) -> -1/(tau (1 + nu)) as s -> 0
    for nu in (0, 2):
        for tau in (1.0, 2.0):
            assert hard_edge_chi(1e-8, nu, tau) == pytest.approx(-1 / (tau * (1 + nu)), rel=1e-6)


def test_airy_layer_grid():
    worst = max(airy_layer_residual(s, 16.0) for s in SOFT_S_GRID)
    assert worst < 1e-8
    # wrong g or a shifted profile must be visible
    assert airy_layer_residual(0.5, 16.0, g=0.3) > 0.1
    assert airy_layer_residual(0.5, 16.0, shift=1.6) > 1e-2


def test_bessel_layer_grid():
    for nu in (0, 1, 2):
        worst = max(bessel_layer_residual(s, nu, 1.0) for s in HARD_S_GRID)
        assert worst < 1e-8
    assert bessel_layer_residual(0.5, 0, 1.0, g=2.0) == pytest.approx(1.0, abs=1e-8)


def test_matching_checks():
    assert matching_check_soft(25.0) <= 0.015
    assert matching_check_soft(100.0) <= 0.004
    assert matching_check_hard(30.0) <= 0.05
    with pytest.raises(DomainError):
        matching_check_soft(1.0)
    # the next asymptotic term is -1/(4x)
    for x in (25.0, 100.0):
        assert 4 * x * matching_check_soft(x) == pytest.approx(1.0, abs=0.01)


def test_soft_convergence_decreasing():
    errs = [soft_edge_error(N, P11) for N in (16, 32, 64)]
    assert errs[0] > errs[1] > errs[2]
    assert decay_exponent([16, 32, 64], errs) > 0


def test_soft_wrong_scale_ablation():
    # a prediction whose coordinate ignores the N^(-2/3) zoom does not converge
    from wishart_shocks.orthopoly import PolyParams, cole_hopf

    e = soft_edge_params(P11)
    errs = []
    for N in (16, 32, 64):
        err = max(abs(cole_hopf(N, PolyParams(0, 1.0), e.z_edge + N ** (-0.5) * s, 1.0).f
                      - soft_edge_prediction(s, N, P11)) for s in SOFT_S_GRID)
        errs.append(err)
    assert decay_exponent([16, 32, 64], errs) < decay_exponent(
        [16, 32, 64], [soft_edge_error(N, P11) for N in (16, 32, 64)])


def test_hard_convergence_decreasing():
    errs = [hard_edge_error(N) for N in (16, 32, 64)]
    assert errs[0] > errs[1] > errs[2]


def test_decay_exponent():
    assert decay_exponent([10, 20, 40], [1.0, 0.5, 0.25]) == pytest.approx(1.0)
