"""Closed-form large-N objects for the diffusing Wishart matrix.

Resolvent and Marcenko-Pastur density, complex characteristics of the
Burgers-type equation and their caustics (pre-shocks) at the spectral edges,
chiral and anti-Wishart resolvents, the time-dilated R-transform,
finite-difference PDE residuals, and the exact small-N joint eigenvalue law.

Square-root branch: ``w(z) = sqrt(z - z_L) * sqrt(z - z_R)`` with both factors
on the principal branch.  The cut is then exactly ``[z_L, z_R]`` and
``w ~ z`` at infinity, which gives ``G ~ 1/z`` and a positive density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import BoundaryValueError, DomainError, UnsupportedError
from .stochastic_engine import TimeConvention

__all__ = [
    "SpectralParams",
    "ShockPoint",
    "CharacteristicLine",
    "HardEdgeDivergence",
    "HARD_EDGE",
    "spectrum_edges",
    "resolvent_wishart",
    "mp_density",
    "mp_density_grid",
    "mp_bin_masses",
    "trace_characteristic",
    "find_shocks",
    "implicit_residual",
    "resolvent_chiral",
    "resolvent_antiwishart",
    "r_transform",
    "burgers_residual",
    "chiral_burgers_residual",
    "antiwishart_burgers_residual",
    "joint_density_small_n",
]


@dataclass(frozen=True)
class SpectralParams:
    """Rectangularity ``r`` in (0, 1] and scaled time ``tau`` > 0."""

    r: float
    tau: float

    def __post_init__(self):
        if not 0 < self.r <= 1:
            raise DomainError(f"r must lie in (0, 1], got {self.r}")
        if not self.tau > 0:
            raise DomainError(f"tau must be > 0, got {self.tau}")

    @property
    def c_minus(self) -> float:
        return (1 - math.sqrt(self.r)) ** 2

    @property
    def c_plus(self) -> float:
        return (1 + math.sqrt(self.r)) ** 2

    def with_tau(self, tau: float) -> "SpectralParams":
        return SpectralParams(self.r, tau)


@dataclass(frozen=True)
class ShockPoint:
    z0c: float
    zc: float
    side: str


@dataclass
class CharacteristicLine:
    """Samples (tau, z, G) of one characteristic started at ``z0``.

    ``caustic_tau`` is the time at which the line meets the caustic
    ``z0 = +-sqrt(r) tau`` (only possible for real ``z0``), else None.
    """

    z0: complex
    taus: np.ndarray
    z: np.ndarray
    G: np.ndarray
    caustic_tau: float | None = None

    @property
    def samples(self):
        return list(zip(self.taus.tolist(), self.z.tolist(), self.G.tolist()))


class HardEdgeDivergence:
    """Marker returned by :func:`mp_density` at lambda = 0 when r = 1.

    Deliberately not a number: arithmetic with it raises ``TypeError``.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "HARD_EDGE"

    def __bool__(self):
        return True


HARD_EDGE = HardEdgeDivergence()


def spectrum_edges(p: SpectralParams) -> tuple[float, float]:
    """Support ``[(1 - sqrt r)^2 tau, (1 + sqrt r)^2 tau]`` of the density."""
    return p.c_minus * p.tau, p.c_plus * p.tau


def _branch_w(z, zl, zr):
    return np.sqrt(z - zl) * np.sqrt(z - zr)


def _on_cut(z, zl, zr) -> bool:
    z = complex(z)
    return z.imag == 0.0 and zl <= z.real <= zr


def _wishart_from(z, a, w, denom_scale):
    """(a - w) / (denom_scale z) with the rationalized form when it is better conditioned.

    Uses ``(a - w)(a + w) = 2 denom_scale z``, which holds for both the Wishart
    and the anti-Wishart resolvent.
    """
    plus = a + w
    minus = a - w
    return np.where(np.abs(plus) >= np.abs(minus), 2.0 / np.where(plus == 0, 1, plus),
                    minus / (denom_scale * z))


def resolvent_wishart(z, p: SpectralParams, side: str | None = None):
    """G(z, tau) = ((r - 1) tau + z - w) / (2 r tau z).

    ``side="below"`` (or ``"above"``) returns the boundary value ``G(x -+ i0)``
    for real ``x`` on the support; without it a point on the cut raises
    :class:`BoundaryValueError`.  Accepts arrays.
    """
    zl, zr = spectrum_edges(p)
    r, tau = p.r, p.tau
    zc = np.asarray(z, dtype=complex)
    if side is None:
        on = (zc.imag == 0) & (zc.real >= zl) & (zc.real <= zr)
        if np.any(on):
            raise BoundaryValueError("z lies on the cut [z_L, z_R]; pass side='below' or 'above'")
        w = _branch_w(zc, zl, zr)
    elif side in ("below", "above"):
        x = zc.real
        inside = (zc.imag == 0) & (x > zl) & (x < zr)
        w = _branch_w(zc, zl, zr)
        root = np.sqrt(np.clip((x - zl) * (zr - x), 0, None))
        # sqrt(x - z_R -+ i0) = -+ i sqrt(z_R - x) on the support
        sign = -1.0 if side == "below" else 1.0
        w = np.where(inside, sign * 1j * root, w)
    else:
        raise ValueError("side must be None, 'below' or 'above'")
    a = (r - 1) * tau + zc
    with np.errstate(divide="ignore", invalid="ignore"):
        g = _wishart_from(zc, a, w, 2 * r * tau)
    return g[()] if g.ndim == 0 else g


def mp_density(lam: float, p: SpectralParams):
    """Level density sqrt((lam - c_- tau)(c_+ tau - lam)) / (2 pi lam tau r) on the support.

    Returns :data:`HARD_EDGE` at ``lam == 0`` when ``r == 1`` (1/sqrt divergence).
    """
    zl, zr = spectrum_edges(p)
    if lam == 0 and p.r == 1:
        return HARD_EDGE
    if lam <= zl or lam >= zr:
        return 0.0
    return math.sqrt((lam - zl) * (zr - lam)) / (2 * math.pi * lam * p.tau * p.r)


def mp_density_grid(lam, p: SpectralParams) -> np.ndarray:
    """Vectorized :func:`mp_density`; refuses the hard-edge point."""
    lam = np.asarray(lam, dtype=float)
    zl, zr = spectrum_edges(p)
    if p.r == 1 and np.any(lam == 0):
        raise DomainError("density diverges at lambda = 0 for r = 1")
    inside = (lam > zl) & (lam < zr)
    safe = np.where(inside, lam, 1.0)
    rho = np.sqrt(np.clip((safe - zl) * (zr - safe), 0, None)) / (2 * np.pi * safe * p.tau * p.r)
    return np.where(inside, rho, 0.0)


def _mp_cdf(x, p: SpectralParams) -> float:
    """Mass of the density on [z_L, x] via x = m + h cos(theta), which removes the edge roots."""
    zl, zr = spectrum_edges(p)
    if x <= zl:
        return 0.0
    if x >= zr:
        return 1.0
    m = 0.5 * (zl + zr)
    h = 0.5 * (zr - zl)
    theta = math.acos((x - m) / h)
    # h^2 sin^2 / (m + h cos) written so that r = 1 (m = h) has no 0/0 at theta = pi
    f = lambda t: h * h * (1 - math.cos(t)) * (1 + math.cos(t)) / (m + h * math.cos(t)) if m + h * math.cos(t) > 0 else h * (1 - math.cos(t))
    val, _ = integrate.quad(f, theta, math.pi, epsabs=1e-14, epsrel=1e-12, limit=200)
    return val / (2 * math.pi * p.tau * p.r)


def mp_bin_masses(edges, p: SpectralParams) -> np.ndarray:
    """Probability mass of the density in each bin ``[edges[i], edges[i+1]]``."""
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise ValueError("edges must be strictly increasing with at least two entries")
    return np.diff([_mp_cdf(float(x), p) for x in edges])


def trace_characteristic(z0: complex, p: SpectralParams, n_samples: int = 64) -> CharacteristicLine:
    """Closed-form characteristic from ``z0`` on ``[0, tau]``.

    z(tau') = (1 + tau'/z0)(z0 + r tau'),   G(tau') = 1 / (r tau' + z0)
    """
    z0 = complex(z0)
    if z0 == 0:
        raise DomainError("z0 = 0 is excluded")
    if n_samples < 2:
        raise ValueError("need at least two samples")
    taus = np.linspace(0.0, p.tau, n_samples)
    denom = z0 + p.r * taus
    if np.any(denom == 0):
        raise DomainError("characteristic passes through G = infinity (z0 = -r tau')")
    z = (1 + taus / z0) * denom
    G = 1.0 / denom
    caustic = None
    if z0.imag == 0:
        tc = abs(z0.real) / math.sqrt(p.r)
        if tc <= p.tau:
            caustic = tc
    return CharacteristicLine(z0, taus, z, G, caustic)


def find_shocks(p: SpectralParams) -> tuple[ShockPoint, ShockPoint]:
    """Caustics dz/dz0 = 1 - r tau^2 / z0^2 = 0: z0c = -+ sqrt(r) tau, at the spectral edges."""
    zl, zr = spectrum_edges(p)
    z0 = math.sqrt(p.r) * p.tau
    return ShockPoint(-z0, zl, "left"), ShockPoint(z0, zr, "right")


def implicit_residual(z, G, p: SpectralParams) -> float:
    """|z - 1/G - tau / (1 - r tau G)|."""
    z = complex(z)
    G = complex(G)
    if G == 0:
        raise DomainError("G = 0 is excluded")
    den = 1 - p.r * p.tau * G
    if den == 0:
        raise DomainError("r tau G = 1 is excluded")
    return abs(z - 1 / G - p.tau / den)


def resolvent_chiral(w, p: SpectralParams):
    """g(w) = (w^2 - sqrt((w^2 - c_- tau)(w^2 - c_+ tau))) / ((r + 1) tau w).

    The root uses the same branch as :func:`resolvent_wishart` at ``z = w^2``,
    so ``G(z) = (r - 1)/(2 r w^2) + (r + 1) g(w) / (2 r w)`` holds exactly.
    Intended for ``w`` in the open right half plane.
    """
    wc = np.asarray(w, dtype=complex)
    if np.any(wc == 0):
        raise DomainError("w = 0 is excluded")
    zl, zr = spectrum_edges(p)
    z = wc * wc
    on = (z.imag == 0) & (z.real >= zl) & (z.real <= zr)
    if np.any(on):
        raise BoundaryValueError("w^2 lies on the cut")
    root = _branch_w(z, zl, zr)
    plus = z + root
    minus = z - root
    # (z - root)(z + root) = 2 (1 + r) tau z - (1 - r)^2 tau^2
    num = 2 * (1 + p.r) * p.tau * z - (1 - p.r) ** 2 * p.tau ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        top = np.where(np.abs(plus) >= np.abs(minus), num / np.where(plus == 0, 1, plus), minus)
    g = top / ((p.r + 1) * p.tau * wc)
    return g[()] if g.ndim == 0 else g


def resolvent_antiwishart(z, p: SpectralParams):
    """G_a(z) = ((1 - r) tau + z - w) / (2 tau z); pole at 0 with residue 1 - r."""
    zc = np.asarray(z, dtype=complex)
    if np.any(zc == 0):
        raise DomainError("pole at z = 0 (zero modes)")
    zl, zr = spectrum_edges(p)
    on = (zc.imag == 0) & (zc.real >= zl) & (zc.real <= zr)
    if np.any(on):
        raise BoundaryValueError("z lies on the cut [z_L, z_R]")
    w = _branch_w(zc, zl, zr)
    a = (1 - p.r) * p.tau + zc
    with np.errstate(divide="ignore", invalid="ignore"):
        g = _wishart_from(zc, a, w, 2 * p.tau)
    return g[()] if g.ndim == 0 else g


def r_transform(z, p: SpectralParams):
    """Time-dilated R-transform R(z, tau) = tau R_st(tau z) = tau / (1 - r tau z)."""
    zc = np.asarray(z, dtype=complex)
    den = 1 - p.r * p.tau * zc
    if np.any(den == 0):
        raise DomainError("pole of the R-transform at z = 1/(r tau)")
    out = p.tau / den
    return out[()] if out.ndim == 0 else out


def _check_stencil(z, h, p: SpectralParams):
    """Reject stencils whose points come within ``h`` of the cut at any of the three times."""
    zl = spectrum_edges(p.with_tau(p.tau - h))[0]
    zr = spectrum_edges(p.with_tau(p.tau + h))[1]
    if abs(z.imag) <= h and zl - 2 * h <= z.real <= zr + 2 * h:
        raise DomainError(f"stencil around {z} touches the cut [{zl}, {zr}]")


def _fd_derivs(F, z, tau, h):
    """Central differences: (F, dF/dtau, dF/dz, d2F/dz2) at (z, tau)."""
    f0 = F(z, tau)
    ft = (F(z, tau + h) - F(z, tau - h)) / (2 * h)
    fp = F(z + h, tau)
    fm = F(z - h, tau)
    fz = (fp - fm) / (2 * h)
    fzz = (fp - 2 * f0 + fm) / (h * h)
    return f0, ft, fz, fzz


def burgers_residual(z, p: SpectralParams, h: float = 1e-4, *, resolvent=None) -> float:
    """|dG/dtau + dG/dz - r (dG/dz - 2 z G dG/dz - G^2)| by central differences.

    ``resolvent`` substitutes another G(z, params) (used to show that a wrong
    branch violates the equation).
    """
    if not 1e-6 <= h <= 1e-3:
        raise ValueError("h must lie in [1e-6, 1e-3]")
    if p.tau - h <= 0:
        raise DomainError("tau - h must stay positive")
    z = complex(z)
    _check_stencil(z, h, p)
    res = resolvent or resolvent_wishart
    F = lambda zz, tt: complex(res(zz, p.with_tau(tt)))
    G, Gt, Gz, _ = _fd_derivs(F, z, p.tau, h)
    return abs(Gt + Gz - p.r * (Gz - 2 * z * G * Gz - G * G))


def chiral_burgers_residual(w, p: SpectralParams, h: float = 1e-4) -> float:
    """|((1 - r)/(1 + r))^2 + w^3 [2/(1 + r) dg/dtau + g dg/dw]| by central differences."""
    w = complex(w)
    if p.tau - h <= 0:
        raise DomainError("tau - h must stay positive")
    F = lambda ww, tt: complex(resolvent_chiral(ww, p.with_tau(tt)))
    g, gt, gw, _ = _fd_derivs(F, w, p.tau, h)
    r = p.r
    return abs(((1 - r) / (1 + r)) ** 2 + w ** 3 * (2 / (1 + r) * gt + g * gw))


def antiwishart_burgers_residual(z, p: SpectralParams, h: float = 1e-4) -> float:
    """|dG_a/dtau - (1 - r - 2 z G_a) dG_a/dz + G_a^2| by central differences."""
    z = complex(z)
    if p.tau - h <= 0:
        raise DomainError("tau - h must stay positive")
    F = lambda zz, tt: complex(resolvent_antiwishart(zz, p.with_tau(tt)))
    g, gt, gz, _ = _fd_derivs(F, z, p.tau, h)
    return abs(gt - (1 - p.r - 2 * z * g) * gz + g * g)


def joint_density_small_n(lams, t_phys: float, conv: TimeConvention) -> float:
    """Unnormalized joint eigenvalue density at physical time ``t_phys`` (beta = 2).

    t^(-beta M N / 2) prod_{i<j} |lam_j - lam_i|^beta prod_k lam_k^(beta (nu+1)/2 - 1) exp(-sum lam / (2 t))

    Only N <= 3: the normalization is left to numerical quadrature.
    """
    lams = np.asarray(lams, dtype=float)
    n = conv.N
    if n > 3:
        raise UnsupportedError("joint density is limited to N <= 3")
    if lams.shape[-1] != n:
        raise ValueError(f"expected {n} eigenvalues per point")
    if t_phys <= 0:
        raise DomainError("t_phys must be > 0")
    if np.any(lams < 0):
        raise DomainError("eigenvalues must be >= 0")
    beta = conv.beta
    vdm = np.ones(lams.shape[:-1])
    for i in range(n):
        for j in range(i + 1, n):
            vdm = vdm * np.abs(lams[..., j] - lams[..., i]) ** beta
    power = beta * (conv.nu + 1) / 2 - 1
    single = np.prod(lams ** power, axis=-1)
    val = t_phys ** (-beta * conv.M * n / 2) * vdm * single * np.exp(-lams.sum(axis=-1) / (2 * t_phys))
    return val[()] if np.ndim(val) == 0 else val
