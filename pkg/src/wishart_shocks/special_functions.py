"""Airy and integer-order Bessel functions, and the edge scaling profiles.

Airy: Maclaurin series for |x| <= AIRY_SWITCH, the standard large-argument
expansions beyond (truncated at their smallest term).  Bessel J_nu: ascending
series for x <= max(12, 2 nu), otherwise Hankel asymptotics for J_0 and J_1
followed by upward recurrence, which is stable because nu < x there.

Edge profiles near the soft edge z_e (scale N^(-2/3)) and the hard edge 0
(scale N^(-2)):

    soft:  f ~ A + N^(-1/3) d/ds ln Ai(s / z*^(1/3))
    hard:  f ~ 1/(2 tau) + N d/ds ln[s^(-nu/2) J_nu(2 sqrt(s / tau))]
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .analytic_spectrum import SpectralParams, spectrum_edges
from .errors import DomainError, PoleError, RangeError
from .orthopoly import PolyParams, cole_hopf

__all__ = [
    "AIRY_SWITCH",
    "BESSEL_SERIES_X",
    "EdgePrediction",
    "airy_ai",
    "airy_ai_prime",
    "airy_log_derivative",
    "airy_series_derivatives",
    "bessel_j",
    "bessel_j_prime",
    "bessel_log_derivative",
    "soft_edge_params",
    "hard_edge_params",
    "soft_edge_prediction",
    "hard_edge_prediction",
    "hard_edge_chi",
    "hard_edge_pole",
    "airy_layer_residual",
    "bessel_layer_residual",
    "matching_check_soft",
    "matching_check_hard",
    "soft_edge_error",
    "hard_edge_error",
    "decay_exponent",
]

AIRY_SWITCH = 6.5
AIRY_MAX = 100.0
BESSEL_SERIES_X = 12.0
POLE_TOL = 1e-12

_AI0 = 1.0 / (3.0 ** (2.0 / 3.0) * math.gamma(2.0 / 3.0))
_AIP0 = -1.0 / (3.0 ** (1.0 / 3.0) * math.gamma(1.0 / 3.0))
_SQRT_PI = math.sqrt(math.pi)


# --------------------------------------------------------------------------
# Airy
# --------------------------------------------------------------------------


def airy_series_derivatives(x: float, order: int = 2) -> tuple:
    """(Ai, Ai', ..., Ai^(order)) at x from the Maclaurin series, each derivative summed termwise.

    Ai = c1 f - c2 g with f = sum a_k x^(3k), g = sum b_k x^(3k+1).
    """
    x = float(x)
    c1, c2 = _AI0, -_AIP0
    out = [0.0] * (order + 1)
    a = 1.0
    b = 1.0
    k = 0
    while True:
        pf = 3 * k
        pg = 3 * k + 1
        big = 0.0
        for d in range(order + 1):
            tf = a * _falling(pf, d) * _pow(x, pf - d) if pf >= d else 0.0
            tg = b * _falling(pg, d) * _pow(x, pg - d) if pg >= d else 0.0
            term = c1 * tf - c2 * tg
            out[d] += term
            big = max(big, abs(term))
        if k > 2 and big <= 1e-18 * max(abs(v) for v in out) + 1e-300:
            break
        if k > 400:
            break
        a /= (3 * k + 2) * (3 * k + 3)
        b /= (3 * k + 3) * (3 * k + 4)
        k += 1
    return tuple(out)


def _falling(p, d):
    out = 1
    for i in range(d):
        out *= p - i
    return out


def _pow(x, p):
    return 1.0 if p == 0 else x ** p


def _airy_u(kmax):
    # u_k = (6k-5)(6k-3)(6k-1) / ((2k-1) 216 k) u_{k-1}, v_k = -(6k+1)/(6k-1) u_k
    u = [1.0]
    for k in range(1, kmax + 1):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k))
    v = [1.0] + [-(6 * k + 1) / (6 * k - 1) * u[k] for k in range(1, kmax + 1)]
    return u, v


_U, _V = _airy_u(60)


def _asym_sum(coef, zeta, parity=None):
    """Alternating sum of c_k / zeta^k up to its smallest term.

    ``parity`` 0 or 1 keeps only even or odd k, alternating within that subsequence.
    """
    total = 0.0
    prev = math.inf
    idx = range(len(coef)) if parity is None else range(parity, len(coef), 2)
    for n, k in enumerate(idx):
        t = coef[k] / zeta ** k
        if abs(t) > prev:
            break
        total += (-1.0) ** n * t
        prev = abs(t)
        if abs(t) < 1e-17 * abs(total):
            break
    return total


def _airy_pos_asym(x):
    zeta = 2.0 / 3.0 * x ** 1.5
    su = _asym_sum(_U, zeta)
    sv = _asym_sum(_V, zeta)
    pre = math.exp(-zeta) / (2 * _SQRT_PI)
    return pre * su / x ** 0.25, -pre * sv * x ** 0.25, su, sv


def _airy_neg_asym(x):
    z = -x
    zeta = 2.0 / 3.0 * z ** 1.5
    ph = zeta - math.pi / 4
    cu = _asym_sum(_U, zeta, parity=0)
    su = _asym_sum(_U, zeta, parity=1)
    cv = _asym_sum(_V, zeta, parity=0)
    sv = _asym_sum(_V, zeta, parity=1)
    ai = (math.cos(ph) * cu + math.sin(ph) * su) / (_SQRT_PI * z ** 0.25)
    aip = z ** 0.25 / _SQRT_PI * (math.sin(ph) * cv - math.cos(ph) * sv)
    return ai, aip


def _airy_pair(x):
    x = float(x)
    if not math.isfinite(x) or abs(x) > AIRY_MAX:
        raise RangeError(f"|x| = {abs(x)} exceeds the supported range {AIRY_MAX}")
    if abs(x) <= AIRY_SWITCH:
        ai, aip, _ = airy_series_derivatives(x, 2)
        return ai, aip
    if x > 0:
        ai, aip, _, _ = _airy_pos_asym(x)
        return ai, aip
    return _airy_neg_asym(x)


def airy_ai(x: float) -> float:
    """Ai(x) for |x| <= 100."""
    return _airy_pair(x)[0]


def airy_ai_prime(x: float) -> float:
    """Ai'(x) for |x| <= 100."""
    return _airy_pair(x)[1]


def airy_log_derivative(x: float) -> float:
    """Ai'(x)/Ai(x); for large positive x taken from the series ratio so no underflow enters."""
    x = float(x)
    if x > AIRY_SWITCH and x <= AIRY_MAX:
        _, _, su, sv = _airy_pos_asym(x)
        return -math.sqrt(x) * sv / su
    ai, aip = _airy_pair(x)
    if abs(ai) < POLE_TOL:
        raise PoleError(f"Ai vanishes at x = {x}")
    return aip / ai


# --------------------------------------------------------------------------
# Bessel J of integer order
# --------------------------------------------------------------------------


def _bessel_series(nu, z):
    half = z / 2
    term = half ** nu / math.factorial(nu)
    total = term
    q = -half * half
    k = 0
    while True:
        k += 1
        term = term * q / (k * (k + nu))
        total += term
        if abs(term) <= 1e-17 * abs(total) and k > 2:
            break
        if k > 500:
            break
    return total


def _hankel(nu, x):
    # P, Q with a_k(nu) = prod_{j=1..k} (4 nu^2 - (2j - 1)^2) / (k! 8^k)
    mu = 4.0 * nu * nu
    p = 0.0
    q = 0.0
    a = 1.0
    prev = math.inf
    for k in range(0, 80):
        if k > 0:
            a *= (mu - (2 * k - 1) ** 2) / (k * 8.0)
        t = a / x ** k
        if abs(t) > prev and k > 1:
            break
        prev = abs(t)
        sgn = (-1.0) ** (k // 2)
        if k % 2 == 0:
            p += sgn * t
        else:
            q += sgn * t
        if abs(t) < 1e-17:
            break
    chi = x - (nu / 2.0 + 0.25) * math.pi
    if isinstance(x, complex):
        return cmath.sqrt(2.0 / (math.pi * x)) * (p * cmath.cos(chi) - q * cmath.sin(chi))
    return math.sqrt(2.0 / (math.pi * x)) * (p * math.cos(chi) - q * math.sin(chi))


def bessel_j(nu: int, x):
    """J_nu(x) for integer nu >= 0; real 0 <= x <= 1e4, or complex x.

    Complex x uses the series unless Re x > 0 and |x| is past the series range.
    """
    if int(nu) != nu or nu < 0:
        raise DomainError("nu must be a nonnegative integer")
    nu = int(nu)
    if isinstance(x, complex):
        if abs(x) > 1e4:
            raise DomainError("|x| must be <= 1e4")
        if x.real <= 0 or abs(x) <= max(BESSEL_SERIES_X, 2.0 * nu):
            return _bessel_series(nu, x)
    else:
        x = float(x)
        if x < 0 or x > 1e4:
            raise DomainError("x must lie in [0, 1e4]")
        if x <= max(BESSEL_SERIES_X, 2.0 * nu):
            return _bessel_series(nu, x)
    j0 = _hankel(0, x)
    if nu == 0:
        return j0
    j1 = _hankel(1, x)
    for k in range(1, nu):
        j0, j1 = j1, 2 * k / x * j1 - j0
    return j1


def bessel_j_prime(nu: int, x):
    """J'_nu = (J_(nu-1) - J_(nu+1)) / 2, with J'_0 = -J_1."""
    if nu == 0:
        return -bessel_j(1, x)
    return 0.5 * (bessel_j(nu - 1, x) - bessel_j(nu + 1, x))


def bessel_log_derivative(nu: int, x):
    j = bessel_j(nu, x)
    if abs(j) < POLE_TOL:
        raise PoleError(f"J_{nu} vanishes at x = {x}")
    return bessel_j_prime(nu, x) / j


# --------------------------------------------------------------------------
# edge profiles
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class EdgePrediction:
    """Parameters of an edge profile.

    ``delta``/``gamma``: the local coordinate is z = z_edge + N^(-delta) s and
    the profile enters f with prefactor N^(-gamma).  ``sing_exponent`` is the
    power of the large-N density at the edge.
    """

    side: str
    A_tau: float
    tau: float
    z_edge: float = 0.0
    z_star: float | None = None
    nu: int | None = None
    delta: float = 2.0 / 3.0
    gamma: float = 1.0 / 3.0
    sing_exponent: float = 0.5

    @property
    def scale(self) -> float:
        """Real cube root of z_star (soft edges)."""
        return math.copysign(abs(self.z_star) ** (1.0 / 3.0), self.z_star)


def soft_edge_params(p: SpectralParams, side: str = "right") -> EdgePrediction:
    zl, zr = spectrum_edges(p)
    if side in ("right", "soft-right"):
        ze = zr
        zs = zr * zr * p.r ** 1.5 * p.tau
        name = "soft-right"
    elif side in ("left", "soft-left"):
        if p.r == 1:
            raise DomainError("the left edge is soft only for r < 1")
        ze = zl
        zs = -zl * zl * p.r ** 1.5 * p.tau
        name = "soft-left"
    else:
        raise ValueError("side must be 'right' or 'left'")
    A = ((p.r - 1) * p.tau + ze) / (2 * p.r * p.tau * ze)
    return EdgePrediction(name, A, p.tau, ze, zs)


def hard_edge_params(nu: int, tau: float) -> EdgePrediction:
    if not tau > 0:
        raise DomainError("tau must be > 0")
    return EdgePrediction("hard", 1.0 / (2 * tau), tau, 0.0, None, int(nu), 2.0, -1.0, -0.5)


def _soft_chi(s, e: EdgePrediction):
    c = e.scale
    return airy_log_derivative(s / c) / c


def soft_edge_prediction(s: float, N: int, p: SpectralParams, side: str = "right") -> float:
    """A + N^(-1/3) d/ds ln Ai(s / z*^(1/3)) at z = z_edge + N^(-2/3) s."""
    e = soft_edge_params(p, side)
    return e.A_tau + N ** (-1.0 / 3.0) * _soft_chi(s, e)


def hard_edge_chi(s: float, nu: int, tau: float) -> float:
    """chi = -nu/(2s) + J'_nu(y) / (sqrt(s tau) J_nu(y)), y = 2 sqrt(s / tau)."""
    if not s > 0:
        raise DomainError("s must be > 0")
    y = 2.0 * math.sqrt(s / tau)
    return -nu / (2.0 * s) + bessel_log_derivative(nu, y) / math.sqrt(s * tau)


def hard_edge_prediction(s: float, N: int, nu: int, tau: float) -> float:
    """1/(2 tau) + N chi(s) at z = s / N^2."""
    return 1.0 / (2.0 * tau) + N * hard_edge_chi(s, nu, tau)


def hard_edge_pole(nu: int, tau: float, tol: float = 1e-13) -> float:
    """First positive s where J_nu(2 sqrt(s / tau)) = 0, by bisection in y."""
    f = lambda y: bessel_j(nu, y)
    lo = 1e-3 if nu == 0 else nu + 1e-3
    step = 0.1
    hi = lo + step
    while f(lo) * f(hi) > 0:
        lo, hi = hi, hi + step
        if hi > nu + 50:
            raise RuntimeError("no sign change found")
    flo = f(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            lo = hi = mid
            break
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    y = 0.5 * (lo + hi)
    return y * y * tau / 4.0


def airy_layer_residual(s: float, z_star: float, *, g: float = 0.0, shift: float = 0.0) -> float:
    """|chi^2 + chi' - s/z* + g| for chi = d/ds ln Ai((s + shift) / z*^(1/3)).

    chi' uses Ai'' = x Ai.  ``shift`` displaces the profile (ablation).
    """
    c = math.copysign(abs(z_star) ** (1.0 / 3.0), z_star)
    x = (s + shift) / c
    q = airy_log_derivative(x)
    chi = q / c
    dchi = (x - q * q) / (c * c)
    return abs(chi * chi + dchi - s / z_star + g)


def bessel_layer_residual(s: float, nu: int, tau: float, *, g: float | None = None) -> float:
    """|s chi' + s chi^2 + (1 + nu) chi + g| with g = 1/tau unless given.

    With q = J'/J at y = 2 sqrt(s/tau): chi = -nu/(2s) + 2q/(y tau) and
    q' = -q/y - (1 - nu^2/y^2) - q^2 from the Bessel equation.
    """
    if not s > 0:
        raise DomainError("s must be > 0")
    g = 1.0 / tau if g is None else g
    y = 2.0 * math.sqrt(s / tau)
    q = bessel_log_derivative(nu, y)
    dq = -q / y - (1.0 - nu * nu / (y * y)) - q * q
    dy = 2.0 / (y * tau)
    chi = -nu / (2.0 * s) + 2.0 * q / (y * tau)
    dchi = nu / (2.0 * s * s) + (2.0 / tau) * (dq / y - q / (y * y)) * dy
    return abs(s * dchi + s * chi * chi + (1 + nu) * chi + g)


def matching_check_soft(x: float) -> float:
    """|Ai'(x)/Ai(x) + sqrt(x)| (leading-order large-x behaviour)."""
    if x < 10:
        raise DomainError("soft matching check needs x >= 10")
    return abs(airy_log_derivative(x) + math.sqrt(x))


def matching_check_hard(x: float, nu: int = 0, slope: float = 0.3) -> float:
    """|J'_nu/J_nu + i| at the point of modulus x on the ray arg = atan(slope)."""
    if x < 20:
        raise DomainError("hard matching check needs |x| >= 20")
    z = x * (1 + 1j * slope) / abs(1 + 1j * slope)
    return abs(bessel_log_derivative(nu, complex(z)) + 1j)


# --------------------------------------------------------------------------
# finite-N convergence to the edge profiles
# --------------------------------------------------------------------------

SOFT_S_GRID = np.linspace(-2.0, 2.0, 41)
HARD_S_GRID = np.linspace(0.1, 1.2, 23)


def soft_edge_error(N: int, p: SpectralParams = SpectralParams(1.0, 1.0), side: str = "right",
                    s_grid=None, *, chi_level: bool = False) -> float:
    """E(N) = max_s |f_N(z_edge + N^(-2/3) s) - prediction|.

    The polynomial uses nu = 0 and the given r.  ``chi_level`` multiplies by
    N^(1/3), i.e. measures the error of the profile chi itself.
    """
    s_grid = SOFT_S_GRID if s_grid is None else np.asarray(s_grid, dtype=float)
    e = soft_edge_params(p, side)
    conv = PolyParams(0, p.r)
    err = 0.0
    for s in s_grid:
        z = e.z_edge + N ** (-2.0 / 3.0) * s
        f = cole_hopf(N, conv, z, p.tau).f
        err = max(err, abs(f - soft_edge_prediction(s, N, p, side)))
    return err * N ** (1.0 / 3.0) if chi_level else err


def hard_edge_error(N: int, nu: int = 0, tau: float = 1.0, s_grid=None) -> float:
    """E~(N) = max_s |(f_N(s / N^2) - 1/(2 tau)) / N - chi(s)| at r = 1."""
    s_grid = HARD_S_GRID if s_grid is None else np.asarray(s_grid, dtype=float)
    conv = PolyParams(nu, 1.0)
    err = 0.0
    for s in s_grid:
        f = cole_hopf(N, conv, s / N ** 2, tau).f
        err = max(err, abs((f - 1.0 / (2 * tau)) / N - hard_edge_chi(s, nu, tau)))
    return err


def decay_exponent(ns, errors) -> float:
    """Least-squares p in E(N) ~ C N^(-p)."""
    slope = np.polyfit(np.log(np.asarray(ns, dtype=float)), np.log(np.asarray(errors, dtype=float)), 1)[0]
    return float(-slope)
