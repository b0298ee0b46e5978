"""Laguerre polynomials and the averaged characteristic polynomial.

The averaged characteristic polynomial of the diffusing Wishart matrix is the
time-dependent monic Laguerre polynomial

    M^a_n(x, T) = (-T)^n n! L^a_n(x / T) = sum_k c_k x^k T^(n-k),
    c_k = (-1)^(n-k) (n! / k!) binom(n + a, n - k),

in the raw polynomial time ``T``.  In the scaled time ``tau`` used everywhere
else, ``T = r tau / N``.  Tables are kept in exact rationals; floating point
evaluation goes through the three-term recurrence

    M_{k+1} = (x - T(2k + 1 + a)) M_k - k(k + a) T^2 M_{k-1},

carried with a running power-of-two scale so that large degrees neither
overflow nor lose the ratio M^{a+1}_{n-1} / M^a_n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import numpy as np
from scipy.special import roots_genlaguerre

from .errors import AccuracyError, DomainError, PoleError

__all__ = [
    "PolyParams",
    "MonicTimePoly",
    "ScaledTimeMap",
    "ColeHopfValue",
    "laguerre_eval",
    "laguerre_rr_residual",
    "monic_coeffs",
    "monic_eval",
    "monic_eval_float",
    "monic_derivative",
    "charpoly",
    "charpoly_roots",
    "meq_residual",
    "meq_relative_residual",
    "mrr_residual",
    "mdiff_residual",
    "deltau_residual",
    "cole_hopf",
    "f_pde_residual",
    "cauchy_transform",
    "cauchy_pde_residual",
    "gauss_laguerre_inner",
]


@dataclass(frozen=True)
class PolyParams:
    """Zero-mode count ``nu`` and rectangularity ``r`` for polynomial identities.

    A :class:`~wishart_shocks.stochastic_engine.TimeConvention` works wherever
    this is accepted.  This lighter type exists because identities such as the
    exact PDE hold for any (nu, r) pair, not only nu = N/r - N.
    """

    nu: int
    r: Fraction | float = 1

    def __post_init__(self):
        if int(self.nu) != self.nu or self.nu < 0:
            raise DomainError("nu must be a nonnegative integer")
        if not 0 < self.r <= 1:
            raise DomainError("r must lie in (0, 1]")

    @property
    def r_exact(self):
        return self.r if isinstance(self.r, Rational) else Fraction(self.r)


def _nu_r(conv, exact=False):
    nu = int(conv.nu)
    r = conv.r_exact if exact else float(conv.r)
    return nu, r


@dataclass(frozen=True)
class ScaledTimeMap:
    """tau_raw = r tau / N."""

    conv: object
    N: int

    def tau_raw(self, tau):
        r = self.conv.r_exact if isinstance(tau, Rational) else float(self.conv.r)
        return r * tau / self.N

    def tau_scaled(self, tau_raw):
        return tau_raw * self.N / self.conv.r


@dataclass(frozen=True)
class MonicTimePoly:
    """Exact coefficient table of M^alpha_n(x, T).

    ``coeffs[k]`` multiplies ``x^k T^(n-k)``; :attr:`table` expands it to the
    full ``c[k][j]`` layout, zero unless ``k + j = n``.
    """

    n: int
    alpha: int
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != self.n + 1:
            raise ValueError("coefficient count must be n + 1")
        if self.coeffs[self.n] != 1:
            raise ValueError("polynomial must be monic")

    @property
    def table(self):
        n = self.n
        return [[self.coeffs[k] if k + j == n else Fraction(0) for j in range(n + 1)] for k in range(n + 1)]

    def float_coeffs(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs])


@dataclass(frozen=True)
class ColeHopfValue:
    z: complex
    tau: float
    f: complex
    N: int


# --------------------------------------------------------------------------
# generalized Laguerre
# --------------------------------------------------------------------------


def laguerre_eval(n: int, alpha, x):
    """L^alpha_n(x) by the three-term recurrence in n."""
    if n < 0 or alpha < 0:
        raise DomainError("need n >= 0 and alpha >= 0")
    x = np.asarray(x)
    l0 = np.ones_like(x, dtype=np.result_type(x, float))
    if n == 0:
        return l0[()] if l0.ndim == 0 else l0
    l1 = alpha + 1 - x
    for k in range(1, n):
        l0, l1 = l1, ((2 * k + 1 + alpha - x) * l1 - (k + alpha) * l0) / (k + 1)
    return l1[()] if np.ndim(l1) == 0 else l1


def laguerre_rr_residual(n: int, alpha, x):
    """n L^a_n - (a + 1 - x) L^(a+1)_(n-1) + x L^(a+2)_(n-2)."""
    if n < 2:
        raise DomainError("identity needs n >= 2")
    return (n * laguerre_eval(n, alpha, x) - (alpha + 1 - x) * laguerre_eval(n - 1, alpha + 1, x)
            + x * laguerre_eval(n - 2, alpha + 2, x))


# --------------------------------------------------------------------------
# monic time-dependent polynomials
# --------------------------------------------------------------------------


@lru_cache(maxsize=256)
def monic_coeffs(n: int, alpha: int) -> MonicTimePoly:
    """Exact table of M^alpha_n(x, T) = (-T)^n n! L^alpha_n(x / T)."""
    if n < 0 or alpha < 0:
        raise DomainError("need n >= 0 and alpha >= 0")
    fact_n = math.factorial(n)
    coeffs = tuple(
        Fraction((-1) ** (n - k) * (fact_n // math.factorial(k)) * math.comb(n + alpha, n - k))
        for k in range(n + 1)
    )
    return MonicTimePoly(n, alpha, coeffs)


def _is_exact(v) -> bool:
    return isinstance(v, Rational)


def monic_eval(poly: MonicTimePoly, x, tau_raw):
    """Evaluate the table; exact when both arguments are rational.

    Floating arguments use :func:`monic_eval_float` (the recurrence), which
    avoids the cancellation of the alternating coefficient sum.
    """
    if _is_exact(x) and _is_exact(tau_raw):
        acc = Fraction(0)
        for k in range(poly.n, -1, -1):
            acc = acc * x + poly.coeffs[k] * Fraction(tau_raw) ** (poly.n - k)
        return acc
    return monic_eval_float(poly.n, poly.alpha, x, tau_raw)


def _recurrence_scaled(n, alpha, x, T):
    """(mantissa, log2 scale) of M^alpha_n(x, T) for complex x."""
    x = complex(x)
    m0 = 1.0 + 0.0j
    e = 0
    if n == 0:
        return m0, 0
    m1 = x - T * (alpha + 1)
    for k in range(1, n):
        m0, m1 = m1, (x - T * (2 * k + 1 + alpha)) * m1 - k * (k + alpha) * T * T * m0
        big = max(abs(m1), abs(m0))
        if big > 2.0 ** 500 or (0 < big < 2.0 ** -500):
            shift = math.frexp(big)[1]
            m0 = math.ldexp(1.0, -shift) * m0
            m1 = math.ldexp(1.0, -shift) * m1
            e += shift
    return m1, e


def monic_eval_float(n: int, alpha: int, x, tau_raw: float) -> complex:
    """M^alpha_n(x, T) in floating point via the recurrence."""
    m, e = _recurrence_scaled(n, alpha, x, float(tau_raw))
    return complex(math.ldexp(m.real, e), math.ldexp(m.imag, e)) if e else m


def monic_derivative(poly: MonicTimePoly, order: int = 1) -> list:
    """Coefficient list of d^order/dx^order M, exact, indexed by power of x."""
    c = list(poly.coeffs)
    for _ in range(order):
        c = [k * c[k] for k in range(1, len(c))] or [Fraction(0)]
    return c


def charpoly(N: int, conv, z, tau):
    """Averaged characteristic polynomial <det(z - L(tau))> = M^nu_N(z, r tau / N)."""
    if not tau > 0:
        raise DomainError("tau must be > 0")
    nu = int(conv.nu)
    if _is_exact(z) and _is_exact(tau):
        return monic_eval(monic_coeffs(N, nu), z, conv.r_exact * tau / N)
    return monic_eval_float(N, nu, z, float(conv.r) * tau / N)


def charpoly_roots(N: int, conv, tau: float) -> np.ndarray:
    """Roots of the averaged characteristic polynomial (Laguerre nodes scaled by T)."""
    if not tau > 0:
        raise DomainError("tau must be > 0")
    T = float(conv.r) * tau / N
    u, _ = roots_genlaguerre(N, int(conv.nu))
    return np.sort(u) * T


# --------------------------------------------------------------------------
# exact identities on the tables
# --------------------------------------------------------------------------


def meq_residual(N: int, conv, *, exact: bool = True):
    """Residual of dM/dtau + (r/N)[z M'' + (1 + nu) M'] on the bivariate table.

    With T = r tau / N the term c_k z^k T^(n-k) becomes c_k (r/N)^(n-k) z^k tau^(n-k).
    Returns an (N+1) x (N+1) table indexed [power of z][power of tau]: Fractions
    when ``exact`` (requires rational r), floats otherwise.
    """
    nu = int(conv.nu)
    if exact:
        r = conv.r_exact
        coeffs = monic_coeffs(N, nu).coeffs
        zero = Fraction(0)
    else:
        r = float(conv.r)
        coeffs = _float_table(N, nu)
        zero = 0.0
    s = r / N
    n = N
    # scaled coefficient of z^k tau^(n-k)
    a = [coeffs[k] * s ** (n - k) for k in range(n + 1)]
    res = [[zero] * (n + 1) for _ in range(n + 1)]
    for k in range(n + 1):
        j = n - k
        if j >= 1:
            res[k][j - 1] += j * a[k]
        if k >= 1:
            res[k - 1][j] += s * (k * (k - 1) + (1 + nu) * k) * a[k]
    if exact:
        return res
    return np.array(res, dtype=float)


def _float_table(n, alpha):
    # independent float construction: each coefficient from log-gamma, not from the exact table
    out = []
    for k in range(n + 1):
        logmag = (math.lgamma(n + 1) - math.lgamma(k + 1) + math.lgamma(n + alpha + 1)
                  - math.lgamma(n - k + 1) - math.lgamma(k + alpha + 1))
        out.append((-1) ** (n - k) * math.exp(logmag))
    return out


def meq_relative_residual(N: int, conv) -> float:
    """max |float residual| / max |scaled coefficient| for the float path."""
    res = meq_residual(N, conv, exact=False)
    nu = int(conv.nu)
    s = float(conv.r) / N
    c = _float_table(N, nu)
    # scale of each residual entry: the larger of the two contributing terms
    scale = 0.0
    for k in range(N + 1):
        term = abs(c[k]) * s ** (N - k)
        scale = max(scale, term * max(N - k, 1), term * s * (k * (k + nu)))
    return float(np.max(np.abs(res)) / scale)


def _poly_mul_x(c):
    return [Fraction(0)] + list(c)


def _poly_add(*polys):
    n = max(len(p) for p in polys)
    out = [Fraction(0)] * n
    for p in polys:
        for i, v in enumerate(p):
            out[i] += v
    return out


def _eval_table_in_T(poly: MonicTimePoly, T):
    """Coefficients in x of M(x, T) for a fixed rational T."""
    return [poly.coeffs[k] * Fraction(T) ** (poly.n - k) for k in range(poly.n + 1)]


def mrr_residual(n: int, alpha: int, T) -> list:
    """Monic form of the mixed-index Laguerre recurrence, exact in x at fixed T.

    From the Laguerre identity n L^a_n = (a + 1 - y) L^(a+1)_(n-1) - y L^(a+2)_(n-2), y = x/T,
    multiplying by (-T)^n (n-1)! gives

        M^a_n = (x - (a + 1) T) M^(a+1)_(n-1) - (n - 1) x T M^(a+2)_(n-2).

    Returns the exact coefficient list of the difference (all zeros when the identity holds).
    """
    if n < 2:
        raise DomainError("identity needs n >= 2")
    T = Fraction(T)
    lhs = _eval_table_in_T(monic_coeffs(n, alpha), T)
    m1 = _eval_table_in_T(monic_coeffs(n - 1, alpha + 1), T)
    m2 = _eval_table_in_T(monic_coeffs(n - 2, alpha + 2), T)
    t1 = _poly_add(_poly_mul_x(m1), [-(alpha + 1) * T * c for c in m1])
    t2 = [-(n - 1) * T * c for c in _poly_mul_x(m2)]
    rhs = _poly_add(t1, t2)
    return _poly_add(lhs, [-c for c in rhs])


def mdiff_residual(n: int, alpha: int, k: int = 1) -> list:
    """d^k/dx^k M^a_n - n!/(n-k)! M^(a+k)_(n-k), exact, on the T-homogeneous table."""
    if k > n:
        raise DomainError("k must not exceed n")
    d = monic_derivative(monic_coeffs(n, alpha), k)
    target = monic_coeffs(n - k, alpha + k).coeffs
    fac = math.factorial(n) // math.factorial(n - k)
    return [d[i] - fac * target[i] for i in range(len(target))]


def deltau_residual(n: int, alpha: int, T) -> list:
    """dM/dT - (n/T) M + (x/T) dM/dx in raw time, exact coefficients in x at fixed T."""
    T = Fraction(T)
    poly = monic_coeffs(n, alpha)
    c = poly.coeffs
    dT = [c[k] * (n - k) * T ** (n - k - 1) if n - k >= 1 else Fraction(0) for k in range(n + 1)]
    m = [c[k] * T ** (n - k) for k in range(n + 1)]
    xdm = [k * m[k] for k in range(n + 1)]
    return [dT[k] - n * m[k] / T + xdm[k] / T for k in range(n + 1)]


def gauss_laguerre_inner(n: int, m: int, alpha: int, tau: float, nodes: int | None = None) -> float:
    """int_0^inf e^(-x/tau) (x/tau)^alpha M_n M_m dx by Gauss-Laguerre in u = x / tau."""
    k = nodes or (n + m) // 2 + 8
    u, w = roots_genlaguerre(k, alpha)
    vals_n = np.array([monic_eval_float(n, alpha, tau * ui, tau).real for ui in u])
    vals_m = np.array([monic_eval_float(m, alpha, tau * ui, tau).real for ui in u])
    return float(tau * np.sum(w * vals_n * vals_m))


# --------------------------------------------------------------------------
# Cole-Hopf field f_N = (1/N) d/dz ln M^nu_N
# --------------------------------------------------------------------------


def _f_value(N, nu, r, z, tau):
    T = r * tau / N
    m, em = _recurrence_scaled(N, nu, z, T)
    d, ed = _recurrence_scaled(N - 1, nu + 1, z, T)
    if m == 0:
        raise PoleError(f"z = {z} is a root of the characteristic polynomial")
    ratio = d / m
    e = ed - em
    val = N * complex(math.ldexp(ratio.real, e), math.ldexp(ratio.imag, e)) if e else N * ratio
    if not (math.isfinite(val.real) and math.isfinite(val.imag)):
        raise PoleError(f"z = {z} is numerically at a root")
    return val / N


def cole_hopf(N: int, conv, z, tau: float) -> ColeHopfValue:
    """f_N = (1/N) M'/M with M' = N M^(nu+1)_(N-1) taken from the derivative identity."""
    if not tau > 0:
        raise DomainError("tau must be > 0")
    nu, r = _nu_r(conv)
    f = _f_value(N, nu, r, complex(z), float(tau))
    return ColeHopfValue(complex(z), float(tau), f, N)


def _f_analytic(N, nu, r, z, tau):
    """f, df/dtau, df/dz, d2f/dz2 from exact derivative and homogeneity identities."""
    T = r * tau / N
    z = complex(z)
    # u = M'/M and higher log-derivative pieces from M^(nu+k)_(N-k)
    vals = [monic_eval_float(N - k, nu + k, z, T) * math.perm(N, k) for k in range(min(N, 3) + 1)]
    vals += [0.0] * (4 - len(vals))
    M, M1, M2, M3 = vals
    if M == 0:
        raise PoleError("z is a root")
    u = M1 / M
    u1 = M2 / M - u * u
    u2 = M3 / M - 3 * u * M2 / M + 2 * u ** 3
    # dM/dT = (N/T) M - (z/T) M'  =>  du/dT = -(u + z u') / T
    du_dT = -(u + z * u1) / T
    f = u / N
    return f, du_dT * (r / N) / N, u1 / N, u2 / N


def f_pde_residual(N: int, conv, z, tau: float, h: float = 1e-4, *, drop_rhs: bool = False,
                   analytic: bool = False) -> float:
    """Residual of df/dtau + r(2 z f f' + f^2) + (1 - r) f' + (r/N)(2 f' + z f'').

    Central differences by default; ``analytic=True`` takes the derivatives from
    the polynomial identities instead.  ``drop_rhs`` omits the 1/N viscous term.
    """
    nu, r = _nu_r(conv)
    z = complex(z)
    if analytic:
        f, ft, fz, fzz = _f_analytic(N, nu, r, z, tau)
    else:
        if tau - h <= 0:
            raise DomainError("tau - h must stay positive")
        F = lambda zz, tt: _f_value(N, nu, r, zz, tt)
        f = F(z, tau)
        ft = (F(z, tau + h) - F(z, tau - h)) / (2 * h)
        fp, fm = F(z + h, tau), F(z - h, tau)
        fz = (fp - fm) / (2 * h)
        fzz = (fp - 2 * f + fm) / (h * h)
    lhs = ft + r * (2 * z * f * fz + f * f) + (1 - r) * fz
    rhs = 0.0 if drop_rhs else -(r / N) * (2 * fz + z * fzz)
    return abs(lhs - rhs)


# --------------------------------------------------------------------------
# Cauchy transform of the weighted polynomial
# --------------------------------------------------------------------------

READINGS = ("consistent", "as-written")
MAX_NODES = 2048


def _cauchy_scale(N, r, tau, reading):
    if reading == "consistent":
        return r * tau / N
    if reading == "as-written":
        return (N - 1) * tau / r
    raise ValueError(f"reading must be one of {READINGS}")


def _gl_sum(n, nu, T, tau, z, nodes):
    u, w = roots_genlaguerre(nodes, nu)
    x = T * u
    poly = np.array([monic_eval_float(n, nu, xi, T) for xi in x])
    # (x/tau)^nu e^(-x/T) dx = (T/tau)^nu T u^nu e^(-u) du
    return (T / tau) ** nu * T * np.sum(w * poly / (x - z)) / (2j * np.pi)


def cauchy_transform(Nm1: int, conv, z, tau: float, *, reading: str = "consistent",
                     rtol: float = 1e-10) -> complex:
    """p(z) = (1/2 pi i) int_0^inf M^nu_(N-1)(x, T) (x/tau)^nu e^(-x/T) / (x - z) dx.

    ``reading="consistent"`` uses T = r tau / N with N = Nm1 + 1, the time the
    characteristic polynomial itself uses.  ``"as-written"`` uses
    T = (N - 1) tau / r, i.e. the weight exp(-r x / ((N - 1) tau)) literally.
    Gauss-Laguerre with 2n + 16 nodes, doubled until two successive sums agree to ``rtol``.
    """
    if Nm1 < 1:
        raise DomainError("Nm1 must be >= 1")
    if not tau > 0:
        raise DomainError("tau must be > 0")
    z = complex(z)
    if abs(z.imag) < 1e-6 * tau and z.real >= 0:
        raise DomainError("z lies on the integration ray")
    nu, r = _nu_r(conv)
    N = Nm1 + 1
    T = _cauchy_scale(N, r, tau, reading)
    nodes = 2 * Nm1 + 16
    prev = _gl_sum(Nm1, nu, T, tau, z, nodes)
    while nodes < MAX_NODES:
        nodes *= 2
        cur = _gl_sum(Nm1, nu, T, tau, z, nodes)
        if abs(cur - prev) <= rtol * abs(cur):
            return complex(cur)
        prev = cur
    raise AccuracyError(f"Gauss-Laguerre refinement did not reach {rtol} by {MAX_NODES} nodes")


def _ptilde(Nm1, conv, z, tau, reading, prefactor):
    nu, r = _nu_r(conv)
    N = Nm1 + 1
    p = cauchy_transform(Nm1, conv, z, tau, reading=reading)
    if not prefactor:
        return p
    if reading == "consistent":
        expo = z * N / (r * tau)
    else:
        expo = r * z / (N * tau)
    return (tau / z) ** nu * np.exp(expo) * p


def cauchy_pde_residual(N: int, conv, z, tau: float, h: float = 1e-3, *, reading: str = "consistent",
                        prefactor: bool = True, relative: bool = False) -> float:
    """Residual of d p~/dtau + (r/N)[z p~'' + (1 + nu) p~'] by central differences.

    p~ = (tau/z)^nu exp(z/T) p with the exponent matching ``reading``
    (``N z / (r tau)`` for the consistent reading, ``r z / (N tau)`` as written).
    ``prefactor=False`` tests the bare transform p.  ``relative`` divides by
    |p~| + |d p~/dtau|.
    """
    z = complex(z)
    if z == 0:
        raise DomainError("z = 0 is excluded")
    if tau - h <= 0:
        raise DomainError("tau - h must stay positive")
    nu, r = _nu_r(conv)
    F = lambda zz, tt: _ptilde(N - 1, conv, zz, tt, reading, prefactor)
    f0 = F(z, tau)
    ft = (F(z, tau + h) - F(z, tau - h)) / (2 * h)
    fp, fm = F(z + h, tau), F(z - h, tau)
    fz = (fp - fm) / (2 * h)
    fzz = (fp - 2 * f0 + fm) / (h * h)
    res = abs(ft + (r / N) * (z * fzz + (1 + nu) * fz))
    if relative:
        return res / (abs(f0) + abs(ft))
    return res
