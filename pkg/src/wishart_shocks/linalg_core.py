"""Dense complex linear algebra: one-sided Jacobi SVD and Wishart spectra.

Everything downstream only needs singular values of the M x N matrix K, so
the default path is values-only: a Householder QR reduces K to its N x N
triangular factor and Hestenes (one-sided) Jacobi rotations orthogonalize
the columns of that factor.  Column data is stored transposed (one column per
row) so the inner loops run over contiguous memory.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba as nb
import numpy as np

from .errors import InputDomainError

__all__ = [
    "Spectrum",
    "as_rect_matrix",
    "svd",
    "svd_singular_values",
    "batch_singular_values",
    "wishart_spectrum",
    "wishart_spectra",
    "characteristic_value",
]

ROTATION_SINE_TOL = 1e-14
SKIP_TOL = 1e-15
MAX_SWEEPS = 30


@dataclass(frozen=True)
class Spectrum:
    """Sorted eigenvalues of L = K^H K at scaled time ``time_tau``."""

    values: np.ndarray
    time_tau: float = 0.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1:
            raise InputDomainError("spectrum values must be a 1-d array")
        if vals.size > 1 and np.any(np.diff(vals) < 0):
            raise InputDomainError("spectrum values must be sorted ascending")
        if np.any(vals < 0):
            raise InputDomainError("Wishart eigenvalues are nonnegative")
        if self.time_tau < 0:
            raise InputDomainError("time_tau must be >= 0")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return self.values.size

    @property
    def n(self) -> int:
        return self.values.size


def as_rect_matrix(a, *, batch: bool = False) -> np.ndarray:
    """Validate and coerce to a complex128 matrix (or stack when ``batch``)."""
    arr = np.asarray(a)
    want = 3 if batch else 2
    if arr.ndim != want:
        raise InputDomainError(f"expected a {want}-d array, got shape {arr.shape}")
    if arr.shape[-1] < 1 or arr.shape[-2] < 1:
        raise InputDomainError("matrix dimensions must be >= 1")
    arr = arr.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(arr)):
        raise InputDomainError("matrix has non-finite entries")
    return arr


# --------------------------------------------------------------------------
# numba kernels; X holds the matrix columns as rows: X[j, :] is column j
# --------------------------------------------------------------------------


@nb.njit(cache=True, nogil=True)
def _column_norms(X, d):
    n, m = X.shape
    for j in range(n):
        acc = 0.0
        for i in range(m):
            v = X[j, i]
            acc += v.real * v.real + v.imag * v.imag
        d[j] = acc


@nb.njit(cache=True, nogil=True)
def _householder_r(X):
    """In-place Householder QR of the matrix whose columns are the rows of X.

    Returns the n x n triangular factor, again stored column-per-row.
    """
    n, m = X.shape
    for k in range(n):
        nrm2 = 0.0
        for i in range(k, m):
            v = X[k, i]
            nrm2 += v.real * v.real + v.imag * v.imag
        if nrm2 == 0.0:
            continue
        nrm = np.sqrt(nrm2)
        x0 = X[k, k]
        ax0 = abs(x0)
        phase = x0 / ax0 if ax0 > 0.0 else 1.0 + 0.0j
        alpha = -phase * nrm
        # v = x - alpha e1, stored in place of column k
        X[k, k] = x0 - alpha
        vnorm2 = nrm2 - (x0.real * x0.real + x0.imag * x0.imag) + abs(X[k, k]) ** 2
        if vnorm2 == 0.0:
            X[k, k] = alpha
            continue
        for j in range(k + 1, n):
            dot = 0.0 + 0.0j
            for i in range(k, m):
                dot += X[k, i].conjugate() * X[j, i]
            f = 2.0 * dot / vnorm2
            for i in range(k, m):
                X[j, i] -= f * X[k, i]
        X[k, k] = alpha
        for i in range(k + 1, m):
            X[k, i] = 0.0
    R = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        for i in range(j + 1):
            R[j, i] = X[j, i]
    return R


@nb.njit(cache=True, nogil=True)
def _jacobi(X, V, want_v, max_sweeps):
    """Hestenes sweeps over all column pairs; returns squared column norms."""
    n, m = X.shape
    d = np.empty(n)
    _column_norms(X, d)
    sweeps = 0
    for sweep in range(max_sweeps):
        sweeps = sweep + 1
        active = 0
        for p in range(n - 1):
            for q in range(p + 1, n):
                app = d[p]
                aqq = d[q]
                if app == 0.0 or aqq == 0.0:
                    continue
                gr = 0.0
                gi = 0.0
                for i in range(m):
                    x = X[p, i]
                    y = X[q, i]
                    gr += x.real * y.real + x.imag * y.imag
                    gi += x.real * y.imag - x.imag * y.real
                ag = np.hypot(gr, gi)
                if ag <= SKIP_TOL * np.sqrt(app * aqq):
                    continue
                zeta = (aqq - app) / (2.0 * ag)
                sgn = 1.0 if zeta >= 0.0 else -1.0
                t = sgn / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                if abs(s) >= ROTATION_SINE_TOL:
                    active += 1
                ph = complex(gr / ag, -gi / ag)
                for i in range(m):
                    x = X[p, i]
                    y = X[q, i] * ph
                    X[p, i] = c * x - s * y
                    X[q, i] = s * x + c * y
                if want_v:
                    for i in range(n):
                        x = V[p, i]
                        y = V[q, i] * ph
                        V[p, i] = c * x - s * y
                        V[q, i] = s * x + c * y
                d[p] = app - t * ag
                d[q] = aqq + t * ag
        _column_norms(X, d)
        if active == 0:
            break
    return d, sweeps


@nb.njit(cache=True, nogil=True)
def _values_one(Xt, max_sweeps):
    n, m = Xt.shape
    if m > n:
        R = _householder_r(Xt)
    else:
        R = Xt
    V = np.empty((1, 1), dtype=np.complex128)
    d, _ = _jacobi(R, V, False, max_sweeps)
    out = np.sqrt(d)
    out.sort()
    return out[::-1].copy()


@nb.njit(cache=True, nogil=True)
def _values_batch(Xt, max_sweeps):
    b, n, m = Xt.shape
    out = np.empty((b, n))
    for k in range(b):
        out[k] = _values_one(Xt[k], max_sweeps)
    return out


def _columns_as_rows(a: np.ndarray) -> np.ndarray:
    # always a private copy: the kernels work in place
    return np.array(np.swapaxes(a, -1, -2), dtype=np.complex128, order="C", copy=True)


def svd_singular_values(a, *, max_sweeps: int = MAX_SWEEPS) -> np.ndarray:
    """Singular values of a complex matrix, descending.

    Wide matrices are transposed first (same singular values).

    Examples
    --------
    >>> svd_singular_values([[3, 0], [0, 4], [0, 0]])
    array([4., 3.])
    """
    arr = as_rect_matrix(a)
    if arr.shape[0] < arr.shape[1]:
        arr = arr.T
    return _values_one(_columns_as_rows(arr), max_sweeps)


def batch_singular_values(a, *, max_sweeps: int = MAX_SWEEPS) -> np.ndarray:
    """Row-wise descending singular values for a stack of shape (B, M, N).

    Each matrix is processed independently, so the result for one matrix
    never depends on which other matrices share the batch.
    """
    arr = as_rect_matrix(a, batch=True)
    if arr.shape[1] < arr.shape[2]:
        arr = np.swapaxes(arr, 1, 2)
    return _values_batch(_columns_as_rows(arr), max_sweeps)


def svd(a, *, max_sweeps: int = MAX_SWEEPS):
    """Thin SVD ``a = U @ diag(s) @ Vh`` by one-sided Jacobi with V accumulated.

    Slower than :func:`svd_singular_values` (no QR preconditioning); meant for
    reconstruction checks on small matrices.
    """
    arr = as_rect_matrix(a)
    wide = arr.shape[0] < arr.shape[1]
    if wide:
        arr = arr.conj().T
    m, n = arr.shape
    X = _columns_as_rows(arr)
    V = np.eye(n, dtype=np.complex128)
    d, _ = _jacobi(X, V, True, max_sweeps)
    s = np.sqrt(d)
    order = np.argsort(-s, kind="stable")
    s = s[order]
    cols = X[order]
    with np.errstate(invalid="ignore", divide="ignore"):
        U = np.where(s[:, None] > 0, cols / np.where(s > 0, s, 1.0)[:, None], 0.0).T
    Vh = V[order].conj()
    if wide:
        return Vh.conj().T, s, U.conj().T
    return U, s, Vh


def wishart_spectrum(k, tau: float = 0.0) -> Spectrum:
    """Eigenvalues of K^H K (squared singular values), ascending."""
    arr = as_rect_matrix(k)
    if arr.shape[1] > arr.shape[0]:
        raise InputDomainError("K must be M x N with N <= M")
    sv = svd_singular_values(arr)
    return Spectrum(np.ascontiguousarray((sv * sv)[::-1]), float(tau))


def wishart_spectra(k_batch) -> np.ndarray:
    """Ascending eigenvalues of K^H K for each matrix in a (B, M, N) stack."""
    arr = as_rect_matrix(k_batch, batch=True)
    if arr.shape[2] > arr.shape[1]:
        raise InputDomainError("K must be M x N with N <= M")
    sv = batch_singular_values(arr)
    return np.ascontiguousarray((sv * sv)[:, ::-1])


def characteristic_value(z, s) -> complex:
    """det(z - L) = prod_i (z - lambda_i) for one spectrum."""
    vals = s.values if isinstance(s, Spectrum) else np.asarray(s, dtype=float)
    return complex(np.prod(z - vals))
