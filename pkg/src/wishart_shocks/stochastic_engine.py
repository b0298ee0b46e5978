"""Matrix Brownian paths and eigenvalue / singular-value SDEs for the Wishart process.

Time convention
---------------
All public entry points take the scaled time ``tau``.  The physical time of the
entry-wise random walk is ``t = r * tau / (2 N) = tau / (2 M)``; with it,
``E[Tr L] / N = tau`` and the large-N spectrum fills ``[c_- tau, c_+ tau]``.
Each real and imaginary part of each entry of K gains variance ``dt`` per step.

Replica ``k`` draws its noise from the counter-based stream keyed by
``(seed, k, step)``, so batches are bitwise reproducible for any chunking or
worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numba as nb
import numpy as np

from .errors import InputDomainError, StepSizeError
from .linalg_core import Spectrum, wishart_spectra
from .rng import TAG_BURN_IN, TAG_EIGEN, TAG_MATRIX, TAG_SINGULAR, Stream, fill_normals

__all__ = [
    "TimeConvention",
    "EnsembleConfig",
    "SpectraBatch",
    "Histogram",
    "MAX_HALVINGS",
    "step_matrix_brownian",
    "step_eigenvalue_sde",
    "step_singvalue_sde",
    "sample_spectra",
    "empirical_density",
    "worker_count",
]

BETA = 2
MAX_HALVINGS = 20
MODES = ("matrix-path", "eigen-sde", "singval-sde")
# keeps one chunk of matrix paths around 64 MB
_CHUNK_ENTRIES = 1 << 22


@dataclass(frozen=True)
class TimeConvention:
    """Matrix shape (M x N, N <= M) and the derived r = N/M, nu = M - N."""

    N: int
    M: int
    beta: int = BETA

    def __post_init__(self):
        if self.N < 1 or self.M < self.N:
            raise InputDomainError(f"need 1 <= N <= M, got N={self.N}, M={self.M}")
        if self.beta != BETA:
            raise InputDomainError("only the complex (beta=2) process is implemented")

    @classmethod
    def from_ratio(cls, N: int, r) -> "TimeConvention":
        M = Fraction(N) / Fraction(r)
        if M.denominator != 1:
            raise InputDomainError(f"N / r = {M} is not an integer")
        return cls(N, int(M))

    @property
    def r_exact(self) -> Fraction:
        return Fraction(self.N, self.M)

    @property
    def r(self) -> float:
        return self.N / self.M

    @property
    def nu(self) -> int:
        return self.M - self.N

    def t_of_tau(self, tau: float) -> float:
        """Physical entry-diffusion time for scaled time ``tau``."""
        return tau / (2.0 * self.M)

    def tau_of_t(self, t: float) -> float:
        return 2.0 * self.M * t


@dataclass(frozen=True)
class EnsembleConfig:
    conv: TimeConvention
    tau_final: float
    dt_phys: float
    replicas: int = 1
    seed: int = 0
    burn_in_steps: int = 10

    def __post_init__(self):
        if not self.tau_final > 0:
            raise InputDomainError("tau_final must be > 0")
        if not self.dt_phys > 0:
            raise InputDomainError("dt_phys must be > 0")
        if self.dt_phys > self.t_final * (1 + 1e-12):
            raise InputDomainError("dt_phys exceeds the physical time span")
        if self.replicas < 1:
            raise InputDomainError("replicas must be >= 1")
        if self.burn_in_steps < 1:
            raise InputDomainError("burn_in_steps must be >= 1")

    @property
    def t_final(self) -> float:
        return self.conv.t_of_tau(self.tau_final)

    @property
    def burn_in_time(self) -> float:
        return self.burn_in_steps * self.dt_phys


@dataclass
class SpectraBatch:
    """Eigenvalues of every replica at ``tau`` (one ascending row per replica)."""

    values: np.ndarray
    tau: float
    config: EnsembleConfig | None = None
    mode: str = "matrix-path"

    @property
    def spectra(self) -> list[Spectrum]:
        return [Spectrum(row, self.tau) for row in self.values]

    def __len__(self):
        return self.values.shape[0]

    def moments(self, kmax: int = 4):
        """Per-replica moments Tr L^k / N for k = 1..kmax, shape (replicas, kmax)."""
        powers = np.arange(1, kmax + 1)
        return np.mean(self.values[:, :, None] ** powers, axis=1)


@dataclass
class Histogram:
    """Pooled eigenvalue histogram; counts merge by addition."""

    bin_edges: np.ndarray
    counts: np.ndarray = field(repr=False)

    @property
    def masses(self) -> np.ndarray:
        total = self.counts.sum()
        if total == 0:
            return np.zeros(self.counts.shape, dtype=float)
        return self.counts / total

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.bin_edges)

    def merge(self, other: "Histogram") -> "Histogram":
        if not np.array_equal(self.bin_edges, other.bin_edges):
            raise InputDomainError("cannot merge histograms with different bins")
        return Histogram(self.bin_edges, self.counts + other.counts)


def worker_count(workers: int | None = None) -> int:
    """Resolve a worker count; ``None`` reads ``WISHART_THREADS`` (0 = all cores)."""
    if workers is None:
        workers = int(os.environ.get("WISHART_THREADS", "0") or 0)
    if workers <= 0:
        workers = os.cpu_count() or 1
    return workers


# --------------------------------------------------------------------------
# matrix path
# --------------------------------------------------------------------------


def step_matrix_brownian(K, dt_phys: float, stream: Stream, step: int = 0, tag: int = TAG_MATRIX):
    """One Brownian increment of every entry: Re and Im each gain N(0, dt_phys).

    ``K`` is (M, N) for a scalar stream or (B, M, N) for a stream of B replicas.
    """
    if dt_phys < 0:
        raise InputDomainError("dt_phys must be >= 0")
    K = np.asarray(K, dtype=np.complex128)
    if dt_phys == 0:
        return K.copy()
    m, n = K.shape[-2:]
    z = stream.normals(step, 2 * m * n, tag=tag)
    z = z.reshape(K.shape + (2,))
    return K + math.sqrt(dt_phys) * (z[..., 0] + 1j * z[..., 1])


def _evolve_matrix(stream: Stream, m: int, n: int, t_total: float, dt: float, tag: int):
    K = np.zeros((len(stream), m, n), dtype=np.complex128)
    nsteps = max(1, math.ceil(t_total / dt - 1e-9))
    for s in range(nsteps):
        h = min((s + 1) * dt, t_total) - s * dt
        if h > 0:
            K = step_matrix_brownian(K, h, stream, s, tag)
    return K


# --------------------------------------------------------------------------
# eigenvalue and singular-value SDEs (numba)
# --------------------------------------------------------------------------

_KIND_EIGEN = 0
_KIND_SINGULAR = 1


@nb.njit(cache=True, nogil=True)
def _drift(x, kind, nu, beta, out):
    n = x.shape[0]
    for i in range(n):
        acc = 0.0
        xi = x[i]
        for j in range(n):
            if j != i:
                if kind == 0:
                    acc += 1.0 / (xi - x[j])
                else:
                    acc += 1.0 / (xi - x[j]) + 1.0 / (xi + x[j])
        if kind == 0:
            out[i] = beta * (nu + 1.0 + 2.0 * xi * acc)
        else:
            out[i] = 0.5 * beta * ((nu + 1.0 - 1.0 / beta) / xi + acc)


@nb.njit(cache=True, nogil=True)
def _try_step(x, dt, dB, kind, nu, beta, drift, prop):
    """Euler-Maruyama proposal; False if it breaks positivity or ordering."""
    n = x.shape[0]
    _drift(x, kind, nu, beta, drift)
    for i in range(n):
        if kind == 0:
            prop[i] = x[i] + drift[i] * dt + 2.0 * math.sqrt(x[i]) * dB[i]
        else:
            prop[i] = x[i] + drift[i] * dt + dB[i]
        if not prop[i] > 0.0:
            return False
        if i > 0 and not prop[i] > prop[i - 1]:
            return False
    return True


@nb.njit(cache=True, nogil=True)
def _advance(x, dt, dB, kind, nu, beta, k0, k1, replica, step, tag, max_halvings, work):
    """Advance x over dt given the Brownian increment dB, halving on rejection.

    Depth-first over the bisection tree: the increment of a rejected interval
    is split by a Brownian bridge whose draw is keyed by the node's heap index.
    Returns the deepest halving level used, or -1 when max_halvings is exhausted.
    ``work`` is scratch space of shape (max_halvings + 6, n).
    """
    n = x.shape[0]
    drift = work[0]
    prop = work[1]
    xi = work[2]
    inc = work[3]
    db_stack = work[4:]
    cap = max_halvings + 2
    node_stack = np.empty(cap, dtype=np.int64)
    depth_stack = np.empty(cap, dtype=np.int64)
    top = 0
    node_stack[0] = 1
    depth_stack[0] = 0
    db_stack[0, :] = dB
    deepest = 0
    while top >= 0:
        node = node_stack[top]
        depth = depth_stack[top]
        inc[:] = db_stack[top]
        top -= 1
        h = dt / (2.0 ** depth)
        if _try_step(x, h, inc, kind, nu, beta, drift, prop):
            x[:] = prop
            continue
        if depth >= max_halvings:
            return -1
        if depth + 1 > deepest:
            deepest = depth + 1
        fill_normals(k0, k1, replica, step, (tag << 24) | node, xi)
        half = math.sqrt(h) * 0.5
        # right child first so the left half is processed next
        top += 1
        node_stack[top] = 2 * node + 1
        depth_stack[top] = depth + 1
        for i in range(n):
            db_stack[top, i] = 0.5 * inc[i] - half * xi[i]
        top += 1
        node_stack[top] = 2 * node
        depth_stack[top] = depth + 1
        for i in range(n):
            db_stack[top, i] = 0.5 * inc[i] + half * xi[i]
    return deepest


@nb.njit(cache=True, nogil=True)
def _integrate(X, replicas, dts, step0, kind, nu, beta, k0, k1, tag, max_halvings):
    """Integrate each row of X over the step sizes ``dts``; in place.

    Returns, per replica, 0 on success or (failing step index + 1).
    """
    nrep, n = X.shape
    status = np.zeros(nrep, dtype=np.int64)
    xi = np.empty(n)
    dB = np.empty(n)
    drift = np.empty(n)
    prop = np.empty(n)
    work = np.empty((max_halvings + 6, n))
    for r in range(nrep):
        x = X[r]
        for s in range(dts.shape[0]):
            h = dts[s]
            if h == 0.0:
                continue
            step = step0 + s
            fill_normals(k0, k1, replicas[r], step, tag << 24, xi)
            sq = math.sqrt(h)
            for i in range(n):
                dB[i] = sq * xi[i]
            if _try_step(x, h, dB, kind, nu, beta, drift, prop):
                x[:] = prop
                continue
            if _advance(x, h, dB, kind, nu, beta, k0, k1, replicas[r], step, tag, max_halvings, work) < 0:
                status[r] = s + 1
                break
    return status


def _check_state(x, kind):
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x <= 0):
        name = "eigenvalues" if kind == _KIND_EIGEN else "singular values"
        raise InputDomainError(f"{name} must be finite and > 0")
    if x.shape[-1] > 1 and np.any(np.diff(x, axis=-1) <= 0):
        raise InputDomainError("state must be strictly ascending (distinct)")
    return x


def _sde_steps(x, dts, conv, stream, step0, kind, tag, max_halvings):
    batch = np.array(np.atleast_2d(x), dtype=float, order="C", copy=True)
    if batch.shape[0] != len(stream):
        raise InputDomainError("state rows and stream replicas differ")
    k0, k1 = stream.key
    status = _integrate(
        batch, stream.replicas, np.asarray(dts, dtype=float), int(step0), kind,
        float(conv.nu), float(conv.beta), k0, k1, int(tag), int(max_halvings),
    )
    bad = np.flatnonzero(status)
    if bad.size:
        r = int(stream.replicas[bad[0]])
        s = int(step0 + status[bad[0]] - 1)
        raise StepSizeError(
            f"replica {r}, step {s}: rejected after {max_halvings} halvings; dt_phys too coarse"
        )
    return batch


def _single_step(x, dt_phys, conv, stream, step, kind, tag, max_halvings):
    if dt_phys < 0:
        raise InputDomainError("dt_phys must be >= 0")
    x = _check_state(x, kind)
    if dt_phys == 0:
        return x.copy()
    out = _sde_steps(x, [dt_phys], conv, stream, step, kind, tag, max_halvings)
    return out[0] if x.ndim == 1 else out


def step_eigenvalue_sde(lam, dt_phys: float, conv: TimeConvention, stream: Stream, step: int = 0,
                        *, max_halvings: int = MAX_HALVINGS):
    """Euler-Maruyama step of the eigenvalue SDE (physical time).

    d lam_i = 2 sqrt(lam_i) dB_i + beta (nu + 1 + 2 lam_i sum_j 1/(lam_i - lam_j)) dt

    A proposal that leaves the positive axis or reorders the walkers is
    rejected; the interval is bisected (Brownian bridge) down to at most
    ``max_halvings`` levels before :class:`StepSizeError` is raised.
    """
    return _single_step(lam, dt_phys, conv, stream, step, _KIND_EIGEN, TAG_EIGEN, max_halvings)


def step_singvalue_sde(kap, dt_phys: float, conv: TimeConvention, stream: Stream, step: int = 0,
                       *, max_halvings: int = MAX_HALVINGS):
    """Same as :func:`step_eigenvalue_sde` for the singular values (unit noise).

    d kap_i = dB_i + (beta/2) [(nu + 1 - 1/beta)/kap_i + sum_j (1/(kap_i - kap_j) + 1/(kap_i + kap_j))] dt
    """
    return _single_step(kap, dt_phys, conv, stream, step, _KIND_SINGULAR, TAG_SINGULAR, max_halvings)


# --------------------------------------------------------------------------
# ensembles
# --------------------------------------------------------------------------


def _step_sizes(t_start: float, t_end: float, dt: float) -> np.ndarray:
    nsteps = max(1, math.ceil((t_end - t_start) / dt - 1e-9))
    grid = t_start + dt * np.arange(nsteps + 1)
    grid[-1] = t_end
    return np.diff(grid)


def _run_chunk(cfg: EnsembleConfig, mode: str, replicas: np.ndarray) -> np.ndarray:
    conv = cfg.conv
    stream = Stream(cfg.seed, replicas)
    if mode == "matrix-path":
        K = _evolve_matrix(stream, conv.M, conv.N, cfg.t_final, cfg.dt_phys, TAG_MATRIX)
        return wishart_spectra(K)
    t0 = cfg.burn_in_time
    if t0 >= cfg.t_final:
        raise InputDomainError("burn-in time reaches tau_final; lower dt_phys or burn_in_steps")
    K = _evolve_matrix(stream, conv.M, conv.N, t0, cfg.dt_phys, TAG_BURN_IN)
    lam = wishart_spectra(K)
    if np.any(lam <= 0) or (conv.N > 1 and np.any(np.diff(lam, axis=1) <= 0)):
        raise InputDomainError("burn-in produced a degenerate spectrum; increase burn_in_steps")
    dts = _step_sizes(t0, cfg.t_final, cfg.dt_phys)
    if mode == "eigen-sde":
        return _sde_steps(lam, dts, conv, stream, 0, _KIND_EIGEN, TAG_EIGEN, MAX_HALVINGS)
    kap = _sde_steps(np.sqrt(lam), dts, conv, stream, 0, _KIND_SINGULAR, TAG_SINGULAR, MAX_HALVINGS)
    return kap * kap


def _chunks(n: int, pieces: int):
    bounds = np.linspace(0, n, pieces + 1).astype(int)
    return [np.arange(a, b, dtype=np.int64) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def sample_spectra(cfg: EnsembleConfig, mode: str = "matrix-path", *, workers: int | None = None) -> SpectraBatch:
    """Spectra of ``cfg.replicas`` independent Wishart paths at ``cfg.tau_final``.

    ``mode`` is ``"matrix-path"`` (evolve K from 0 and diagonalize),
    ``"eigen-sde"`` or ``"singval-sde"`` (short matrix burn-in of
    ``cfg.burn_in_steps`` steps, then integrate the SDE).
    """
    if mode not in MODES:
        raise InputDomainError(f"unknown mode {mode!r}; expected one of {MODES}")
    w = worker_count(workers)
    per_replica = cfg.conv.M * cfg.conv.N
    pieces = max(w, math.ceil(cfg.replicas * per_replica / _CHUNK_ENTRIES))
    pieces = min(pieces, cfg.replicas)
    chunks = _chunks(cfg.replicas, pieces)
    if w == 1 or len(chunks) == 1:
        parts = [_run_chunk(cfg, mode, c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=w) as pool:
            parts = list(pool.map(lambda c: _run_chunk(cfg, mode, c), chunks))
    values = np.concatenate(parts, axis=0)
    return SpectraBatch(values, cfg.tau_final, cfg, mode)


def empirical_density(batch, bins: int, range: tuple[float, float] | None = None) -> Histogram:
    """Pooled eigenvalue histogram, mass-normalized to 1.

    ``batch`` may be a :class:`SpectraBatch`, a list of :class:`Spectrum` or
    an array of eigenvalues.  The default range is ``[0, 1.05 max lambda]``;
    eigenvalues outside an explicit range are dropped before normalizing.
    """
    if isinstance(batch, SpectraBatch):
        vals = batch.values.ravel()
    elif isinstance(batch, Spectrum):
        vals = batch.values
    elif isinstance(batch, (list, tuple)) and batch and isinstance(batch[0], Spectrum):
        vals = np.concatenate([s.values for s in batch])
    else:
        vals = np.asarray(batch, dtype=float).ravel()
    if vals.size == 0:
        raise InputDomainError("empty batch")
    if bins < 1:
        raise InputDomainError("bins must be >= 1")
    if range is None:
        top = 1.05 * float(vals.max())
        range = (0.0, top if top > 0 else 1.0)
    counts, edges = np.histogram(vals, bins=bins, range=range)
    if counts.sum() == 0:
        raise InputDomainError("no eigenvalues fall inside the histogram range")
    return Histogram(edges, counts.astype(np.int64))
