"""Counter-based random streams (Philox4x32-10) with Box-Muller normals.

Every Gaussian is a pure function of ``(seed, replica, step, tag, node, lane)``,
so a replica produces the same numbers whether it runs alone, in a batch, or
on any worker.  One Philox block of four 32-bit words yields two uniforms
(53 bits each) and hence two normals.

Counter layout: ``ctr = (lane, step, replica, tag << 24 | node)`` and
``key = (seed & 0xffffffff, seed >> 32)``.  ``node`` is 0 for the ordinary
per-step draw; when an SDE step is subdivided, the Brownian-bridge draw that
splits heap node ``k`` (root 1, children 2k and 2k+1) uses ``node = k``.
It must stay below ``2**24``.
"""

from __future__ import annotations

import math

import numba as nb
import numpy as np

__all__ = [
    "PHILOX_M0",
    "PHILOX_M1",
    "PHILOX_W0",
    "PHILOX_W1",
    "philox4x32",
    "fill_normals",
    "word3",
    "Stream",
    "TAG_MATRIX",
    "TAG_BURN_IN",
    "TAG_EIGEN",
    "TAG_SINGULAR",
]

PHILOX_M0 = 0xD2511F53
PHILOX_M1 = 0xCD9E8D57
PHILOX_W0 = 0x9E3779B9
PHILOX_W1 = 0xBB67AE85
MASK32 = 0xFFFFFFFF

TAG_MATRIX = 1
TAG_BURN_IN = 2
TAG_EIGEN = 3
TAG_SINGULAR = 4

_TWO_PI = 2.0 * math.pi
_INV_2_53 = 1.0 / 9007199254740992.0


@nb.njit(cache=True, nogil=True, inline="always")
def _philox_block(c0, c1, c2, c3, k0, k1):
    for _ in range(10):
        p0 = np.uint64(PHILOX_M0) * c0
        p1 = np.uint64(PHILOX_M1) * c2
        hi0 = p0 >> np.uint64(32)
        lo0 = p0 & np.uint64(MASK32)
        hi1 = p1 >> np.uint64(32)
        lo1 = p1 & np.uint64(MASK32)
        c0 = hi1 ^ c1 ^ k0
        c1 = lo1
        c2 = hi0 ^ c3 ^ k1
        c3 = lo0
        k0 = (k0 + np.uint64(PHILOX_W0)) & np.uint64(MASK32)
        k1 = (k1 + np.uint64(PHILOX_W1)) & np.uint64(MASK32)
    return c0, c1, c2, c3


@nb.njit(cache=True, nogil=True)
def _philox_many(ctr, key):
    n = ctr.shape[0]
    out = np.empty((n, 4), dtype=np.uint64)
    k0 = np.uint64(key[0])
    k1 = np.uint64(key[1])
    for i in range(n):
        a, b, c, d = _philox_block(ctr[i, 0], ctr[i, 1], ctr[i, 2], ctr[i, 3], k0, k1)
        out[i, 0] = a
        out[i, 1] = b
        out[i, 2] = c
        out[i, 3] = d
    return out


def philox4x32(counter, key) -> np.ndarray:
    """Philox4x32-10 bijection on an array of 4-word counters.

    ``counter`` has shape (..., 4), ``key`` shape (2,); values are taken modulo 2**32.
    """
    ctr = np.asarray(counter, dtype=np.uint64) & np.uint64(MASK32)
    shape = ctr.shape
    flat = np.ascontiguousarray(ctr.reshape(-1, 4))
    k = np.asarray(key, dtype=np.uint64) & np.uint64(MASK32)
    return _philox_many(flat, k).reshape(shape)


@nb.njit(cache=True, nogil=True)
def fill_normals(k0, k1, replica, step, word3, out):
    """Write ``out.size`` normals for one (replica, step, word3) counter family."""
    count = out.shape[0]
    nblocks = (count + 1) // 2
    c1 = np.uint64(step) & np.uint64(MASK32)
    c2 = np.uint64(replica) & np.uint64(MASK32)
    c3 = np.uint64(word3) & np.uint64(MASK32)
    for b in range(nblocks):
        x0, x1, x2, x3 = _philox_block(np.uint64(b), c1, c2, c3, k0, k1)
        u1 = ((x0 >> np.uint64(5)) * np.uint64(67108864) + (x1 >> np.uint64(6))) * _INV_2_53
        u2 = ((x2 >> np.uint64(5)) * np.uint64(67108864) + (x3 >> np.uint64(6))) * _INV_2_53
        rad = math.sqrt(-2.0 * math.log(1.0 - u1))
        ang = _TWO_PI * u2
        out[2 * b] = rad * math.cos(ang)
        if 2 * b + 1 < count:
            out[2 * b + 1] = rad * math.sin(ang)


@nb.njit(cache=True, nogil=True)
def _normals(k0, k1, replicas, step, word3, count):
    nrep = replicas.shape[0]
    out = np.empty((nrep, count))
    for r in range(nrep):
        fill_normals(k0, k1, replicas[r], step, word3, out[r])
    return out


def word3(tag: int, node: int) -> int:
    """Fourth counter word: 8-bit stream tag above a 24-bit node index."""
    if not 0 <= node < 2**24:
        raise ValueError("node index out of range")
    return ((int(tag) & 0xFF) << 24) | int(node)


class Stream:
    """Deterministic Gaussian source for one replica or an array of replicas.

    >>> s = Stream(seed=7, replica=[0, 1])
    >>> s.normals(step=0, count=3).shape
    (2, 3)
    """

    def __init__(self, seed: int, replica=0):
        seed = int(seed)
        if seed < 0 or seed >= 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.seed = seed
        self.scalar = np.ndim(replica) == 0
        self.replicas = np.atleast_1d(np.asarray(replica, dtype=np.int64))
        if np.any(self.replicas < 0) or np.any(self.replicas >= 2**32):
            raise ValueError("replica index must fit in 32 bits")
        self._k0 = np.uint64(seed & MASK32)
        self._k1 = np.uint64(seed >> 32)

    @property
    def key(self):
        return self._k0, self._k1

    def __len__(self):
        return self.replicas.size

    def subset(self, index) -> "Stream":
        """Stream restricted to some of this stream's replicas."""
        return Stream(self.seed, self.replicas[index])

    def normals(self, step: int, count: int, tag: int = 0, node: int = 0) -> np.ndarray:
        """Standard normals for ``step``; shape (count,) for a scalar replica."""
        out = _normals(self._k0, self._k1, self.replicas, int(step), word3(tag, node), int(count))
        return out[0] if self.scalar else out
