"""Counter-based uniform variates.

Every variate is a pure function of ``(key, sample index, draw index)``, so a
batch of samples can be split across any number of threads without changing
a single draw.  The mixing function is the SplitMix64 finaliser; a stream for
sample ``i`` is SplitMix64 seeded with ``mix64(key ^ i * ODD)``.

Compiled helpers are used inside the sampling kernels; :func:`stream_key`
and :func:`uniforms` are the Python-side entry points.
"""
from __future__ import annotations

import numba
import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_ODD = np.uint64(0xD1342543DE82EF95)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_INV53 = 1.0 / 9007199254740992.0

_MASK = (1 << 64) - 1


@numba.njit(cache=True, nogil=True)
def mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@numba.njit(cache=True, nogil=True)
def sample_key(key, i):
    return mix64(key ^ (np.uint64(i) * _ODD))


@numba.njit(cache=True, nogil=True)
def uniform(skey, k):
    """k-th variate of a sample stream, strictly inside (0, 1)."""
    z = mix64(skey + (np.uint64(k) + _ONE) * _GOLDEN)
    return (np.float64(z >> _S11) + 0.5) * _INV53


def _mix64_py(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def stream_key(seed: int, stream: int = 0) -> np.uint64:
    """Key for one independent stream of a master seed."""
    if seed < 0:
        raise ValueError("seed must be non-negative")
    z = _mix64_py(_mix64_py(seed) ^ ((stream + 1) * 0x9E3779B97F4A7C15))
    return np.uint64(z)


@numba.njit(cache=True, nogil=True)
def _fill(key, start, count, per_sample, out):
    for j in range(count):
        sk = sample_key(key, start + j)
        for k in range(per_sample):
            out[j, k] = uniform(sk, k)


def uniforms(key, start: int, count: int, per_sample: int = 1) -> np.ndarray:
    """``(count, per_sample)`` variates for samples ``start .. start+count-1``."""
    out = np.empty((count, per_sample))
    _fill(np.uint64(key), start, count, per_sample, out)
    return out
