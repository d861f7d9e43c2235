"""Counter-based random streams keyed by (seed, site x, row y).

Every undetermined lattice site consumes exactly one uniform, obtained by
hashing its key with a splitmix64-style finalizer. The same keys drive the
particle dynamics (row y = t+1), which is what makes the lattice/particle
coupling pathwise exact and the output independent of evaluation order,
parallelism, and backend.
"""

import numpy as np

_MASK = (1 << 64) - 1
_P1 = 0x9E3779B97F4A7C15
_P2 = 0xC2B2AE3D27D4EB4F
_P3 = 0x165667B19E3779F9
_P4 = 0x27D4EB2F165667C5
_INV53 = 1.0 / (1 << 53)


def _mix_py(z):
    z &= _MASK
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _MASK
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK
    z ^= z >> 31
    return z


def site_hash(seed, x, y):
    """64-bit hash of the key (seed, x, y). Pure-python reference."""
    h = _mix_py((int(seed) + _P1) & _MASK)
    h = _mix_py(h ^ ((int(x) * _P2) & _MASK))
    h = _mix_py(h ^ ((int(y) * _P3) & _MASK))
    return h


def site_uniform(seed, x, y):
    """Uniform in [0,1) attached to lattice site (x, y) under this seed."""
    return (site_hash(seed, x, y) >> 11) * _INV53


def derive_seed(seed, index):
    """Sub-stream seed for an independent sample index."""
    return _mix_py(_mix_py((int(seed) + _P1) & _MASK) ^ ((int(index) * _P4) & _MASK))


def site_uniform_vec(seed, xs, y):
    """Vectorized site_uniform over an array of x at fixed row y."""
    h0 = np.uint64(_mix_py((int(seed) + _P1) & _MASK))
    hx = (xs.astype(np.uint64) * np.uint64(_P2)) ^ h0
    z = _mix_np(hx)
    z = _mix_np(z ^ np.uint64((int(y) * _P3) & _MASK))
    return (z >> np.uint64(11)).astype(np.float64) * _INV53


def _mix_np(z):
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(0xBF58476D1CE4E5B9)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(0x94D049BB133111EB)
    z = z ^ (z >> np.uint64(31))
    return z
