"""Kernel backend selection: numba JIT by default, pure numpy via STOVEX_NUMBA=0.

The hot Monte Carlo loops (lattice row sweeps, particle updates) exist in two
implementations that consume identical keyed random streams, so switching the
backend never changes sampled trajectories. Thread count for parallel numba
kernels honors --threads / STOVEX_THREADS.
"""

import os

_NUMBA_OK = False
if os.environ.get("STOVEX_NUMBA", "1") != "0":
    try:
        import numba  # noqa: F401

        _NUMBA_OK = True
    except ImportError:
        _NUMBA_OK = False

_active = "numba" if _NUMBA_OK else "numpy"


def active():
    """Name of the backend currently in use: 'numba' or 'numpy'."""
    return _active


def numba_available():
    return _NUMBA_OK


def use(name):
    """Force a backend ('numba' or 'numpy'). Mainly for benchmarks and tests."""
    global _active
    if name not in ("numba", "numpy"):
        raise ValueError("backend must be 'numba' or 'numpy'")
    if name == "numba" and not _NUMBA_OK:
        raise RuntimeError("numba backend requested but numba is unavailable")
    _active = name


def default_threads():
    env = os.environ.get("STOVEX_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def set_threads(n=None):
    """Configure numba's thread pool; no-op on the numpy backend."""
    n = default_threads() if n is None else max(1, int(n))
    if _NUMBA_OK:
        import numba

        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
    return n
