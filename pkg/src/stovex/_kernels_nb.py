"""numba-compiled hot kernels: lattice row sweeps and particle updates.

Mirrors _kernels_np exactly; both consume the keyed per-site uniforms of
rng.py, so trajectories are bit-identical across backends.
"""

import numpy as np
from numba import njit, prange

U64 = np.uint64
_P1 = U64(0x9E3779B97F4A7C15)
_P2 = U64(0xC2B2AE3D27D4EB4F)
_P3 = U64(0x165667B19E3779F9)
_P4 = U64(0x27D4EB2F165667C5)
_M1 = U64(0xBF58476D1CE4E5B9)
_M2 = U64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0
_FREE_CAP = np.int64(1) << np.int64(60)


@njit(cache=True)
def _mix(z):
    z = z ^ (z >> U64(30))
    z = z * _M1
    z = z ^ (z >> U64(27))
    z = z * _M2
    z = z ^ (z >> U64(31))
    return z


@njit(cache=True)
def _site_u(seed, x, y):
    h = _mix(seed + _P1)
    h = _mix(h ^ (U64(x) * _P2))
    h = _mix(h ^ (U64(y) * _P3))
    return (h >> U64(11)) * _INV53


@njit(cache=True)
def _derive_seed(seed, index):
    return _mix(_mix(seed + _P1) ^ (U64(index) * _P4))


@njit(cache=True)
def lattice_types(b1, b2, X, Y, seed):
    grid = np.empty((Y, X), np.uint8)
    south = np.ones(X, np.uint8)
    for y in range(1, Y + 1):
        carry = 0
        for x in range(1, X + 1):
            s = south[x - 1]
            if s == 1 and carry == 1:
                t = 1
                north = 1
            elif s == 0 and carry == 0:
                t = 0
                north = 0
            elif s == 1:
                if _site_u(seed, x, y) < b1:
                    t = 2
                    north = 1
                    carry = 0
                else:
                    t = 4
                    north = 0
                    carry = 1
            else:
                if _site_u(seed, x, y) < b2:
                    t = 3
                    north = 0
                    carry = 1
                else:
                    t = 5
                    north = 1
                    carry = 0
            grid[y - 1, x - 1] = t
            south[x - 1] = north
    return grid


@njit(cache=True)
def lattice_heights(b1, b2, X, Y, seed, qcols, qrows):
    nq = qcols.shape[0]
    out = np.zeros(nq, np.int64)
    south = np.ones(X, np.uint8)
    for y in range(1, Y + 1):
        for k in range(nq):
            if qrows[k] == y:
                c = 0
                for x in range(min(qcols[k], X)):
                    c += south[x]
                out[k] = c
        carry = 0
        for x in range(1, X + 1):
            s = south[x - 1]
            if s == 1 and carry == 1:
                north = 1
            elif s == 0 and carry == 0:
                north = 0
            elif s == 1:
                if _site_u(seed, x, y) < b1:
                    north = 1
                    carry = 0
                else:
                    north = 0
                    carry = 1
            else:
                if _site_u(seed, x, y) < b2:
                    north = 0
                    carry = 1
                else:
                    north = 1
                    carry = 0
            south[x - 1] = north
    return out


@njit(cache=True, parallel=True)
def lln_batch(b1, b2, X, Y, seed, S, qcols, qrows):
    nq = qcols.shape[0]
    out = np.zeros((S, nq), np.int64)
    for s in prange(S):
        sub = _derive_seed(seed, s)
        out[s, :] = lattice_heights(b1, b2, X, Y, sub, qcols, qrows)
    return out


@njit(cache=True)
def particle_step(pos, t_new, b1, b2, seed, free_last):
    """One sequential pushing update; pos is modified in place.

    free_last=False caps the last particle by a densely packed tail at
    pos[-1]+1; free_last=True lets it jump geometrically without cap.
    """
    n = pos.shape[0]
    prev_new = np.int64(-(1 << 60))
    for i in range(n):
        xi = pos[i]
        if i + 1 < n:
            nxt = pos[i + 1]
        elif free_last:
            nxt = _FREE_CAP
        else:
            nxt = xi + 1
        if prev_new == xi:
            travel = True
        else:
            travel = _site_u(seed, xi, t_new) >= b1
        land = xi
        if travel:
            c = xi + 1
            while c < nxt:
                if _site_u(seed, c, t_new) >= b2:
                    break
                c += 1
            land = c
        pos[i] = land
        prev_new = land


@njit(cache=True)
def particle_run(b1, b2, n, t, seed, free_last):
    pos = np.arange(1, n + 1, dtype=np.int64)
    for step in range(1, t + 1):
        particle_step(pos, step, b1, b2, seed, free_last)
    return pos


@njit(cache=True, parallel=True)
def nx_batch(b1, b2, x_obs, t, n, seed, S):
    """N_{x_obs}(t) for S independent step-IC samples."""
    out = np.zeros(S, np.int64)
    for s in prange(S):
        sub = _derive_seed(seed, s)
        pos = particle_run(b1, b2, n, t, sub, False)
        c = 0
        for i in range(n):
            if pos[i] <= x_obs:
                c += 1
        out[s] = c
    return out


@njit(cache=True, parallel=True)
def one_step_batch(pos0, b1, b2, seed, S, free_last):
    """S one-step samples from a fixed state; rows are final positions."""
    n = pos0.shape[0]
    out = np.zeros((S, n), np.int64)
    for s in prange(S):
        sub = _derive_seed(seed, s)
        pos = pos0.copy()
        particle_step(pos, 1, b1, b2, sub, free_last)
        out[s, :] = pos
    return out
