"""Pure-numpy fallback kernels (STOVEX_NUMBA=0).

Same keyed uniforms, same trajectories as _kernels_nb. The sequential carry
of a lattice row and the push cascade of a particle update are boolean affine
recursions w' = (w & m) | g, solved in vector form with running maxima.
"""

import numpy as np

from .rng import site_uniform_vec, derive_seed

_BIG = np.int64(1) << np.int64(62)
_FREE_CAP = np.int64(1) << np.int64(60)


def _carry_scan(m, g):
    """Solve o[x] = g[x] | (m[x] & o[x-1]) with o[-1]=False, vectorized."""
    n = m.shape[0]
    idx = np.arange(1, n + 1)
    lf = np.maximum.accumulate(np.where(~m, idx, 0))
    lg = np.maximum.accumulate(np.where(g, idx, 0))
    return (lg >= lf) & (lg >= 1)


def _row_update(south, u, b1, b2, want_types):
    s = south
    m = np.where(s, True, u < b2)
    g = np.where(s, u >= b1, False)
    out_carry = _carry_scan(m, g)
    w = np.empty_like(out_carry)
    w[0] = False
    w[1:] = out_carry[:-1]
    north = np.where(s, w | (u < b1), w & (u >= b2))
    if not want_types:
        return north, None
    types = np.empty(s.shape[0], np.uint8)
    types[s & w] = 1
    types[~s & ~w] = 0
    su = s & ~w
    types[su] = np.where(u[su] < b1, 2, 4)
    wu = ~s & w
    types[wu] = np.where(u[wu] < b2, 3, 5)
    return north, types


def lattice_types(b1, b2, X, Y, seed):
    cols = np.arange(1, X + 1, dtype=np.int64)
    grid = np.empty((Y, X), np.uint8)
    south = np.ones(X, bool)
    for y in range(1, Y + 1):
        u = site_uniform_vec(seed, cols, y)
        south, types = _row_update(south, u, b1, b2, True)
        grid[y - 1, :] = types
    return grid


def lattice_heights(b1, b2, X, Y, seed, qcols, qrows):
    cols = np.arange(1, X + 1, dtype=np.int64)
    nq = qcols.shape[0]
    out = np.zeros(nq, np.int64)
    south = np.ones(X, bool)
    for y in range(1, Y + 1):
        hit = qrows == y
        if hit.any():
            cum = np.cumsum(south)
            for k in np.nonzero(hit)[0]:
                c = min(int(qcols[k]), X)
                out[k] = cum[c - 1] if c >= 1 else 0
        u = site_uniform_vec(seed, cols, y)
        south, _ = _row_update(south, u, b1, b2, False)
    return out


def lln_batch(b1, b2, X, Y, seed, S, qcols, qrows):
    out = np.zeros((S, qcols.shape[0]), np.int64)
    for s in range(S):
        out[s, :] = lattice_heights(b1, b2, X, Y, derive_seed(seed, s), qcols, qrows)
    return out


def particle_step(pos, t_new, b1, b2, seed, free_last):
    n = pos.shape[0]
    slack = 64
    while True:
        maxcol = int(pos[-1]) + slack
        cols = np.arange(1, maxcol + 1, dtype=np.int64)
        u = np.empty(maxcol + 1)
        u[1:] = site_uniform_vec(seed, cols, t_new)
        occ = np.zeros(maxcol + 2, bool)
        occ[pos] = True
        stopc = np.zeros(maxcol + 2, bool)
        stopc[1:-1] = (u[1:] >= b2) & ~occ[1:-1]
        vals = np.where(stopc, np.arange(maxcol + 2, dtype=np.int64), _BIG)
        sufmin = np.minimum.accumulate(vals[::-1])[::-1]
        ns_after = np.empty(maxcol + 2, np.int64)
        ns_after[:-1] = sufmin[1:]
        ns_after[-1] = _BIG
        first_stop = ns_after[pos]
        if not free_last or first_stop[-1] < _BIG:
            break
        slack *= 2
    nxt = np.empty(n, np.int64)
    nxt[:-1] = pos[1:]
    nxt[-1] = _FREE_CAP if free_last else pos[-1] + 1
    land = np.minimum(first_stop, nxt)
    a = u[pos] >= b1
    b = np.empty(n, bool)
    b[0] = False
    b[1:] = land[:-1] == pos[1:]
    travels = _carry_scan(b, a)
    pos[:] = np.where(travels, land, pos)


def particle_run(b1, b2, n, t, seed, free_last):
    pos = np.arange(1, n + 1, dtype=np.int64)
    for step in range(1, t + 1):
        particle_step(pos, step, b1, b2, seed, free_last)
    return pos


def nx_batch(b1, b2, x_obs, t, n, seed, S):
    out = np.zeros(S, np.int64)
    for s in range(S):
        pos = particle_run(b1, b2, n, t, derive_seed(seed, s), False)
        out[s] = int(np.count_nonzero(pos <= x_obs))
    return out


def one_step_batch(pos0, b1, b2, seed, S, free_last):
    n = pos0.shape[0]
    out = np.zeros((S, n), np.int64)
    for s in range(S):
        pos = pos0.copy()
        particle_step(pos, 1, b1, b2, derive_seed(seed, s), free_last)
        out[s, :] = pos
    return out
