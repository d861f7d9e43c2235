"""Discrete-time pushing dynamics X(t) equivalent to the quadrant measure.

States carry explicitly tracked particles 1..n plus a densely packed tail
starting at p0 = x_n + 1. A length-(x_max + t) window reproduces the infinite
system exactly on particles 1..x_max, because truncation error travels at
most one particle index per step (the jump cap x_{i+1}(t)).
"""

from dataclasses import dataclass, field

import numpy as np

from . import backend
from .errors import (
    OutsideExactWindowError,
    TooLargeError,
    WindowExhaustedError,
)
from .params import ModelParams


def _kern():
    from . import _kernels_np

    if backend.active() == "numba":
        from . import _kernels_nb

        return _kernels_nb
    return _kernels_np


@dataclass
class ParticleState:
    t: int
    positions: np.ndarray
    exact_upto: int = field(default=0)

    def __post_init__(self):
        self.positions = np.asarray(self.positions, np.int64)
        if np.any(np.diff(self.positions) <= 0):
            raise ValueError("positions must be strictly increasing")

    @property
    def p0(self):
        """Start of the densely packed tail."""
        return int(self.positions[-1]) + 1

    @property
    def n(self):
        return int(self.positions.shape[0])


def init_step(n_window):
    """Step initial condition (1, 2, ..., n_window) at t = 0."""
    if n_window <= 0:
        raise ValueError("n_window must be positive")
    return ParticleState(
        t=0, positions=np.arange(1, n_window + 1, dtype=np.int64), exact_upto=n_window
    )


def step(s: ParticleState, p: ModelParams, seed):
    """One sequential update; the new state's exactness window shrinks by one."""
    if s.exact_upto <= 0:
        raise WindowExhaustedError(
            "no exact particles remain in this truncated state; "
            "start run() with a larger window"
        )
    pos = s.positions.copy()
    _kern().particle_step(pos, s.t + 1, p.b1, p.b2, np.uint64(seed % (1 << 64)), False)
    return ParticleState(t=s.t + 1, positions=pos, exact_upto=s.exact_upto - 1)


def run(p: ModelParams, t, x_max, seed, record=None):
    """Evolve t steps from step IC; particles 1..x_max are exact.

    record, if given, is a callable invoked as record(state) after every step
    (and once on the initial state).
    """
    if t < 0 or x_max <= 0:
        raise ValueError("need t >= 0 and x_max > 0")
    n = x_max + t
    if record is None:
        pos = _kern().particle_run(p.b1, p.b2, n, t, np.uint64(seed % (1 << 64)), False)
        return ParticleState(t=t, positions=pos, exact_upto=x_max)
    s = init_step(n)
    record(s)
    for _ in range(t):
        s = step(s, p, seed)
        record(s)
    s.exact_upto = x_max
    return s


def count_left(s: ParticleState, x):
    """N_x: number of particles at positions <= x."""
    if x > s.exact_upto:
        raise OutsideExactWindowError(
            f"N_{x} needs exact particles up to index {x}, window has {s.exact_upto}"
        )
    if x < 1:
        return 0
    return int(np.count_nonzero(s.positions <= x))


def occupied(s: ParticleState, x):
    """eta_x: indicator of a particle at site x."""
    if x > s.exact_upto:
        raise OutsideExactWindowError(
            f"eta_{x} needs exact particles up to index {x}, window has {s.exact_upto}"
        )
    if x < 1:
        return 0
    i = np.searchsorted(s.positions, x)
    return int(i < s.n and s.positions[i] == x)


def _branch(prefix_prob, xs, i, prev_new, out_states, acc, b1, b2):
    """Enumerate particle i's outcomes given the already-updated prefix."""
    n = len(xs)
    if i == n:
        key = tuple(acc)
        out_states[key] = out_states.get(key, 0.0) + prefix_prob
        return
    xi = xs[i]
    gap = (xs[i + 1] - xi) if i + 1 < n else 1
    pushed = prev_new == xi
    outcomes = []
    if not pushed:
        outcomes.append((0, b1))
        for k in range(1, gap):
            outcomes.append((k, (1 - b1) * (1 - b2) * b2 ** (k - 1)))
        outcomes.append((gap, (1 - b1) * b2 ** (gap - 1)))
    else:
        for k in range(1, gap):
            outcomes.append((k, (1 - b2) * b2 ** (k - 1)))
        outcomes.append((gap, b2 ** (gap - 1)))
    for k, pr in outcomes:
        acc.append(xi + k)
        _branch(prefix_prob * pr, xs, i + 1, xi + k, out_states, acc, b1, b2)
        acc.pop()


def exact_distribution(p: ModelParams, t, x_max):
    """Exact law of the windowed state after t steps, by dynamic programming.

    Returns a dict mapping position tuples (particles 1..x_max+t) to their
    probabilities; masses sum to 1 since every conditional jump law is
    normalized.
    """
    if t > 4 or x_max > 6:
        raise TooLargeError("exact DP guarded to t <= 4, x_max <= 6")
    n = x_max + t
    dist = {tuple(range(1, n + 1)): 1.0}
    for _ in range(t):
        nxt = {}
        for xs, pr in dist.items():
            _branch(pr, xs, 0, -(1 << 60), nxt, [], p.b1, p.b2)
        dist = nxt
    return dist


def one_step_distribution(p: ModelParams, xs, free_last=False):
    """Exact one-step law from a fixed tuple xs under the windowed dynamics.

    With free_last=True the last particle jumps uncapped; its geometric tail
    is truncated at machine precision.
    """
    out = {}
    if not free_last:
        _branch(1.0, tuple(xs), 0, -(1 << 60), out, [], p.b1, p.b2)
        return out
    # replace the last gap by a long but finite one; the neglected tail has
    # mass b2^cut < 1e-200 for any b2 < 0.75
    cut = 600
    xs = tuple(xs)
    padded = xs + (xs[-1] + cut,)
    raw = {}
    _branch(1.0, padded, 0, -(1 << 60), raw, [], p.b1, p.b2)
    for key, pr in raw.items():
        k = key[:-1]
        out[k] = out.get(k, 0.0) + pr
    return out


def nx_samples(p: ModelParams, x_obs, t, seed, samples, threads=None):
    """N_{x_obs}(t) over independent step-IC runs (batch, parallel backend)."""
    backend.set_threads(threads)
    n = x_obs + t
    return _kern().nx_batch(
        p.b1, p.b2, int(x_obs), int(t), int(n), np.uint64(seed % (1 << 64)), int(samples)
    )


def one_step_samples(p: ModelParams, xs, seed, samples, free_last=False):
    """Empirical one-step draws from a fixed state (rows = final positions)."""
    pos0 = np.asarray(xs, np.int64)
    return _kern().one_step_batch(
        pos0, p.b1, p.b2, np.uint64(seed % (1 << 64)), int(samples), free_last
    )


def trajectory_rows_csv(p: ModelParams, t, x_max, seed):
    """CSV rows 't,i,x_i' (plus provenance) for a single recorded run."""
    states = []
    run(p, t, x_max, seed, record=states.append)
    for s in states:
        for i, x in enumerate(s.positions, start=1):
            yield (s.t, i, int(x), p.b1, p.b2, seed)
