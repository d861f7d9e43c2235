"""Sampling the quadrant measure on a finite X x Y corner.

Vertices are chosen in increasing x+y order; within an anti-diagonal the
decisions are conditionally independent, so a plain row-by-row sweep with
per-site keyed uniforms realizes the same law (and any two sweep orders give
the identical configuration). Types are stored one byte per vertex, coded
0..5 for a1, a2, b1, b2, c1, c2.
"""

import numpy as np

from . import backend
from .errors import OutOfDomainError
from .params import ModelParams

TYPE_LABELS = ("a1", "a2", "b1", "b2", "c1", "c2")
LABEL_TO_CODE = {lab: i for i, lab in enumerate(TYPE_LABELS)}

# edge occupancy (south, west, north, east) per type code
EDGE_SOUTH = np.array([0, 1, 1, 0, 1, 0], np.uint8)
EDGE_WEST = np.array([0, 1, 0, 1, 0, 1], np.uint8)
EDGE_NORTH = np.array([0, 1, 1, 0, 0, 1], np.uint8)
EDGE_EAST = np.array([0, 1, 0, 1, 1, 0], np.uint8)

# vertices with a bold south edge: a2, b1, c1 -- the height-function types
SOUTH_BOLD_CODES = (1, 2, 4)


class LatticeConfig:
    """An X x Y corner configuration; grid[y-1, x-1] is the type code at (x, y)."""

    def __init__(self, width, height, grid, params=None, seed=None):
        self.width = int(width)
        self.height = int(height)
        self.grid = grid
        self.params = params
        self.seed = seed

    def type_at(self, x, y):
        return TYPE_LABELS[self.grid[y - 1, x - 1]]


def _kern():
    from . import _kernels_np

    if backend.active() == "numba":
        from . import _kernels_nb

        return _kernels_nb
    return _kernels_np


def sample_configuration(p: ModelParams, X, Y, seed):
    """Draw one P(b1,b2)-distributed configuration on {1..X} x {1..Y}."""
    if X <= 0 or Y <= 0:
        raise OutOfDomainError("window dimensions must be positive")
    grid = _kern().lattice_types(p.b1, p.b2, int(X), int(Y), np.uint64(seed % (1 << 64)))
    return LatticeConfig(X, Y, grid, params=p, seed=seed)


def height_function(c: LatticeConfig, x, y):
    """H(x, y): count of a2/b1/c1 vertices in row ceil(y) at columns 1..floor(x).

    H(x, 0) = floor(x) and H(0, y) = 0. The particle current N_x(t) is read at
    the half-integer cut: N_x(t) = H(x, t + 1/2).
    """
    if x < 0 or y < 0 or x > c.width or y > c.height:
        raise OutOfDomainError(f"(x={x}, y={y}) outside the sampled window")
    xi = int(np.floor(x))
    if y == 0:
        return xi
    if xi == 0:
        return 0
    row = c.grid[int(np.ceil(y)) - 1, :xi]
    return int(np.count_nonzero((row == 1) | (row == 2) | (row == 4)))


def height_field(c: LatticeConfig):
    """Integer height H(x, y) for all 1 <= x <= X, 1 <= y <= Y as a (Y, X) array."""
    south_bold = (c.grid == 1) | (c.grid == 2) | (c.grid == 4)
    return np.cumsum(south_bold, axis=1).astype(np.int64)


def sample_heights(p: ModelParams, X, Y, seed, qcols, qrows):
    """Heights at query points without storing the grid (O(X) memory)."""
    qcols = np.asarray(qcols, np.int64)
    qrows = np.asarray(qrows, np.int64)
    return _kern().lattice_heights(
        p.b1, p.b2, int(X), int(Y), np.uint64(seed % (1 << 64)), qcols, qrows
    )


def cut_particles(c: LatticeConfig, t):
    """Particle positions at time t: columns with bold south edge in row t+1."""
    if not (0 <= t < c.height):
        raise OutOfDomainError(f"cut t={t} needs row t+1 inside the window")
    row = c.grid[t, :]
    mask = (row == 1) | (row == 2) | (row == 4)
    return np.nonzero(mask)[0] + 1


def validate_configuration(c: LatticeConfig):
    """Check adjacency and boundary restrictions; (ok, first violation or '')."""
    g = c.grid
    south = EDGE_SOUTH[g]
    west = EDGE_WEST[g]
    north = EDGE_NORTH[g]
    east = EDGE_EAST[g]
    if not np.all(south[0, :] == 1):
        x = int(np.argmin(south[0, :])) + 1
        return False, f"bottom boundary: site ({x},1) lacks a bold south edge"
    if not np.all(west[:, 0] == 0):
        y = int(np.argmax(west[:, 0])) + 1
        return False, f"left boundary: site (1,{y}) has a bold west edge"
    vert = north[:-1, :] != south[1:, :]
    if vert.any():
        y, x = np.argwhere(vert)[0]
        return False, f"vertical edge mismatch between ({x + 1},{y + 1}) and ({x + 1},{y + 2})"
    horiz = east[:, :-1] != west[:, 1:]
    if horiz.any():
        y, x = np.argwhere(horiz)[0]
        return False, f"horizontal edge mismatch between ({x + 1},{y + 1}) and ({x + 2},{y + 1})"
    return True, ""


def row_c_balance(c: LatticeConfig):
    """Per-row (#c1 - #c2) counts; in a finite window each must be 0 or 1."""
    c1 = np.count_nonzero(c.grid == 4, axis=1)
    c2 = np.count_nonzero(c.grid == 5, axis=1)
    return c1 - c2


def config_rows_csv(c: LatticeConfig):
    """Iterate CSV rows 'x,y,type' (plus provenance) for the dump format."""
    p = c.params
    for y in range(1, c.height + 1):
        for x in range(1, c.width + 1):
            yield (x, y, TYPE_LABELS[c.grid[y - 1, x - 1]], p.b1, p.b2, c.seed)
