"""Finite-N transfer matrices, Bethe eigenfunction checks, and the
contour-integral transition formulas.

Weights live in the gauge a1 = 1 (an infinite sea of empty vertices carries
weight one); a general a1 is divided out on construction. The stochastic
line is a1 = a2 = 1, c1*c2 = (1-b1)(1-b2), b1 < 1, where a transfer row is
the one-step law of the pushing particle dynamics.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DenominatorVanishesError,
    NotOnStochasticLineError,
    QuadratureNotConvergedError,
    TooLargeError,
)
from .params import ModelParams
from .quadrature import ContourSpec, tensor_apply

_EDGE_TO_CODE = {
    (0, 0, 0, 0): 0,
    (1, 1, 1, 1): 1,
    (1, 0, 1, 0): 2,
    (0, 1, 0, 1): 3,
    (1, 0, 0, 1): 4,
    (0, 1, 1, 0): 5,
}


@dataclass(frozen=True)
class WeightSet:
    a1: float
    a2: float
    b1: float
    b2: float
    c1: float
    c2: float

    def __post_init__(self):
        vals = (self.a1, self.a2, self.b1, self.b2, self.c1, self.c2)
        if any(v <= 0 for v in vals):
            raise ValueError("all six weights must be strictly positive")
        if self.a1 != 1.0:
            a1 = self.a1
            object.__setattr__(self, "a1", 1.0)
            object.__setattr__(self, "a2", self.a2 / a1)
            object.__setattr__(self, "b1", self.b1 / a1)
            object.__setattr__(self, "b2", self.b2 / a1)
            object.__setattr__(self, "c1", self.c1 / a1)
            object.__setattr__(self, "c2", self.c2 / a1)

    @staticmethod
    def stochastic(p: ModelParams):
        return WeightSet(1.0, 1.0, p.b1, p.b2, 1.0 - p.b1, 1.0 - p.b2)

    def is_stochastic(self, tol=1e-12):
        return (
            abs(self.a2 - 1.0) <= tol
            and abs(self.c1 * self.c2 - (1.0 - self.b1) * (1.0 - self.b2)) <= tol
            and self.b1 < 1.0
        )

    def is_normalizable(self, tol=1e-12):
        return (
            abs(self.c1 * self.c2 - (1.0 - self.b2) * (self.a2 - self.b1)) <= tol
            and self.b2 < 1.0
        )


@dataclass(frozen=True)
class RowConfiguration:
    source: tuple
    target: tuple
    lo: int
    hi: int
    codes: tuple

    def type_counts(self):
        counts = [0] * 6
        for c in self.codes:
            counts[c] += 1
        return counts


def build_row_configuration(X, Y):
    """The unique one-row line configuration sending X to Y, or None.

    Exists iff the interlacing x_i <= y_i <= x_{i+1} holds; paths move right
    and never cross.
    """
    X = tuple(int(v) for v in X)
    Y = tuple(int(v) for v in Y)
    if len(X) != len(Y) or len(X) == 0:
        raise ValueError("X and Y must be nonempty and of equal length")
    if any(X[i] >= X[i + 1] for i in range(len(X) - 1)):
        raise ValueError("X must be strictly increasing")
    if any(Y[i] >= Y[i + 1] for i in range(len(Y) - 1)):
        raise ValueError("Y must be strictly increasing")
    n = len(X)
    for i in range(n):
        if not (X[i] <= Y[i] <= (X[i + 1] if i + 1 < n else Y[i])):
            return None
    lo = min(X[0], Y[0]) - 1
    hi = max(X[-1], Y[-1]) + 1
    xset = set(X)
    yset = set(Y)
    codes = []
    carry = 0
    for c in range(lo, hi + 1):
        s = int(c in xset)
        no = int(c in yset)
        e = s + carry - no
        code = _EDGE_TO_CODE.get((s, carry, no, e))
        if code is None:
            return None
        codes.append(code)
        carry = e
    if carry != 0:
        return None
    return RowConfiguration(X, Y, lo, hi, tuple(codes))


def transfer_weight(X, Y, w: WeightSet):
    """Matrix element T(X -> Y): product of vertex weights, 0 without a path."""
    rc = build_row_configuration(X, Y)
    if rc is None:
        return 0.0
    counts = rc.type_counts()
    return (
        w.a2 ** counts[1]
        * w.b1 ** counts[2]
        * w.b2 ** counts[3]
        * w.c1 ** counts[4]
        * w.c2 ** counts[5]
    )


def normalize_weights(w: WeightSet, tol=1e-12):
    """Stochastic form (1,1,b1/a2,b2,1-b1/a2,1-b2) plus the per-particle row
    constant a2; requires the quadratic normalizability condition."""
    if not w.is_normalizable(tol):
        raise NotOnStochasticLineError(
            "c1*c2 != (a1-b2)(a2-b1) beyond tolerance; rows cannot be normalized"
        )
    b1n = w.b1 / w.a2
    b2n = w.b2  # a1 == 1 in this gauge
    out = WeightSet(1.0, 1.0, b1n, b2n, 1.0 - b1n, 1.0 - b2n)
    return out, w.a2


def _interlaced_targets(X, lo_last, hi_last):
    """Yield all Y with x_i <= y_i <= x_{i+1}, last coordinate in [lo_last, hi_last]."""
    n = len(X)
    ranges = []
    for i in range(n):
        top = X[i + 1] if i + 1 < n else hi_last
        ranges.append(range(max(X[i], lo_last if i == n - 1 else X[i]), top + 1))
    for Y in itertools.product(*ranges):
        if all(Y[i] < Y[i + 1] for i in range(n - 1)):
            yield Y


def row_sum(X, w: WeightSet):
    """Exact sum over all targets of one transfer row, geometric tail closed."""
    X = tuple(int(v) for v in X)
    n = len(X)
    total = 0.0
    prefix_ranges = [range(X[i], X[i + 1] + 1) for i in range(n - 1)]
    for pre in itertools.product(*prefix_ranges):
        if any(pre[i] >= pre[i + 1] for i in range(len(pre) - 1)):
            continue
        yl = pre[-1] if pre else None
        if yl is None or yl < X[-1]:
            total += transfer_weight(X, pre + (X[-1],), w)
        total += transfer_weight(X, pre + (X[-1] + 1,), w) / (1.0 - w.b2)
    return total


def transfer_apply(dist, w: WeightSet, t, box=None):
    """Exact t-step evolution of a distribution supported in a position box.

    Returns (new_dist, deficit): deficit is the probability mass whose last
    particle escaped past the box; retained masses are exact because positions
    are nondecreasing, so no path leaves the box and returns.
    """
    states = list(dist.keys())
    n = len(states[0])
    if n > 3:
        raise TooLargeError("transfer_apply guarded to N <= 3")
    if t > 5:
        raise TooLargeError("transfer_apply guarded to t <= 5")
    if box is None:
        lo = min(min(s) for s in states)
        hi = max(max(s) for s in states) + t + _tail_margin(w.b2)
        box = (lo, hi)
    lo, hi = box
    if hi - lo > 64:
        raise TooLargeError("box wider than 64 sites")
    cur = dict(dist)
    deficit = 0.0
    for _ in range(t):
        nxt = {}
        for X, pr in cur.items():
            kept = 0.0
            for Y in _interlaced_targets(X, X[-1], hi):
                tw = transfer_weight(X, Y, w)
                if tw > 0.0:
                    nxt[Y] = nxt.get(Y, 0.0) + pr * tw
                    kept += tw
            deficit += pr * max(0.0, row_sum(X, w) - kept)
        cur = nxt
    return cur, deficit


def _tail_margin(b2):
    return max(4, int(math.ceil(math.log(1e-16) / math.log(b2))))


def _pair_denoms(z, w: WeightSet):
    coef = (w.a2 + w.b1 * w.b2 - w.c1 * w.c2) / w.b1
    quad = w.a2 * w.b2 / w.b1
    n = len(z)
    D = np.empty((n, n), complex)
    for i in range(n):
        for j in range(n):
            D[i, j] = 1.0 - coef * z[j] + quad * z[i] * z[j]
    return D


def _bethe_coeffs(z, w: WeightSet, transposed):
    """A_sigma (forward) or A'_sigma (transposed) for all permutations."""
    n = len(z)
    D = _pair_denoms(z, w)
    for i in range(n):
        for j in range(i + 1, n):
            if abs(D[i, j]) < 1e-12:
                raise DenominatorVanishesError(
                    f"pair denominator vanishes at (i,j)=({i},{j})"
                )
    out = {}
    for sigma in itertools.permutations(range(n)):
        sign = 1.0
        seen = list(sigma)
        for i in range(n):
            for j in range(i + 1, n):
                if seen[i] > seen[j]:
                    sign = -sign
        num = 1.0 + 0.0j
        for i in range(n):
            for j in range(i + 1, n):
                if transposed:
                    num *= 1.0 - (
                        (w.a2 + w.b1 * w.b2 - w.c1 * w.c2) / w.b1
                    ) * z[sigma[j]] + (w.a2 * w.b2 / w.b1) * z[sigma[i]] * z[sigma[j]]
                else:
                    num *= 1.0 - (
                        (w.a2 + w.b1 * w.b2 - w.c1 * w.c2) / w.b1
                    ) * z[sigma[i]] + (w.a2 * w.b2 / w.b1) * z[sigma[i]] * z[sigma[j]]
        den = 1.0 + 0.0j
        for i in range(n):
            for j in range(i + 1, n):
                den *= D[i, j]
        out[sigma] = sign * num / den
    return out


def _psi(X, z, coeffs, inverse_powers):
    val = 0.0 + 0.0j
    for sigma, A in coeffs.items():
        term = A
        for i, x in enumerate(X):
            term *= z[sigma[i]] ** (-x if inverse_powers else x)
        val += term
    return val


def eigenvalue_product(z, w: WeightSet):
    out = 1.0 + 0.0j
    for zi in z:
        out *= (w.b1 + (w.c1 * w.c2 - w.b1 * w.b2) * zi) / (1.0 - w.b2 * zi)
    return out


def bethe_check_transposed(z, w: WeightSet, Y, tail_cut=60):
    """Relative residual of the transposed eigenrelation at target Y.

    The source sum is finite except in x_1, which runs down from y_1; it is
    truncated at depth tail_cut with the geometric remainder |b2 z|^K added
    to the residual.
    """
    z = [complex(v) for v in z]
    _check_z(z, w)
    if _coincide(z):
        return 0.0
    Y = tuple(int(v) for v in Y)
    n = len(Y)
    coeffs = _bethe_coeffs(z, w, transposed=True)
    lhs = 0.0 + 0.0j
    ranges = [range(Y[0] - tail_cut, Y[0] + 1)] + [
        range(Y[i - 1], Y[i] + 1) for i in range(1, n)
    ]
    for X in itertools.product(*ranges):
        if any(X[i] >= X[i + 1] for i in range(n - 1)):
            continue
        tw = transfer_weight(X, Y, w)
        if tw > 0.0:
            lhs += tw * _psi(X, z, coeffs, inverse_powers=True)
    rhs = eigenvalue_product(z, w) * _psi(Y, z, coeffs, inverse_powers=True)
    r = max(abs(v) for v in [rhs, lhs, 1e-280])
    ratio = abs(w.b2) * max(abs(v) for v in z)
    tail = (ratio ** tail_cut) / max(1e-300, 1.0 - ratio)
    return abs(lhs - rhs) / r + tail


def bethe_check_forward(z, w: WeightSet, X, tail_cut=60):
    """Relative residual of the forward eigenrelation at source X; the y_N
    sum is truncated at x_N + tail_cut with the geometric remainder added."""
    z = [complex(v) for v in z]
    _check_z(z, w)
    if _coincide(z):
        return 0.0
    X = tuple(int(v) for v in X)
    n = len(X)
    coeffs = _bethe_coeffs(z, w, transposed=False)
    lhs = 0.0 + 0.0j
    for Y in _interlaced_targets(X, X[-1], X[-1] + tail_cut):
        tw = transfer_weight(X, Y, w)
        if tw > 0.0:
            lhs += tw * _psi(Y, z, coeffs, inverse_powers=False)
    rhs = eigenvalue_product(z, w) * _psi(X, z, coeffs, inverse_powers=False)
    r = max(abs(v) for v in [rhs, lhs, 1e-280])
    ratio = abs(w.b2) * max(abs(v) for v in z)
    tail = (ratio ** tail_cut) / max(1e-300, 1.0 - ratio)
    return abs(lhs - rhs) / r + tail


def _check_z(z, w):
    for zi in z:
        if abs(w.b2 * zi) >= 1.0:
            raise DenominatorVanishesError(f"|b2 z| = {abs(w.b2 * zi)} >= 1")


def _coincide(z):
    n = len(z)
    return any(
        abs(z[i] - z[j]) < 1e-14 for i in range(n) for j in range(i + 1, n)
    )


def default_radius(p: ModelParams):
    """Smallest safe 'large' radius: encloses z = b2 and every pair pole with
    a factor-2 margin, keeping the R^{x-y} cancellation loss minimal."""
    inv_tau = 1.0 / p.tau
    r_quad = ((1 + inv_tau) + math.sqrt((1 + inv_tau) ** 2 + 4 * inv_tau)) / (
        2 * inv_tau
    )
    return max(2.0, 2.0 * p.b2, 1.3 * r_quad)


def _f_pow_t(z, p: ModelParams, t):
    return ((p.b1 * z + (1.0 - p.b1 - p.b2)) / (z - p.b2)) ** t


def _s_tau(u, v, inv_tau):
    return 1.0 - (1.0 + inv_tau) * u + inv_tau * u * v


def transition_contour(Y, X, t, p: ModelParams, c: ContourSpec = None, tol=1e-9,
                       full=False):
    """t-step transition probability T_t(Y -> X) by the N-fold large-circle
    contour integral with the tau-form permutation coefficients."""
    X = tuple(int(v) for v in X)
    Y = tuple(int(v) for v in Y)
    n = len(X)
    if n > 3:
        raise TooLargeError("transition_contour guarded to N <= 3")
    if c is None:
        c = ContourSpec.circle(0.0, default_radius(p), nodes=128)
    inv_tau = 1.0 / p.tau
    perms = list(itertools.permutations(range(n)))
    signs = [(-1.0) ** _inversions(s) for s in perms]

    def integrand(*zs):
        common = 1.0
        for i in range(n):
            common = common * zs[i] ** (-Y[i] - 1) * _f_pow_t(zs[i], p, t)
        den = 1.0
        for i in range(n):
            for j in range(i + 1, n):
                den = den * _s_tau(zs[i], zs[j], inv_tau)
        acc = 0.0
        for sg, sigma in zip(signs, perms):
            num = 1.0
            for i in range(n):
                for j in range(i + 1, n):
                    num = num * _s_tau(zs[sigma[i]], zs[sigma[j]], inv_tau)
            pw = 1.0
            for i in range(n):
                pw = pw * zs[sigma[i]] ** X[i]
            acc = acc + sg * num * pw
        return common * acc / den

    v1 = _tensor_value(integrand, c, n)
    v2 = _tensor_value(integrand, c.with_nodes(2 * c.nodes), n)
    if abs(v1 - v2) > tol:
        raise QuadratureNotConvergedError(
            f"transition_contour: doubling moved value by {abs(v1 - v2):.3e}"
        )
    if full:
        return {"value": v2.real, "imag": abs(v2.imag), "doubling_delta": abs(v1 - v2)}
    return v2.real


def _tensor_value(fn, c, n):
    zs, ws = c.points_weights()
    return tensor_apply(fn, zs, ws, n)


def _inversions(sigma):
    n = len(sigma)
    return sum(
        1 for i in range(n) for j in range(i + 1, n) if sigma[i] > sigma[j]
    )


def marginal_contour(Y, m, x, t, p: ModelParams, c: ContourSpec = None, tol=1e-7,
                     full=False):
    """P_Y(x_m = x; t) via the size-k subset sum with q-binomial prefactors."""
    from .qseries import q_binomial

    Y = tuple(int(v) for v in Y)
    N = len(Y)
    if N > 3:
        raise TooLargeError("marginal_contour guarded to N <= 3")
    if t > 4:
        raise TooLargeError("marginal_contour guarded to t <= 4")
    if not (1 <= m <= N):
        raise ValueError("need 1 <= m <= N")
    if c is None:
        c = ContourSpec.circle(0.0, default_radius(p), nodes=128)
    tau = p.tau
    inv_tau = 1.0 / tau

    def total_at(cc):
        total = 0.0 + 0.0j
        for k in range(m, N + 1):
            for S in itertools.combinations(range(1, N + 1), k):
                pref = (
                    (-1.0) ** (m - 1)
                    * tau ** (m * (m - 1) / 2.0)
                    * tau ** (sum(S) - m * k - k * (k - 1) / 2.0)
                    * q_binomial(k - 1, m - 1, tau).real
                )
                ys = [Y[i - 1] for i in S]

                def integrand(*zs, _ys=ys, _k=k):
                    cross = 1.0
                    for a in range(_k):
                        for b in range(a + 1, _k):
                            cross = cross * (zs[b] - zs[a]) / _s_tau(
                                zs[a], zs[b], inv_tau
                            )
                    prod_z = 1.0
                    for a in range(_k):
                        prod_z = prod_z * zs[a]
                    val = cross * (1.0 - prod_z)
                    for a in range(_k):
                        val = (
                            val
                            * zs[a] ** (x - _ys[a] - 1)
                            * _f_pow_t(zs[a], p, t)
                            / (1.0 - zs[a])
                        )
                    return val

                total += pref * _tensor_value(integrand, cc, k)
        return total

    v1 = total_at(c)
    v2 = total_at(c.with_nodes(2 * c.nodes))
    if abs(v1 - v2) > tol:
        raise QuadratureNotConvergedError(
            f"marginal_contour: doubling moved value by {abs(v1 - v2):.3e}"
        )
    if full:
        return {"value": v2.real, "imag": abs(v2.imag), "doubling_delta": abs(v1 - v2)}
    return v2.real
