"""q-series utilities and the symmetrization identity checkers.

The identity suite evaluates both sides of each summation formula at random
complex points (rejection-sampled away from singular denominators) and
reports the maximum relative residual per identity.
"""

import itertools
import math

import numpy as np

from .errors import DivergentParameterError


def q_pochhammer(x, q, k):
    """(x; q)_k = prod_{i=1}^{k} (1 - x q^{i-1}); k may be math.inf."""
    if k == 0:
        return complex(1.0)
    if k is math.inf or k == float("inf"):
        if abs(q) >= 1.0:
            raise DivergentParameterError("infinite q-product needs |q| < 1")
        out = complex(1.0)
        term = complex(x)
        i = 0
        while abs(term) > 1e-19 and i < 100000:
            out *= 1.0 - term
            term *= q
            i += 1
        return out
    if k < 0 or int(k) != k:
        raise ValueError("k must be a nonnegative integer or inf")
    out = complex(1.0)
    xq = complex(x)
    for _ in range(int(k)):
        out *= 1.0 - xq
        xq *= q
    return out


def q_binomial(n, k, q):
    """Gaussian binomial coefficient via the Pascal recursion
    C(m,j)_q = C(m-1,j-1)_q + q^j C(m-1,j)_q.

    Polynomial in q, so no value of q is singular.
    """
    if k < 0 or k > n:
        raise ValueError(f"need 0 <= k <= n, got ({n}, {k})")
    q = complex(q)
    prev = [complex(1.0)] + [complex(0.0)] * k
    for m in range(1, n + 1):
        cur = [complex(1.0)] + [complex(0.0)] * k
        for j in range(1, min(m, k) + 1):
            cur[j] = prev[j - 1] + (q ** j) * prev[j] if j < m else prev[j - 1]
        prev = cur
    return prev[k]


def _sym_terms(zs):
    for perm in itertools.permutations(range(len(zs))):
        yield [zs[i] for i in perm]


def _rel(lhs, rhs):
    s = max(abs(lhs), abs(rhs), 1e-100)
    return abs(lhs - rhs) / s


def check_q_binomial_theorem(rng):
    """prod_{i<n} (1 + q^i t) = sum_k q^{k(k-1)/2} C(n,k)_q t^k."""
    n = int(rng.integers(1, 9))
    q = _draw(rng, 0.9)
    t = _draw(rng, 2.0)
    lhs = complex(1.0)
    for i in range(n):
        lhs *= 1.0 + (q ** i) * t
    rhs = sum(
        q ** (k * (k - 1) // 2) * q_binomial(n, k, q) * t ** k for k in range(n + 1)
    )
    return _rel(lhs, rhs)


def check_q_gauss(rng):
    """(ax;q)_inf / (x;q)_inf = sum_k (a;q)_k/(q;q)_k x^k for |q|,|x| < 1."""
    q = _draw(rng, 0.75, lo=0.05)
    x = _draw(rng, 0.7)
    a = _draw(rng, 2.0)
    lhs = q_pochhammer(a * x, q, math.inf) / q_pochhammer(x, q, math.inf)
    rhs = complex(0.0)
    term = complex(1.0)
    aq = complex(1.0)
    qq = complex(1.0)
    for k in range(1, 400):
        aq *= 1.0 - a * q ** (k - 1)
        qq *= 1.0 - q ** k
        term = aq / qq * x ** k
        rhs += term
        if abs(term) < 1e-18:
            break
    rhs += 1.0
    return _rel(lhs, rhs)


def _quad(alpha, u, v):
    return 1.0 - (alpha + 1.0) * u + alpha * u * v


def check_tw_symmetrization(rng):
    """Tracy-Widom symmetrization with the chain denominators 1 - z_i...z_N."""
    N = int(rng.integers(1, 6))
    alpha = _draw(rng, 2.0)
    zs = _draw_distinct(rng, N, 0.8)
    lhs = complex(0.0)
    for w in _sym_terms(zs):
        term = complex(1.0)
        for i in range(N):
            for j in range(i + 1, N):
                term *= _quad(alpha, w[i], w[j]) / (w[j] - w[i])
        for i in range(N):
            suffix = np.prod(w[i:])
            term *= w[i] ** i / (1.0 - suffix)
        lhs += term
    rhs = np.prod([1.0 / (1.0 - z) for z in zs])
    return _rel(lhs, rhs)


def check_hall_littlewood(rng):
    """Symmetrized cross-ratio product collapses to (alpha;alpha)_N/(1-alpha)^N."""
    N = int(rng.integers(1, 6))
    alpha = _draw(rng, 0.9, avoid_one=True)
    zs = _draw_distinct(rng, N, 0.8)
    lhs = complex(0.0)
    for w in _sym_terms(zs):
        term = complex(1.0)
        for i in range(N):
            for j in range(i + 1, N):
                term *= _quad(alpha, w[i], w[j]) / (w[j] - w[i])
        lhs += term
    rhs = q_pochhammer(alpha, alpha, N) / (1.0 - alpha) ** N
    return _rel(lhs, rhs)


def check_prefix_swap(rng):
    """Symmetrization absorbing the prefix-product chain into a constant."""
    N = int(rng.integers(1, 5))
    tau = _draw(rng, 0.8, lo=0.15, avoid_one=True)
    while True:
        zs = _draw_distinct(rng, N, 0.8)
        ok = True
        for r in range(1, N + 1):
            for sub in itertools.combinations(zs, r):
                if abs(np.prod(sub) - 1.0) < 1e-2:
                    ok = False
        if ok:
            break
    lhs = complex(0.0)
    rhs = complex(0.0)
    const = (tau - 1.0) ** N / q_pochhammer(tau, tau, N)
    for w in _sym_terms(zs):
        cross = complex(1.0)
        for i in range(N):
            for j in range(i + 1, N):
                cross *= (w[j] - w[i]) / (1.0 - (1.0 + 1.0 / tau) * w[j] + w[i] * w[j] / tau)
        chain = complex(1.0)
        for i in range(N):
            chain *= 1.0 / (np.prod(w[: i + 1]) - 1.0)
        factors = np.prod([1.0 - z for z in w])
        lhs += cross * chain * factors
        rhs += const * cross
    return _rel(lhs, rhs)


def check_tw_subset(rng):
    """Subset summation identity with q-binomial right-hand side."""
    n = int(rng.integers(2, 6))
    m = int(rng.integers(1, n))
    alpha = _draw(rng, 2.0, lo=0.2)
    zs = _draw_distinct(rng, n, 0.8)
    lhs = complex(0.0)
    for S in itertools.combinations(range(n), m):
        Sset = set(S)
        term = complex(1.0)
        for i in S:
            for j in range(n):
                if j not in Sset:
                    term *= _quad(alpha, zs[i], zs[j]) / (zs[j] - zs[i])
        term *= 1.0 - np.prod([zs[j] for j in range(n) if j not in Sset])
        lhs += term
    rhs = (
        alpha ** (m * (n - m))
        * q_binomial(n - 1, m, 1.0 / alpha)
        * (1.0 - np.prod(zs))
    )
    return _rel(lhs, rhs)


_CHECKS = (
    ("q_binomial_theorem", check_q_binomial_theorem),
    ("q_gauss_summation", check_q_gauss),
    ("tw_symmetrization", check_tw_symmetrization),
    ("hall_littlewood", check_hall_littlewood),
    ("prefix_swap", check_prefix_swap),
    ("tw_subset", check_tw_subset),
)


def _draw(rng, hi, lo=0.02, avoid_one=False):
    while True:
        r = lo + (hi - lo) * rng.random()
        z = r * np.exp(2j * np.pi * rng.random())
        if avoid_one and abs(z - 1.0) < 0.05:
            continue
        return complex(z)


def _draw_distinct(rng, N, hi):
    """Well-separated sample points: spread angles keep the Vandermonde-type
    denominators O(1), which the Sym checks need to stay near machine accuracy."""
    while True:
        angles = 2.0 * np.pi * (np.arange(N) + 0.25 * rng.random(N)) / N
        angles += 2.0 * np.pi * rng.random()
        radii = 0.55 * hi + 0.45 * hi * rng.random(N)
        zs = [complex(r * np.exp(1j * a)) for r, a in zip(radii, angles)]
        ok = all(
            abs(zs[i] - zs[j]) > 0.25 * hi for i in range(N) for j in range(i + 1, N)
        )
        if ok and all(abs(z - 1.0) > 5e-2 for z in zs):
            return zs


def identity_suite(seed=0, points=100):
    """Run every identity check at `points` random draws; max residual each."""
    report = {}
    for name, fn in _CHECKS:
        rng = np.random.default_rng(seed ^ hash(name) & 0xFFFFFFFF)
        worst = 0.0
        for _ in range(points):
            worst = max(worst, fn(rng))
        report[name] = worst
    return report
