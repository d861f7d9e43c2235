"""Exponential moments E[tau^{L N_x}] and the q-Laplace transform, each by
several independent routes: Monte Carlo, exact dynamic programming, nested
contour integrals, and a Fredholm determinant.

The nested-contour route integrates over disjoint two-circle contours (a
small loop around 0 plus one around -tau per variable) whose radii satisfy
the exclusion inequalities; the determinant route discretizes the kernel on
the circle C_r, tau < r < tau/kappa, Nystrom-style.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ContourFamilyInfeasibleError,
    QuadratureNotConvergedError,
    ZetaOnCutError,
)
from .params import ModelParams
from .qseries import q_pochhammer
from .quadrature import Circle, ContourSpec


@dataclass(frozen=True)
class MomentSpec:
    L: int
    x: int
    t: int
    zeta: complex = None


@dataclass(frozen=True)
class FredholmOperator:
    contour: ContourSpec
    inner_line: ContourSpec

    def radius(self):
        return self.contour.circles[0].radius


def default_fredholm_operator(p: ModelParams, nodes=128, line_nodes=None,
                              line_tol=1e-12, zeta=None):
    """Kernel circle at the middle of (tau, tau/kappa); vertical line at
    Re s = 1/2 truncated where the integrand decay passes line_tol.

    The integrand decays like exp(-(pi - |arg(-zeta)|)|Im s|), so the
    truncation height grows as zeta approaches the positive real axis.
    Gauss-Legendre needs ~40 nodes per unit of half-height: the sine's zeros
    sit half a unit off the line, so the Bernstein ellipse is thin and the
    error only decays like (1 + 1/(2T))^(-2n).
    """
    r = p.tau * (1.0 + 1.0 / p.kappa) / 2.0
    decay = math.pi
    if zeta is not None:
        zeta = complex(zeta)
        if zeta.imag == 0.0 and zeta.real >= 0.0:
            raise ZetaOnCutError("zeta must avoid the nonnegative real axis")
        gap = math.pi - abs(np.angle(-zeta))
        decay = max(gap, 0.12)
    T = math.log(1.0 / line_tol) / decay + 5.0
    if line_nodes is None:
        line_nodes = max(600, int(44 * T))
    return FredholmOperator(
        contour=ContourSpec.circle(0.0, r, nodes=nodes),
        inner_line=ContourSpec.vertical_line(0.5, T, nodes=line_nodes),
    )


def _h_factor(u, p: ModelParams, x, t):
    """Per-variable factor of the moment integrand (without du/u)."""
    k = p.kappa
    inv_tau = 1.0 / p.tau
    return ((1.0 + u * inv_tau * k) / (1.0 + u * k)) ** t * (
        (1.0 + u) / (1.0 + u * inv_tau)
    ) ** x


def moment_contours(p: ModelParams, L, nodes=64):
    """Disjoint two-circle contour family for an L-fold nested integral.

    Radii: eps_A < tau*eps_B for A < B keeps {tau u_B} outside inner loops;
    eps_A + tau*delta < tau^2 keeps the shifted -tau loops outside as well.
    The -tau loop takes the largest admissible radius, delta slightly under
    tau(1-tau)/(1+tau); the integrand carries an order-x pole at -tau, and
    its on-contour magnitude (tau/delta)^x sets the cancellation noise.
    """
    tau = p.tau
    delta = 0.95 * tau * (1.0 - tau) / (1.0 + tau)
    eps_max = (tau * tau - tau * delta) / 2.0
    eps = [eps_max * tau ** (2.0 * (L - a)) for a in range(1, L + 1)]
    for a in range(L):
        for b in range(a + 1, L):
            if not eps[a] < tau * eps[b]:
                raise ContourFamilyInfeasibleError("0-loop radii not nested")
        if not (eps[a] + tau * delta < tau * tau):
            raise ContourFamilyInfeasibleError("-tau loop too close to a 0-loop")
        if not (delta * (1.0 + tau) < tau * (1.0 - tau)):
            raise ContourFamilyInfeasibleError("-tau loops overlap under scaling")
    if eps[0] < 1e-280:
        raise ContourFamilyInfeasibleError("0-loop radius underflow")
    return [
        ContourSpec.circle_union(
            (Circle(0.0, eps[a]), Circle(-tau, delta)), nodes=nodes
        )
        for a in range(L)
    ]


def _tensor_multi(fn, node_sets, with_scale=False):
    """Tensor quadrature with a distinct contour per variable (up to 3).

    with_scale also returns the absolute sum of quadrature terms, the natural
    scale against which cancellation noise must be judged.
    """
    pts = [c.points_weights() for c in node_sets]
    n = len(pts)
    if n == 1:
        z, w = pts[0]
        terms = w * fn(z)
    elif n == 2:
        (z1, w1), (z2, w2) = pts
        terms = w1[:, None] * w2[None, :] * fn(z1[:, None], z2[None, :])
    elif n == 3:
        (z1, w1), (z2, w2), (z3, w3) = pts
        total = 0.0 + 0.0j
        scale = 0.0
        for k in range(z1.shape[0]):
            v = w1[k] * (w2[:, None] * w3[None, :] * fn(z1[k], z2[:, None], z3[None, :]))
            total += np.sum(v)
            scale += np.sum(np.abs(v))
        return (total, scale) if with_scale else total
    else:
        raise ValueError("supported up to 3 nested variables")
    total = np.sum(terms)
    return (total, float(np.sum(np.abs(terms)))) if with_scale else total


def _moment_integral(spec, p, contours):
    L = spec.L
    tau = p.tau

    def fn(*us):
        cross = 1.0
        for a in range(L):
            for b in range(a + 1, L):
                cross = cross * (us[a] - us[b]) / (us[a] - tau * us[b])
        val = cross
        for a in range(L):
            val = val * _h_factor(us[a], p, spec.x, spec.t) / us[a]
        return val

    val, scale = _tensor_multi(fn, contours, with_scale=True)
    pref = tau ** (L * (L - 1) / 2.0)
    return pref * val, pref * scale


def moment_contour(spec: MomentSpec, p: ModelParams, contours=None, tol=1e-8,
                   full=False):
    """E[tau^{L N_x}(t)] from step IC by the L-fold nested contour integral.

    Convergence is judged by node doubling against max(tol, cancellation
    noise floor); the -tau loops see a pole of order x, so the floor grows
    with x.
    """
    if spec.L == 0:
        return {"value": 1.0, "imag": 0.0, "doubling_delta": 0.0} if full else 1.0
    if spec.L > 3:
        raise ContourFamilyInfeasibleError("nested route guarded to L <= 3")
    if contours is None:
        contours = moment_contours(p, spec.L)
    v1, _ = _moment_integral(spec, p, contours)
    v2, scale = _moment_integral(
        spec, p, [c.with_nodes(2 * c.nodes) for c in contours]
    )
    floor = 2e-14 * scale
    if abs(v1 - v2) > max(tol, floor):
        raise QuadratureNotConvergedError(
            f"moment_contour: doubling moved value by {abs(v1 - v2):.3e} "
            f"(noise floor {floor:.1e})"
        )
    if full:
        return {
            "value": v2.real,
            "imag": abs(v2.imag),
            "doubling_delta": abs(v1 - v2),
            "noise_floor": floor,
        }
    return v2.real


def moment_exact(spec: MomentSpec, p: ModelParams):
    """E[tau^{L N_x}(t)] summed over the exact DP law of the windowed state."""
    from .particles import exact_distribution

    dist = exact_distribution(p, spec.t, spec.x)
    tau = p.tau
    out = 0.0
    for xs, pr in dist.items():
        nx = sum(1 for v in xs if v <= spec.x)
        out += pr * tau ** (spec.L * nx)
    return out


def moment_mc(spec: MomentSpec, p: ModelParams, samples, seed, threads=None):
    """(mean, standard error) of tau^{L N_x(t)} over independent runs."""
    from .particles import nx_samples

    if spec.L == 0:
        return 1.0, 0.0
    nx = nx_samples(p, spec.x, spec.t, seed, samples, threads=threads)
    vals = p.tau ** (spec.L * nx.astype(np.float64))
    mean = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(samples))
    return mean, se


def _partitions(k):
    """Integer partitions of k as weakly decreasing tuples."""
    if k == 0:
        yield ()
        return
    def rec(rem, maxp):
        if rem == 0:
            yield ()
            return
        for first in range(min(rem, maxp), 0, -1):
            for rest in rec(rem - first, first):
                yield (first,) + rest
    yield from rec(k, k)


def _det_small(mats):
    """Determinant of stacked l x l matrices (l <= 3), elementwise arrays."""
    l = len(mats)
    if l == 1:
        return mats[0][0]
    if l == 2:
        return mats[0][0] * mats[1][1] - mats[0][1] * mats[1][0]
    a, b, c = mats[0]
    d, e, f = mats[1]
    g, h, i = mats[2]
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def mu_k_nested(k, spec_xt, p: ModelParams, nodes=64, tol=1e-8):
    """mu_k by both routes of the residue expansion.

    Route one is the k-fold nested integral (identical to the L = k moment
    integrand); route two is the partition sum over lambda |- k with small
    determinant kernels on the single circle C_r. Returns (route1, route2,
    |difference|).
    """
    x, t = spec_xt
    if k > 3:
        raise QuadratureNotConvergedError("mu_k guarded to k <= 3")
    spec = MomentSpec(L=k, x=x, t=t)
    route1 = moment_contour(spec, p, tol=tol)

    tau = p.tau
    r = tau * (1.0 + 1.0 / p.kappa) / 2.0

    def f(z):
        return _h_factor(z, p, x, t)

    def route2_at(m_nodes):
        c = ContourSpec.circle(0.0, r, nodes=m_nodes)
        total = 0.0 + 0.0j
        for lam in _partitions(k):
            ell = len(lam)
            mult = 1.0
            for part in set(lam):
                mult *= math.factorial(lam.count(part))

            def fn(*ws, _lam=lam, _ell=ell):
                mats = [
                    [
                        -1.0 / (ws[i] * tau ** _lam[i] - ws[j])
                        for j in range(_ell)
                    ]
                    for i in range(_ell)
                ]
                val = _det_small(mats)
                for j in range(_ell):
                    for a in range(_lam[j]):
                        val = val * f((tau ** a) * ws[j])
                return val

            total += (
                _tensor_multi(fn, [c] * ell) / mult
            )
        return q_pochhammer(tau, tau, k).real * total

    v1 = route2_at(nodes * 2)
    v2 = route2_at(nodes * 4)
    if abs(v1 - v2) > tol:
        raise QuadratureNotConvergedError(
            f"mu_k route two: doubling moved value by {abs(v1 - v2):.3e}"
        )
    route2 = v2.real
    return route1, route2, abs(route1 - route2)


def _g_ratio(w, s, p: ModelParams, x, t):
    """g(w)/g(tau^s w) for the kernel; integer powers, single valued in s."""
    tau = p.tau
    k = p.kappa
    ts1 = np.exp((s - 1.0) * math.log(tau))
    return ((1.0 + w * k / tau) / (1.0 + ts1 * w * k)) ** t * (
        (1.0 + ts1 * w) / (1.0 + w / tau)
    ) ** x


def fredholm_matrix(zeta, spec: MomentSpec, p: ModelParams, op: FredholmOperator):
    """I + K_zeta discretized on C_r with trapezoid weights absorbed."""
    if zeta.imag == 0.0 and zeta.real >= 0.0:
        raise ZetaOnCutError("zeta must avoid the nonnegative real axis")
    log_mz = np.log(-zeta)  # principal branch
    ws, wweights = op.contour.points_weights()
    sline, sweights = op.inner_line.points_weights()
    m = ws.shape[0]
    K = np.zeros((m, m), complex)
    tau = p.tau
    for s, dw in zip(sline, sweights):
        ts = np.exp(s * math.log(tau))
        coef = np.exp(s * log_mz) / np.sin(np.pi * s)
        gr = _g_ratio(ws, s, p, spec.x, spec.t)
        denom = ts * ws[:, None] - ws[None, :]
        # (1/2i) * integral ds; dw already contains the i of ds = i dsigma
        K += (coef / 2j) * dw * (gr[:, None] / denom)
    return np.eye(m) + K * wweights[None, :]


def qlaplace_fredholm(spec: MomentSpec, p: ModelParams, op: FredholmOperator = None,
                      tol=1e-8, full=False):
    """det(I + K_zeta) on C_r: equals E[1 / (zeta tau^{N_x}; tau)_inf]."""
    zeta = complex(spec.zeta)
    if op is None:
        op = default_fredholm_operator(p, zeta=zeta)
    d1 = complex(np.linalg.det(fredholm_matrix(zeta, spec, p, op)))
    op2 = FredholmOperator(
        contour=op.contour.with_nodes(2 * op.contour.nodes),
        inner_line=op.inner_line.with_nodes(2 * op.inner_line.nodes),
    )
    d2 = complex(np.linalg.det(fredholm_matrix(zeta, spec, p, op2)))
    if abs(d1 - d2) > tol:
        raise QuadratureNotConvergedError(
            f"qlaplace_fredholm: node doubling moved det by {abs(d1 - d2):.3e}"
        )
    if full:
        return {"value": d2, "doubling_delta": abs(d1 - d2)}
    return d2


def fredholm_matrix_series(zeta, spec: MomentSpec, p: ModelParams,
                           contour: ContourSpec, a_max=None):
    """I + K_zeta with the kernel in residue-sum form
    K(w,w') = sum_{a>=1} -zeta^a g(w)/g(tau^a w) / (tau^a w - w').

    Integer powers of zeta only, hence analytic across the positive real
    axis; valid for |zeta| small (terms decay like |zeta|^a).
    """
    zeta = complex(zeta)
    if abs(zeta) > 0.45:
        raise ZetaOnCutError("series kernel restricted to |zeta| <= 0.45")
    if a_max is None:
        a_max = max(8, int(math.ceil(math.log(1e-17) / math.log(max(abs(zeta), 1e-8)))))
    ws, wweights = contour.points_weights()
    m = ws.shape[0]
    K = np.zeros((m, m), complex)
    tau = p.tau
    za = 1.0 + 0.0j
    for a in range(1, a_max + 1):
        za *= zeta
        ta = tau ** a
        gr = _g_ratio(ws, float(a), p, spec.x, spec.t)
        K += -za * gr[:, None] / (ta * ws[:, None] - ws[None, :])
    return np.eye(m) + K * wweights[None, :]


def moment_fredholm(spec: MomentSpec, p: ModelParams, rho=0.1, n_nodes=24,
                    contour_nodes=128):
    """mu_L extracted from the determinant's Taylor series in zeta.

    det(I + K_zeta) = sum_k mu_k zeta^k / (tau;tau)_k near zeta = 0; Cauchy
    coefficients are read off the circle |zeta| = rho. The residue-sum kernel
    is used because the Taylor nodes straddle the positive real axis, where
    the vertical-line kernel's truncation error degenerates.
    """
    L = spec.L
    if L == 0:
        return 1.0
    r = p.tau * (1.0 + 1.0 / p.kappa) / 2.0
    contour = ContourSpec.circle(0.0, r, nodes=contour_nodes)
    zs = rho * np.exp(2j * np.pi * (np.arange(n_nodes) + 0.5) / n_nodes)
    dets = np.array(
        [
            complex(np.linalg.det(fredholm_matrix_series(z, spec, p, contour)))
            for z in zs
        ]
    )
    coeff = np.mean(dets * zs ** (-L))
    mu = q_pochhammer(p.tau, p.tau, L).real * coeff
    return mu.real


def qlaplace_series(spec: MomentSpec, p: ModelParams, k_max=8):
    """Truncated series sum_k mu_k zeta^k/(tau;tau)_k with DP moments."""
    zeta = complex(spec.zeta)
    tau = p.tau
    out = 1.0 + 0.0j
    for k in range(1, k_max + 1):
        mu = moment_exact(MomentSpec(L=k, x=spec.x, t=spec.t), p)
        out += mu * zeta ** k / q_pochhammer(tau, tau, k).real
    return out


def qlaplace_exact_atoms(spec: MomentSpec, p: ModelParams):
    """E[1/(zeta tau^{N_x}; tau)_inf] from the exact DP law of N_x."""
    from .particles import exact_distribution

    dist = exact_distribution(p, spec.t, spec.x)
    law = {}
    for xs, pr in dist.items():
        nx = sum(1 for v in xs if v <= spec.x)
        law[nx] = law.get(nx, 0.0) + pr
    out = 0.0 + 0.0j
    for nx, pr in law.items():
        out += pr / q_pochhammer(spec.zeta * p.tau ** nx, p.tau, math.inf)
    return out
