"""Steepest-descent diagnostics for G(z) and the desk-scale reproduction of
the limit shape and of the cube-root current fluctuations.

The fluctuation experiment standardizes xi = (m_nu L - N_{floor(nu L)}(L)) /
(sigma_nu L^{1/3}) over many independent runs and measures the
Kolmogorov-Smirnov distance to the Tracy-Widom table.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import OnBranchCutError, OutsideLiquidRegionError
from .params import ModelParams, current_lln, current_scale, limit_shape_height
from .tracy_widom import f_gue_table, interp_cdf, tw_mean_var


def g_function(z, nu, p: ModelParams):
    """G(z) = ln(1 + z kappa/tau) - nu ln(1 + z/tau) + m_nu ln z, principal logs."""
    z = complex(z)
    tau, k = p.tau, p.kappa
    m = current_lln(nu, p)
    for cut_end, shift in ((-tau / k, 1.0 + z * k / tau), (-tau, 1.0 + z / tau),
                           (0.0, z)):
        if z.imag == 0.0 and z.real <= cut_end:
            raise OnBranchCutError(f"z={z} on the cut ending at {cut_end}")
        del shift
    return (
        cmath.log(1.0 + z * k / tau)
        - nu * cmath.log(1.0 + z / tau)
        + m * cmath.log(z)
    )


@dataclass(frozen=True)
class CriticalData:
    nu: float
    rho: float
    g3: float
    sigma_check: float
    g1_resid: float
    g2_resid: float


def _cauchy_derivs(nu, p, rho, order=3, nodes=96):
    """G', G'', G''' at rho by Cauchy integrals on a small circle."""
    r0 = 0.45 * rho
    th = 2.0 * np.pi * (np.arange(nodes) + 0.5) / nodes
    zs = rho + r0 * np.exp(1j * th)
    vals = np.array([g_function(z, nu, p) for z in zs])
    out = []
    for m in range(1, order + 1):
        coef = np.mean(vals * (r0 * np.exp(1j * th)) ** (-m))
        out.append(coef * math.factorial(m))
    return [complex(v) for v in out]


def critical_point(nu, p: ModelParams):
    """Double critical point rho of G plus consistency diagnostics.

    Validates G'(rho) = G''(rho) = 0 numerically and the identity
    G'''(rho)/2 = (sigma_nu / rho)^3.
    """
    k = p.kappa
    if not (k < nu < 1.0 / k):
        raise OutsideLiquidRegionError(f"nu={nu} outside ({k}, {1 / k})")
    rho = -p.tau * (1.0 - math.sqrt(nu / k)) / (1.0 - math.sqrt(nu * k))
    g1, g2, g3 = _cauchy_derivs(nu, p, rho)
    sigma = current_scale(nu, p)
    return CriticalData(
        nu=nu,
        rho=rho,
        g3=g3.real / 2.0,
        sigma_check=(sigma / rho) ** 3,
        g1_resid=abs(g1),
        g2_resid=abs(g2),
    )


def _kern():
    from . import _kernels_np

    if backend.active() == "numba":
        from . import _kernels_nb

        return _kernels_nb
    return _kernels_np


def lln_experiment(p: ModelParams, L, grid, samples, seed, threads=None):
    """Height averages H(Lx, Ly)/L per grid point against the limit shape.

    grid is a sequence of (x, y) pairs with integer Lx, Ly after scaling.
    Returns a list of dict rows.
    """
    backend.set_threads(threads)
    qcols = np.array([int(math.floor(L * x)) for x, _ in grid], np.int64)
    qrows = np.array([int(math.ceil(L * y)) for _, y in grid], np.int64)
    X = int(qcols.max())
    Y = int(qrows.max())
    heights = _kern().lln_batch(
        p.b1, p.b2, X, Y, np.uint64(seed % (1 << 64)), int(samples), qcols, qrows
    )
    rows = []
    for j, (x, y) in enumerate(grid):
        hs = heights[:, j] / float(L)
        rows.append(
            {
                "x": x,
                "y": y,
                "mean": float(hs.mean()),
                "std": float(hs.std(ddof=1)) if samples > 1 else 0.0,
                "limit": limit_shape_height(x, y, p),
                "L": L,
                "samples": samples,
            }
        )
    return rows


def ks_distance(xi, ss, fs, grid_pts=400):
    """Max CDF gap between the sample and the tabulated law on a fixed grid."""
    grid = np.linspace(ss[0], ss[-1], grid_pts)
    ref = interp_cdf(ss, fs, grid)
    emp = np.searchsorted(np.sort(xi), grid, side="right") / xi.shape[0]
    return float(np.max(np.abs(emp - ref)))


def fluctuation_experiment(p: ModelParams, nu, L, samples, seed, threads=None,
                           tw_table=None):
    """Standardized current fluctuations vs the Tracy-Widom law.

    Returns (xi array, summary dict with ks / mean / var / var_ratio).
    """
    from .particles import nx_samples

    backend.set_threads(threads)
    x_obs = int(math.floor(nu * L))
    m = current_lln(nu, p)
    sigma = current_scale(nu, p)
    nx = nx_samples(p, x_obs, L, seed, samples, threads=threads)
    xi = (m * L - nx.astype(np.float64)) / (sigma * L ** (1.0 / 3.0))
    if tw_table is None:
        tw_table = f_gue_table()
    ss, fs = tw_table
    tw_mean, tw_var = tw_mean_var(ss, fs)
    summary = {
        "ks": ks_distance(xi, ss, fs),
        "mean": float(xi.mean()),
        "var": float(xi.var(ddof=1)),
        "tw_mean": tw_mean,
        "tw_var": tw_var,
        "var_ratio": float(xi.var(ddof=1) / tw_var),
        "L": L,
        "S": samples,
        "nu": nu,
        "b1": p.b1,
        "b2": p.b2,
        "seed": seed,
    }
    return xi, summary
