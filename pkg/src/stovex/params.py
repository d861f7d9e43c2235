"""Model parameters and closed-form macroscopic laws.

Covers the strict regime 0 < b2 < b1 < 1, where tau = b2/b1 and
kappa = (1-b1)/(1-b2) both lie in (0,1). The liquid (curved) cone is
kappa < x/y < 1/kappa; outside it the height profile is frozen.
"""

import math
from dataclasses import dataclass

from .errors import DegenerateError, OutOfRangeError, OutsideLiquidRegionError


@dataclass(frozen=True)
class ModelParams:
    b1: float
    b2: float
    tau: float
    kappa: float


def validate_params(b1, b2):
    """Validate 0 < b2 < b1 < 1 and derive tau, kappa."""
    b1 = float(b1)
    b2 = float(b2)
    for name, b in (("b1", b1), ("b2", b2)):
        if not (0.0 < b < 1.0) or math.isnan(b):
            raise OutOfRangeError(f"{name}={b} must lie strictly inside (0, 1)")
    if b1 <= b2:
        raise DegenerateError(
            f"need b2 < b1 strictly (got b1={b1}, b2={b2}); "
            "b1 <= b2 collapses the liquid region"
        )
    return ModelParams(b1=b1, b2=b2, tau=b2 / b1, kappa=(1.0 - b1) / (1.0 - b2))


def limit_shape_height(x, y, p):
    """Macroscopic height profile: 0 / curved / x - y across the three sectors.

    Boundary rays x/y in {kappa, 1/kappa} are assigned to the frozen values.
    """
    if not (x > 0 and y > 0):
        raise OutOfRangeError("limit shape requires x > 0 and y > 0")
    r = x / y
    if r <= p.kappa:
        return 0.0
    if r >= 1.0 / p.kappa:
        return x - y
    d = math.sqrt(y * (1.0 - p.b1)) - math.sqrt(x * (1.0 - p.b2))
    return d * d / (p.b1 - p.b2)


def fluctuation_scale_xy(x, y, p):
    """Cube-root fluctuation coefficient sigma_{x,y}; liquid region only."""
    if not (x > 0 and y > 0):
        raise OutOfRangeError("requires x > 0 and y > 0")
    k = p.kappa
    if not (k < x / y < 1.0 / k):
        raise OutsideLiquidRegionError(
            f"x/y={x / y} outside the open cone ({k}, {1 / k})"
        )
    a = 1.0 - math.sqrt(k * x / y)
    b = 1.0 - math.sqrt(k * y / x)
    return (
        k ** (-1.0 / 3.0)
        * (x * y) ** (1.0 / 6.0)
        / (k ** -0.5 - k ** 0.5)
        * (a * b) ** (2.0 / 3.0)
    )


def current_lln(nu, p):
    """Particle-current law of large numbers m_nu = (sqrt(nu)-sqrt(kappa))^2/(1-kappa)."""
    k = p.kappa
    if not (k < nu < 1.0 / k):
        raise OutsideLiquidRegionError(f"nu={nu} outside ({k}, {1 / k})")
    d = math.sqrt(nu) - math.sqrt(k)
    return d * d / (1.0 - k)


def current_scale(nu, p):
    """Current fluctuation coefficient sigma_nu; equals fluctuation_scale_xy(nu, 1)."""
    k = p.kappa
    if not (k < nu < 1.0 / k):
        raise OutsideLiquidRegionError(f"nu={nu} outside ({k}, {1 / k})")
    return (
        math.sqrt(k)
        * nu ** (-1.0 / 6.0)
        / (1.0 - k)
        * ((1.0 - math.sqrt(nu * k)) * (math.sqrt(nu / k) - 1.0)) ** (2.0 / 3.0)
    )
