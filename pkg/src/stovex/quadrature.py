"""Contour descriptions and quadrature node generators.

Circles use the periodic trapezoid rule (spectrally accurate for integrands
analytic in an annulus around the contour); vertical segments use
Gauss-Legendre. Circle weights absorb dz/(2*pi*i), so a contour integral
(1/2*pi*i) * integral f dz is just sum(w * f(z)).
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float
    orientation: int = 1


@dataclass(frozen=True)
class ContourSpec:
    kind: str
    circles: tuple = ()
    re: float = 0.0
    half_height: float = 0.0
    nodes: int = 128

    @staticmethod
    def circle(center, radius, nodes=128, orientation=1):
        return ContourSpec(
            kind="circle", circles=(Circle(complex(center), float(radius), orientation),),
            nodes=nodes,
        )

    @staticmethod
    def circle_union(circles, nodes=128):
        return ContourSpec(kind="circle_union", circles=tuple(circles), nodes=nodes)

    @staticmethod
    def vertical_line(re, half_height, nodes=200):
        return ContourSpec(
            kind="vertical_line", re=float(re), half_height=float(half_height),
            nodes=nodes,
        )

    def with_nodes(self, nodes):
        return ContourSpec(
            kind=self.kind, circles=self.circles, re=self.re,
            half_height=self.half_height, nodes=nodes,
        )

    def points_weights(self):
        """(z, w) with sum(w * f(z)) ~ (1/2*pi*i) * contour integral of f."""
        if self.kind in ("circle", "circle_union"):
            zs = []
            ws = []
            for c in self.circles:
                th = 2.0 * np.pi * (np.arange(self.nodes) + 0.5) / self.nodes
                rot = c.radius * np.exp(1j * th)
                zs.append(c.center + rot)
                ws.append(c.orientation * rot / self.nodes)
            return np.concatenate(zs), np.concatenate(ws)
        if self.kind == "vertical_line":
            # plain ds quadrature: ds = i d(sigma); weights include the i
            xg, wg = np.polynomial.legendre.leggauss(self.nodes)
            sig = self.half_height * xg
            s = self.re + 1j * sig
            w = 1j * self.half_height * wg
            return s, w
        raise ValueError(f"unknown contour kind {self.kind}")


def tensor_apply(fn, zs, ws, n):
    """sum over an n-fold tensor grid of w_1..w_n * fn(Z_1,..,Z_n).

    fn must accept n broadcastable complex arrays. The first axis is chunked
    so the n=3 case stays within memory.
    """
    if n == 1:
        return np.sum(ws * fn(zs))
    if n == 2:
        val = fn(zs[:, None], zs[None, :])
        return np.sum(ws[:, None] * ws[None, :] * val)
    if n == 3:
        total = 0.0 + 0.0j
        for k in range(zs.shape[0]):
            val = fn(zs[k], zs[:, None], zs[None, :])
            total += ws[k] * np.sum(ws[:, None] * ws[None, :] * val)
        return total
    raise ValueError("tensor_apply supports n <= 3")
