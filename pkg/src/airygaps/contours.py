"""Steepest-descent contours and quadrature rules for the kernel integrals.

Every contour is a union of wedge components.  A component consists of
two rays from a common vertex on the real axis, at angles +-theta with
theta = ell * pi / (p + 1).  Components with even ell carry the factor
exp(-V_p) and make up the plus family; odd ell carries exp(+V_p) and
makes up the minus family.  Along the exact ray angles the phase decays
like exp(-r^(p+1)/(p+1)) in the ray parameter r for both families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.special import roots_legendre

__all__ = [
    "RayContour",
    "QuadratureRule",
    "standard_contours",
    "build_quadrature",
    "decay_rate",
]

DEFAULT_DELTA = 0.25


@dataclass(frozen=True)
class RayContour:
    """One wedge component: rays at angles +-angle from a real vertex.

    sign is +1 when the component belongs to the plus family (the
    integrand carries exp(-V_p)) and -1 for the minus family.  ccw
    components run from the lower ray through the vertex to the upper
    ray; cw components run the other way.
    """

    p: int
    ell: int
    vertex: float
    angle: float
    ccw: bool
    sign: int

    def __post_init__(self):
        if not 0.0 < self.angle < math.pi:
            raise ValueError("ray angle must lie strictly between 0 and pi")
        if self.sign not in (-1, 1):
            raise ValueError("sign must be +1 or -1")


@dataclass(frozen=True)
class QuadratureRule:
    """Discretized contour: nodes and complex dz weights.

    integrate(f) approximates the contour integral of f; f must accept
    a complex ndarray.  Weights already include ray directions and the
    component orientation.
    """

    nodes: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return self.nodes.size

    def integrate(self, f) -> complex:
        return complex(np.sum(self.weights * f(self.nodes)))

    def merged(self, other: "QuadratureRule") -> "QuadratureRule":
        return QuadratureRule(
            nodes=np.concatenate([self.nodes, other.nodes]),
            weights=np.concatenate([self.weights, other.weights]))


def decay_rate(contour: RayContour) -> float:
    """Phase decay coefficient along the rays; positive means usable."""
    return contour.sign * math.cos((contour.p + 1) * contour.angle)


def standard_contours(p: int, sign: int,
                      delta: float = DEFAULT_DELTA) -> tuple:
    """The wedge components of the plus or minus contour family.

    Vertices sit at delta * (p + 1 - 2 ell) so that neighbouring
    components interlace on the real axis without touching.  Components
    whose rays would collapse onto the real axis are excluded.
    """
    if p < 2:
        raise ValueError("kernel order p must be at least 2")
    if sign not in (-1, 1):
        raise ValueError("sign must be +1 or -1")
    start = 2 if sign == 1 else 1
    out = []
    for ell in range(start, p + 1, 2):
        angle = ell * math.pi / (p + 1)
        out.append(RayContour(
            p=p,
            ell=ell,
            vertex=delta * (p + 1 - 2 * ell),
            angle=angle,
            ccw=(ell // 2) % 2 == 1,
            sign=sign))
    return tuple(out)


def envelope_radius(contour: RayContour, decay_scale: float,
                    rel_tol: float) -> float:
    """Ray length beyond which the integrand is below rel_tol."""
    if not 0.0 < rel_tol < 1.0:
        raise ValueError("rel_tol must lie in (0, 1)")
    if decay_scale <= 0.0:
        raise ValueError("decay_scale must be positive")
    rate = decay_rate(contour)
    if rate < 0.05:
        raise ValueError(
            "contour at angle %.4f does not decay for sign %+d"
            % (contour.angle, contour.sign))
    q = contour.p + 1
    return (q * math.log(1.0 / rel_tol) / (rate * decay_scale)) ** (1.0 / q)


def _ray_panels(radius: float, panels: int, order: int):
    """Gauss-Legendre nodes on [0, radius] with geometrically shrinking panels."""
    x, w = roots_legendre(max(4, order))
    bounds = [radius / 2.0 ** k for k in range(panels)] + [0.0]
    s = []
    ws = []
    for hi, lo in zip(bounds, bounds[1:]):
        mid = 0.5 * (hi + lo)
        half = 0.5 * (hi - lo)
        s.append(mid + half * x)
        ws.append(half * w)
    return np.concatenate(s), np.concatenate(ws)


def build_quadrature(contour, decay_scale: float = 1.0,
                     rel_tol: float = 1e-12, order: int = 16,
                     panels: int = 6) -> QuadratureRule:
    """Quadrature rule for one component or a family of components.

    decay_scale rescales the phase envelope; pass a value below 1 to
    lengthen the rays when slowly decaying prefactors ride on top of
    the bare phase.
    """
    if isinstance(contour, RayContour):
        components: Sequence[RayContour] = (contour,)
    else:
        components = tuple(contour)
        if not components:
            raise ValueError("no contour components given")
    all_nodes = []
    all_weights = []
    for comp in components:
        radius = envelope_radius(comp, decay_scale, rel_tol)
        s, ws = _ray_panels(radius, panels, order)
        sigma = 1.0 if comp.ccw else -1.0
        down = comp.vertex + s * np.exp(-1j * comp.angle)
        up = comp.vertex + s * np.exp(1j * comp.angle)
        all_nodes.append(down)
        all_weights.append(-sigma * np.exp(-1j * comp.angle) * ws)
        all_nodes.append(up)
        all_weights.append(sigma * np.exp(1j * comp.angle) * ws)
    return QuadratureRule(
        nodes=np.concatenate(all_nodes),
        weights=np.concatenate(all_weights))
