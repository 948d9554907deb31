"""Contour-defined eigenfunctions of the higher Airy spectral problems.

phi(spec, u) evaluates

    sqrt(sign * p / (2 pi)) * int exp(-sign * y^(p+1)/(p+1) + sign*u*y)
                                  * (y - w)^(sign*n) dy

over the requested wedge components, every wedge swept counterclockwise
(lower ray in, upper ray out).  The square root of a negative prefactor
is read as (1/i) times the positive root.  For p = 2 these reduce to
scaled Airy functions; for every p they solve a linear ODE of order
p + 1 in u (order p when n = 0), which ode_residual checks numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .contours import DEFAULT_DELTA, build_quadrature, standard_contours

__all__ = ["PhiSpec", "phi", "ode_residual", "wave_psi"]


@dataclass(frozen=True)
class PhiSpec:
    """One member of the eigenfunction family.

    n is the winding exponent: the integrand carries (y - w)^(sign*n).
    components selects wedges by their ell label; None takes the whole
    family for (p, sign).  delta places the wedge vertices; the default
    shrinks with p because a vertex far from the origin drags parts of
    the rays through phase-growth regions and ruins relative accuracy.
    For large |u| pass a delta that puts the dominant wedge vertex near
    the saddle |u|^(1/p), or the result drowns in quadrature noise.
    """

    p: int
    sign: int
    n: int = 0
    w: float = 0.0
    components: tuple | None = None
    delta: float | None = None
    rel_tol: float = 1e-14
    order: int = 24
    panels: int = 7

    def vertex_scale(self) -> float:
        if self.delta is not None:
            return self.delta
        return min(DEFAULT_DELTA, 0.5 / (self.p - 1))

    def contours(self):
        comps = standard_contours(self.p, self.sign, self.vertex_scale())
        if self.components is not None:
            keep = set(self.components)
            comps = tuple(c for c in comps if c.ell in keep)
            if not comps:
                raise ValueError("component selection matched no wedge")
        return tuple(replace(c, ccw=True) for c in comps)

    @property
    def prefactor(self) -> complex:
        root = math.sqrt(self.p / (2.0 * math.pi))
        return root if self.sign == 1 else root / 1j


def _rule_for(spec: PhiSpec, u_scale: float):
    """Quadrature rule whose rays outlast the exp(u y) growth."""
    log_tol = math.log(1.0 / spec.rel_tol)
    q = spec.p + 1
    radius = (q * log_tol) ** (1.0 / q)
    for _ in range(12):
        radius = (q * (log_tol + u_scale * radius)) ** (1.0 / q)
    scale = log_tol / (log_tol + u_scale * radius)
    return build_quadrature(spec.contours(), decay_scale=scale,
                            rel_tol=spec.rel_tol, order=spec.order,
                            panels=spec.panels)


def _moments(spec: PhiSpec, u, powers):
    """Integrals of y^k times the phi integrand, for k in powers.

    Returns an array of shape (len(powers),) + u.shape.
    """
    u = np.asarray(u, dtype=complex)
    rule = _rule_for(spec, float(np.max(np.abs(u))) if u.size else 0.0)
    y = rule.nodes
    s = spec.sign
    phase = -s * y ** (spec.p + 1) / (spec.p + 1)
    base = np.exp(phase[:, None] + s * np.outer(y, u.ravel()))
    if spec.n:
        base = base * (y - spec.w)[:, None] ** (s * spec.n)
    out = np.empty((len(powers),) + u.shape, dtype=complex)
    for k, pw in enumerate(powers):
        vals = (rule.weights * y ** pw) @ base
        out[k] = vals.reshape(u.shape)
    return out


def phi(spec: PhiSpec, u):
    """Evaluate the eigenfunction at complex points u (scalar or array)."""
    u_arr = np.asarray(u, dtype=complex)
    vals = spec.prefactor * _moments(spec, u_arr, (0,))[0]
    return complex(vals) if np.isscalar(u) or u_arr.shape == () else vals


def ode_residual(spec: PhiSpec, u) -> float:
    """Max relative residual of the defining ODE over the points u.

    For n = 0 the operator is (sign d/du)^p - u; for n >= 1 it is
    (sign d/du - w)((sign d/du)^p - u) - n, which clears the inverse
    term of the deformed spectral problem.
    """
    u_arr = np.atleast_1d(np.asarray(u, dtype=complex))
    m = _moments(spec, u_arr, (0, 1, spec.p, spec.p + 1))
    i0, i1, ip, ip1 = m
    if spec.n == 0:
        resid = ip - u_arr * i0
    else:
        resid = (ip1 - spec.w * ip - u_arr * i1
                 + (spec.w * u_arr - spec.sign - spec.n) * i0)
    scale = np.maximum(np.abs(i0), np.max(np.abs(i0)) * 1e-6)
    return float(np.max(np.abs(resid) / scale))


def wave_psi(spec: PhiSpec, x, z):
    """Normalized wave function: tends to 1 as z grows in its sector.

    Multiplies phi(x + z^p) by z^(-sign*n + (p-1)/2) and by
    exp(-sign * p/(p+1) * z^(p+1)), removing the leading behavior.
    """
    z_arr = np.asarray(z, dtype=complex)
    u = x + z_arr ** spec.p
    head = (z_arr ** (-spec.sign * spec.n + (spec.p - 1) / 2.0)
            * np.exp(-spec.sign * spec.p / (spec.p + 1.0)
                     * z_arr ** (spec.p + 1)))
    vals = head * phi(spec, u)
    return complex(vals) if np.isscalar(z) or z_arr.shape == () else vals
