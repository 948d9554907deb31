"""Finite-difference verification of the gap PDEs on computed determinants.

The derived equations constrain Q(E; params) through five operators:
the endpoint shift generator (del: E -> E + s), the dilation generator
(eps: E -> e^h E), the mid-time flow (t_{p-1}, or its announced alias
tau = 2 t_2 in the reflected cusp frame), and d/dw.  Every equation
term is a product of mixed derivatives of Q, so a tensor grid of gap
determinants around one configuration supports central finite
differences for all of them at once.

Residual reports carry the per-term breakdown and a convergence order
estimated from step halving: a true identity leaves a residual that is
pure stencil truncation plus determinant noise, so it must shrink at
roughly the stencil order until the noise floor h^{-k} eps_det bites.

The cusp-to-edge asymptotic check compares the cusp gap in a window
drifting with the edge trajectory against the stationary edge gap.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Mapping

import numpy as np

from .algebra import MultiPoly
from .fredholm import AccuracyError, Endpoints, gap_logdet
from .hirota import Atom, DiffExpr, GapPDE, target_expression
from .kernel import KernelSpec

AXES = ("shift", "dilation", "par", "w")


@dataclass(frozen=True)
class Steps:
    """Central-difference step sizes, one per grid axis.

    Defaults balance stencil truncation O(h^2) against determinant
    noise amplified by h^{-k}: at 1e-10 determinant accuracy and the
    fourth shift derivative, 0.05^{-4} * 1e-10 ~ 2e-5 stays well below
    the 1e-2 residual tolerances while truncation stays ~1e-3.
    """

    shift: float = 0.05
    dilation: float = 0.02
    par: float = 0.05
    w: float = 0.05

    def __post_init__(self):
        for axis in AXES:
            if getattr(self, axis) <= 0.0:
                raise ValueError("step sizes must be positive")

    def scaled(self, factor: float) -> "Steps":
        return Steps(*(getattr(self, axis) * factor for axis in AXES))

    def of(self, axis: str) -> float:
        return getattr(self, axis)


@lru_cache(maxsize=None)
def _central_stencil(order: int) -> tuple:
    """Coefficients of the minimal central stencil for one derivative.

    Nodes run -r..r with r = ceil(order / 2); the coefficients are for
    f^(order)(0) * h^order, exact through degree 2r (truncation order
    at least 2 by symmetry).
    """
    radius = (order + 1) // 2
    nodes = np.arange(-radius, radius + 1, dtype=float)
    powers = np.vander(nodes, increasing=True).T
    rhs = np.zeros(2 * radius + 1)
    rhs[order] = math.factorial(order)
    return tuple(np.linalg.solve(powers, rhs))


def stencil_radius(order: int) -> int:
    return (order + 1) // 2


class ParamGrid:
    """Cached gap values on a tensor stencil around one configuration.

    Axes: endpoint shift s (E -> E + s), dilation h (E -> e^h E, whose
    h-derivative at 0 is the generator sum a_i d/da_i), one kernel
    parameter (mid-time or tau), and w.  Values are computed lazily
    through `value_fn(endpoint_values, d_par, d_w)` and cached by index,
    so every equation sharing the grid reuses the same determinants.
    """

    def __init__(self, base: Endpoints, value_fn: Callable, steps: Steps,
                 radii: Mapping[str, int], w_inert: bool = False,
                 cache: dict | None = None):
        self.base = base
        self.value_fn = value_fn
        self.steps = steps
        self.radii = {axis: int(radii.get(axis, 0)) for axis in AXES}
        self.w_inert = w_inert
        self.cache = {} if cache is None else cache
        self.offsets = {
            axis: tuple(i * steps.of(axis)
                        for i in range(-self.radii[axis], self.radii[axis] + 1))
            for axis in AXES}

    def _key(self, index: tuple) -> tuple:
        if self.w_inert and index[3]:
            index = index[:3] + (0,)
        return tuple(round(i * self.steps.of(axis), 12)
                     for axis, i in zip(AXES, index))

    def _endpoint_values(self, shift_off: float, dilation_off: float) -> tuple:
        stretch = math.exp(dilation_off)
        values = tuple(stretch * a + shift_off for a in self.base.a)
        return Endpoints(values).a

    def value(self, index: tuple) -> float:
        key = self._key(index)
        hit = self.cache.get(key)
        if hit is None:
            hit = float(self.value_fn(
                self._endpoint_values(key[0], key[1]), key[2], key[3]))
            if not math.isfinite(hit):
                raise AccuracyError(
                    "gap value is not finite at grid offsets %r" % (key,))
            self.cache[key] = hit
        return hit

    def warm(self, indices, jobs: int = 1) -> None:
        todo = sorted({self._key(i) for i in indices} - self.cache.keys())
        if jobs > 1 and len(todo) > 1:
            def compute(key):
                return key, float(self.value_fn(
                    self._endpoint_values(key[0], key[1]), key[2], key[3]))
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                for key, q in pool.map(compute, todo):
                    if not math.isfinite(q):
                        raise AccuracyError(
                            "gap value is not finite at grid offsets %r" % (key,))
                    self.cache[key] = q

    def stencil_indices(self, orders: Mapping[str, int]):
        axes_orders = self._validated(orders)
        ranges = []
        for axis in AXES:
            r = stencil_radius(axes_orders[axis]) if axes_orders[axis] else 0
            ranges.append(range(-r, r + 1))
        return [(i, j, k, l) for i in ranges[0] for j in ranges[1]
                for k in ranges[2] for l in ranges[3]]

    def _validated(self, orders: Mapping[str, int]) -> dict:
        unknown = set(orders) - set(AXES)
        if unknown:
            raise ValueError("unknown grid axes %s" % sorted(unknown))
        axes_orders = {axis: int(orders.get(axis, 0)) for axis in AXES}
        for axis, k in axes_orders.items():
            if k < 0:
                raise ValueError("derivative orders must be non-negative")
            if stencil_radius(k) > self.radii[axis]:
                raise ValueError(
                    "stencil for %s-derivative of order %d exceeds the grid "
                    "(radius %d)" % (axis, k, self.radii[axis]))
        return axes_orders

    def fd(self, orders: Mapping[str, int]) -> float:
        """Mixed central difference, tensor product over the axes."""
        axes_orders = self._validated(orders)
        total = 0.0
        for index in self.stencil_indices(axes_orders):
            weight = 1.0
            for axis, i in zip(AXES, index):
                k = axes_orders[axis]
                if k == 0:
                    continue
                coeffs = _central_stencil(k)
                weight *= coeffs[i + stencil_radius(k)]
            if weight:
                total += weight * self.value(index)
        scale = 1.0
        for axis, k in axes_orders.items():
            if k:
                scale *= self.steps.of(axis) ** k
        return total / scale

    def rows(self) -> list:
        """Cached samples as (shift, dilation, par, w, Q) rows."""
        return [key + (q,) for key, q in sorted(self.cache.items())]


def fd_partial(grid: ParamGrid, orders: Mapping[str, int]) -> float:
    """Mixed partial derivative from the grid's cached values.

    `orders` maps axis name in {"shift", "dilation", "par", "w"} to the
    derivative order; missing axes mean order zero.  The dilation axis
    realizes the generator sum a_i d/da_i exactly at offset zero, and
    repeated orders compose it with itself (the operators' natural,
    non-commuting order: outer axes differentiate the inner result).
    """
    return grid.fd(orders)


# ---------------------------------------------------------------------------
# Equation evaluation


@dataclass(frozen=True)
class ResidualReport:
    """Numerical verdict on one gap PDE at one configuration."""

    equation: str
    residual: float
    largest_term: float
    relative: float
    terms: tuple
    orders: tuple
    steps: Steps
    determinants: int

    def __post_init__(self):
        if self.largest_term < 0.0:
            raise ValueError("largest term magnitude cannot be negative")


def _resolve_equation(equation):
    """Expression, frame, function symbol, and id for an equation."""
    if isinstance(equation, GapPDE):
        return (equation.expression, "engine", equation.function_symbol,
                equation.id, equation.params.get("shift"))
    expr, frame, func = target_expression(str(equation))
    return expr, frame, func, str(equation), None


def _mid_index(expr: DiffExpr) -> int | None:
    seen = {i for atoms in expr.terms for a in atoms for i in a.mid}
    if len(seen) > 1:
        raise ValueError(
            "equation mixes several mid-time flows %s; the grid exposes "
            "exactly one parameter axis" % sorted(seen))
    return seen.pop() if seen else None


def _required_p(expr: DiffExpr, frame: str) -> int:
    return 3 if frame == "intro" or _mid_index(expr) else 2


def _check_spec(spec: KernelSpec, expr: DiffExpr, frame: str, eq_id: str):
    if any(a.l1 or a.lp or a.lq
           for atoms in expr.terms for a in atoms):
        raise ValueError(
            "equation %s keeps derivatives along times the grid does not "
            "expose" % eq_id)
    needed = _required_p(expr, frame)
    if spec.p != needed:
        raise ValueError(
            "equation %s lives at p = %d, got a p = %d kernel" %
            (eq_id, needed, spec.p))
    if frame == "intro" and not spec.reflect:
        raise ValueError(
            "equation %s is stated in the reflected cusp frame; evaluate "
            "it on the cusp preset" % eq_id)
    if frame == "engine" and spec.reflect:
        raise ValueError(
            "equation %s is stated in kernel coordinates; pass an "
            "unreflected spec" % eq_id)


def _base_values(spec: KernelSpec, frame: str) -> dict:
    values = {"t%d" % (i + 1): t for i, t in enumerate(spec.t)}
    values["w"] = spec.w
    if frame == "intro":
        values = {"tau": 2.0 * spec.t[1], "w": -spec.w}
    return values


def _sampled_spec(spec: KernelSpec, frame: str, d_par: float,
                  d_w: float) -> KernelSpec:
    if frame == "intro":
        times = (spec.t[0], spec.t[1] + d_par / 2.0)
        return replace(spec, t=times, w=spec.w - d_w)
    times = list(spec.t)
    if d_par:
        times[spec.p - 2] += d_par
    return replace(spec, t=tuple(times), w=spec.w + d_w)


def _shift_poly(frame: str, func: str, p: int, declared) -> MultiPoly | None:
    """Linear background absorbed into the second-derivative function."""
    if func != "U":
        return None
    if declared is not None:
        return declared
    if frame == "intro":
        return MultiPoly.var("tau") / 3
    return MultiPoly.var("t%d" % (p - 1)) * (p - 1) / p


def _atom_orders(atom: Atom, func: str) -> dict:
    orders = {"shift": atom.dl, "dilation": atom.eps,
              "par": len(atom.mid), "w": atom.dw}
    if func == "U":
        orders["shift"] += 2
    return orders


def _grid_radii(expr: DiffExpr, func: str) -> dict:
    radii = {axis: 0 for axis in AXES}
    for atoms in expr.terms:
        for a in atoms:
            for axis, k in _atom_orders(a, func).items():
                radii[axis] = max(radii[axis], stencil_radius(k))
    return radii


def _atom_value(grid: ParamGrid, atom: Atom, func: str, shift_poly,
                par_name: str | None, base: Mapping) -> float:
    value = grid.fd(_atom_orders(atom, func))
    if func == "U" and atom.dl == 0 and atom.eps == 0 and atom.dw == 0:
        correction = shift_poly
        for _ in atom.mid:
            correction = correction.diff(par_name)
        if not correction.is_zero:
            value -= float(correction.eval_num(dict(base)))
    return value


def _evaluate(expr: DiffExpr, grid: ParamGrid, base: Mapping, func: str,
              shift_poly, par_name: str | None, p: int, jobs: int):
    needed = set()
    for atoms in expr.terms:
        for a in atoms:
            needed.update(grid.stencil_indices(_atom_orders(a, func)))
    grid.warm(needed, jobs)
    total = 0.0
    breakdown = []
    for atoms, coeff in sorted(expr.terms.items()):
        term = float(coeff.eval_num(dict(base)))
        for a in atoms:
            term *= _atom_value(grid, a, func, shift_poly, par_name, base)
        label = DiffExpr({atoms: coeff}).render(func, p)
        breakdown.append((label, term))
        total += term
    return total, tuple(breakdown)


def residual(equation, spec: KernelSpec, E: Endpoints,
             steps: Steps | None = None, m: int = 48, levels: int = 2,
             jobs: int = 1, grid_rows: list | None = None) -> ResidualReport:
    """Evaluate one gap PDE on finite-difference data and report.

    `equation` is a GapPDE from the derivation pipeline or the id of a
    frozen reference; `spec` fixes the kernel configuration the
    equation's coefficients refer to (the reflected cusp preset for the
    announced tau-frame equations, a plain spec otherwise).  The
    residual and per-term breakdown come from the finest step level;
    convergence orders compare successive halvings.
    """
    if levels < 1:
        raise ValueError("at least one step level is required")
    expr, frame, func, eq_id, declared_shift = _resolve_equation(equation)
    _check_spec(spec, expr, frame, eq_id)
    steps = steps or Steps()
    mid = _mid_index(expr)
    par_name = None
    if frame == "intro":
        par_name = "tau"
    elif mid is not None:
        par_name = "t%d" % mid
        if mid != spec.p - 1:
            raise ValueError(
                "equation %s flows along t%d; the grid exposes t%d"
                % (eq_id, mid, spec.p - 1))
    shift_poly = _shift_poly(frame, func, spec.p, declared_shift)
    base = _base_values(spec, frame)
    radii = _grid_radii(expr, func)
    if not E.a:
        empty = ResidualReport(
            equation=eq_id, residual=0.0, largest_term=0.0, relative=0.0,
            terms=(), orders=(), steps=steps, determinants=0)
        return empty

    def value_fn(endpoint_values, d_par, d_w):
        sampled = _sampled_spec(spec, frame, d_par, d_w)
        return gap_logdet(sampled, Endpoints(endpoint_values), m=m).Q

    results = []
    cache_sizes = []
    for level in range(levels):
        grid = ParamGrid(E, value_fn, steps.scaled(0.5 ** level), radii,
                         w_inert=spec.n == 0)
        total, breakdown = _evaluate(
            expr, grid, base, func, shift_poly, par_name, spec.p, jobs)
        results.append((grid.steps, total, breakdown))
        cache_sizes.append(len(grid.cache))
        if grid_rows is not None:
            grid_rows.extend(grid.rows())
    orders = []
    for (_, coarse, _), (_, fine, _) in zip(results, results[1:]):
        if fine == 0.0:
            orders.append(float("inf"))
        else:
            orders.append(math.log2(abs(coarse) / abs(fine)))
    final_steps, total, breakdown = results[-1]
    largest = max((abs(v) for _, v in breakdown), default=0.0)
    return ResidualReport(
        equation=eq_id,
        residual=total,
        largest_term=largest,
        relative=abs(total) / largest if largest else 0.0,
        terms=breakdown,
        orders=tuple(orders),
        steps=final_steps,
        determinants=sum(cache_sizes))


# ---------------------------------------------------------------------------
# Cusp-to-edge asymptotics


@dataclass(frozen=True)
class LimitRow:
    """One tau sample of the drifting-window comparison."""

    tau: float
    cusp_Q: float
    edge_Q: float
    deviation: float


@dataclass(frozen=True)
class LimitTable:
    """Drifting-window comparison table and fitted decay exponent."""

    rows: tuple
    exponent: float | None
    dropped: tuple


def pearcey_airy_limit(tau_values, E: Endpoints, n: int = 0, w: float = 0.0,
                       m: int = 48) -> LimitTable:
    """Compare cusp gaps in the edge-drift window to stationary edge gaps.

    For each tau the cusp gap is taken on c(tau) + sigma(tau) * (-E)
    with center c = (2/27)(3 tau)^{3/2} and scale sigma = (3 tau)^{1/6},
    the edge gap on -E, and the deviation is |probability ratio - 1|.
    The fitted exponent is the log-log slope of deviation against tau
    (the drift approximation predicts -4/3).
    """
    from .kernel import pearcey_preset

    edge_spec = KernelSpec(p=2, n=n, w=w)
    window = E.reflected()
    rows = []
    dropped = []
    if not E.a:
        return LimitTable(rows=(), exponent=None, dropped=())
    edge_Q = gap_logdet(edge_spec, window, m=m).Q
    for tau in tau_values:
        tau = float(tau)
        center = (2.0 / 27.0) * (3.0 * tau) ** 1.5
        scale = (3.0 * tau) ** (1.0 / 6.0)
        shifted = Endpoints(tuple(center + scale * v for v in window.a))
        try:
            cusp_Q = gap_logdet(pearcey_preset(tau, n=n, w=w), shifted, m=m).Q
        except AccuracyError as err:
            dropped.append((tau, str(err)))
            continue
        deviation = abs(math.expm1(cusp_Q - edge_Q))
        rows.append(LimitRow(tau=tau, cusp_Q=cusp_Q, edge_Q=edge_Q,
                             deviation=deviation))
    slopes = [(math.log(r.tau), math.log(r.deviation))
              for r in rows if r.deviation > 0.0]
    exponent = None
    if len(slopes) >= 2:
        xs, ys = zip(*slopes)
        exponent = float(np.polyfit(xs, ys, 1)[0])
    return LimitTable(rows=tuple(rows), exponent=exponent,
                      dropped=tuple(dropped))
