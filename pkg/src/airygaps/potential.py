"""Polynomial potentials fitted to prescribed inverse-series data.

The kernel family is driven by a degree p+1 potential V_p whose
derivative is monic of degree p.  Its lower coefficients theta_i are
not free: they are pinned, triangularly, by requiring that the inverse
series u(w) of w = V_p'(u) starts

    u(w) = w^(1/p) + sum_j (p-j)/p * t_{p-j} * w^(-j/p) + O(w^(-1)),

which makes t_1..t_{p-1} the natural deformation times.  On top of the
fitted potential this module builds two exact generating functions: the
log of the topological tau function (whose t_i derivatives are residues
of fractional powers of V_p') and the phase polynomial entering the
wave functions (whose t_i derivatives are the constant terms of the
same fractional powers).  Both are integrated by quasi-homogeneity and
re-checked derivative by derivative, so a silent bad fit cannot get
through.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .algebra import MultiPoly, PuiseuxSeries, puiseux_pow, puiseux_revert, residue

F = Fraction


def _t_name(i: int) -> str:
    return "t%d" % i


def _t_map(p: int, t) -> dict[str, float]:
    """Normalize times to a {"t1": value, ...} dict with p-1 entries."""
    names = [_t_name(i) for i in range(1, p)]
    if isinstance(t, Mapping):
        unknown = set(t) - set(names)
        if unknown:
            raise ValueError("unexpected time parameters: %s" % sorted(unknown))
        return {n: float(t.get(n, 0.0)) for n in names}
    t = list(t)
    if len(t) != p - 1:
        raise ValueError("expected %d times t1..t%d, got %d" % (p - 1, p - 1, len(t)))
    return {n: float(v) for n, v in zip(names, t)}


@dataclass(frozen=True)
class PotentialVp:
    """Fitted potential: V_p'(u) = u^p + sum_i theta[i] u^i, i = 0..p-2.

    Each theta[i] is an exact polynomial in the times t_1..t_{p-1}.
    """

    p: int
    theta: tuple

    def t_vars(self) -> tuple:
        return tuple(_t_name(i) for i in range(1, self.p))

    def v_prime_series(self) -> PuiseuxSeries:
        terms = {F(self.p): MultiPoly.const(1)}
        for i, th in enumerate(self.theta):
            terms[F(i)] = th
        return PuiseuxSeries("u", terms)

    def theta_numeric(self, t) -> list:
        tmap = _t_map(self.p, t)
        return [th.eval_num(tmap) for th in self.theta]

    def v_eval(self, u, t):
        """V_p(u), vectorized over u (complex ok)."""
        u = np.asarray(u, dtype=complex)
        th = self.theta_numeric(t)
        out = u ** (self.p + 1) / (self.p + 1)
        for i, c in enumerate(th):
            if c:
                out = out + (c / (i + 1)) * u ** (i + 1)
        return out

    def v_prime_eval(self, u, t):
        u = np.asarray(u, dtype=complex)
        th = self.theta_numeric(t)
        out = u ** self.p
        for i, c in enumerate(th):
            if c:
                out = out + c * u ** i
        return out


def solve_theta(p: int) -> PotentialVp:
    """Fit theta_0..theta_{p-2} to the prescribed inverse-series data.

    Works with placeholder coefficients h_i, inverts w = V'(u) once,
    then solves the p-1 coefficient constraints in ascending depth; each
    one is linear in exactly one not-yet-determined placeholder.
    """
    if p < 2:
        raise ValueError("p must be at least 2")
    holders = ["h%d" % i for i in range(p - 1)]
    terms = {F(p): MultiPoly.const(1)}
    for i, name in enumerate(holders):
        terms[F(i)] = MultiPoly.var(name)
    v_prime = PuiseuxSeries("u", terms)
    u = puiseux_revert(v_prime, order=p + 1)

    solved: dict[str, MultiPoly] = {}
    for j in range(1, p):
        name = holders[p - 1 - j]
        c = u.coeff(F(-j, p)).subs(solved)
        slope = c.diff(name)
        if slope.is_zero or slope != MultiPoly.const(slope.constant_term()):
            raise ArithmeticError(
                "constraint %d is not linear in %s as expected" % (j, name))
        rhs = F(p - j, p) * MultiPoly.var(_t_name(p - j))
        sol = (rhs - c.subs({name: 0})) / slope.constant_term()
        for h in holders:
            if h in sol.vars and sol.degree_in(h) > 0:
                raise ArithmeticError("constraint %d left a free placeholder" % j)
        solved[name] = sol
    return PotentialVp(p, tuple(solved[h] for h in holders))


def _euler_integrate(p: int, rhs: Sequence[MultiPoly], total_weight: int) -> MultiPoly:
    """Integrate dF/dt_m = rhs[m-1] assuming F is quasi-homogeneous.

    Weights are wt(t_m) = p + 1 - m and F has the given total weight, so
    F = (1/W) sum_m wt(t_m) t_m rhs_m.  The assumption is re-checked by
    differentiating back; a mismatch raises instead of returning junk.
    """
    out = MultiPoly.const(0)
    for m in range(1, p):
        out = out + F(p + 1 - m, total_weight) * MultiPoly.var(_t_name(m)) * rhs[m - 1]
    for m in range(1, p):
        if out.diff(_t_name(m)) != rhs[m - 1]:
            raise ArithmeticError(
                "quasi-homogeneous integration failed at t%d" % m)
    return out


def topological_tau_log(p: int) -> MultiPoly:
    """Exact log of the topological tau function at the locus t_{>=p} = 0.

    Its time derivatives are d/dt_m = -p/(p+m) res_u (V_p')^((p+m)/p).
    """
    pot = solve_theta(p)
    vps = pot.v_prime_series()
    rhs = []
    for m in range(1, p):
        r = residue(puiseux_pow(vps, F(p + m, p)))
        rhs.append(-F(p, p + m) * r)
    return _euler_integrate(p, rhs, 2 * (p + 1))


def consistency_71_72(p: int) -> bool:
    """Cross-check the two residue formulas for the topological tau.

    The mixed derivative d/dt_1 of -p/(p+m) res (V')^((p+m)/p) must equal
    res (V')^(m/p) for every m < p.
    """
    pot = solve_theta(p)
    vps = pot.v_prime_series()
    for m in range(1, p):
        lhs = (-F(p, p + m) * residue(puiseux_pow(vps, F(p + m, p)))).diff(_t_name(1))
        rhs = residue(puiseux_pow(vps, F(m, p)))
        if lhs != rhs:
            return False
    return True


def phase_polynomial(p: int) -> MultiPoly:
    """Wave-function phase P(t): dP/dt_m is the constant term of (V')^(m/p)."""
    pot = solve_theta(p)
    vps = pot.v_prime_series()
    rhs = []
    for m in range(1, p):
        b = puiseux_pow(vps, F(m, p)).coeff(0)
        rhs.append(b)
    return _euler_integrate(p, rhs, p + 1)
