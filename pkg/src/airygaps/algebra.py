"""Exact polynomial and Puiseux-series arithmetic over the rationals.

Everything in this module is exact: coefficients are `fractions.Fraction`,
so the symbolic layers built on top (potential fitting, tau functions,
PDE derivations) can assert identities with `==` instead of tolerances.

Two containers do the work.  `MultiPoly` is a sparse multivariate
polynomial keyed by exponent tuples.  `PuiseuxSeries` is a truncated
series at infinity in a single symbol whose coefficients are MultiPoly
values; its truncation window is tracked explicitly so that reading a
coefficient below the window is an error, never a silent zero.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Mapping, Sequence, Union

Scalar = Union[int, Fraction]


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return Fraction(value)
    raise TypeError("expected an exact rational, got %s" % type(value).__name__)


def _var_key(name: str):
    """Sort key putting t2 before t10 and grouping by alphabetic stem."""
    stem = name.rstrip("0123456789")
    suffix = name[len(stem):]
    return (stem, int(suffix) if suffix else -1, name)


def _binomial(q: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for i in range(k):
        out *= (q - i)
        out /= (i + 1)
    return out


class MultiPoly:
    """Sparse multivariate polynomial with Fraction coefficients.

    The variable tuple is kept sorted (natural order on numeric
    suffixes), and binary operations between polynomials over different
    variable sets merge the two universes first, so callers never have
    to align rings by hand.
    """

    __slots__ = ("vars", "coeffs")

    def __init__(self, vars: Sequence[str] = (), coeffs: Mapping[tuple, Scalar] | None = None):
        order = sorted(set(vars), key=_var_key)
        if len(order) != len(vars):
            raise ValueError("duplicate variable name")
        perm = [vars.index(v) for v in order]
        object.__setattr__(self, "vars", tuple(order))
        clean: dict[tuple, Fraction] = {}
        for mono, c in (coeffs or {}).items():
            if len(mono) != len(perm):
                raise ValueError("exponent tuple does not match variable count")
            c = _as_fraction(c)
            if not c:
                continue
            mono = tuple(int(mono[i]) for i in perm)
            if any(e < 0 for e in mono):
                raise ValueError("negative exponent in polynomial")
            tot = clean.get(mono, Fraction(0)) + c
            if tot:
                clean[mono] = tot
            else:
                clean.pop(mono, None)
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, name, value):
        raise AttributeError("MultiPoly is immutable")

    @classmethod
    def const(cls, value: Scalar) -> "MultiPoly":
        return cls((), {(): value} if value else {})

    @classmethod
    def var(cls, name: str) -> "MultiPoly":
        return cls((name,), {(1,): 1})

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def _aligned(self, other: "MultiPoly"):
        if self.vars == other.vars:
            return self.vars, self.coeffs, other.coeffs
        merged = tuple(sorted(set(self.vars) | set(other.vars), key=_var_key))

        def remap(poly):
            pos = [merged.index(v) for v in poly.vars]
            out = {}
            for mono, c in poly.coeffs.items():
                big = [0] * len(merged)
                for p, e in zip(pos, mono):
                    big[p] = e
                out[tuple(big)] = c
            return out

        return merged, remap(self), remap(other)

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return MultiPoly.const(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        merged, a, b = self._aligned(other)
        out = dict(a)
        for mono, c in b.items():
            out[mono] = out.get(mono, Fraction(0)) + c
        return MultiPoly(merged, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.vars, {m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        merged, a, b = self._aligned(other)
        out: dict[tuple, Fraction] = {}
        for ma, ca in a.items():
            for mb, cb in b.items():
                mono = tuple(x + y for x, y in zip(ma, mb))
                tot = out.get(mono, Fraction(0)) + ca * cb
                if tot:
                    out[mono] = tot
                else:
                    out.pop(mono, None)
        return MultiPoly(merged, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self * (Fraction(1) / Fraction(other))
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        out = MultiPoly.const(1)
        base = self
        k = n
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        _, a, b = self._aligned(other)
        return a == b

    def diff(self, name: str) -> "MultiPoly":
        if name not in self.vars:
            return MultiPoly(self.vars, {})
        i = self.vars.index(name)
        out = {}
        for mono, c in self.coeffs.items():
            e = mono[i]
            if e:
                lowered = mono[:i] + (e - 1,) + mono[i + 1:]
                out[lowered] = out.get(lowered, Fraction(0)) + c * e
        return MultiPoly(self.vars, out)

    def subs(self, mapping: Mapping[str, "MultiPoly | Scalar"]) -> "MultiPoly":
        values = {}
        for v, val in mapping.items():
            values[v] = val if isinstance(val, MultiPoly) else MultiPoly.const(val)
        out = MultiPoly.const(0)
        for mono, c in self.coeffs.items():
            term = MultiPoly.const(c)
            for v, e in zip(self.vars, mono):
                if not e:
                    continue
                term = term * values.get(v, MultiPoly.var(v)) ** e
            out = out + term
        return out

    def eval_num(self, values: Mapping[str, complex]):
        total = 0.0
        for mono, c in self.coeffs.items():
            prod = float(c)
            for v, e in zip(self.vars, mono):
                if e:
                    prod = prod * values[v] ** e
            total = total + prod
        return total

    def constant_term(self) -> Fraction:
        zero = (0,) * len(self.vars)
        return self.coeffs.get(zero, Fraction(0))

    def total_degree(self) -> int:
        if not self.coeffs:
            return 0
        return max(sum(m) for m in self.coeffs)

    def degree_in(self, name: str) -> int:
        if name not in self.vars or not self.coeffs:
            return 0
        i = self.vars.index(name)
        return max(m[i] for m in self.coeffs)

    def weighted_degrees(self, weights: Mapping[str, int]) -> set:
        """Set of total weights present, for quasi-homogeneity checks."""
        out = set()
        for mono in self.coeffs:
            out.add(sum(weights.get(v, 0) * e for v, e in zip(self.vars, mono)))
        return out

    def _term_str(self, mono, coeff) -> tuple[str, str]:
        parts = []
        for v, e in zip(self.vars, mono):
            if e == 1:
                parts.append(v)
            elif e > 1:
                parts.append("%s^%d" % (v, e))
        sign = "-" if coeff < 0 else "+"
        mag = abs(coeff)
        if not parts:
            return sign, str(mag)
        if mag == 1:
            return sign, "*".join(parts)
        return sign, "%s*%s" % (mag, "*".join(parts))

    def __str__(self):
        if not self.coeffs:
            return "0"
        ordered = sorted(self.coeffs, key=lambda m: (sum(m), tuple(-e for e in m)))
        pieces = []
        for i, mono in enumerate(ordered):
            sign, body = self._term_str(mono, self.coeffs[mono])
            if i == 0:
                pieces.append(body if sign == "+" else "-" + body)
            else:
                pieces.append("%s %s" % (sign, body))
        return " ".join(pieces)

    def __repr__(self):
        return "MultiPoly(%s)" % self


def _exp_str(var: str, e: Fraction) -> str:
    if e == 1:
        return var
    if e.denominator == 1 and e >= 0:
        return "%s^%d" % (var, e)
    return "%s^(%s)" % (var, e)


class PuiseuxSeries:
    """Series at infinity in one symbol, rational exponents descending.

    ``terms`` maps Fraction exponents to MultiPoly coefficients.  ``tail``
    is the truncation marker: the series is only resolved for exponents
    strictly above ``tail``, and `coeff` raises for anything at or below
    it.  ``tail=None`` means the series is exact (typically a Laurent
    polynomial).
    """

    __slots__ = ("var", "terms", "tail")

    def __init__(self, var: str, terms: Mapping[Fraction, MultiPoly] | None = None,
                 tail: Fraction | None = None):
        object.__setattr__(self, "var", var)
        if tail is not None:
            tail = Fraction(tail)
        object.__setattr__(self, "tail", tail)
        clean: dict[Fraction, MultiPoly] = {}
        for e, c in (terms or {}).items():
            e = Fraction(e)
            if not isinstance(c, MultiPoly):
                c = MultiPoly.const(c)
            if c.is_zero:
                continue
            if tail is not None and e <= tail:
                continue
            if e in clean:
                raise ValueError("duplicate exponent %s" % e)
            clean[e] = c
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("PuiseuxSeries is immutable")

    @classmethod
    def variable(cls, var: str) -> "PuiseuxSeries":
        return cls(var, {Fraction(1): MultiPoly.const(1)})

    @classmethod
    def from_const(cls, var: str, value) -> "PuiseuxSeries":
        return cls(var, {Fraction(0): value})

    @property
    def is_resolved_zero(self) -> bool:
        return not self.terms

    def lead_exponent(self) -> Fraction:
        if not self.terms:
            raise ValueError("series has no resolved terms")
        return max(self.terms)

    def lead_coeff(self) -> MultiPoly:
        return self.terms[self.lead_exponent()]

    def ramification(self) -> int:
        denom = 1
        for e in self.terms:
            denom = denom * e.denominator // math.gcd(denom, e.denominator)
        return denom

    def coeff(self, exponent) -> MultiPoly:
        e = Fraction(exponent)
        if self.tail is not None and e <= self.tail:
            raise ValueError(
                "exponent %s is at or below the truncation window O(%s^(%s))"
                % (e, self.var, self.tail))
        return self.terms.get(e, MultiPoly.const(0))

    def _check_var(self, other: "PuiseuxSeries"):
        if self.var != other.var:
            raise ValueError("series in different symbols: %s vs %s" % (self.var, other.var))

    @staticmethod
    def _max_tail(*tails):
        known = [t for t in tails if t is not None]
        return max(known) if known else None

    def __add__(self, other):
        if isinstance(other, (int, Fraction, MultiPoly)) and not isinstance(other, bool):
            other = PuiseuxSeries.from_const(self.var, other)
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        self._check_var(other)
        tail = self._max_tail(self.tail, other.tail)
        out: dict[Fraction, MultiPoly] = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, MultiPoly.const(0)) + c
        return PuiseuxSeries(self.var, out, tail)

    __radd__ = __add__

    def __neg__(self):
        return PuiseuxSeries(self.var, {e: -c for e, c in self.terms.items()}, self.tail)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, MultiPoly)) and not isinstance(other, bool):
            other = PuiseuxSeries.from_const(self.var, other)
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, MultiPoly)) and not isinstance(other, bool):
            scale = other if isinstance(other, MultiPoly) else MultiPoly.const(other)
            return PuiseuxSeries(self.var, {e: c * scale for e, c in self.terms.items()}, self.tail)
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        self._check_var(other)
        tails = []
        if self.tail is not None:
            top = other.lead_exponent() if other.terms else other.tail
            if top is not None:
                tails.append(self.tail + top)
            if other.tail is not None:
                tails.append(self.tail + other.tail)
        if other.tail is not None and self.terms:
            tails.append(other.tail + self.lead_exponent())
        tail = self._max_tail(*tails) if tails else None
        out: dict[Fraction, MultiPoly] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = ea + eb
                if tail is not None and e <= tail:
                    continue
                prod = ca * cb
                if e in out:
                    tot = out[e] + prod
                    if tot.is_zero:
                        del out[e]
                    else:
                        out[e] = tot
                elif not prod.is_zero:
                    out[e] = prod
        return PuiseuxSeries(self.var, out, tail)

    __rmul__ = __mul__

    def truncate(self, tail) -> "PuiseuxSeries":
        tail = Fraction(tail)
        new_tail = self._max_tail(self.tail, tail)
        return PuiseuxSeries(self.var, self.terms, new_tail)

    def __eq__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        return (self.var == other.var and self.tail == other.tail
                and self.terms == other.terms)

    def residue(self) -> MultiPoly:
        return self.coeff(Fraction(-1))

    def plus_part(self) -> "PuiseuxSeries":
        """Terms with nonnegative exponents, exact by construction."""
        kept = {e: c for e, c in self.terms.items() if e >= 0}
        if self.tail is not None and self.tail >= 0:
            raise ValueError("nonnegative exponents not fully resolved")
        return PuiseuxSeries(self.var, kept, None)

    def __str__(self):
        bits = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            body = str(c)
            if len(c.coeffs) > 1:
                body = "(%s)" % body
            if e == 0:
                bits.append(body)
            elif body == "1":
                bits.append(_exp_str(self.var, e))
            elif body == "-1":
                bits.append("-" + _exp_str(self.var, e))
            else:
                bits.append("%s*%s" % (body, _exp_str(self.var, e)))
        if self.tail is not None:
            bits.append("O(%s)" % _exp_str(self.var, self.tail))
        if not bits:
            return "0"
        out = bits[0]
        for b in bits[1:]:
            if b.startswith("-"):
                out += " - " + b[1:]
            else:
                out += " + " + b
        return out

    def __repr__(self):
        return "PuiseuxSeries(%s)" % self


def residue(s: PuiseuxSeries) -> MultiPoly:
    """Coefficient of the 1/var term; raises if the window hides it."""
    return s.residue()


def puiseux_pow(s: PuiseuxSeries, exponent, tail=None) -> PuiseuxSeries:
    """Raise a series at infinity to a rational power.

    The leading coefficient must be exactly 1 so the fractional power is
    unambiguous.  For a fractional or negative exponent the result is an
    infinite descending series; it is truncated at `tail` (default: -2,
    deep enough to read off a residue).
    """
    q = Fraction(exponent)
    if not s.terms:
        if q > 0:
            return PuiseuxSeries(s.var, {}, s.tail)
        raise ValueError("cannot raise an (unresolved) zero series to power %s" % q)
    lead = s.lead_exponent()
    if s.terms[lead] != MultiPoly.const(1):
        raise ValueError("puiseux_pow requires leading coefficient 1, got %s"
                         % s.terms[lead])
    exact = q.denominator == 1 and q >= 0 and s.tail is None and tail is None
    if tail is not None:
        tail = Fraction(tail)
    elif not exact:
        tail = Fraction(-2)
    if s.tail is not None:
        inherited = s.tail + (q - 1) * lead
        tail = inherited if tail is None else max(tail, inherited)

    # s = u^lead * (1 + x), with x strictly below order 0.
    shifted = PuiseuxSeries(s.var, {e - lead: c for e, c in s.terms.items()},
                            None if s.tail is None else s.tail - lead)
    x = shifted - 1
    result = PuiseuxSeries.from_const(s.var, 1)
    if tail is not None:
        result = result.truncate(tail - q * lead)
    if not x.is_resolved_zero:
        gap = -x.lead_exponent()
        if gap <= 0:
            raise ValueError("series is not in descending form")
        xk = PuiseuxSeries.from_const(s.var, 1)
        if tail is not None:
            xk = xk.truncate(tail - q * lead)
        k = 1
        while True:
            if exact and k > q:
                break
            if tail is not None and -k * gap <= tail - q * lead:
                break
            xk = xk * x
            if xk.is_resolved_zero:
                break
            b = _binomial(q, k)
            if b:
                result = result + xk * b
            k += 1
    out = {e + q * lead: c for e, c in result.terms.items()}
    out_tail = None if result.tail is None else result.tail + q * lead
    return PuiseuxSeries(s.var, out, out_tail)


def _eval_poly_series(s: PuiseuxSeries, arg: PuiseuxSeries) -> PuiseuxSeries:
    """Evaluate a Laurent-polynomial series (integer exponents >= 0) at `arg`."""
    if s.tail is not None:
        raise ValueError("composition needs an exact polynomial")
    out = PuiseuxSeries(arg.var, {}, arg.tail)
    for e, c in s.terms.items():
        if e.denominator != 1 or e < 0:
            raise ValueError("composition needs nonnegative integer exponents")
        term = PuiseuxSeries.from_const(arg.var, c)
        for _ in range(int(e)):
            term = term * arg
        out = out + term
    return out


def puiseux_revert(V_prime: PuiseuxSeries, order: int) -> PuiseuxSeries:
    """Invert a monic polynomial w = V'(u) as a Puiseux series u(w).

    Returns u as a series in the same symbol, now read as the inverse
    function's argument: u(w) = w^(1/p) + ... with `order` correction
    exponents resolved below the lead.  The result is round-trip checked
    term by term; failure raises ArithmeticError.
    """
    if order < 1:
        raise ValueError("order must be at least 1")
    if V_prime.tail is not None:
        raise ValueError("inversion needs an exact polynomial")
    p_deg = V_prime.lead_exponent()
    if p_deg.denominator != 1 or p_deg < 1:
        raise ValueError("expected a polynomial of degree >= 1")
    if V_prime.lead_coeff() != MultiPoly.const(1):
        raise ValueError("inversion requires a monic polynomial")
    p = int(p_deg)
    var = V_prime.var
    # Resolve exponents (1 - j)/p for j = 0..order; the window starts one
    # grid step below the last of those.
    tail = Fraction(-order, p)
    lower = PuiseuxSeries(var, {e: c for e, c in V_prime.terms.items() if e != p_deg})
    w = PuiseuxSeries.variable(var)
    u = puiseux_pow(w, Fraction(1, p), tail=tail)
    for _ in range(order + 2):
        inner = w - _eval_poly_series(lower, u)
        nxt = puiseux_pow(inner, Fraction(1, p), tail=tail)
        if nxt == u:
            break
        u = nxt
    else:
        raise ArithmeticError("series inversion did not stabilize")
    check = _eval_poly_series(V_prime, u) - w
    for e, c in check.terms.items():
        if not c.is_zero:
            raise ArithmeticError(
                "inversion round-trip failed at exponent %s: %s" % (e, c))
    return u


def schur_polynomials(k_max: int, var_count: int) -> list:
    """Elementary Schur polynomials p_0..p_k of t_1..t_var_count.

    Defined by the recurrence k*p_k = sum_i i*t_i*p_{k-i}, matching the
    generating function exp(sum t_i z^i).
    """
    if k_max < 0:
        raise ValueError("k_max must be nonnegative")
    if var_count < 1:
        raise ValueError("need at least one variable")
    tvars = [MultiPoly.var("t%d" % i) for i in range(1, var_count + 1)]
    out = [MultiPoly.const(1)]
    for k in range(1, k_max + 1):
        acc = MultiPoly.const(0)
        for i in range(1, min(k, var_count) + 1):
            acc = acc + i * tvars[i - 1] * out[k - i]
        out.append(acc / k)
    return out
