"""Bilinear operators and the symbolic derivation of endpoint PDEs.

The pipeline has three exact stages, all over rational coefficients.

1. Hirota polynomials.  `hirota_equation` builds the quadratic bilinear
   operators Y_ell and Y_{1,ell} from elementary Schur polynomials, and
   `hirota_apply` evaluates P(D) f . g so the operators can be tested
   directly on Schur-function tau functions.

2. Log-tau form.  `to_logtau_pde` rewrites an even bilinear operator as
   a polynomial PDE in the derivatives of log tau (variables U<indices>
   below), via the generating identity
   P(D) tau.tau / (2 tau^2) = (1/2) sum_g c_g g! [y^g] exp(S(y)),
   S(y) = 2 sum_{|a| even >= 2} y^a/a! * d^a log tau.

3. Constraint elimination.  `virasoro_substitute` removes every t_1,
   t_p and t_{p+1} derivative from such a PDE using the operator
   identities satisfied by the gap determinant generating function:
   the shift constraint (t_1 derivative = endpoint translation), the
   dilation constraint (t_{p+1} derivative = endpoint scaling) and the
   reduction of the t_p flow.  What remains involves only endpoint
   operators, mid times t_2..t_{p-1}, and the winding parameter w.
   `derive_gap_pde` runs the three stages and subtracts the smooth
   background, leaving a PDE for the gap log-determinant itself.

Endpoint operators: `del` is the sum of endpoint translations, `eps`
the endpoint dilation sum a_i d/da_i; they satisfy [del, eps] = del.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple

from .algebra import MultiPoly, puiseux_pow, residue, schur_polynomials
from .potential import solve_theta, topological_tau_log

F = Fraction


class UnsupportedEquationError(ValueError):
    """Raised when an equation needs derivative rules outside the set."""


# ---------------------------------------------------------------------------
# Hirota operators


def _dvar(i: int) -> str:
    return "D%d" % i


def _tvar(i: int) -> str:
    return "t%d" % i


class HirotaOperator:
    """Polynomial in the symbols D1, D2, ... acting bilinearly."""

    __slots__ = ("poly",)

    def __init__(self, poly: MultiPoly):
        object.__setattr__(self, "poly", poly)

    def __setattr__(self, name, value):
        raise AttributeError("HirotaOperator is immutable")

    def even_part(self) -> "HirotaOperator":
        kept = {m: c for m, c in self.poly.coeffs.items() if sum(m) % 2 == 0}
        return HirotaOperator(MultiPoly(self.poly.vars, kept))

    def max_index(self) -> int:
        best = 0
        for v in self.poly.vars:
            if self.poly.degree_in(v):
                best = max(best, int(v[1:]))
        return best

    def __add__(self, other):
        if isinstance(other, HirotaOperator):
            return HirotaOperator(self.poly + other.poly)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, HirotaOperator):
            return HirotaOperator(self.poly - other.poly)
        return NotImplemented

    def __rmul__(self, scalar):
        if isinstance(scalar, (int, Fraction)):
            return HirotaOperator(self.poly * scalar)
        return NotImplemented

    __mul__ = __rmul__

    def __eq__(self, other):
        if isinstance(other, HirotaOperator):
            return self.poly == other.poly
        return NotImplemented

    def apply(self, f: MultiPoly, g: MultiPoly) -> MultiPoly:
        return hirota_apply(self, f, g)

    def __str__(self):
        return str(self.poly)

    def __repr__(self):
        return "HirotaOperator(%s)" % self.poly


def _schur_in_dtilde(k: int) -> MultiPoly:
    """p_k evaluated at the scaled symbols (D1, D2/2, D3/3, ...)."""
    pk = schur_polynomials(k, max(k, 1))[k]
    mapping = {_tvar(i): MultiPoly.var(_dvar(i)) / i for i in range(1, k + 1)}
    return pk.subs(mapping)


def hirota_equation(ell: int, kind: str = "Y") -> HirotaOperator:
    """The quadratic bilinear operators of the KP hierarchy.

    kind "Y" gives Y_ell = p_{ell+1}(Dtilde) - (1/2) D_1 D_ell; kind
    "Y1" gives Y_{1,ell} = D_1 D_{ell+1} - (1/2) D_2 D_ell
    - D_1 p_{ell+1}(Dtilde).
    """
    if ell < 2:
        raise ValueError("need ell >= 2")
    if kind == "Y":
        return HirotaOperator(
            _schur_in_dtilde(ell + 1)
            - MultiPoly.var(_dvar(1)) * MultiPoly.var(_dvar(ell)) / 2)
    if kind == "Y1":
        return HirotaOperator(
            MultiPoly.var(_dvar(1)) * MultiPoly.var(_dvar(ell + 1))
            - MultiPoly.var(_dvar(2)) * MultiPoly.var(_dvar(ell)) / 2
            - MultiPoly.var(_dvar(1)) * _schur_in_dtilde(ell + 1))
    raise ValueError("kind must be 'Y' or 'Y1'")


def _diff_word(f: MultiPoly, alpha: dict) -> MultiPoly:
    out = f
    for i, k in alpha.items():
        for _ in range(k):
            out = out.diff(_tvar(i))
            if out.is_zero:
                return out
    return out


def hirota_apply(op, f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """Evaluate P(D) f . g as a polynomial in the times."""
    poly = op.poly if isinstance(op, HirotaOperator) else op
    total = MultiPoly.const(0)
    for mono, c in poly.coeffs.items():
        gamma = {int(v[1:]): e for v, e in zip(poly.vars, mono) if e}
        indices = sorted(gamma)
        ranges = [range(gamma[i] + 1) for i in indices]
        for choice in itertools.product(*ranges):
            alpha = dict(zip(indices, choice))
            beta = {i: gamma[i] - alpha[i] for i in indices}
            weight = F(1)
            for i in indices:
                weight *= _binom_int(gamma[i], alpha[i])
            sign = (-1) ** sum(beta.values())
            term = _diff_word(f, alpha) * _diff_word(g, beta)
            total = total + c * weight * sign * term
    return total


def _binom_int(nn: int, kk: int) -> int:
    out = 1
    for i in range(kk):
        out = out * (nn - i) // (i + 1)
    return out


def schur_shape(partition: Iterable[int], var_count: int) -> MultiPoly:
    """Schur polynomial of a partition in the times, by the h-determinant."""
    lam = [int(x) for x in partition]
    if any(a < b for a, b in zip(lam, lam[1:])) or any(x < 0 for x in lam):
        raise ValueError("partition parts must be weakly decreasing and nonnegative")
    lam = [x for x in lam if x]
    if not lam:
        return MultiPoly.const(1)
    r = len(lam)
    h = schur_polynomials(max(lam) + r, var_count)

    def entry(i, j):
        k = lam[i] - (i + 1) + (j + 1)
        if k < 0:
            return MultiPoly.const(0)
        return h[k]

    return _poly_det([[entry(i, j) for j in range(r)] for i in range(r)])


def _poly_det(rows):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    out = MultiPoly.const(0)
    for j in range(n):
        if rows[0][j].is_zero:
            continue
        minor = [[rows[i][k] for k in range(n) if k != j] for i in range(1, n)]
        out = out + (-1) ** j * rows[0][j] * _poly_det(minor)
    return out


# ---------------------------------------------------------------------------
# Log-tau translation


def u_name(indices: Iterable[int]) -> str:
    return "U" + "".join(str(i) for i in sorted(indices))


def u_indices(name: str) -> tuple:
    return tuple(int(ch) for ch in name[1:])


def _multiset_factorial(alpha: tuple) -> int:
    out = 1
    for i in set(alpha):
        k = alpha.count(i)
        f = 1
        for m in range(2, k + 1):
            f *= m
        out *= f
    return out


def _even_block_partitions(gamma: tuple) -> list:
    """Multiset partitions of an exponent vector into even-weight blocks.

    Each block has total weight >= 2; returned as lists of blocks in a
    canonical descending order so every multiset appears once.
    """
    blocks = []
    for beta in itertools.product(*(range(e + 1) for e in gamma)):
        w = sum(beta)
        if w >= 2 and w % 2 == 0:
            blocks.append(beta)
    blocks.sort(reverse=True)
    out = []

    def rec(remaining, start, chosen):
        if not any(remaining):
            out.append(list(chosen))
            return
        for k in range(start, len(blocks)):
            b = blocks[k]
            if all(bi <= ri for bi, ri in zip(b, remaining)):
                chosen.append(b)
                rec(tuple(ri - bi for ri, bi in zip(remaining, b)),
                    k, chosen)
                chosen.pop()

    rec(gamma, 0, [])
    return out


def to_logtau_pde(op) -> MultiPoly:
    """Rewrite an even Hirota operator as a PDE in log-tau derivatives.

    Returns a polynomial in variables named U<sorted indices>, each
    standing for the corresponding mixed time derivative of log tau.
    Equal to P(D) tau.tau / (2 tau^2) with commuting-derivative algebra.
    """
    poly = op.poly if isinstance(op, HirotaOperator) else op
    if any(sum(m) % 2 for m in poly.coeffs):
        raise ValueError("operator has odd terms; only even parts reduce to log-tau form")
    if poly.is_zero:
        return MultiPoly.const(0)
    indices = sorted(int(v[1:]) for v in poly.vars if poly.degree_in(v))

    total = MultiPoly.const(0)
    for mono, c in poly.coeffs.items():
        gamma = {int(v[1:]): e for v, e in zip(poly.vars, mono) if e}
        ypart = tuple(gamma.get(i, 0) for i in indices)
        gfact = 1
        for e in ypart:
            for m in range(2, e + 1):
                gfact *= m
        for partition in _even_block_partitions(ypart):
            piece = MultiPoly.const(c * F(gfact, 2))
            for beta in partition:
                alpha = tuple(i for i, e in zip(indices, beta)
                              for _ in range(e))
                piece = (piece * MultiPoly.var(u_name(alpha))
                         * F(2, _multiset_factorial(alpha)))
            for mult in Counter(map(tuple, partition)).values():
                for m in range(2, mult + 1):
                    piece = piece / m
            total = total + piece
    return total


# ---------------------------------------------------------------------------
# Derivative expressions on the gap generating function


class Atom(NamedTuple):
    """One mixed derivative applied to the generating function.

    Reading outward-in: t_1 derivatives l1 times, mid-time derivatives
    (indices 2..p-1, multiset `mid`), t_p and t_{p+1} derivatives lp and
    lq times, d/dw dw times, then eps^eps del^dl innermost.
    """

    l1: int = 0
    mid: tuple = ()
    lp: int = 0
    lq: int = 0
    dw: int = 0
    eps: int = 0
    dl: int = 0

    def word_str(self, p: int | None = None) -> str:
        bits = []
        if self.l1:
            bits.append(_pow_str("d1", self.l1))
        for i in sorted(set(self.mid)):
            bits.append(_pow_str("d%d" % i, self.mid.count(i)))
        if self.lp:
            bits.append(_pow_str("dp" if p is None else "d%d" % p, self.lp))
        if self.lq:
            bits.append(_pow_str("dq" if p is None else "d%d" % (p + 1), self.lq))
        if self.dw:
            bits.append(_pow_str("dw", self.dw))
        if self.eps:
            bits.append(_pow_str("eps", self.eps))
        if self.dl:
            bits.append(_pow_str("del", self.dl))
        return " ".join(bits)


def _pow_str(name: str, k: int) -> str:
    return name if k == 1 else "%s^%d" % (name, k)


def _as_poly(value) -> MultiPoly:
    if isinstance(value, MultiPoly):
        return value
    return MultiPoly.const(value)


class DiffExpr:
    """Polynomial in atoms with MultiPoly coefficients.

    Terms are products of atoms (each atom the value of a derivative
    word applied to the generating function); the empty product carries
    plain coefficient terms.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean: dict[tuple, MultiPoly] = {}
        for atoms, c in (terms or {}).items():
            c = _as_poly(c)
            if c.is_zero:
                continue
            key = tuple(sorted(atoms))
            tot = clean.get(key)
            tot = c if tot is None else tot + c
            if tot.is_zero:
                clean.pop(key, None)
            else:
                clean[key] = tot
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("DiffExpr is immutable")

    @classmethod
    def coeff_term(cls, value) -> "DiffExpr":
        return cls({(): _as_poly(value)})

    @classmethod
    def atom(cls, a: Atom, coeff=1) -> "DiffExpr":
        return cls({(a,): _as_poly(coeff)})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        if isinstance(other, (int, Fraction, MultiPoly)):
            other = DiffExpr.coeff_term(other)
        if not isinstance(other, DiffExpr):
            return NotImplemented
        merged = dict(self.terms)
        for k, v in other.terms.items():
            merged[k] = merged[k] + v if k in merged else v
        return DiffExpr(merged)

    __radd__ = __add__

    def __neg__(self):
        return DiffExpr({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, MultiPoly)):
            other = DiffExpr.coeff_term(other)
        if not isinstance(other, DiffExpr):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, MultiPoly)):
            return DiffExpr({k: v * other for k, v in self.terms.items()})
        if not isinstance(other, DiffExpr):
            return NotImplemented
        out: dict[tuple, MultiPoly] = {}
        for ka, va in self.terms.items():
            for kb, vb in other.terms.items():
                key = tuple(sorted(ka + kb))
                prod = va * vb
                if key in out:
                    tot = out[key] + prod
                    if tot.is_zero:
                        del out[key]
                    else:
                        out[key] = tot
                else:
                    out[key] = prod
        return DiffExpr(out)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if isinstance(scalar, (int, Fraction)):
            return self * (F(1) / F(scalar))
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, DiffExpr):
            return NotImplemented
        return self.terms == other.terms

    def subs_coeffs(self, mapping) -> "DiffExpr":
        return DiffExpr({k: v.subs(mapping) for k, v in self.terms.items()})

    def _derive(self, coeff_rule, atom_rule) -> "DiffExpr":
        out = DiffExpr()
        for atoms, c in self.terms.items():
            dc = coeff_rule(c)
            if not dc.is_zero:
                out = out + DiffExpr({atoms: dc})
            for j, a in enumerate(atoms):
                rest = atoms[:j] + atoms[j + 1:]
                piece = atom_rule(a)
                if piece.is_zero:
                    continue
                out = out + DiffExpr({rest: c}) * piece
        return out

    def apply_t(self, i: int, p: int) -> "DiffExpr":
        def on_atom(a: Atom) -> "DiffExpr":
            return DiffExpr.atom(_bump_index(a, i, p))

        return self._derive(lambda c: c.diff(_tvar(i)), on_atom)

    def apply_dw(self) -> "DiffExpr":
        return self._derive(lambda c: c.diff("w"),
                            lambda a: DiffExpr.atom(a._replace(dw=a.dw + 1)))

    def apply_eps(self) -> "DiffExpr":
        zero = MultiPoly.const(0)
        return self._derive(lambda c: zero,
                            lambda a: DiffExpr.atom(a._replace(eps=a.eps + 1)))

    def apply_del(self) -> "DiffExpr":
        zero = MultiPoly.const(0)

        def on_atom(a: Atom) -> "DiffExpr":
            # del eps^k = (eps + 1)^k del
            out = {}
            for k in range(a.eps + 1):
                out[(a._replace(eps=k, dl=a.dl + 1),)] = _binom_int(a.eps, k)
            return DiffExpr(out)

        return self._derive(lambda c: zero, on_atom)

    def canonical(self):
        """Scale so the first term has leading rational 1; returns (expr, scale)."""
        if not self.terms:
            return self, F(1)
        key = min(self.terms)
        lead = self.terms[key]
        mono = min(lead.coeffs, key=lambda m: (sum(m), tuple(-e for e in m)))
        scale = lead.coeffs[mono]
        return DiffExpr({k: v / scale for k, v in self.terms.items()}), scale

    def render(self, symbol: str = "Q", p: int | None = None) -> str:
        if not self.terms:
            return "0"
        bits = []
        for atoms in sorted(self.terms, key=lambda k: (len(k), k)):
            c = self.terms[atoms]
            factors = []
            for a in atoms:
                word = a.word_str(p)
                factors.append("(%s %s)" % (word, symbol) if word else symbol)
            cstr = str(c)
            if len(c.coeffs) > 1:
                cstr = "(%s)" % cstr
            if factors:
                body = "*".join(factors)
                piece = body if cstr == "1" else (
                    "-" + body if cstr == "-1" else "%s*%s" % (cstr, body))
            else:
                piece = cstr
            bits.append(piece)
        out = bits[0]
        for b in bits[1:]:
            out += (" - " + b[1:]) if b.startswith("-") else (" + " + b)
        return out

    def __str__(self):
        return self.render()

    def __repr__(self):
        return "DiffExpr(%s)" % self


def _bump_index(a: Atom, i: int, p: int) -> Atom:
    if i == 1:
        return a._replace(l1=a.l1 + 1)
    if 2 <= i <= p - 1:
        return a._replace(mid=tuple(sorted(a.mid + (i,))))
    if i == p:
        return a._replace(lp=a.lp + 1)
    if i == p + 1:
        return a._replace(lq=a.lq + 1)
    raise UnsupportedEquationError(
        "derivative index %d outside the constraint rules for p = %d" % (i, p))


def from_u_poly(upoly: MultiPoly, p: int) -> DiffExpr:
    """Interpret a U-variable polynomial as atoms on the generating function."""
    out = {}
    for mono, c in upoly.coeffs.items():
        atoms = []
        for v, e in zip(upoly.vars, mono):
            if not e:
                continue
            indices = u_indices(v)
            a = Atom()
            for i in indices:
                a = _bump_index(a, i, p)
            atoms.extend([a] * e)
        key = tuple(sorted(atoms))
        out[key] = out.get(key, MultiPoly.const(0)) + c
    return DiffExpr(out)


# ---------------------------------------------------------------------------
# Constraint elimination


def _gamma_poly(p: int, n: int) -> MultiPoly:
    out = MultiPoly.const(0)
    for i in range(1, p):
        out = out + F(i * (p - i), 2 * p) * \
            MultiPoly.var(_tvar(i)) * MultiPoly.var(_tvar(p - i))
    out = out - F(p - 1, 2) * MultiPoly.var(_tvar(p))
    if n:
        out = out + n * MultiPoly.var(_tvar(p)) + MultiPoly.var("cg")
    return out


def _c_const(p: int, n: int) -> MultiPoly:
    if n:
        return MultiPoly.var("ce")
    return MultiPoly.const(F(p * p - 1, 12 * p * p))


def _locus_live(coeff: MultiPoly, p: int) -> MultiPoly:
    """Keep only coefficient monomials that survive t_1 = t_p = t_{p+1} = 0.

    Later eliminations multiply coefficients but never differentiate
    them, so a locus-dead factor attached to an atom can never be
    cleared; dropping it at emission is exact and breaks the feedback
    of the dilation rule on itself.
    """
    dead = (_tvar(1), _tvar(p), _tvar(p + 1))
    pos = [i for i, v in enumerate(coeff.vars) if v in dead]
    kept = {m: c for m, c in coeff.coeffs.items() if all(m[i] == 0 for i in pos)}
    return MultiPoly(coeff.vars, kept)


_ELIM_CACHE: dict = {}


def _eliminate_atom(atom: Atom, p: int, n: int) -> DiffExpr:
    key = (atom, p, n)
    hit = _ELIM_CACHE.get(key)
    if hit is not None:
        return hit

    if atom.lp:
        base = atom._replace(lp=atom.lp - 1)
        if n == 0:
            out = DiffExpr()
        else:
            out = -1 * _eliminate_atom(base._replace(dw=base.dw + 1), p, n)
    elif atom.lq:
        w_op = atom._replace(lq=atom.lq - 1)
        out = _eliminate_atom(w_op._replace(eps=w_op.eps + 1), p, n)
        if w_op.dl:
            out = out + w_op.dl * _eliminate_atom(w_op, p, n)
        if n:
            wv = MultiPoly.var("w")
            out = out - wv * _eliminate_atom(w_op._replace(dw=w_op.dw + 1), p, n)
            if w_op.dw:
                out = out - w_op.dw * _eliminate_atom(w_op, p, n)
        for i in range(1, p + 2):
            inner = _bump_index(w_op, i, p)
            drive = _locus_live(-F(i, p) * MultiPoly.var(_tvar(i)), p)
            if not drive.is_zero:
                out = out + drive * _eliminate_atom(inner, p, n)
            count = (w_op.l1 if i == 1 else
                     w_op.mid.count(i) if i < p else
                     w_op.lp if i == p else w_op.lq)
            if count:
                out = out - F(i * count, p) * _eliminate_atom(w_op, p, n)
        if w_op == Atom():
            out = out - DiffExpr.coeff_term(_c_const(p, n))
    elif atom.l1:
        w_op = atom._replace(l1=atom.l1 - 1)
        out = _eliminate_atom(w_op._replace(dl=w_op.dl + 1), p, n)
        if w_op.dw == 0 and w_op.eps == 0 and w_op.dl == 0:
            gamma = _gamma_poly(p, n)
            for _ in range(w_op.l1):
                gamma = gamma.diff(_tvar(1))
            for i in w_op.mid:
                gamma = gamma.diff(_tvar(i))
            if not gamma.is_zero:
                out = out - DiffExpr.coeff_term(gamma)
    else:
        out = DiffExpr({(atom,): 1})

    _ELIM_CACHE[key] = out
    return out


def virasoro_substitute(expr: DiffExpr, p: int, n: int) -> DiffExpr:
    """Eliminate all t_1, t_p, t_{p+1} derivatives from the expression.

    The result lives on the locus t_1 = t_p = t_{p+1} = 0 and contains
    only endpoint operators, d/dw, and mid-time derivatives.
    """
    if p < 2:
        raise ValueError("p must be at least 2")
    if n < 0:
        raise ValueError("n must be nonnegative")
    total = DiffExpr()
    for atoms, coeff in expr.terms.items():
        prod = DiffExpr.coeff_term(coeff)
        for a in atoms:
            prod = prod * _eliminate_atom(a, p, n)
        total = total + prod
    locus = {_tvar(1): 0, _tvar(p): 0, _tvar(p + 1): 0}
    return total.subs_coeffs(locus)


def _background_values(p: int, n: int):
    tau = topological_tau_log(p)

    def value(atom: Atom) -> MultiPoly:
        if atom.l1 or atom.lp or atom.lq:
            raise AssertionError("background evaluation before elimination")
        if atom.eps or atom.dl:
            return MultiPoly.const(0)
        if atom.dw:
            if n == 0:
                return MultiPoly.const(0)
            name = "bg" + "".join(str(i) for i in atom.mid) + "w%d" % atom.dw
            return MultiPoly.var(name)
        d = tau
        for i in atom.mid:
            d = d.diff(_tvar(i))
        return d.subs({_tvar(1): 0})

    return value


def _background_subtract(expr: DiffExpr, p: int, n: int) -> DiffExpr:
    """Split g = Q + (smooth background) and drop the constant block.

    Interval-derivative and dilation values of the background vanish
    because it does not depend on the interval at all.  Its multi-time
    values on the locus come from the closed form in ``potential``.  For
    n > 0 the winding derivatives of the background are constants we do
    not know in closed form; they enter the pure-constant block together
    with the opaque rule constants, where the same identity evaluated on
    the background forces the whole block to vanish.  That block is
    therefore a definition of the unknowns, not a check, and is dropped.
    What must hold, and is asserted, is that no unknown constant
    survives in a coefficient of an actual derivative term.
    """
    g0 = _background_values(p, n)
    out = DiffExpr()
    for atoms, coeff in expr.terms.items():
        for picks in itertools.product((0, 1), repeat=len(atoms)):
            kept = tuple(a for a, take in zip(atoms, picks) if take)
            scale = coeff
            dead = False
            for a, take in zip(atoms, picks):
                if take:
                    continue
                val = g0(a)
                if val.is_zero:
                    dead = True
                    break
                scale = scale * val
            if not dead:
                out = out + DiffExpr({kept: scale})
    const = out.terms.get((), MultiPoly.const(0))
    if n == 0:
        if not const.is_zero:
            raise ArithmeticError(
                "background constants did not cancel: %s" % const)
    elif not const.is_zero:
        out = DiffExpr({a: c for a, c in out.terms.items() if a})
    for atoms, coeff in out.terms.items():
        for v in coeff.vars:
            if (v in ("cg", "ce") or v.startswith("bg")) and coeff.degree_in(v):
                raise ArithmeticError(
                    "opaque constant %s survived in %s" % (v, coeff))
    return out


# ---------------------------------------------------------------------------
# Gap PDEs


@dataclass(frozen=True)
class GapPDE:
    """A derived PDE for the gap log-determinant (or its second derivative)."""

    id: str
    expression: DiffExpr
    params: dict = field(default_factory=dict)

    @property
    def function_symbol(self) -> str:
        return self.params.get("function", "Q")

    def __str__(self):
        return "%s: %s = 0" % (
            self.id, self.expression.render(self.function_symbol,
                                            self.params.get("p")))


SUPPORTED_EQUATIONS = {
    "Y3": {(p, n) for p in (2, 3, 4, 5) for n in (0, 1)},
    "Y4": {(3, 0), (3, 1), (4, 0)},
    "Y3Y4-combo": {(3, 0), (3, 1), (4, 0)},
    "Y5-Y14-combo": {(4, 0)},
}


def _logtau_row(ell: int) -> MultiPoly:
    scale = {3: 24, 4: 12}[ell]
    return to_logtau_pde(scale * hirota_equation(ell).even_part())


def _u_source(equation: str, p: int) -> DiffExpr:
    if equation == "Y3":
        return from_u_poly(_logtau_row(3), p)
    if equation == "Y4":
        return from_u_poly(_logtau_row(4), p)
    if equation == "Y3Y4-combo":
        row3 = from_u_poly(_logtau_row(3), p)
        row4 = from_u_poly(_logtau_row(4), p)
        return (row3.apply_t(2, p) - row4.apply_t(1, p)) / 3
    if equation == "Y5-Y14-combo":
        # The 12:2 ratio is forced: it is the unique combination whose
        # D1^6 parts cancel, so no sixth endpoint derivative survives.
        comb = (12 * hirota_equation(5)
                + 2 * hirota_equation(4, "Y1")).even_part()
        return from_u_poly(to_logtau_pde(comb), p)
    raise UnsupportedEquationError("unknown equation %r" % equation)


def derive_gap_pde(equation: str, p: int, n: int = 0) -> GapPDE:
    """Run the full pipeline for one bilinear equation at given (p, n)."""
    table = SUPPORTED_EQUATIONS.get(equation)
    if table is None:
        raise UnsupportedEquationError(
            "unknown equation %r; supported: %s"
            % (equation, sorted(SUPPORTED_EQUATIONS)))
    if (p, n) not in table:
        raise UnsupportedEquationError(
            "equation %s is not supported at (p, n) = (%d, %d)" % (equation, p, n))
    source = _u_source(equation, p)
    eliminated = virasoro_substitute(source, p, n)
    expr = _background_subtract(eliminated, p, n)
    return GapPDE(
        id="%s-p%d-n%d" % (equation, p, n),
        expression=expr,
        params={"equation": equation, "p": p, "n": n, "function": "Q"})


def boussinesq_form(pde: GapPDE) -> GapPDE:
    """Second endpoint derivative of a Y3 gap PDE, closed in U.

    U is the second endpoint derivative of Q shifted by the linear
    background (p-1)/p t_{p-1}; only p >= 3 closes this way.
    """
    p = pde.params["p"]
    if pde.params.get("equation") != "Y3" or p < 3:
        raise ValueError("the U-form closure applies to Y3 at p >= 3")
    shift = F(p - 1, p) * MultiPoly.var(_tvar(p - 1))
    twice = pde.expression.apply_del().apply_del()
    out = DiffExpr()
    for atoms, coeff in twice.terms.items():
        converted = DiffExpr.coeff_term(coeff)
        for a in atoms:
            if a.dl < 2:
                raise ArithmeticError(
                    "term %s does not close in U" % (a.word_str(p),))
            piece = DiffExpr.atom(a._replace(dl=a.dl - 2))
            if a.dl == 2 and a.eps == 0 and a.dw == 0:
                extra = shift
                for i in a.mid:
                    extra = extra.diff(_tvar(i))
                if not extra.is_zero:
                    piece = piece + extra
            converted = converted * piece
        out = out + converted
    new = GapPDE(
        id=pde.id + "-u",
        expression=out,
        params=dict(pde.params, function="U", shift=shift))
    if _expand_u(new) != twice:
        raise ArithmeticError("U-form closure failed its round-trip check")
    return new


def _expand_u(pde: GapPDE) -> DiffExpr:
    """Expand a U-form PDE back into Q atoms (for checks and comparisons)."""
    shift = pde.params["shift"]
    out = DiffExpr()
    for atoms, coeff in pde.expression.terms.items():
        prod = DiffExpr.coeff_term(coeff)
        for a in atoms:
            piece = DiffExpr.atom(a._replace(dl=a.dl + 2))
            if a.dl == 0 and a.eps == 0 and a.dw == 0:
                extra = shift
                for i in a.mid:
                    extra = extra.diff(_tvar(i))
                if not extra.is_zero:
                    piece = piece - extra
            prod = prod * piece
        out = out + prod
    return out


# ---------------------------------------------------------------------------
# Reference targets


def to_intro_form(expr: DiffExpr, p: int) -> DiffExpr:
    """Map an engine-form expression to the announced coordinate frame.

    For p = 2 the frames agree.  For p = 3 the announced kernel runs in
    reflected endpoints and winding (each endpoint derivative and each
    d/dw flips sign), uses tau = 2 t_2, and scales the mid-time flow by
    d/dt_2 = 2 d/dtau.
    """
    if p == 2:
        return expr
    if p != 3:
        raise ValueError("announced frames exist only for p = 2 and 3")
    tau_half = MultiPoly.var("tau") / 2
    wneg = -MultiPoly.var("w")
    out = DiffExpr()
    for atoms, coeff in expr.terms.items():
        sign = 1
        factor = F(1)
        for a in atoms:
            sign *= (-1) ** ((a.dl + a.dw) % 2)
            factor *= 2 ** len(a.mid)
        c = coeff.subs({"t2": tau_half, "w": wneg}) * (sign * factor)
        out = out + DiffExpr({atoms: c})
    return out


def _q(mid=(), dw=0, eps=0, dl=0) -> Atom:
    return Atom(0, tuple(sorted(mid)), 0, 0, dw, eps, dl)


def _term(coeff, *atoms) -> DiffExpr:
    return DiffExpr({tuple(sorted(atoms)): _as_poly(coeff)})


def target_expression(target_id: str):
    """Frozen reference PDEs; returns (DiffExpr, frame, function) per id.

    frame is "intro" when the reference is stated in the reflected
    Pearcey frame (tau variable), "engine" when stated directly in the
    kernel-family coordinates.
    """
    t2 = MultiPoly.var("t2")
    t3 = MultiPoly.var("t3")
    tau = MultiPoly.var("tau")
    w = MultiPoly.var("w")

    if target_id == "intro4":
        e = (_term(1, _q(dl=4)) + _term(6, _q(dl=2), _q(dl=2))
             + _term(2, _q(dl=1)) + _term(-4, _q(eps=1, dl=1)))
        return e, "engine", "Q"
    if target_id in ("intro7", "intro25"):
        e = (_term(1, _q(dl=4)) + _term(6, _q(dl=2), _q(dl=2))
             + _term(2, _q(dl=1)) + _term(-4, _q(eps=1, dl=1))
             + _term(4 * w, _q(dw=1, dl=1)) + _term(3, _q(dw=2)))
        return e, "engine", "Q"
    if target_id == "intro10":
        e = (_term(1, _q(dl=4)) + _term(6, _q(dl=2), _q(dl=2))
             + _term(12, _q(mid=(2, 2))) + _term(-4 * tau, _q(dl=2)))
        return e, "intro", "Q"
    if target_id == "intro11":
        e = (_term(2, _q(mid=(2,), dl=3))
             + _term(12, _q(mid=(2,), dl=1), _q(dl=2))
             + _term(-4 * tau, _q(mid=(2,), dl=1))
             + _term(1, _q(dl=1)) + _term(-3, _q(eps=1, dl=1))
             + _term(2 * tau, _q(mid=(2,), dl=1)))
        return e, "intro", "Q"
    if target_id == "intro12":
        e = (_term(8, _q(mid=(2, 2, 2)))
             + _term(4, _q(mid=(2,), dl=1), _q(dl=3))
             + _term(-4, _q(mid=(2,), dl=2), _q(dl=2))
             + _term(1, _q(eps=1, dl=2)) + _term(-2 * tau, _q(mid=(2,), dl=2))
             + _term(-2, _q(dl=2)))
        return e, "intro", "Q"
    if target_id == "intro12-flipped":
        e = (_term(8, _q(mid=(2, 2, 2)))
             + _term(-4, _q(mid=(2,), dl=1), _q(dl=3))
             + _term(4, _q(mid=(2,), dl=2), _q(dl=2))
             + _term(1, _q(eps=1, dl=2)) + _term(-2 * tau, _q(mid=(2,), dl=2))
             + _term(-2, _q(dl=2)))
        return e, "intro", "Q"
    if target_id == "intro13":
        e = (_term(1, _q(dl=4)) + _term(12, _q(mid=(2, 2)))
             + _term(12, _q(dl=1), _q(dl=1)) + _term(12, _q(), _q(dl=2)))
        return e, "intro", "U"
    if target_id == "intro26":
        e = (_term(1, _q(dl=4)) + _term(6, _q(dl=2), _q(dl=2))
             + _term(-8 * t2, _q(dl=2)) + _term(3, _q(mid=(2, 2)))
             + _term(4, _q(dw=1, dl=1)))
        return e, "engine", "Q"
    if target_id == "intro27":
        e = (_term(1, _q(mid=(2,), dl=3))
             + _term(-2 * t2, _q(mid=(2,), dl=1))
             + _term(-3, _q(eps=1, dl=1)) + _term(3 * w, _q(dw=1, dl=1))
             + _term(1, _q(dl=1))
             + _term(6, _q(dl=2), _q(mid=(2,), dl=1))
             + _term(-2, _q(mid=(2,), dw=1)))
        return e, "engine", "Q"
    if target_id == "intro28":
        e = (_term(1, _q(eps=1, dl=2)) + _term(-1 * w, _q(dw=1, dl=2))
             + _term(-2 * t2, _q(mid=(2,), dl=2)) + _term(-2, _q(dl=2))
             + _term(1, _q(mid=(2, 2, 2)))
             + _term(2, _q(mid=(2,), dl=1), _q(dl=3))
             + _term(-2, _q(mid=(2,), dl=2), _q(dl=2))
             + _term(2, _q(mid=(2,), dw=1, dl=1)))
        return e, "engine", "Q"
    if target_id == "intro28-flipped":
        e = (_term(1, _q(eps=1, dl=2)) + _term(-1 * w, _q(dw=1, dl=2))
             + _term(-2 * t2, _q(mid=(2,), dl=2)) + _term(-2, _q(dl=2))
             + _term(1, _q(mid=(2, 2, 2)))
             + _term(-2, _q(mid=(2,), dl=1), _q(dl=3))
             + _term(2, _q(mid=(2,), dl=2), _q(dl=2))
             + _term(2, _q(mid=(2,), dw=1, dl=1)))
        return e, "engine", "Q"
    if target_id == "intro29":
        e = (_term(1, _q(dl=4)) + _term(3, _q(mid=(2, 2)))
             + _term(12, _q(dl=1), _q(dl=1)) + _term(12, _q(), _q(dl=2))
             + _term(4, _q(dw=1, dl=1)))
        return e, "engine", "U"
    raise KeyError("no frozen reference with id %r" % target_id)


def general_targets(equation: str, p: int, n: int):
    """Theorem-form references for p beyond the announced special cases.

    Returns a list of (id, DiffExpr, function symbol) triples in the
    engine frame, empty when no reference is frozen for the case.  For
    p >= 4 none of the indices in these equations reaches p, so the
    winding number never enters and the n = 0 forms apply verbatim.
    """
    if p < 4 or n not in (0, 1):
        return []
    tpm1 = MultiPoly.var(_tvar(p - 1))
    tpm2 = MultiPoly.var(_tvar(p - 2))
    if equation == "Y3":
        e = (_term(1, _q(dl=4)) + _term(6, _q(dl=2), _q(dl=2))
             + _term(3, _q(mid=(2, 2)))
             + _term(-12 * F(p - 1, p) * tpm1, _q(dl=2))
             + _term(-4, _q(mid=(3,), dl=1)))
        u = (_term(1, _q(dl=4)) + _term(3, _q(mid=(2, 2)))
             + _term(12, _q(dl=1), _q(dl=1)) + _term(12, _q(), _q(dl=2))
             + _term(-4, _q(mid=(3,), dl=1)))
        return [("Y3-general-p%d" % p, e, "Q"),
                ("bous-general-p%d" % p, u, "U")]
    if equation == "Y4":
        e = (_term(1, _q(mid=(2,), dl=3))
             + _term(6, _q(mid=(2,), dl=1), _q(dl=2))
             + _term(-6 * F(p - 1, p) * tpm1, _q(mid=(2,), dl=1))
             + _term(2, _q(mid=(2, 3)))
             + _term(-12 * F(p - 2, p) * tpm2, _q(dl=2)))
        if p >= 5:
            e = e + _term(-3, _q(mid=(4,), dl=1))
        return [("Y4-general-p%d" % p, e, "Q")] if n == 0 else []
    if equation == "Y3Y4-combo":
        if n != 0:
            return []
        base = (_term(1, _q(mid=(2, 2, 2)))
                + _term(-2, _q(mid=(2, 3), dl=1))
                + _term(-F(2 * (p - 1), p) * tpm1, _q(mid=(2,), dl=2))
                + _term(F(4 * (p - 2), p) * tpm2, _q(dl=3)))
        out = []
        for tag, sgn in (("printed", 1), ("flipped", -1)):
            e = (base
                 + _term(2 * sgn, _q(mid=(2,), dl=1), _q(dl=3))
                 + _term(-2 * sgn, _q(mid=(2,), dl=2), _q(dl=2)))
            out.append(("Y3Y4-general-p%d-%s" % (p, tag), e, "Q"))
        return out
    if equation == "Y5-Y14-combo" and p == 4 and n == 0:
        t2 = MultiPoly.var("t2")
        t3 = MultiPoly.var("t3")
        vp = solve_theta(4).v_prime_series()
        res = residue(puiseux_pow(vp, F(3, 2)))
        s = (F(2, 3) * res.diff("t2")).subs({"t1": 0})
        e = (_term(1, _q(mid=(2, 2), dl=2))
             + _term(F(2, 3), _q(mid=(3,), dl=3))
             + _term(F(4, 3), _q(mid=(3, 3)))
             + _term(4, _q(dl=2), _q(mid=(3,), dl=1))
             + _term(4, _q(mid=(2,), dl=1), _q(mid=(2,), dl=1))
             + _term(2, _q(mid=(2, 2)), _q(dl=2))
             + _term(-2 * s, _q(dl=2))
             + _term(-F(3, 2) * t3, _q(mid=(2, 2)))
             + _term(-3 * t3, _q(mid=(3,), dl=1))
             + _term(-8 * t2, _q(mid=(2,), dl=1))
             + _term(1, _q(dl=1)) + _term(-4, _q(eps=1, dl=1))
             + _term(2 * t2, _q(mid=(2,), dl=1))
             + _term(3 * t3, _q(mid=(3,), dl=1)))
        return [("Y5-general-p4", e, "Q")]
    return []


_INTRO_TARGETS = {
    ("Y3", 2, 0): ("intro4",),
    ("Y3", 2, 1): ("intro25",),
    ("Y3", 3, 0): ("intro10", "intro13"),
    ("Y4", 3, 0): ("intro11",),
    ("Y3Y4-combo", 3, 0): ("intro12", "intro12-flipped"),
    ("Y3", 3, 1): ("intro26", "intro29"),
    ("Y4", 3, 1): ("intro27",),
    ("Y3Y4-combo", 3, 1): ("intro28", "intro28-flipped"),
}


def proportional_scale(a: DiffExpr, b: DiffExpr):
    """Exact ratio a/b if the two expressions are proportional, else None."""
    if a.is_zero or b.is_zero:
        return F(1) if a.is_zero and b.is_zero else None
    ca, sa = a.canonical()
    cb, sb = b.canonical()
    if ca == cb:
        return sa / sb
    return None


def match_targets(pde: GapPDE) -> list:
    """Compare a derived PDE with every frozen reference for its case.

    Returns a list of (target id, exact rational ratio) pairs; the
    comparison maps the derived expression into each reference frame
    first, so a ratio of -1 simply reflects an overall sign flip in the
    reflected frame.
    """
    key = (pde.params["equation"], pde.params["p"], pde.params["n"])
    out = []
    for tid in _INTRO_TARGETS.get(key, ()):
        ref, frame, func = target_expression(tid)
        if func != pde.params.get("function", "Q"):
            continue
        mine = pde.expression
        if frame == "intro":
            mine = to_intro_form(mine, pde.params["p"])
        ratio = proportional_scale(mine, ref)
        if ratio is not None:
            out.append((tid, ratio))
    for tid, ref, func in general_targets(*key):
        if func != pde.params.get("function", "Q"):
            continue
        ratio = proportional_scale(pde.expression, ref)
        if ratio is not None:
            out.append((tid, ratio))
    return out
