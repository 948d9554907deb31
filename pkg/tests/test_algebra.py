"""Exact-arithmetic layer: ring axioms, series powers, inversion, Schur."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from airygaps.algebra import (
    MultiPoly,
    PuiseuxSeries,
    puiseux_pow,
    puiseux_revert,
    residue,
    schur_polynomials,
)

F = Fraction
t1 = MultiPoly.var("t1")
t2 = MultiPoly.var("t2")


def series(var, mapping, tail=None):
    return PuiseuxSeries(var, mapping, tail)


# ---------------------------------------------------------------------------
# MultiPoly basics


def test_print_golden_schur_p2():
    p = schur_polynomials(2, 2)
    assert str(p[2]) == "t2 + 1/2*t1^2"


def test_print_formats():
    assert str(MultiPoly.const(0)) == "0"
    assert str(MultiPoly.const(5)) == "5"
    assert str(-t1) == "-t1"
    assert str(t1 * t1 * t2 * (-F(1, 3)) - t2 ** 4 * F(2, 27)) == "-1/3*t1^2*t2 - 2/27*t2^4"
    assert str(2 * t1 * t2 ** 3) == "2*t1*t2^3"


def test_variable_universes_merge_naturally():
    t10 = MultiPoly.var("t10")
    prod = t2 * t10
    assert prod.vars == ("t2", "t10")
    assert (t1 + t10 + t2).vars == ("t1", "t2", "t10")


def test_diff_and_subs():
    p = t1 ** 2 * t2 + 3 * t2
    assert p.diff("t1") == 2 * t1 * t2
    assert p.diff("t2") == t1 ** 2 + 3
    assert p.diff("w").is_zero
    assert p.subs({"t1": MultiPoly.const(2)}) == 4 * t2 + 3 * t2
    assert p.subs({"t2": t1}) == t1 ** 3 + 3 * t1


def test_eval_num_matches_exact_subs():
    p = t1 ** 3 - F(2, 3) * t1 * t2
    exact = p.subs({"t1": F(1, 2), "t2": F(3, 4)}).constant_term()
    approx = p.eval_num({"t1": 0.5, "t2": 0.75})
    assert approx == pytest.approx(float(exact), rel=1e-15)


small_fractions = st.fractions(
    min_value=-9, max_value=9, max_denominator=4)


@st.composite
def polys(draw):
    n_terms = draw(st.integers(0, 4))
    coeffs = {}
    for _ in range(n_terms):
        mono = tuple(draw(st.integers(0, 3)) for _ in range(3))
        coeffs[mono] = draw(small_fractions)
    return MultiPoly(("t1", "t2", "w"), coeffs)


@settings(max_examples=60, deadline=None)
@given(polys(), polys(), polys())
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a - a).is_zero


@settings(max_examples=60, deadline=None)
@given(polys(), polys())
def test_diff_product_rule(a, b):
    lhs = (a * b).diff("t1")
    rhs = a.diff("t1") * b + a * b.diff("t1")
    assert lhs == rhs


# ---------------------------------------------------------------------------
# Puiseux powers


def test_half_integer_power_binomials():
    # (u^2 - t1)^(3/2): binomial(3/2, k) = 1, 3/2, 3/8, ...
    s = series("u", {2: MultiPoly.const(1), 0: -t1})
    q = puiseux_pow(s, F(3, 2))
    assert q.coeff(3) == MultiPoly.const(1)
    assert q.coeff(1) == -F(3, 2) * t1
    assert q.coeff(-1) == F(3, 8) * t1 ** 2
    assert q.coeff(2).is_zero
    assert q.tail == F(-2)


def test_power_plus_part_quartic_case():
    # V'(u) = u^3 - 2 t2 u - t1 at t1 = 0: (V')^(2/3) = u^2 - 4/3 t2 + O(u^-1)
    s = series("u", {3: MultiPoly.const(1), 1: -2 * t2})
    q = puiseux_pow(s, F(2, 3))
    plus = q.plus_part()
    assert plus == series("u", {2: MultiPoly.const(1), 0: -F(4, 3) * t2})


def test_residue_example():
    s = series("u", {2: MultiPoly.const(1), 0: -t1})
    assert residue(puiseux_pow(s, F(3, 2))) == F(3, 8) * t1 ** 2


def test_residue_below_window_raises():
    s = series("u", {2: MultiPoly.const(1), 0: -t1})
    q = puiseux_pow(s, F(3, 2), tail=F(-1, 2))
    with pytest.raises(ValueError, match="truncation window"):
        residue(q)


def test_integer_power_is_exact():
    s = series("u", {2: MultiPoly.const(1), 0: -t1})
    q = puiseux_pow(s, 3)
    assert q.tail is None
    assert q == series("u", {6: MultiPoly.const(1), 4: -3 * t1,
                             2: 3 * t1 ** 2, 0: -t1 ** 3})


def test_pow_requires_unit_lead():
    s = series("u", {2: MultiPoly.const(2)})
    with pytest.raises(ValueError, match="leading coefficient"):
        puiseux_pow(s, F(1, 2))


@settings(max_examples=30, deadline=None)
@given(small_fractions, small_fractions)
def test_pow_reciprocal_identity(a, b):
    s = series("u", {3: MultiPoly.const(1), 1: MultiPoly.const(a),
                     0: MultiPoly.const(b)})
    prod = puiseux_pow(s, F(1, 2), tail=F(-4)) * puiseux_pow(s, F(-1, 2), tail=F(-7))
    for e, c in prod.terms.items():
        if e == 0:
            assert c == MultiPoly.const(1)
        else:
            assert c.is_zero, (e, c)


# ---------------------------------------------------------------------------
# Series inversion


def test_revert_quadratic_closed_form():
    # u^2 - t1 = w inverts to u = (w + t1)^(1/2), a plain binomial series.
    s = series("u", {2: MultiPoly.const(1), 0: -t1})
    u = puiseux_revert(s, order=6)
    for j in range(4):
        expect = MultiPoly.const(1) if j == 0 else t1 ** j * F(1, 1)
        got = u.coeff(F(1 - 2 * j, 2))
        binom = F(1)
        for i in range(j):
            binom *= (F(1, 2) - i)
            binom /= (i + 1)
        assert got == binom * t1 ** j


def test_revert_first_correction_cubic():
    # w = u^3 + a u + b: u(w) = w^(1/3) - (a/3) w^(-1/3) - (b/3) w^(-2/3) + ...
    a = MultiPoly.var("a")
    b = MultiPoly.var("b")
    s = series("u", {3: MultiPoly.const(1), 1: a, 0: b})
    u = puiseux_revert(s, order=4)
    assert u.coeff(F(1, 3)) == MultiPoly.const(1)
    assert u.coeff(F(0)).is_zero
    assert u.coeff(F(-1, 3)) == -a / 3
    assert u.coeff(F(-2, 3)) == -b / 3


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 6), st.data())
def test_revert_round_trip_property(p, data):
    coeffs = {F(p): MultiPoly.const(1)}
    for e in range(p - 1):
        c = data.draw(small_fractions)
        if c:
            coeffs[F(e)] = MultiPoly.const(c)
    s = series("u", coeffs)
    u = puiseux_revert(s, order=2 * p)
    assert u.lead_exponent() == F(1, p)
    assert u.ramification() in (1, p) or p % u.ramification() == 0


def test_revert_rejects_non_monic():
    s = series("u", {2: MultiPoly.const(3)})
    with pytest.raises(ValueError, match="monic"):
        puiseux_revert(s, order=2)


# ---------------------------------------------------------------------------
# Schur polynomials


def test_schur_base_cases():
    p = schur_polynomials(2, 3)
    assert p[0] == MultiPoly.const(1)
    assert p[1] == t1
    assert p[2] == t2 + t1 ** 2 / 2


def test_schur_against_exponential_series():
    # Independent oracle: p_k is the z^k coefficient of exp(sum t_i z^i),
    # accumulated here by explicit truncated-series multiplication.
    k_max, var_count = 6, 3
    acc = [MultiPoly.const(1)] + [MultiPoly.const(0)] * k_max
    arg = {i: MultiPoly.var("t%d" % i) for i in range(1, var_count + 1)}
    power = list(acc)
    fact = 1
    for m in range(1, k_max + 1):
        nxt = [MultiPoly.const(0)] * (k_max + 1)
        for deg, c in enumerate(power):
            for i, ti in arg.items():
                if deg + i <= k_max:
                    nxt[deg + i] = nxt[deg + i] + c * ti
        power = nxt
        fact *= m
        for deg in range(k_max + 1):
            acc[deg] = acc[deg] + power[deg] / fact
    expected = acc
    got = schur_polynomials(k_max, var_count)
    for k in range(k_max + 1):
        assert got[k] == expected[k], k


def test_schur_single_variable_collapses_to_powers():
    p = schur_polynomials(8, 4)
    kill = {"t2": 0, "t3": 0, "t4": 0}
    fact = 1
    for k in range(9):
        if k:
            fact *= k
        assert p[k].subs(kill) == t1 ** k / fact
