"""Potential fitting, topological tau identities, phase polynomial."""

from fractions import Fraction

import mpmath as mp
import pytest

from airygaps.algebra import MultiPoly, puiseux_pow, residue
from airygaps.potential import (
    consistency_71_72,
    phase_polynomial,
    solve_theta,
    topological_tau_log,
)

F = Fraction
t1, t2, t3, t4 = (MultiPoly.var("t%d" % i) for i in range(1, 5))


def test_theta_airy_cubic():
    pot = solve_theta(2)
    assert pot.theta == (-t1,)


def test_theta_pearcey_quartic():
    pot = solve_theta(3)
    assert pot.theta == (-t1, -2 * t2)


def test_theta_sextic_known_rows():
    th = solve_theta(5).theta
    assert th[3] == -4 * t4
    assert th[2] == -3 * t3
    assert th[1] == -2 * t2 + F(16, 5) * t4 ** 2


def test_theta_leading_rows_all_p():
    for p in range(2, 7):
        th = solve_theta(p).theta
        tv = {m: MultiPoly.var("t%d" % m) for m in range(1, p)}
        assert th[p - 2] == -(p - 1) * tv[p - 1]
        if p >= 3:
            assert th[p - 3] == -(p - 2) * tv[p - 2]
        if p >= 4:
            expect = (p - 3) * (-tv[p - 3]) \
                + F((p - 3) * (p - 1) ** 2, 2 * p) * tv[p - 1] ** 2
            assert th[p - 4] == expect


def test_theta_quasi_homogeneous():
    for p in range(2, 7):
        th = solve_theta(p).theta
        weights = {("t%d" % m): p + 1 - m for m in range(1, p)}
        for i, poly in enumerate(th):
            assert poly.weighted_degrees(weights) <= {p - i}, (p, i)


@pytest.mark.parametrize("p", [4, 5, 6])
def test_inverse_series_against_polyroot(p):
    # Independent numeric check: for large w, the positive root of
    # V'(u) = w must match the prescribed series tail term by term.
    pot = solve_theta(p)
    tvals = {("t%d" % m): F((-1) ** m * (m + 1), 2) for m in range(1, p)}
    th = [c.subs(tvals).constant_term() for c in pot.theta]
    with mp.workdps(50):
        w = mp.mpf(10) ** 12
        coeffs = [mp.mpf(1), mp.mpf(0)]
        for i in range(p - 2, -1, -1):
            coeffs.append(mp.mpf(th[i].numerator) / th[i].denominator)
        coeffs[-1] -= w
        roots = mp.polyroots(coeffs, maxsteps=200, extraprec=60)
        root = max((r for r in roots if abs(mp.im(r)) < mp.mpf("1e-20")),
                   key=lambda r: mp.re(r))
        pred = w ** (mp.mpf(1) / p)
        for j in range(1, p):
            c = F(p - j, p) * tvals["t%d" % (p - j)]
            pred += (mp.mpf(c.numerator) / c.denominator) * w ** (-mp.mpf(j) / p)
        assert abs(mp.re(root) - pred) < mp.mpf("1e-9")
        assert abs(mp.re(root) - w ** (mp.mpf(1) / p)) > mp.mpf("1e-4")


def test_tau_log_golden_p2():
    assert str(topological_tau_log(2)) == "-1/12*t1^3"


def test_tau_log_golden_p3():
    assert str(topological_tau_log(3)) == "-1/3*t1^2*t2 - 2/27*t2^4"


def _sympy_tau4():
    # Independent construction of the p = 4 tau log via sympy series.
    import sympy as sp

    s_t1, s_t2, s_t3, x = sp.symbols("t1 t2 t3 x")
    th2, th1, th0 = -3 * s_t3, -2 * s_t2, -s_t1 + sp.Rational(9, 8) * s_t3 ** 2
    inner = 1 + th2 * x ** 2 + th1 * x ** 3 + th0 * x ** 4
    out = sp.Integer(0)
    for m in (1, 2, 3):
        q = sp.Rational(4 + m, 4)
        g = sp.series(inner ** q, x, 0, 4 + m + 2).removeO()
        res = sp.expand(g).coeff(x, 4 + m + 1)
        out += sp.Rational(5 - m, 10) * [s_t1, s_t2, s_t3][m - 1] * \
            (-sp.Rational(4, 4 + m)) * res
    return sp.expand(out), (s_t1, s_t2, s_t3)


def test_tau_log_p4_flagged_term():
    import sympy as sp

    got = topological_tau_log(4)
    # Cross-checked rows.
    assert got.coeffs.get((2, 0, 1)) == F(-3, 8)   # t1^2 t3
    assert got.coeffs.get((1, 2, 0)) == F(-1, 2)   # t1 t2^2
    assert got.coeffs.get((0, 2, 2)) == F(-9, 16)  # t2^2 t3^2
    # The pure-t3 term sits at degree 5, as the weight grading demands
    # (weight 2 per t3, total weight 10); a cubic term would have weight 6.
    assert (0, 0, 3) not in got.coeffs
    weights = {"t1": 4, "t2": 3, "t3": 2}
    assert got.weighted_degrees(weights) == {10}
    oracle, (s1, s2, s3) = _sympy_tau4()
    c5 = oracle.coeff(s3, 5).subs({s1: 0, s2: 0})
    assert got.coeffs.get((0, 0, 5)) == F(sp.nsimplify(c5).p, sp.nsimplify(c5).q)
    # Full agreement with the independent oracle, all terms.
    for (e1, e2, e3), c in got.coeffs.items():
        oc = oracle.coeff(s1, e1).coeff(s2, e2).coeff(s3, e3)
        assert sp.Rational(c.numerator, c.denominator) == oc, (e1, e2, e3)


def test_consistency_71_72():
    for p in (2, 3, 4):
        assert consistency_71_72(p)


def test_half_power_residue_airy_case():
    vps = solve_theta(2).v_prime_series()
    assert residue(puiseux_pow(vps, F(1, 2))) == -t1 / 2


def test_phase_polynomial_small_p():
    assert phase_polynomial(2).is_zero
    assert phase_polynomial(3) == -F(2, 3) * t2 ** 2


def test_phase_polynomial_grading():
    for p in range(3, 7):
        P = phase_polynomial(p)
        weights = {("t%d" % m): p + 1 - m for m in range(1, p)}
        assert P.weighted_degrees(weights) <= {p + 1}
        assert P.constant_term() == 0


def test_v_eval_numeric():
    pot = solve_theta(2)
    u = 1 + 2j
    got = pot.v_eval(u, [0.3])
    assert got == pytest.approx(u ** 3 / 3 - 0.3 * u)
    pot3 = solve_theta(3)
    got3 = pot3.v_eval(u, [0.1, -0.2])
    assert got3 == pytest.approx(u ** 4 / 4 + 0.2 * u ** 2 - 0.1 * u)
    dgot = pot3.v_prime_eval(u, [0.1, -0.2])
    assert dgot == pytest.approx(u ** 3 + 0.4 * u - 0.1)


def test_time_argument_validation():
    pot = solve_theta(3)
    with pytest.raises(ValueError, match="expected 2 times"):
        pot.v_eval(0.0, [0.1])
    with pytest.raises(ValueError, match="unexpected time"):
        pot.v_eval(0.0, {"t9": 1.0})
    assert pot.v_eval(2.0, {"t1": 0.0}) == pytest.approx(4.0)


def test_zero_times_pure_monomial():
    for p in range(2, 7):
        pot = solve_theta(p)
        u = 1.7
        assert pot.v_eval(u, [0.0] * (p - 1)) == pytest.approx(u ** (p + 1) / (p + 1))
