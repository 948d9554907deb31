"""Contour geometry and quadrature accuracy."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import airy

from airygaps.contours import (
    QuadratureRule,
    RayContour,
    build_quadrature,
    decay_rate,
    envelope_radius,
    standard_contours,
)

TWO_PI_I = 2j * math.pi


def comp_table(contours):
    return [(c.ell, round(c.vertex, 12), round(c.angle, 12), c.ccw)
            for c in contours]


def ang(num, den):
    return round(num * math.pi / den, 12)


# ---------------------------------------------------------------------------
# Component tables


def test_components_p2():
    assert comp_table(standard_contours(2, 1)) == [(2, -0.25, ang(2, 3), True)]
    assert comp_table(standard_contours(2, -1)) == [(1, 0.25, ang(1, 3), False)]


def test_components_p3():
    assert comp_table(standard_contours(3, 1)) == [(2, 0.0, ang(1, 2), True)]
    assert comp_table(standard_contours(3, -1)) == [
        (1, 0.5, ang(1, 4), False), (3, -0.5, ang(3, 4), True)]


def test_components_p4():
    assert comp_table(standard_contours(4, 1)) == [
        (2, 0.25, ang(2, 5), True), (4, -0.75, ang(4, 5), False)]
    assert comp_table(standard_contours(4, -1)) == [
        (1, 0.75, ang(1, 5), False), (3, -0.25, ang(3, 5), True)]


def test_components_p5():
    assert comp_table(standard_contours(5, 1)) == [
        (2, 0.5, ang(1, 3), True), (4, -0.5, ang(2, 3), False)]
    assert comp_table(standard_contours(5, -1)) == [
        (1, 1.0, ang(1, 6), False), (3, 0.0, ang(1, 2), True),
        (5, -1.0, ang(5, 6), False)]


def test_components_p6():
    assert comp_table(standard_contours(6, 1)) == [
        (2, 0.75, ang(2, 7), True), (4, -0.25, ang(4, 7), False),
        (6, -1.25, ang(6, 7), True)]
    assert comp_table(standard_contours(6, -1)) == [
        (1, 1.25, ang(1, 7), False), (3, 0.25, ang(3, 7), True),
        (5, -0.75, ang(5, 7), False)]


@pytest.mark.parametrize("p", [2, 3, 4, 5, 6])
def test_families_interlace_on_the_real_axis(p):
    plus = standard_contours(p, 1)
    minus = standard_contours(p, -1)
    merged = sorted(
        [(c.vertex, 1) for c in plus] + [(c.vertex, -1) for c in minus],
        reverse=True)
    expected_vertices = [0.25 * (p + 1 - 2 * ell) for ell in range(1, p + 1)]
    assert [v for v, _ in merged] == expected_vertices
    signs = [s for _, s in merged]
    assert all(a != b for a, b in zip(signs, signs[1:]))


@pytest.mark.parametrize("p", [2, 3, 4, 5, 6])
@pytest.mark.parametrize("sign", [1, -1])
def test_standard_components_decay_at_unit_rate(p, sign):
    for comp in standard_contours(p, sign):
        assert decay_rate(comp) == pytest.approx(1.0, abs=1e-12)


def test_custom_delta_scales_vertices():
    comps = standard_contours(4, -1, delta=0.35)
    assert [c.vertex for c in comps] == pytest.approx([1.05, -0.35])


def test_invalid_inputs_rejected():
    with pytest.raises(ValueError):
        standard_contours(1, 1)
    with pytest.raises(ValueError):
        standard_contours(3, 0)
    with pytest.raises(ValueError):
        RayContour(p=2, ell=1, vertex=0.0, angle=math.pi, ccw=True, sign=1)


# ---------------------------------------------------------------------------
# Envelope radius


def test_envelope_radius_formula():
    comp = standard_contours(2, 1)[0]
    r = envelope_radius(comp, 1.0, 1e-12)
    assert r == pytest.approx((3 * math.log(1e12)) ** (1 / 3))


def test_envelope_radius_tightens_with_tolerance():
    comp = standard_contours(3, 1)[0]
    loose = envelope_radius(comp, 1.0, 1e-6)
    tight = envelope_radius(comp, 1.0, 1e-12)
    assert tight == pytest.approx(loose * 2 ** 0.25)


@given(st.floats(min_value=1e-15, max_value=1e-2),
       st.floats(min_value=0.1, max_value=10.0))
@settings(max_examples=50, deadline=None)
def test_envelope_radius_well_defined(rel_tol, decay_scale):
    comp = standard_contours(4, -1)[0]
    r = envelope_radius(comp, decay_scale, rel_tol)
    assert math.isfinite(r) and r > 0


def test_envelope_rejects_non_decaying_component():
    bad = RayContour(p=2, ell=1, vertex=0.0, angle=2 * math.pi / 3,
                     ccw=True, sign=-1)
    with pytest.raises(ValueError):
        envelope_radius(bad, 1.0, 1e-10)


# ---------------------------------------------------------------------------
# Quadrature against classical integrals


def airy_plus(x, **kw):
    rule = build_quadrature(standard_contours(2, 1), **kw)
    return rule.integrate(lambda u: np.exp(-u ** 3 / 3 + x * u)) / TWO_PI_I


def airy_minus(x, **kw):
    rule = build_quadrature(standard_contours(2, -1), **kw)
    return rule.integrate(lambda v: np.exp(v ** 3 / 3 - x * v)) / TWO_PI_I


@pytest.mark.parametrize("x", [-2.0, -0.5, 0.0, 0.4, 1.3, 3.0])
def test_plus_family_reproduces_airy(x):
    assert airy_plus(x) == pytest.approx(airy(x)[0], abs=1e-10)


@pytest.mark.parametrize("x", [-1.5, 0.0, 0.7, 2.2])
def test_minus_family_reproduces_negated_airy(x):
    assert airy_minus(x) == pytest.approx(-airy(x)[0], abs=1e-10)


def test_quartic_vertical_line_closed_form():
    rule = build_quadrature(standard_contours(3, 1))
    got = rule.integrate(lambda u: np.exp(-u ** 4 / 4))
    expected = 1j * math.gamma(0.25) / math.sqrt(2)
    assert got == pytest.approx(expected, abs=1e-11)


def test_vertex_shift_leaves_integrals_unchanged():
    base = airy_plus(0.8)
    shifted = build_quadrature(standard_contours(2, 1, delta=0.6))
    moved = shifted.integrate(lambda u: np.exp(-u ** 3 / 3 + 0.8 * u)) / TWO_PI_I
    assert moved == pytest.approx(base, abs=1e-10)


def test_order_refinement_converges():
    exact = airy(1.0)[0]
    coarse = abs(airy_plus(1.0, order=6, panels=4) - exact)
    fine = abs(airy_plus(1.0, order=20, panels=7) - exact)
    assert fine < 1e-12
    assert fine <= coarse


def test_rule_size_and_merge():
    comps = standard_contours(5, -1)
    rule = build_quadrature(comps, order=12, panels=5)
    assert len(rule) == len(comps) * 2 * 5 * 12
    single = build_quadrature(comps[0], order=12, panels=5)
    rest = build_quadrature(comps[1:], order=12, panels=5)
    combined = single.merged(rest)
    assert len(combined) == len(rule)
    assert np.allclose(np.sort_complex(combined.nodes),
                       np.sort_complex(rule.nodes))


def test_minimum_order_enforced():
    rule = build_quadrature(standard_contours(2, 1), order=1, panels=3)
    assert len(rule) == 2 * 3 * 4


def test_nodes_come_in_conjugate_pairs():
    rule = build_quadrature(standard_contours(4, 1))
    assert np.allclose(np.sort_complex(rule.nodes),
                       np.sort_complex(rule.nodes.conj()))


def test_empty_component_list_rejected():
    with pytest.raises(ValueError):
        build_quadrature(())
