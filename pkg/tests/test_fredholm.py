"""Gap determinants: probability invariants, oracles, and regressions."""

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import roots_legendre

from airygaps.fredholm import Endpoints, gap_logdet, gap_semi_infinite
from airygaps.kernel import KernelSpec, airy_preset, kernel_matrix, pearcey_preset

TW = KernelSpec(p=2)


# ---------------------------------------------------------------------------
# Endpoint bookkeeping


def test_endpoints_validation():
    with pytest.raises(ValueError):
        Endpoints((1.0, 2.0, 3.0))
    with pytest.raises(ValueError):
        Endpoints((1.0, 1.0))
    with pytest.raises(ValueError):
        Endpoints((0.0, 2.0, 1.5, 3.0))
    assert Endpoints(()).intervals() == []
    assert Endpoints((-1.0, 0.5, 2.0, 4.0)).intervals() == [(-1.0, 0.5), (2.0, 4.0)]


def test_endpoints_reflected():
    assert Endpoints((-2.0, -1.0, 3.0, 4.0)).reflected().a == (-4.0, -3.0, 1.0, 2.0)


def test_empty_set_gap():
    result = gap_logdet(TW, Endpoints(()))
    assert result.Q == 0.0
    assert result.det == 1.0
    assert result.node_count == 0
    assert result.error_estimate == 0.0


def test_too_few_nodes_rejected():
    with pytest.raises(ValueError):
        gap_logdet(TW, Endpoints((0.0, 1.0)), m=4)


def test_semi_infinite_needs_decaying_family():
    with pytest.raises(ValueError):
        gap_semi_infinite(pearcey_preset(1.0), -1.0)


# ---------------------------------------------------------------------------
# Oracles for the edge distribution (p = 2, n = 0)

# Left-tail expansion of the edge gap on [s, inf): the cubic law with
# the -1/8 log correction and the Barnes constant kappa = ln 2 / 24 +
# zeta'(-1); the remainder is o(1) and empirically ~1e-3 at s = -4.
KAPPA = math.log(2.0) / 24.0 + float(mpmath.zeta(-1, derivative=1))


@pytest.mark.parametrize("s, slack", [(-4.0, 2e-3), (-6.0, 5e-4)])
def test_left_tail_asymptote(s, slack):
    result = gap_semi_infinite(TW, s)
    asym = -abs(s) ** 3 / 12.0 - math.log(abs(s)) / 8.0 + KAPPA
    assert result.Q == pytest.approx(asym, abs=slack)
    assert result.error_estimate < 1e-8


def test_mode_gap_value():
    # Frozen from this implementation; the value is pinned externally
    # by the left-tail oracle above and the trace oracle below, which
    # bracket the same determinant family.
    result = gap_semi_infinite(TW, 0.0)
    assert result.det == pytest.approx(0.9693728283552631, abs=1e-9)


def test_far_interval_matches_trace():
    # On [4, 12] the kernel is uniformly tiny, so -Q must sit between
    # the trace tr and tr / (1 - mu_max), an interval of width ~tr^2.
    result = gap_logdet(TW, Endpoints((4.0, 12.0)))
    x, w = roots_legendre(60)
    x = 8.0 + 4.0 * x
    kernel, _ = kernel_matrix(TW, x)
    trace = float((4.0 * w) @ np.diag(kernel))
    assert 0.0 < trace < 1e-3
    assert -result.Q == pytest.approx(trace, rel=1e-5)
    assert -result.Q >= trace * (1.0 - 1e-12)


def test_node_doubling_converged():
    coarse = gap_logdet(TW, Endpoints((-2.0, 2.0)), m=40)
    fine = gap_logdet(TW, Endpoints((-2.0, 2.0)), m=80)
    assert abs(coarse.Q - fine.Q) < 1e-10
    assert coarse.node_count == 40
    assert fine.node_count == 80


def test_truncation_cut_converged():
    short = gap_semi_infinite(TW, -1.0, M_cut=8.0)
    long = gap_semi_infinite(TW, -1.0, M_cut=12.0)
    assert abs(short.Q - long.Q) < 1e-8
    assert abs(short.Q - gap_semi_infinite(TW, -1.0).Q) < 1e-8


# ---------------------------------------------------------------------------
# Probability invariants


def gap_specs():
    return [
        KernelSpec(p=2),
        airy_preset(1, 0.5),
        airy_preset(1, -0.5),
        airy_preset(2, -0.3),
        pearcey_preset(1.0),
        pearcey_preset(4.0, 1, 0.5),
    ]


@pytest.mark.parametrize("spec", gap_specs())
def test_probability_range(spec):
    result = gap_logdet(spec, Endpoints((-1.2, 0.4, 0.9, 1.7)))
    assert 0.0 < result.det <= 1.0
    assert result.Q <= 0.0
    assert result.error_estimate < 1e-8


@pytest.mark.parametrize("spec", gap_specs())
def test_set_inclusion_monotonicity(spec):
    inner = gap_logdet(spec, Endpoints((-0.8, 0.6)))
    wider = gap_logdet(spec, Endpoints((-1.5, 0.9)))
    split = gap_logdet(spec, Endpoints((-1.5, 0.9, 1.4, 2.0)))
    assert wider.Q <= inner.Q
    assert split.Q <= wider.Q


def test_semi_infinite_monotone_in_s():
    values = [gap_semi_infinite(TW, s).Q for s in (-3.0, -2.0, -1.0, 0.0, 1.0)]
    assert all(a < b for a, b in zip(values, values[1:]))
    assert all(v < 0.0 for v in values)


def test_gap_subadditivity_disjoint():
    # Empty-set events on disjoint sets are negatively associated for a
    # symmetric determinantal kernel: Q(E u E') <= Q(E) + Q(E').
    left = Endpoints((-2.0, -0.5))
    right = Endpoints((0.5, 2.0))
    union = Endpoints((-2.0, -0.5, 0.5, 2.0))
    q_l = gap_logdet(TW, left).Q
    q_r = gap_logdet(TW, right).Q
    q_u = gap_logdet(TW, union).Q
    assert q_u <= q_l + q_r + 1e-12


def test_cusp_gap_reflection_symmetry():
    spec = pearcey_preset(1.0)
    forward = Endpoints((-1.5, -0.2, 0.4, 1.3))
    backward = forward.reflected()
    assert gap_logdet(spec, forward).Q == pytest.approx(
        gap_logdet(spec, backward).Q, abs=1e-8)


@settings(max_examples=8, deadline=None)
@given(st.floats(-2.0, 0.5), st.floats(0.05, 1.5))
def test_semi_infinite_inclusion_property(s, step):
    lower = gap_semi_infinite(TW, s, m=24)
    higher = gap_semi_infinite(TW, s + step, m=24)
    assert lower.Q < higher.Q < 0.0
    assert 0.0 < lower.det < higher.det <= 1.0


# ---------------------------------------------------------------------------
# Deformed-kernel regressions (pinned by the oracle battery in the
# kernel tests; the supercritical ones exercise the gauge conjugation
# and the explicit pole crossing)


@pytest.mark.parametrize("w, s, frozen", [
    (-1.0, -2.0, -4.55554686315122),
    (-0.5, -2.0, -3.361734185176621),
    (0.5, -2.0, -2.0914924132626793),
])
def test_single_outlier_gap_values(w, s, frozen):
    result = gap_semi_infinite(airy_preset(1, w), s)
    assert result.Q == pytest.approx(frozen, abs=1e-9)


def test_supercritical_outlier_gaps():
    strong = gap_semi_infinite(airy_preset(1, -2.0), -1.0)
    assert strong.Q == pytest.approx(-6.137151567121589, abs=1e-6)
    assert strong.error_estimate < 1e-6
    deeper = gap_semi_infinite(airy_preset(1, -3.0), 0.0)
    assert deeper.Q == pytest.approx(-10.950387125704612, abs=1e-5)
    family = [gap_semi_infinite(airy_preset(1, -2.0), s).Q
              for s in (-4.0, -2.0, 0.0, 2.0)]
    assert family[0] == pytest.approx(-18.6741857800, abs=1e-6)
    assert all(a < b for a, b in zip(family, family[1:]))


def test_outlier_pushes_edge_down():
    # A wanderer below the bulk (w < 0) populates [s, inf) more than
    # the undeformed process does, so its gap probability is smaller.
    base = gap_semi_infinite(TW, -1.0).Q
    pulled = gap_semi_infinite(airy_preset(1, -1.0), -1.0).Q
    assert pulled < base


def test_error_estimate_scales_with_nodes():
    rough = gap_logdet(TW, Endpoints((-2.0, 1.0)), m=10)
    tight = gap_logdet(TW, Endpoints((-2.0, 1.0)), m=48)
    assert rough.error_estimate > tight.error_estimate
    assert abs(rough.Q - tight.Q) < 10.0 * rough.error_estimate
