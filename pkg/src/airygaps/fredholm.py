"""Gap probabilities on unions of intervals by Nystrom discretization.

The gap log-probability of a kernel on a set E is

    Q(E) = log det(I - K restricted to E),

computed by Gauss-Legendre discretization per interval with square-root
weight symmetrization, M[i, j] = sqrt(w_i) K(x_i, x_j) sqrt(w_j), and a
log-determinant of I - M through a pivoted factorization.  Convergence
is exponential in the node count because the kernels are analytic.

Semi-infinite sets [s, inf) exist only for the decaying edge family
(p = 2) and are handled by explicit truncation: the cut is extended
until the diagonal of the kernel drops below a tail threshold, the
stretch is split into panels of moderate length so the per-panel node
count resolves the kernel's unit-scale oscillation, and the result
carries the sensitivity to pushing the cut further out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor
from scipy.special import roots_legendre

from .kernel import AccuracyError, KernelSpec, kernel_iiks, kernel_matrix

TAIL_THRESHOLD = 1e-14
PANEL_LENGTH = 6.0


@dataclass(frozen=True)
class Endpoints:
    """Ordered endpoints a_1 < a_2 < ... < a_2r of a union of intervals.

    An empty tuple is the empty set.  The set itself is
    [a_1, a_2] u [a_3, a_4] u ... ; see `intervals`.
    """

    a: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.a)
        if len(vals) % 2:
            raise ValueError("endpoints come in pairs, got %d values" % len(vals))
        if any(x >= y for x, y in zip(vals, vals[1:])):
            raise ValueError("endpoints must be strictly increasing")
        object.__setattr__(self, "a", vals)

    def intervals(self) -> list:
        return [(self.a[i], self.a[i + 1]) for i in range(0, len(self.a), 2)]

    def reflected(self) -> "Endpoints":
        return Endpoints(tuple(-v for v in reversed(self.a)))


@dataclass(frozen=True)
class GapResult:
    """Gap evaluation: Q = log det, the determinant itself, the node
    count of the main run, and a self-convergence error estimate."""

    Q: float
    det: float
    node_count: int
    error_estimate: float


def _grid(pairs: list, m: int):
    """Per-interval Gauss-Legendre nodes and weights, concatenated."""
    base, base_w = roots_legendre(m)
    xs, ws = [], []
    for lo, hi in pairs:
        half = 0.5 * (hi - lo)
        xs.append(0.5 * (lo + hi) + half * base)
        ws.append(half * base_w)
    return np.concatenate(xs), np.concatenate(ws)


def _logdet_once(spec: KernelSpec, x: np.ndarray, w: np.ndarray) -> float:
    """log det(I - M) for the symmetrized Nystrom matrix on (x, w).

    For edge kernels with paths pinned below the bulk (w < 0) the
    separated-path term exp(V(w) - x w) makes entries huge and wildly
    asymmetric while the determinant stays moderate; conjugating by the
    diagonal gauge exp(w x) bounds the matrix without changing the
    determinant, keeping the factorization well rounded.
    """
    kernel, noise = kernel_matrix(spec, x)
    if spec.n and spec.p == 2 and spec.w < 0:
        gauge = spec.w * x
        swing = np.exp(gauge[:, None] - gauge[None, :])
        kernel = kernel * swing
        noise = noise * swing
    if float(np.max(noise)) > 1e-6 * max(1.0, float(np.max(np.abs(kernel)))):
        raise AccuracyError(
            "kernel evaluation loses too many digits on this grid; the "
            "parameter range exceeds double-precision moment balance")
    root = np.sqrt(w)
    M = kernel * np.outer(root, root)
    lu, piv = lu_factor(np.eye(len(x)) - M)
    diag = np.diagonal(lu)
    sign = 1.0 if np.count_nonzero(piv != np.arange(len(x))) % 2 == 0 else -1.0
    sign *= math.prod(1.0 if d > 0 else -1.0 for d in diag)
    if sign <= 0.0 or np.any(diag == 0.0):
        raise AccuracyError(
            "discretized determinant is not positive; refine the grid or "
            "shrink the set (the kernel may not be trace class there)")
    return float(np.sum(np.log(np.abs(diag))))


def _gap_on_pairs(spec: KernelSpec, pairs: list, m: int) -> GapResult:
    if m < 8:
        raise ValueError("at least 8 nodes per interval are required")
    if not pairs:
        return GapResult(Q=0.0, det=1.0, node_count=0, error_estimate=0.0)
    x, w = _grid(pairs, m)
    q = _logdet_once(spec, x, w)
    x2, w2 = _grid(pairs, (3 * m) // 2)
    q2 = _logdet_once(spec, x2, w2)
    return GapResult(Q=q, det=math.exp(q), node_count=len(x),
                     error_estimate=abs(q2 - q))


def gap_logdet(spec: KernelSpec, E: Endpoints, m: int = 48) -> GapResult:
    """Gap log-probability on a finite union of intervals.

    The error estimate is the change under a rerun at 3m/2 nodes per
    interval; exponential Nystrom convergence makes it a sound bound on
    the main run's discretization error.
    """
    return _gap_on_pairs(spec, E.intervals(), m)


def _tail_cut(spec: KernelSpec, s: float) -> float:
    """Smallest cut b > s with diagonal kernel below the tail threshold."""
    b = max(s + 4.0, 4.0)
    for _ in range(64):
        if kernel_iiks(spec, b, diagonal=True) < TAIL_THRESHOLD:
            return b
        b += 2.0
    raise AccuracyError(
        "kernel diagonal does not reach the tail threshold; the "
        "configuration decays too slowly for truncation")


def _panels(lo: float, hi: float) -> list:
    """A contiguous interval as abutting panels of bounded length."""
    count = max(1, math.ceil((hi - lo) / PANEL_LENGTH))
    edges = np.linspace(lo, hi, count + 1)
    return [(float(edges[i]), float(edges[i + 1])) for i in range(count)]


def gap_semi_infinite(spec: KernelSpec, s: float, M_cut: float | None = None,
                      m: int = 48) -> GapResult:
    """Gap log-probability on [s, inf) for the decaying edge family.

    The ray is truncated to [s, s + M_cut], with M_cut found
    automatically from the kernel's diagonal tail when not given, and
    split into panels of moderate length carrying m nodes each.  The
    reported error estimate adds the node-refinement delta and the cut
    sensitivity (the change when the cut moves 4 units further out).
    """
    if spec.p != 2:
        raise ValueError(
            "semi-infinite sets require the decaying edge family (p = 2); "
            "cusp kernels must be evaluated on compact sets")
    cut = s + M_cut if M_cut is not None else _tail_cut(spec, s)
    result = _gap_on_pairs(spec, _panels(s, cut), m)
    longer = _gap_on_pairs(spec, _panels(s, cut + 4.0), m)
    return GapResult(Q=result.Q, det=result.det, node_count=result.node_count,
                     error_estimate=result.error_estimate + abs(longer.Q - result.Q))
