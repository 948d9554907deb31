"""Contour-integral kernels in two independent representations.

A kernel of the family is a double contour integral over ascending
wedge families Gamma+ (variable u) and Gamma- (variable v),

    K(lam, lam') = (2 pi i)^-2 iint  exp(-V(u) + lam' u)  (u - w)^n
                                    ----------------------------------- ,
                                     exp(-V(v) + lam  v)  (v - w)^n (u-v)

with V the degree p+1 potential fitted by `potential.solve_theta`.  The
same kernel collapses, by integrating the (V'(u)-V'(v))/(u-v) identity
by parts, to a finite-rank numerator over lam' - lam built from moment
functions of the two single-contour wave integrals.  Both forms are
implemented: `kernel_double_integral` as the defining formula and
`kernel_iiks` as the fast finite-rank path, and they are cross-checked
in the test suite.  Presets cover the stationary edge kernel (p = 2,
Airy, with n outliers pinned at w) and the cusp kernel (p = 3, Pearcey,
with n inliers), the latter in its conventional orientation via the
built-in reflection wrapper.

Diagonal values of the finite-rank form use the confluent limit (the
numerator vanishes identically at lam' = lam), never a small offset.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial import polynomial
from scipy.special import airy

from .contours import DEFAULT_DELTA, QuadratureRule, build_quadrature, standard_contours
from .potential import PotentialVp, solve_theta

TWO_PI_I = 2j * math.pi
POLE_MARGIN = 0.2
NOISE_FLOOR = 1e-300


class AccuracyError(RuntimeError):
    """A kernel evaluation failed an internal consistency check."""


@functools.lru_cache(maxsize=None)
def _potential(p: int) -> PotentialVp:
    return solve_theta(p)


@dataclass(frozen=True)
class KernelSpec:
    """Parameter bundle pinning one kernel of the family.

    p        potential degree minus one (2: Airy family, 3: Pearcey).
    n, w     deformation exponent and the real location of the pinned
             paths; n = 0 ignores w entirely.
    t        times t1..t_{p-1} (sequence, or empty for all zero); t1 = 0
             keeps the spec on the locus where the gap PDEs hold.
    delta    wedge vertex scale override; None picks a p-dependent
             default.  Either way, when n > 0 the evaluated kernel is
             always the one whose v-contour passes the pole at w on the
             origin side: the descending wedges are clamped toward the
             pole, or, where that would drag a vertex deep into the
             potential's growth region (p = 2, low w), kept on the
             pole-free side with the crossing restored by an explicit
             loop or its analytic residue.  The configuration on the
             other side of the pole differs by a rank-one residue term
             and is not the correlation kernel (its diagonal can go
             negative).
    reflect  evaluate K(-lam, -lam') instead; used by the cusp preset
             whose conventional kernel is the reflected one.
    rel_tol, order, panels   quadrature envelope controls.
    """

    p: int
    n: int = 0
    w: float = 0.0
    t: tuple = ()
    delta: float | None = None
    reflect: bool = False
    rel_tol: float = 1e-12
    order: int = 24
    panels: int = 8

    def __post_init__(self):
        if self.p < 2:
            raise ValueError("p must be at least 2")
        if self.n < 0:
            raise ValueError("n must be non-negative")
        times = tuple(float(v) for v in (self.t or (0.0,) * (self.p - 1)))
        if len(times) != self.p - 1:
            raise ValueError(
                "expected %d times t1..t%d, got %d"
                % (self.p - 1, self.p - 1, len(times)))
        object.__setattr__(self, "t", times)

    def theta_numeric(self) -> tuple:
        """Numeric V' coefficients theta_0..theta_{p-2} at these times."""
        return tuple(_potential(self.p).theta_numeric(self.t))

    def vertex_scale(self) -> float:
        if self.delta is not None:
            return self.delta
        return min(DEFAULT_DELTA, 0.5 / (self.p - 1))

    def _clamp_pole(self, wedge):
        """Keep the pole at w inside the forward sector of the wedge
        that opens toward it.

        The correlation kernel is the one whose v-contour holds the
        pole in front of the wedge opening toward its side of the
        origin; the crossed configuration differs by a rank-one residue
        term and shows up as a negative diagonal, which a correlation
        kernel cannot have.  A wedge sliding toward the pole is halted
        a margin before it; a right-opening wedge never crosses the
        origin (the ascending family sits there) and instead stops
        halfway to a small positive pole, mirrored for left-opening
        wedges.  The vertical wedge (odd wedge count) is shifted to the
        side of the pole it already passes on.

        At p = 2 the single descending wedge owns the pole for every w,
        yet anchoring it left of a very negative w would route the rays
        through the cubic's growth region; the wedge therefore backs
        off to the pole-free side (see `pole_split`) and the crossing
        is restored as an explicit loop around the pole (defining
        integral) or its analytic residue (finite-rank moments).
        """
        w, m = self.w, POLE_MARGIN
        span = self.p + 1 - 2 * wedge.ell
        if span > 0:
            if self.p == 2:
                if self.pole_split():
                    return replace(wedge, vertex=max(wedge.vertex, w + m))
                return wedge
            if w > 0:
                allowed = w - m if w >= 2 * m else 0.5 * w
                if wedge.vertex > allowed:
                    return replace(wedge, vertex=allowed)
            return wedge
        elif span < 0 and w < 0:
            allowed = w + m if w <= -2 * m else 0.5 * w
            if wedge.vertex < allowed:
                return replace(wedge, vertex=allowed)
        elif span == 0 and abs(w) < m:
            if w == 0:
                raise ValueError(
                    "the pole at w = 0 lies on the vertical descending "
                    "wedge; this configuration is ill-defined")
            return replace(wedge, vertex=-math.copysign(m - abs(w), w))
        return wedge

    def pole_split(self) -> bool:
        """Whether the descending family evaluates on the pole-free
        side with the crossing restored separately (p = 2, low pole)."""
        return (self.n > 0 and self.p == 2
                and self.w < self.vertex_scale() + POLE_MARGIN)

    def wedges(self, sign: int) -> tuple:
        family = standard_contours(self.p, sign, self.vertex_scale())
        if not self.n:
            return family
        if sign < 0:
            return tuple(self._clamp_pole(wedge) for wedge in family)
        if self.pole_split():
            m = POLE_MARGIN
            family = tuple(
                replace(wedge, vertex=self.w - 2 * m)
                if abs(self.w - wedge.vertex) < 2 * m else wedge
                for wedge in family)
        return family


def airy_preset(n: int = 0, w: float = 0.0) -> KernelSpec:
    """Stationary edge kernel, optionally with n pinned outliers at w."""
    return KernelSpec(p=2, n=n, w=float(w))


def pearcey_preset(tau: float, n: int = 0, w: float = 0.0) -> KernelSpec:
    """Cusp kernel with opening parameter tau, n pinned inliers at w.

    The conventional form reverses both arguments and the pinning
    location relative to the defining double integral, and sets
    t2 = tau / 2; the returned spec carries the reflection flag so the
    evaluators reproduce the conventional values directly.  For tau
    beyond 2 the descending wedge vertices are moved out to
    +-sqrt(tau/3), the inflection points of the quartic exponent.
    Rays launched there decay monotonically for every spectral
    argument up to the edge of support, where the saddle points
    coalesce exactly at the inflection; rays from the potential
    minima at +-sqrt(tau) would first climb orders of magnitude
    above the saddle value and lose the determinant entirely.
    """
    spec = KernelSpec(p=3, n=n, w=-float(w), t=(0.0, 0.5 * tau), reflect=True)
    if tau >= 2.0:
        spec = replace(spec, delta=0.5 * math.sqrt(tau / 3.0))
    return spec


def _u_bucket(scale: float) -> float:
    """Round the argument envelope up a geometric ladder for rule reuse."""
    if scale <= 0.5:
        return 0.5
    return float(2.0 ** math.ceil(math.log2(scale)))


def _growth(theta: tuple, u_scale: float, vertex: float, radius: float, p: int) -> float:
    """Bound on the non-decaying exponent terms inside |z| <= radius."""
    total = u_scale * radius + abs(vertex) * radius ** p
    for i, c in enumerate(theta):
        if c:
            total += abs(c) * radius ** (i + 1) / (i + 1)
    return total


def _ray_distance(point: float, wedge) -> float:
    """Distance from a real point to the nearer ray of a wedge."""
    offset = point - wedge.vertex
    if offset * math.cos(wedge.angle) >= 0.0:
        return abs(offset * math.sin(wedge.angle))
    return abs(offset)


def _pole_loop(spec: KernelSpec, u_scale: float) -> QuadratureRule:
    """Counterclockwise circle around the pole at w.

    Restores the residue contribution of the crossing that the
    backed-off descending wedge no longer performs.  The radius clears
    every wedge ray of both families by half; the node count tracks the
    phase swing of exp(V(v) - lam v) around the circle, for which the
    trapezoid rule on a closed analytic loop converges geometrically.
    """
    clearance = min(
        _ray_distance(spec.w, wedge)
        for s in (-1, 1) for wedge in spec.wedges(s))
    radius = min(POLE_MARGIN, 0.5 * clearance)
    if radius <= 0.0:
        raise AccuracyError(
            "no room for a loop around the pole between the contour "
            "families; adjust delta or move w")
    reach = abs(spec.w) + radius
    slope = u_scale + reach ** spec.p
    for i, c in enumerate(spec.theta_numeric()):
        slope += abs(c) * reach ** i
    count = max(64, 8 * math.ceil(radius * slope))
    steps = (np.arange(count) + 0.5) * (2.0 * math.pi / count)
    offsets = radius * np.exp(1j * steps)
    return QuadratureRule(
        nodes=spec.w + offsets,
        weights=offsets * (TWO_PI_I / count))


@functools.lru_cache(maxsize=256)
def _family_rule(spec: KernelSpec, sign: int, u_scale: float,
                 variant: str = "std", plus_offset: float = 0.0) -> QuadratureRule:
    """Merged quadrature over one wedge family, envelope sized for the
    linear argument term, the vertex offset and the lower potential
    coefficients.

    When the spec keeps the descending family on the pole-free side of
    w, the standard variant appends the explicit loop around the pole;
    the "wedge" variant omits it for the finite-rank evaluator, which
    adds the loop's analytic residues instead.  plus_offset moves the
    vertex of every ascending wedge; the finite-rank evaluator uses it
    to track the saddle when a batch of arguments sits at one edge of
    the support.
    """
    theta = spec.theta_numeric()
    log_tol = math.log(1.0 / spec.rel_tol)
    q = spec.p + 1
    family = spec.wedges(sign)
    if sign > 0 and plus_offset:
        family = tuple(replace(w, vertex=w.vertex + plus_offset)
                       for w in family)
    rules = []
    for wedge in family:
        radius = (q * log_tol) ** (1.0 / q)
        for _ in range(30):
            total = log_tol + _growth(theta, u_scale, wedge.vertex, radius, spec.p)
            updated = (q * total) ** (1.0 / q)
            if updated > 1e4:
                raise AccuracyError(
                    "integration envelope diverged; the potential growth "
                    "overwhelms the leading decay at these parameters")
            if abs(updated - radius) < 1e-9 * radius:
                radius = updated
                break
            radius = updated
        scale = log_tol / (log_tol + _growth(theta, u_scale, wedge.vertex, radius, spec.p))
        rules.append(build_quadrature(
            wedge, decay_scale=scale, rel_tol=spec.rel_tol,
            order=spec.order, panels=spec.panels))
    if sign < 0 and variant == "std" and spec.pole_split():
        rules.append(_pole_loop(spec, u_scale))
    merged = rules[0]
    for extra in rules[1:]:
        merged = merged.merged(extra)
    return merged


def _weighted_base(spec: KernelSpec, rule: QuadratureRule, sign: int,
                   lam: np.ndarray, pole_shift: int = 0) -> np.ndarray:
    """Quadrature-weighted integrand matrix, nodes by argument points.

    Entry (a, j) is weight_a * exp(sign * (lam_j z_a - V(z_a))) times
    the pole factor (z_a - w)^(sign n + pole_shift).
    """
    z = rule.nodes
    phase = sign * (-_potential(spec.p).v_eval(z, spec.t))
    base = np.exp(phase[:, None] + sign * np.outer(z, lam))
    base *= rule.weights[:, None]
    power = sign * spec.n + pole_shift
    if power:
        base *= ((z - spec.w) ** power)[:, None]
    return base


def _moments(base: np.ndarray, nodes: np.ndarray, powers: range):
    """Node-power moments of a weighted base, divided by 2 pi i.

    Also returns, per moment, the node-level magnitude sum: the scale
    against which the quadrature sum rounds, which can exceed the
    moment itself by the full internal cancellation factor (huge in
    decaying tails).
    """
    out = np.empty((len(powers), base.shape[1]), dtype=complex)
    mag = np.empty((len(powers), base.shape[1]))
    abs_base = np.abs(base)
    abs_nodes = np.abs(nodes)
    for row, k in enumerate(powers):
        out[row] = (nodes ** k) @ base / TWO_PI_I
        mag[row] = (abs_nodes ** k) @ abs_base / (2.0 * math.pi)
    return out, mag


def _airy_moments(spec: KernelSpec, lam: np.ndarray, count: int,
                  pole_power: int):
    """Exact ascending-family moments for the cubic potential.

    At p = 2 the ascending family is the standard Airy contour and
    every moment int u^k (u - w)^pow exp(-V(u) + lam u) du / (2 pi i)
    is a polynomial combination of Ai and Ai' at z = lam - theta_0:
    monomial moments obey M_{k+1} = dM_k/dz with M_0 = Ai, M_1 = Ai'
    and Ai'' = z Ai, and the pole factor expands binomially.  Library
    accuracy here keeps far-tail columns meaningful long after wedge
    quadrature has cancelled away all digits of exp(-2/3 z^{3/2}).
    """
    z = np.asarray(lam, dtype=float) - spec.theta_numeric()[0]
    ai, aip, _, _ = airy(z)
    top = count + pole_power - 1
    degrees = np.arange(1, top + 2)
    on_ai = np.zeros(top + 2)
    on_aip = np.zeros(top + 2)
    on_ai[0] = 1.0
    mono = np.empty((top + 1, z.size))
    for k in range(top + 1):
        mono[k] = (polynomial.polyval(z, on_ai) * ai
                   + polynomial.polyval(z, on_aip) * aip)
        d_ai = np.zeros_like(on_ai)
        d_ai[:-1] = on_ai[1:] * degrees
        d_aip = np.zeros_like(on_aip)
        d_aip[:-1] = on_aip[1:] * degrees
        z_aip = np.zeros_like(on_aip)
        z_aip[1:] = on_aip[:-1]
        on_ai, on_aip = d_ai + z_aip, on_ai + d_aip
    out = np.zeros((count, z.size))
    for k in range(count):
        for j in range(pole_power + 1):
            out[k] += (math.comb(pole_power, j)
                       * (-spec.w) ** (pole_power - j) * mono[k + j])
    return out


def _pole_residues(spec: KernelSpec, lam: np.ndarray, powers: range,
                   order: int):
    """Residues at v = w of v^l exp(V(v) - lam v) / (v - w)^order.

    Crossing the descending wedge over the pole changes each minus-side
    moment by exactly this amount (the 2 pi i of the residue theorem
    cancels the moment normalization).  Computed by the derivative
    recurrence P_{j+1} = P_j' + V'(v) P_j - lam P_j on polynomial
    coefficients in v, evaluated at w; exact up to rounding, which is
    what makes the pole-free contour plus residue split stable where
    direct quadrature on the crossed contour loses all digits.
    """
    w = spec.w
    theta = spec.theta_numeric()
    steps = order - 1
    body = _potential(spec.p).v_eval(np.array([w + 0.0j]), spec.t)[0]
    base = np.exp(body - lam * w)
    out = np.empty((len(powers), lam.size), dtype=complex)
    for row, l in enumerate(powers):
        top = l + spec.p * steps
        coeffs = np.zeros((top + 1, lam.size), dtype=complex)
        coeffs[l] = 1.0
        deg = l
        for _ in range(steps):
            new = np.zeros_like(coeffs)
            for d in range(deg + 1):
                if d:
                    new[d - 1] += d * coeffs[d]
                new[d + spec.p] += coeffs[d]
                new[d] -= lam * coeffs[d]
                for i, th in enumerate(theta):
                    if th:
                        new[d + i] += th * coeffs[d]
            coeffs = new
            deg += spec.p
        at_pole = sum(coeffs[d] * w ** d for d in range(deg + 1))
        out[row] = at_pole * base / math.factorial(steps)
    return out, np.abs(out)


def _numerator_terms(spec: KernelSpec) -> list:
    """(coefficient, u-power, v-power) triples of the finite-rank sum."""
    terms = [(1.0, k, spec.p - 1 - k) for k in range(spec.p)]
    theta = spec.theta_numeric()
    for i in range(1, spec.p - 1):
        c = theta[i]
        if c:
            terms.extend((c, k, i - 1 - k) for k in range(i))
    return terms


def _plus_saddle_offset(spec: KernelSpec, lam_prime: np.ndarray) -> float:
    """Vertex shift for the ascending family when a batch of arguments
    sits at one edge of the support.

    The standard ascending wedge passes through the origin, where the
    integrand peaks at unit magnitude, while moment values at the edge
    of support are exponentially small against that peak; the digits
    between are lost to cancellation.  Moving the vertex to the
    inflection point of the exponent (the vertex the descending family
    already uses on saddle-adapted specs) pins the peak at the saddle
    magnitude, which matches the moment value at the edge.  The shift
    is applied only when it lowers the peak for every argument in the
    batch, so mixed or bulk batches keep the standard contour.
    """
    if spec.delta is None or spec.p == 2 or not lam_prime.size:
        return 0.0
    x0 = 2.0 * spec.delta
    pot = _potential(spec.p)
    v_plus = float(pot.v_eval(np.array([x0 + 0j]), spec.t)[0].real)
    v_minus = float(pot.v_eval(np.array([-x0 + 0j]), spec.t)[0].real)
    if float(np.max(lam_prime)) <= v_plus / x0:
        return x0
    if float(np.min(lam_prime)) >= -v_minus / x0:
        return -x0
    return 0.0


def _iiks_matrix(spec: KernelSpec, lam: np.ndarray, lam_prime: np.ndarray):
    """Finite-rank kernel matrix K[i, j] = K(lam_i, lam'_j), with a
    per-entry rounding-noise estimate.

    Off-diagonal entries divide the numerator by lam' - lam; entries
    with exactly coincident arguments use the confluent limit, which
    replaces every ascending-side moment by the next one up.
    """
    u_scale = _u_bucket(max(float(np.max(np.abs(lam), initial=0.0)),
                            float(np.max(np.abs(lam_prime), initial=0.0))))
    split_pole = spec.pole_split()
    minus = _family_rule(spec, -1, u_scale,
                         "wedge" if split_pole else "std")
    if spec.p == 2:
        mom_p = _airy_moments(spec, lam_prime, spec.p + 1, spec.n)
        mag_p = np.abs(mom_p)
    else:
        plus = _family_rule(
            spec, 1, u_scale,
            plus_offset=_plus_saddle_offset(spec, lam_prime))
        base_p = _weighted_base(spec, plus, 1, lam_prime)
        mom_p, mag_p = _moments(base_p, plus.nodes, range(spec.p + 1))
    base_m = _weighted_base(spec, minus, -1, lam)
    mom_m, mag_m = _moments(base_m, minus.nodes, range(spec.p))
    if split_pole:
        res, res_mag = _pole_residues(spec, lam, range(spec.p), spec.n)
        mom_m = mom_m + res
        mag_m = mag_m + res_mag

    def product(c, low, k):
        value = c * np.outer(mom_m[low], mom_p[k])
        spread = abs(c) * (np.outer(np.abs(mom_m[low]), mag_p[k])
                           + np.outer(mag_m[low], np.abs(mom_p[k])))
        return value, spread

    terms = _numerator_terms(spec)
    shape = (lam.size, lam_prime.size)
    num = np.zeros(shape, dtype=complex)
    err = np.zeros(shape)
    shifted = np.zeros(shape, dtype=complex)
    err_shift = np.zeros(shape)
    for c, k, l in terms:
        value, spread = product(c, l, k)
        num += value
        err += spread
        value, spread = product(c, l, k + 1)
        shifted += value
        err_shift += spread
    if spec.n:
        if spec.p == 2:
            mom_p = _airy_moments(spec, lam_prime, 2, spec.n - 1)
            mag_p = np.abs(mom_p)
        else:
            mom_p, mag_p = _moments(
                _weighted_base(spec, plus, 1, lam_prime, pole_shift=-1),
                plus.nodes, range(2))
        mom_m, mag_m = _moments(
            _weighted_base(spec, minus, -1, lam, pole_shift=-1),
            minus.nodes, range(1))
        if split_pole:
            res, res_mag = _pole_residues(spec, lam, range(1), spec.n + 1)
            mom_m = mom_m + res
            mag_m = mag_m + res_mag
        value, spread = product(spec.n, 0, 0)
        num += value
        err += spread
        value, spread = product(spec.n, 0, 1)
        shifted += value
        err_shift += spread

    gap = lam_prime[None, :] - lam[:, None]
    coincident = gap == 0.0
    safe = np.where(coincident, 1.0, gap)
    values = np.where(coincident, shifted, num / safe)
    noise = np.finfo(float).eps * np.where(
        coincident, err_shift, err / np.abs(safe))
    return values, noise


def _double_matrix(spec: KernelSpec, lam: np.ndarray, lam_prime: np.ndarray):
    """Defining double-quadrature kernel matrix with a noise estimate."""
    u_scale = _u_bucket(max(float(np.max(np.abs(lam), initial=0.0)),
                            float(np.max(np.abs(lam_prime), initial=0.0))))
    plus = _family_rule(spec, 1, u_scale)
    minus = _family_rule(spec, -1, u_scale)
    base_p = _weighted_base(spec, plus, 1, lam_prime)
    base_m = _weighted_base(spec, minus, -1, lam)
    core = 1.0 / (plus.nodes[:, None] - minus.nodes[None, :])
    if np.max(np.abs(core)) > 1e3:
        raise AccuracyError(
            "ascending and descending contours nearly touch; pass a "
            "smaller delta to keep the families separated")
    cross = core.T @ base_p
    values = (base_m.T @ cross) / TWO_PI_I ** 2
    mag = (np.abs(base_m).T @ (np.abs(core).T @ np.abs(base_p))) / (4 * math.pi ** 2)
    noise = np.finfo(float).eps * mag
    return values, noise


def kernel_matrix(spec: KernelSpec, lam, lam_prime=None, rep: str = "iiks"):
    """Kernel values on a grid, as (matrix, noise-estimate) arrays.

    Entry (i, j) is K(lam_i, lam'_j); lam_prime defaults to lam, giving
    the square matrix whose diagonal uses the confluent limit.  The
    imaginary part, which vanishes up to rounding for real arguments,
    is checked against the noise estimate and discarded.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    lam_prime = lam if lam_prime is None else \
        np.atleast_1d(np.asarray(lam_prime, dtype=float))
    if spec.reflect:
        lam, lam_prime = -lam, -lam_prime
    if rep == "iiks":
        values, noise = _iiks_matrix(spec, lam, lam_prime)
    elif rep == "double":
        values, noise = _double_matrix(spec, lam, lam_prime)
    else:
        raise ValueError("rep must be 'iiks' or 'double', got %r" % rep)
    bound = np.maximum(1e-8 * np.maximum(np.abs(values), NOISE_FLOOR), 16 * noise)
    if np.any(np.abs(values.imag) > bound):
        raise AccuracyError(
            "kernel evaluation returned a non-negligible imaginary part; "
            "raise order/panels or loosen rel_tol consistency")
    return values.real.copy(), noise


def kernel_double_integral(spec: KernelSpec, lam: float, lam_prime: float) -> float:
    """Kernel value from the defining double contour integral."""
    values, _ = kernel_matrix(spec, [lam], [lam_prime], rep="double")
    return float(values[0, 0])


def kernel_iiks(spec: KernelSpec, lam: float, lam_prime: float | None = None,
                diagonal: bool = False) -> float:
    """Kernel value from the finite-rank representation.

    Coincident arguments must be requested explicitly with
    diagonal=True (lam_prime may then be omitted); they are evaluated
    by the confluent limit rather than by a small offset.
    """
    if diagonal:
        if lam_prime is not None and lam_prime != lam:
            raise ValueError("diagonal mode requires coincident arguments")
        lam_prime = lam
    else:
        if lam_prime is None:
            raise ValueError("lam_prime is required unless diagonal=True")
        if lam_prime == lam:
            raise ValueError(
                "coincident arguments hit the removable singularity; "
                "pass diagonal=True for the confluent value")
    values, _ = kernel_matrix(spec, [lam], [lam_prime], rep="iiks")
    return float(values[0, 0])
