"""Winding numbers of closed unitary loops, three ways.

* ``wind_phase``      -- topological: adaptive phase unwrapping of the
                         pointwise determinant along a quadrant boundary.
* ``wind_analytic``   -- analytic: (1/2pi) Integral tr[i u* u'] d theta.
* ``wind_regularized``-- Schatten-regularized: (1/2pi) Integral
                         tr[i (1-u)^p u* u'] d theta, p >= 0.

The sign convention is anchored by Wind(zeta_m) = m for the reference loops
zeta_m(theta) = exp(-i m theta); equivalently the winding is minus the
accumulated argument change divided by 2 pi along the fixed clockwise
traversal.  The 1-trace pairing of a loop is then -Wind.
"""

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from levlab.boundary import QuadrantBoundary, loop_boundary
from levlab.errors import IntegrabilityWarning, NonConvergence

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class WindingReport:
    """Outcome of a boundary winding computation."""

    total: float
    per_segment: Tuple[float, float, float, float]
    regularization_order: int
    integerness_residual: float
    samples_used: int


@dataclass(frozen=True)
class QuadratureSpec:
    """Controls for the loop quadratures.

    Composite midpoint on each panel, panels sized from the loop's local
    oscillation frequency when it provides one, with one grid doubling as a
    convergence check (estimates must agree to ``tol``).  Around declared
    singular points the integral is an improper limit: neighborhoods of
    radius ``exclusion * length`` are first removed and then shrunk
    ``ladder`` times, the increments having to stabilize below ``tol``.
    """

    n0: int = 256
    tol: float = 1.0e-4
    max_doublings: int = 8
    exclusion: float = 0.05
    ladder: int = 3
    pts_per_osc: int = 10
    max_samples: int = 20_000_000


@dataclass(frozen=True)
class ScalarLoop:
    """Differentiable unitary scalar loop on [0, period]."""

    value: Callable[[np.ndarray], np.ndarray]
    derivative: Optional[Callable[[np.ndarray], np.ndarray]] = None
    period: float = TWO_PI
    singular_points: Tuple[float, ...] = ()
    frequency: Optional[Callable[[np.ndarray], np.ndarray]] = None
    matrix_dim: int = 1


@dataclass(frozen=True)
class MatrixLoop:
    """Differentiable unitary matrix loop on [0, period]."""

    value: Callable[[float], np.ndarray]
    derivative: Optional[Callable[[float], np.ndarray]] = None
    period: float = TWO_PI
    singular_points: Tuple[float, ...] = ()
    frequency: Optional[Callable[[np.ndarray], np.ndarray]] = None
    matrix_dim: int = 2


def zeta_loop(m: int) -> ScalarLoop:
    """Reference loop zeta_m(theta) = exp(-i m theta), Wind = m."""
    return ScalarLoop(
        value=lambda th: np.exp(-1j * m * np.asarray(th, float)),
        derivative=lambda th: -1j * m * np.exp(-1j * m * np.asarray(th, float)),
    )


# ---------------------------------------------------------------------------
# Topological winding: adaptive phase unwrapping along a quadrant boundary.
# ---------------------------------------------------------------------------

def _segment_dets(seg, svals):
    out = []
    for s in svals:
        mat = np.atleast_2d(seg.at(float(s)))
        out.append(complex(np.linalg.det(mat)))
    return out


def _unwrap_segment(seg, n0: int, max_depth: int):
    """Accumulated det-phase change along one segment, adaptively refined.

    Bisects every gap whose phase jump reaches pi/2 so a full turn can never
    hide between samples of a continuous loop.
    """
    svals = np.linspace(0.0, 1.0, n0)
    dets = _segment_dets(seg, svals)
    used = len(dets)

    def rec(s0, d0, s1, d1, depth):
        nonlocal used
        if abs(d0) < 0.5 or abs(d1) < 0.5:
            raise NonConvergence(
                f"determinant leaves the unit circle on {seg.edge}")
        jump = np.angle(d1 / d0)
        if abs(jump) < 0.5 * math.pi:
            return jump
        if depth >= max_depth:
            raise NonConvergence(
                f"phase jump {jump:.3f} on {seg.edge} still >= pi/2 at depth "
                f"{max_depth}; discontinuity or undersampling")
        sm = 0.5 * (s0 + s1)
        dm = complex(np.linalg.det(np.atleast_2d(seg.at(sm))))
        used += 1
        return rec(s0, d0, sm, dm, depth + 1) + rec(sm, dm, s1, d1, depth + 1)

    change = 0.0
    for i in range(len(svals) - 1):
        change += rec(svals[i], dets[i], svals[i + 1], dets[i + 1], 0)
    return change, used


def wind_phase(qb: QuadrantBoundary, n0: int = 64,
               max_depth: int = 20) -> WindingReport:
    """Winding of det(Gamma) along the boundary by phase unwrapping.

    Per-segment contributions w1..w4 are minus the phase change on each edge
    divided by 2 pi; their sum is the total winding.
    """
    per = []
    samples = 0
    for seg in qb.segments:
        change, used = _unwrap_segment(seg, n0, max_depth)
        per.append(-change / TWO_PI)
        samples += used
    total = math.fsum(per)
    return WindingReport(
        total=total,
        per_segment=tuple(per),
        regularization_order=0,
        integerness_residual=abs(total - round(total)),
        samples_used=samples,
    )


def wind_phase_loop(loop, n0: int = 256, max_depth: int = 20) -> WindingReport:
    """Phase-unwrapping winding of a bare parametric loop."""
    fn = loop.value
    qb = loop_boundary(lambda t: fn(t), period=loop.period)
    return wind_phase(qb, n0=n0, max_depth=max_depth)


# ---------------------------------------------------------------------------
# Regularized Fredholm determinant.
# ---------------------------------------------------------------------------

def det_p(mat: np.ndarray, p: int) -> complex:
    """Regularized determinant det_p of a finite unitary matrix.

    Product over eigenvalues e^{i theta_j} of
    e^{i theta_j} * exp( sum_{k=1}^{p-1} (1/k) (1 - e^{i theta_j})^k ),
    which reduces to the plain determinant at p = 1.
    """
    if p < 1:
        raise ValueError("det_p requires p >= 1")
    eig = np.linalg.eigvals(np.atleast_2d(np.asarray(mat, dtype=complex)))
    corr = np.zeros_like(eig)
    for k in range(1, p):
        corr = corr + (1.0 - eig) ** k / k
    return complex(np.prod(eig * np.exp(corr)))


# ---------------------------------------------------------------------------
# Analytic and Schatten-regularized winding integrals.
# ---------------------------------------------------------------------------

def _dyadic_split(lo, hi, toward_left, eps):
    """Dyadic panels growing away from the singular end of [lo, hi]."""
    panels = []
    if toward_left:
        x, w = lo, eps
        while x + 2.0 * w < hi:
            panels.append((x, x + w))
            x += w
            w *= 2.0
        panels.append((x, hi))
    else:
        x, w = hi, eps
        while x - 2.0 * w > lo:
            panels.append((x - w, x))
            x -= w
            w *= 2.0
        panels.append((lo, x))
    return panels


def _panels_outside(loop, spec: QuadratureSpec, eps: float):
    """Panels covering the domain minus eps-neighborhoods of singular points."""
    a, b = 0.0, loop.period
    sing = sorted(loop.singular_points)
    intervals = []
    lo = a
    for p in sing:
        clo, chi = max(a, p - eps), min(b, p + eps)
        if clo > lo:
            intervals.append((lo, clo))
        lo = max(lo, chi)
    if lo < b:
        intervals.append((lo, b))

    panels = []
    tol_len = 1e-12 * (b - a)
    for lo, hi in intervals:
        near_left = any(abs(lo - (p + eps)) < tol_len for p in sing)
        near_right = any(abs(hi - (p - eps)) < tol_len for p in sing)
        if near_left:
            panels.extend(_dyadic_split(lo, hi, True, eps))
        elif near_right:
            panels.extend(_dyadic_split(lo, hi, False, eps))
        else:
            panels.append((lo, hi))
    return panels


def _annulus_panels(loop, eps_outer: float, eps_inner: float):
    """Panels filling the shells eps_inner < |theta - p| < eps_outer."""
    a, b = 0.0, loop.period
    panels = []
    for p in sorted(loop.singular_points):
        lo, hi = p + eps_inner, p + eps_outer
        if lo < b and hi > a:
            panels.append((max(lo, a), min(hi, b)))
        lo, hi = p - eps_outer, p - eps_inner
        if lo < b and hi > a:
            panels.append((max(lo, a), min(hi, b)))
    return panels


def _panel_points(loop, spec, lo, hi, refine):
    width = hi - lo
    n = spec.n0
    if loop.frequency is not None:
        # Trapezoid estimate of the number of oscillations on the panel.
        nu = np.abs(loop.frequency(np.array([lo, hi])))
        cycles = 0.5 * float(nu[0] + nu[1]) * width / TWO_PI
        n = max(n, int(math.ceil(cycles * spec.pts_per_osc)))
    n = min(n * (2 ** refine), spec.max_samples)
    h = width / n
    return lo + (np.arange(n) + 0.5) * h, h


def _integrand_scalar(loop, p, theta, h):
    u = loop.value(theta)
    if loop.derivative is not None:
        du = loop.derivative(theta)
    else:
        step = h / 8.0
        du = (loop.value(theta + step) - loop.value(theta - step)) / (2.0 * step)
    f = 1j * np.conj(u) * du
    if p:
        f = (1.0 - u) ** p * f
    return f


def _integrand_matrix(loop, p, theta, h):
    vals = np.empty(theta.shape, dtype=complex)
    for idx, th in enumerate(theta):
        u = np.atleast_2d(loop.value(float(th)))
        if loop.derivative is not None:
            du = np.atleast_2d(loop.derivative(float(th)))
        else:
            step = h / 8.0
            du = (np.atleast_2d(loop.value(float(th) + step))
                  - np.atleast_2d(loop.value(float(th) - step))) / (2.0 * step)
        m = 1j * (u.conj().T @ du)
        if p:
            dev = np.eye(u.shape[0]) - u
            acc = dev
            for _ in range(p - 1):
                acc = acc @ dev
            m = acc @ m
        vals[idx] = np.trace(m)
    return vals


def _integral_pass(loop, p, spec, panels, refine):
    total = 0.0 + 0.0j
    count = 0
    scalar = getattr(loop, "matrix_dim", 2) == 1
    for lo, hi in panels:
        theta, h = _panel_points(loop, spec, lo, hi, refine)
        count += theta.size
        if count > spec.max_samples:
            raise NonConvergence("loop quadrature exceeded the sample budget")
        f = (_integrand_scalar if scalar else _integrand_matrix)(loop, p, theta, h)
        total += np.sum(f) * h
    return total, count


def _wind_integral(loop, p: int, spec: QuadratureSpec) -> float:
    """(1/2pi) Integral tr[i (1-u)^p u* u'] with improper-limit handling."""
    integrable = getattr(loop, "integrand_integrable", None)
    if integrable is not None and not integrable(p):
        warnings.warn(
            "derivative diverges faster than an integrable bound at a "
            "singular point for this regularization order",
            IntegrabilityWarning, stacklevel=3)

    eps = spec.exclusion * loop.period
    panels = _panels_outside(loop, spec, eps) if loop.singular_points \
        else [(0.0, loop.period)]
    value, _ = _integral_pass(loop, p, spec, panels, refine=0)

    if loop.singular_points:
        # Improper limit: shrink the excluded neighborhoods, adding annulus
        # contributions until the remainder is provably below tolerance
        # (loops that know their own tail bound stop without sampling) or,
        # failing that, until the increments stabilize.
        tail_bound = getattr(loop, "tail_bound", None)
        for _k in range(spec.ladder):
            if tail_bound is not None and tail_bound(p, eps) < spec.tol:
                break
            shells = _annulus_panels(loop, eps, eps / 2.0)
            increment, _ = _integral_pass(loop, p, spec, shells, refine=0)
            value += increment
            panels = panels + shells
            eps /= 2.0
            if tail_bound is None and abs(increment) < spec.tol:
                break

    # Grid doubling with Richardson extrapolation (midpoint error is O(h^2),
    # so successive extrapolants form a small Romberg tableau).
    table = [value]
    for d in range(1, spec.max_doublings + 1):
        refined, _ = _integral_pass(loop, p, spec, panels, refine=d)
        row = [refined]
        for j, prev in enumerate(table, start=1):
            row.append(row[-1] + (row[-1] - prev) / (4.0 ** j - 1.0))
        if abs(row[-1] - table[-1]) < spec.tol:
            value = row[-1]
            break
        table = row
        value = refined
    else:
        raise NonConvergence("winding quadrature did not stabilize")
    return float(value.real) / TWO_PI


def wind_analytic(loop, quadrature: QuadratureSpec = QuadratureSpec()) -> float:
    """Analytic winding (1/2pi) Integral tr[i u(t)* u'(t)] dt.

    Normalized so that wind_analytic(zeta_m) = m; the degree-one cyclic
    pairing of the loop equals minus this number.
    """
    return _wind_integral(loop, 0, quadrature)


def wind_regularized(loop, p: int,
                     quadrature: QuadratureSpec = QuadratureSpec()) -> float:
    """Regularized winding (1/2pi) Integral tr[i (1-u)^p u* u'] dt.

    Coincides with ``wind_analytic`` at p = 0 and is p-independent whenever
    the integrand is integrable for the smaller order.
    """
    if p < 0:
        raise ValueError("regularization order must be >= 0")
    return _wind_integral(loop, p, quadrature)


# ---------------------------------------------------------------------------
# The x^a sin(pi x^-b / 2) family of barely-integrable loops.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhiABLoop:
    """Scalar loop e^{-2 pi i phi_ab(theta / 2pi)} on [0, 2 pi].

    phi_ab(x) = x^a sin(pi x^{-b} / 2) on (0, 1], phi_ab(0) = 0.  The loop is
    continuous with value 1 at both ends, winds exactly once, but its
    derivative is only integrable against the regularizer (1-u)^p when
    (p+1) a > b.
    """

    a: float
    b: float
    period: float = TWO_PI
    singular_points: Tuple[float, ...] = (0.0,)
    matrix_dim: int = 1

    def phi(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        pos = x > 0.0
        xp = x[pos]
        out[pos] = xp ** self.a * np.sin(0.5 * math.pi * xp ** (-self.b))
        return out

    def phi_prime(self, x):
        x = np.asarray(x, dtype=float)
        arg = 0.5 * math.pi * x ** (-self.b)
        return (self.a * x ** (self.a - 1.0) * np.sin(arg)
                - 0.5 * math.pi * self.b * x ** (self.a - self.b - 1.0) * np.cos(arg))

    def value(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.exp(-TWO_PI * 1j * self.phi(theta / TWO_PI))

    def derivative(self, theta):
        theta = np.asarray(theta, dtype=float)
        return -1j * self.phi_prime(theta / TWO_PI) * self.value(theta)

    def frequency(self, theta):
        # Local angular frequency of the integrand, dominated by the
        # sin(pi x^-b / 2) factor: |d/dtheta (pi/2) x^{-b}|, x = theta/2pi.
        theta = np.asarray(theta, dtype=float)
        x = np.maximum(theta / TWO_PI, 1e-300)
        return 0.25 * self.b * x ** (-self.b - 1.0)

    def integrand_integrable(self, p: int) -> bool:
        return (p + 1) * self.a > self.b

    def tail_bound(self, p: int, eps_theta: float) -> float:
        # The integrand is the exact differential of
        # G_p(phi) = Integral_0^phi (1 - e^{-2 pi i v})^p dv, so the piece
        # inside theta < eps contributes at most
        # (2 pi)^p |phi|^{p+1} / (p+1) with |phi(x)| <= x^a.
        x = min(eps_theta / TWO_PI, 1.0)
        u = x ** self.a
        return (TWO_PI ** p) * u ** (p + 1) / (p + 1)


def phi_ab_loop(a: float, b: float) -> PhiABLoop:
    """Construct the (a, b) member of the family (a > 0, b > 0)."""
    if a <= 0 or b <= 0:
        raise ValueError("both exponents must be positive")
    return PhiABLoop(a=a, b=b)


def min_regularization_order(a: float, b: float) -> int:
    """Smallest p >= 0 with (p+1) a > b (integrability of the regularized
    integrand)."""
    p = 0
    while (p + 1) * a <= b:
        p += 1
    return p
