"""Boundary of the compactified square and matrix loops living on it.

The square is [0, +inf] x [-inf, +inf] (energy x dilation parameter); its
boundary consists of four edges

    B1 = {0} x [-inf, +inf],     B2 = [0, +inf] x {+inf},
    B3 = {+inf} x [-inf, +inf],  B4 = [0, +inf] x {-inf},

traversed clockwise starting from the left-down corner: B1 upward, B2 with
increasing energy, B3 downward (from +inf to -inf), B4 back from +inf to 0.
Unitary-matrix-valued functions on this closed curve are the objects whose
winding numbers the rest of the package computes.

Compactified parameters are sampled through fixed smooth charts
x = tan(pi (s - 1/2)) on [-inf, inf] and lam = tan(pi s / 2) on [0, inf];
endpoint values are stored analytically and never evaluated through a chart.
"""

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

EDGES = ("B1", "B2", "B3", "B4")

# Domain kinds of the edge parameter.
REAL_LINE = "real_line"    # [-inf, +inf]
HALF_LINE = "half_line"    # [0, +inf]
INTERVAL = "interval"      # finite [a, b], used by degenerate one-edge loops


def real_line_chart(s: float, scale: float = 1.0) -> float:
    """Map s in (0,1) to x in (-inf, inf)."""
    return scale * math.tan(math.pi * (s - 0.5))


def half_line_chart(s: float, scale: float = 1.0) -> float:
    """Map s in (0,1) to lam in (0, inf)."""
    return scale * math.tan(math.pi * s / 2.0)


@dataclass(frozen=True)
class Segment:
    """One edge of the boundary with its traversal direction baked in.

    ``value_fn`` maps the edge's own parameter (x or lambda) to an n x n
    complex matrix; ``start_value``/``end_value`` are the analytic limits at
    the traversal start and end.  ``reverse`` means the traversal runs
    against the increasing parameter (B3 and B4 in the paper-fixed
    convention).
    """

    edge: str
    domain: str
    value_fn: Callable[[float], np.ndarray]
    start_value: np.ndarray
    end_value: np.ndarray
    reverse: bool = False
    chart_scale: float = 1.0
    interval: tuple = (0.0, 1.0)

    def param_at(self, s: float) -> float:
        """Edge parameter for traversal position s in [0, 1]."""
        t = 1.0 - s if self.reverse else s
        if self.domain == REAL_LINE:
            if t <= 0.0:
                return -math.inf
            if t >= 1.0:
                return math.inf
            return real_line_chart(t, self.chart_scale)
        if self.domain == HALF_LINE:
            if t <= 0.0:
                return 0.0
            if t >= 1.0:
                return math.inf
            return half_line_chart(t, self.chart_scale)
        a, b = self.interval
        return a + (b - a) * t

    def at(self, s: float) -> np.ndarray:
        """Matrix value at traversal position s in [0, 1]."""
        if s <= 0.0:
            return self.start_value
        if s >= 1.0:
            return self.end_value
        return np.asarray(self.value_fn(self.param_at(s)), dtype=complex)


@dataclass(frozen=True)
class QuadrantBoundary:
    """Ordered quadruple of matrix segments on B1..B4."""

    segments: Sequence[Segment]
    dim: int = field(default=0)

    def __post_init__(self):
        if len(self.segments) != 4:
            raise ValueError("a quadrant boundary has exactly four segments")
        if self.dim == 0:
            object.__setattr__(
                self, "dim", np.asarray(self.segments[0].start_value).shape[0])

    def reversed(self) -> "QuadrantBoundary":
        """Same curve traversed the opposite way (orientation flipped)."""
        segs = []
        for seg in reversed(list(self.segments)):
            segs.append(Segment(
                edge=seg.edge, domain=seg.domain, value_fn=seg.value_fn,
                start_value=seg.end_value, end_value=seg.start_value,
                reverse=not seg.reverse, chart_scale=seg.chart_scale,
                interval=seg.interval))
        return QuadrantBoundary(segments=tuple(segs), dim=self.dim)


def constant_segment(edge: str, domain: str, value: np.ndarray,
                     reverse: bool = False) -> Segment:
    value = np.asarray(value, dtype=complex)
    return Segment(edge=edge, domain=domain, value_fn=lambda _t: value,
                   start_value=value, end_value=value, reverse=reverse)


def standard_quadruple(g1, g2, g3, g4=None, *, dim=None, b2_scale=1.0):
    """Build the clockwise quadruple from edge functions and their limits.

    ``g1``/``g3`` are (fn, value_at_minus_inf, value_at_plus_inf) on the real
    line, ``g2`` is (fn, value_at_0, value_at_inf) on the half line, ``g4``
    defaults to the constant identity.  Traversal directions (B3 from +inf,
    B4 from +inf) are applied here.
    """
    fn1, g1m, g1p = g1
    fn2, g20, g2i = g2
    fn3, g3m, g3p = g3
    n = np.asarray(g1m).shape[0] if dim is None else dim
    if g4 is None:
        seg4 = constant_segment("B4", HALF_LINE, np.eye(n), reverse=True)
    else:
        fn4, g40, g4i = g4
        seg4 = Segment("B4", HALF_LINE, fn4, start_value=np.asarray(g4i, complex),
                       end_value=np.asarray(g40, complex), reverse=True)
    return QuadrantBoundary(segments=(
        Segment("B1", REAL_LINE, fn1, start_value=np.asarray(g1m, complex),
                end_value=np.asarray(g1p, complex)),
        Segment("B2", HALF_LINE, fn2, start_value=np.asarray(g20, complex),
                end_value=np.asarray(g2i, complex), chart_scale=b2_scale),
        Segment("B3", REAL_LINE, fn3, start_value=np.asarray(g3p, complex),
                end_value=np.asarray(g3m, complex), reverse=True),
        seg4,
    ))


def loop_boundary(fn, value_at_0=None, period=2.0 * math.pi,
                  dim=1) -> QuadrantBoundary:
    """Wrap a closed parametric loop as a degenerate one-edge boundary.

    The loop occupies B1 as a finite-interval segment; B2..B4 are constant at
    the loop's base point, so all winding is reported in the first slot.
    """
    base = np.asarray(fn(0.0), dtype=complex) if value_at_0 is None \
        else np.asarray(value_at_0, dtype=complex)
    base = np.atleast_2d(base)
    mat_fn = lambda t: np.atleast_2d(np.asarray(fn(t), dtype=complex))
    seg1 = Segment("B1", INTERVAL, mat_fn, start_value=base, end_value=base,
                   interval=(0.0, period))
    return QuadrantBoundary(segments=(
        seg1,
        constant_segment("B2", HALF_LINE, base),
        constant_segment("B3", REAL_LINE, base, reverse=True),
        constant_segment("B4", HALF_LINE, base, reverse=True),
    ), dim=base.shape[0])


def corner_mismatch(qb: QuadrantBoundary) -> float:
    """Largest operator-norm gap between consecutive segment endpoints.

    Zero means the four corner identities hold: the traversal end value of
    each segment equals the start value of the next (cyclically).
    """
    worst = 0.0
    segs = list(qb.segments)
    for j in range(4):
        gap = segs[j].end_value - segs[(j + 1) % 4].start_value
        worst = max(worst, float(np.linalg.norm(np.atleast_2d(gap), 2)))
    return worst


def sample_closed_path(qb: QuadrantBoundary, n_per_segment: int):
    """Sample the whole boundary clockwise; returns (edge, param, matrix) rows.

    ``n_per_segment`` evenly spaced traversal positions per edge, endpoints
    included (their matrices are the stored analytic values).
    """
    if n_per_segment < 2:
        raise ValueError("need at least 2 samples per segment")
    rows = []
    for seg in qb.segments:
        for s in np.linspace(0.0, 1.0, n_per_segment):
            rows.append((seg.edge, seg.param_at(float(s)), seg.at(float(s))))
    return rows


def pointwise_det(qb: QuadrantBoundary) -> QuadrantBoundary:
    """Replace every segment by its pointwise determinant (dim-1 boundary)."""
    segs = []
    for seg in qb.segments:
        fn = seg.value_fn

        def det_fn(t, _fn=fn):
            return np.atleast_2d(np.linalg.det(np.atleast_2d(_fn(t))))

        segs.append(Segment(
            edge=seg.edge, domain=seg.domain, value_fn=det_fn,
            start_value=np.atleast_2d(np.linalg.det(np.atleast_2d(seg.start_value))),
            end_value=np.atleast_2d(np.linalg.det(np.atleast_2d(seg.end_value))),
            reverse=seg.reverse, chart_scale=seg.chart_scale,
            interval=seg.interval))
    return QuadrantBoundary(segments=tuple(segs), dim=1)


def write_path_csv(qb: QuadrantBoundary, n_per_segment: int, path: str):
    """Dump a sampled path to CSV (segment, s-index, param, Re/Im entries)."""
    rows = sample_closed_path(qb, n_per_segment)
    n = qb.dim
    header = ["segment", "param"]
    for i in range(n):
        for j in range(n):
            header += [f"re_{i}{j}", f"im_{i}{j}"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for edge, param, mat in rows:
            mat = np.atleast_2d(mat)
            flat = []
            for i in range(n):
                for j in range(n):
                    flat += [mat[i, j].real, mat[i, j].imag]
            writer.writerow([edge, param] + flat)
