"""The five explicitly solvable point-interaction scattering systems.

Each model contributes a closed-form scattering function s(lambda), the two
threshold limits s(0) and s(+inf), and a threshold function of the dilation
variable; its boundary quadruple is always

    Gamma_1(y) = 1 + thr(y) (s(0) - 1),   Gamma_2 = s(.),
    Gamma_3(y) = 1 + thr(y) (s(inf) - 1), Gamma_4 = 1,

embedded diagonally for the 1D even/odd pair.  Couplings exactly 0 select
the separate exceptional display; this happens automatically because the
limits s(0), s(inf) jump there.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from levlab import boundary
from levlab.specialfn import ThresholdKind, digamma, threshold_fn
from levlab.winding import WindingReport, wind_phase


class ModelKind(enum.Enum):
    BABY_HALF_LINE = "baby"          # half-line, Robin f'(0) = alpha f(0) vs Dirichlet
    DELTA_1D = "delta"               # delta interaction on the line (even channel)
    DELTA_PRIME_1D = "delta_prime"   # delta' interaction on the line (odd channel)
    POINT_2D = "point2d"             # single point interaction in the plane
    POINT_3D = "point3d"             # single point interaction in space


@dataclass(frozen=True)
class PointModel:
    kind: ModelKind
    coupling: float   # alpha everywhere except DELTA_PRIME_1D, which holds beta

    def __post_init__(self):
        if not math.isfinite(self.coupling):
            raise ValueError("coupling must be finite")


@dataclass(frozen=True)
class LevinsonCheck:
    winding: WindingReport
    bound_states: int
    residual: float


def _phase_ratio(num: complex, den: complex) -> complex:
    return num / den


def _scalar_s(model: PointModel):
    """(s(lambda) for lambda in (0, inf), s(0), s(inf)) of the model."""
    a = model.coupling
    kind = model.kind
    if kind is ModelKind.BABY_HALF_LINE:
        if a == 0.0:
            return (lambda lam: -1.0 + 0j), -1.0 + 0j, -1.0 + 0j
        return ((lambda lam: _phase_ratio(a + 1j * math.sqrt(lam),
                                          a - 1j * math.sqrt(lam))),
                1.0 + 0j, -1.0 + 0j)
    if kind is ModelKind.DELTA_1D:
        if a == 0.0:
            return (lambda lam: 1.0 + 0j), 1.0 + 0j, 1.0 + 0j
        return ((lambda lam: _phase_ratio(2.0 * math.sqrt(lam) - 1j * a,
                                          2.0 * math.sqrt(lam) + 1j * a)),
                -1.0 + 0j, 1.0 + 0j)
    if kind is ModelKind.DELTA_PRIME_1D:
        if a == 0.0:
            return (lambda lam: 1.0 + 0j), 1.0 + 0j, 1.0 + 0j
        return ((lambda lam: _phase_ratio(2.0 + 1j * a * math.sqrt(lam),
                                          2.0 - 1j * a * math.sqrt(lam))),
                1.0 + 0j, -1.0 + 0j)
    if kind is ModelKind.POINT_2D:
        shift = 2.0 * math.pi * a - digamma(1.0) - math.log(2.0)

        def s2d(lam):
            u = shift + 0.5 * math.log(lam)
            return _phase_ratio(u + 0.5j * math.pi, u - 0.5j * math.pi)

        return s2d, 1.0 + 0j, 1.0 + 0j
    if kind is ModelKind.POINT_3D:
        if a == 0.0:
            return (lambda lam: -1.0 + 0j), -1.0 + 0j, -1.0 + 0j
        c = 4.0 * math.pi * a
        return ((lambda lam: _phase_ratio(c + 1j * math.sqrt(lam),
                                          c - 1j * math.sqrt(lam))),
                1.0 + 0j, -1.0 + 0j)
    raise ValueError(f"unknown model kind {kind!r}")


_THRESHOLD = {
    ModelKind.BABY_HALF_LINE: ThresholdKind.PLUS_TANH_MINUS_ISECH,
    ModelKind.DELTA_1D: ThresholdKind.PLUS_TANH_PLUS_ISECH,
    ModelKind.DELTA_PRIME_1D: ThresholdKind.PLUS_TANH_MINUS_ISECH,
    ModelKind.POINT_2D: ThresholdKind.HALF_ANGLE_TANH,
    ModelKind.POINT_3D: ThresholdKind.PLUS_TANH_MINUS_ISECH,
}

# Slot of the nontrivial entry in the 2x2 even/odd embedding (None = scalar).
_EMBED_SLOT = {
    ModelKind.BABY_HALF_LINE: None,
    ModelKind.DELTA_1D: 0,
    ModelKind.DELTA_PRIME_1D: 1,
    ModelKind.POINT_2D: None,
    ModelKind.POINT_3D: None,
}


def _embed(value: complex, slot) -> np.ndarray:
    if slot is None:
        return np.array([[value]], dtype=complex)
    m = np.eye(2, dtype=complex)
    m[slot, slot] = value
    return m


def smatrix(model: PointModel, lam: float) -> np.ndarray:
    """Scattering matrix at energy lambda >= 0 (endpoints analytic).

    Scalar models return 1x1; the line models return their 2x2 even/odd
    embedding diag(s, 1) resp. diag(1, s).
    """
    if lam < 0.0:
        raise ValueError("energy must be nonnegative")
    s_fn, s0, sinf = _scalar_s(model)
    if lam == 0.0:
        val = s0
    elif math.isinf(lam):
        val = sinf
    else:
        val = s_fn(lam)
    return _embed(val, _EMBED_SLOT[model.kind])


def _transition_energy(model: PointModel) -> float:
    """Energy scale where the model's s-function sweeps its phase.

    Used to scale the B2 chart so the sweep sits mid-chart; for the planar
    model that scale is exponentially displaced in the coupling and would
    otherwise hide below sampling resolution.
    """
    a = model.coupling
    kind = model.kind
    if kind is ModelKind.POINT_2D:
        return math.exp(2.0 * (digamma(1.0) + math.log(2.0) - 2.0 * math.pi * a))
    if a == 0.0:
        return 1.0
    if kind is ModelKind.BABY_HALF_LINE:
        return a * a
    if kind is ModelKind.DELTA_1D:
        return (a / 2.0) ** 2
    if kind is ModelKind.DELTA_PRIME_1D:
        return (2.0 / a) ** 2
    return (4.0 * math.pi * a) ** 2


def gamma_boundary(model: PointModel) -> boundary.QuadrantBoundary:
    """Boundary quadruple of the model's wave operator."""
    s_fn, s0, sinf = _scalar_s(model)
    thr = _THRESHOLD[model.kind]
    slot = _EMBED_SLOT[model.kind]

    def edge1(y):
        return _embed(1.0 + threshold_fn(thr, y) * (s0 - 1.0), slot)

    def edge2(lam):
        return _embed(s_fn(lam), slot)

    def edge3(y):
        return _embed(1.0 + threshold_fn(thr, y) * (sinf - 1.0), slot)

    return boundary.standard_quadruple(
        g1=(edge1, _embed(1.0, slot), _embed(s0, slot)),
        g2=(edge2, _embed(s0, slot), _embed(sinf, slot)),
        g3=(edge3, _embed(1.0, slot), _embed(sinf, slot)),
        b2_scale=_transition_energy(model),
    )


def bound_state_count(model: PointModel) -> int:
    """Number of eigenvalues of the perturbed operator, from the closed-form
    criteria: one for strictly negative coupling (the planar model always has
    exactly one), zero otherwise."""
    if model.kind is ModelKind.POINT_2D:
        return 1
    return 1 if model.coupling < 0.0 else 0


def levinson_verify(model: PointModel, tol: float = 1.0e-3,
                    n0: int = 64) -> LevinsonCheck:
    """Compare Wind(Gamma) with the bound-state count."""
    report = wind_phase(gamma_boundary(model), n0=n0)
    count = bound_state_count(model)
    return LevinsonCheck(winding=report, bound_states=count,
                         residual=abs(report.total - count))


# Reference per-segment contributions (w1, w2, w3, w4) of the half-line and
# 3D models by sign of the coupling.
SEGMENT_TABLE = {
    "negative": (0.0, 0.5, 0.5, 0.0),
    "zero": (-0.5, 0.0, 0.5, 0.0),
    "positive": (0.0, -0.5, 0.5, 0.0),
}


def segment_table_row(coupling: float):
    if coupling < 0.0:
        return SEGMENT_TABLE["negative"]
    if coupling == 0.0:
        return SEGMENT_TABLE["zero"]
    return SEGMENT_TABLE["positive"]
