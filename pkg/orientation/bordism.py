"""Cylinder bordisms between boundary models and the torsor maps they induce.

A bordism Y: X0 -> X1 is a cylinder whose far end carries the source model
D0 and whose near end carries the target D1. Its map O(D0) -> O(D1) sends x
to the unique y with tau[D_Y](x^dual (x) y) = 0, where the frame of Y reads
the boundary as (-D0^*) + D1.
"""

import hashlib
import logging
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Tuple

import numpy as np

from aps.boundary import BoundaryCondition
from aps.solver import CylinderProblem
from aps.transmission import closed_index, mapping_torus
from numeric.subspaces import Subspace
from numeric.tolerances import DEFAULT_TOLERANCES, ToleranceConfig
from operators.adapted import AdaptedOperator, combine, index_ell, twist
from operators.cylinders import make_cylinder
from orientation.lagrangians import OrientationPoint, positive_cutoff
from orientation.tau import BoundaryFrame, cylinder_frame, tau
from signs.graded_lines import LineTensor
from signs.torsors import TorsorElement, TorsorGroups, TorsorMorphism, translation_morphism
from spectral.det_lines import (DetElement, det_adjoint_pairing, det_negative_iso, det_ratio, det_reference,
                                det_sum_iso)
from spectral.pfaffian_lines import pf_dual_pairing, pf_ratio, pf_reference, pf_sum
from spectral.spectral_torsor import SpElement, sp_chart, sp_make, sp_negative_dual, sp_sum
from utils.errors import DimensionMismatchError, GradingMismatchError, UsageError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BordismScenario:
    """Piecewise constant collar data, near end (target) first."""
    segments: Tuple[Tuple[AdaptedOperator, float], ...]
    label: str = ""

    def __post_init__(self):
        if not self.segments:
            raise UsageError("A bordism needs at least one segment")
        first = self.segments[0][0]
        for D, length in self.segments:
            if D.ell != first.ell or D.entries.shape != first.entries.shape:
                raise DimensionMismatchError("Bordism segments must share l and shape")
            if length <= 0:
                raise UsageError(f"Segment length must be positive, got {length}")

    @property
    def ell(self) -> int:
        return self.target.ell

    @property
    def source(self) -> AdaptedOperator:
        return self.segments[-1][0]

    @property
    def target(self) -> AdaptedOperator:
        return self.segments[0][0]

    @property
    def length(self) -> float:
        return float(sum(L for _, L in self.segments))

    def problem(self) -> CylinderProblem:
        near = make_cylinder(self.target)
        pieces = []
        for D, L in self.segments:
            cyl = make_cylinder(D)
            if not np.allclose(cyl.sigma, near.sigma, atol=1e-12):
                raise UsageError("Segments must share the symbol sigma")
            pieces.append((cyl.A, float(L)))
        full = BoundaryCondition(Subspace.full(2 * near.dim))
        return CylinderProblem(near, self.length, segments=tuple(pieces) if len(pieces) > 1 else (),
                               boundary=full)

    def frame(self, far_first: bool = True) -> BoundaryFrame:
        return cylinder_frame(self.problem(), self.target, self.source, far_first)

    def closed_problem(self) -> CylinderProblem:
        """Ends glued by the identity; needs source == target."""
        if not same_operator(self.source, self.target):
            raise UsageError("Only loops close up into a mapping torus")
        p = self.problem()
        glued = mapping_torus(p.cyl, p.length, np.eye(p.dim))
        return CylinderProblem(glued.cyl, glued.length, monodromy=glued.monodromy, segments=p.segments)

    def compose(self, other: "BordismScenario") -> "BordismScenario":
        """self after other."""
        if not same_operator(other.target, self.source):
            raise UsageError("Bordisms are not composable")
        return BordismScenario(self.segments + other.segments, f"{self.label}∘{other.label}")

    def direct_sum(self, other: "BordismScenario") -> "BordismScenario":
        if len(self.segments) != len(other.segments):
            raise UsageError("Direct sums need matching segments")
        segments = []
        for (D1, L1), (D2, L2) in zip(self.segments, other.segments):
            if abs(L1 - L2) > 1e-12:
                raise UsageError("Direct sums need matching segment lengths")
            segments.append((combine("direct_sum", D1, D2), L1))
        return BordismScenario(tuple(segments), f"{self.label}⊕{other.label}")

    def twisted(self, rank: int) -> "BordismScenario":
        return BordismScenario(tuple((twist(D, rank), L) for D, L in self.segments), f"{self.label}^{rank}")

    def reversed(self) -> "BordismScenario":
        """The same collar read from the other end: target -> source."""
        return BordismScenario(tuple(reversed(self.segments)), f"rev({self.label})")

    def dual(self) -> "BordismScenario":
        """Y^dual: (X1, -D1^*) -> (X0, -D0^*), the reflected cylinder."""
        return BordismScenario(tuple((D.negative_adjoint(), L) for D, L in reversed(self.segments)),
                               f"{self.label}^dual")

    def conjugated(self, Q_in: np.ndarray, Q_out: np.ndarray) -> "BordismScenario":
        """Every segment D -> Q_out D Q_in^T."""
        return BordismScenario(tuple((D.with_entries(Q_out @ D.entries @ Q_in.T), L) for D, L in self.segments),
                               f"{self.label}^Q")

    @classmethod
    def identity(cls, D: AdaptedOperator, length: float = 1.0) -> "BordismScenario":
        return cls(((D, float(length)),), "id")

    @classmethod
    def path(cls, D0: AdaptedOperator, D1: AdaptedOperator, length: float = 1.0, steps: int = 4,
             label: str = "path") -> "BordismScenario":
        """Straight line from D0 (far) to D1 (near) in equal pieces."""
        piece = float(length) / steps
        segments = []
        for k in range(steps):
            s = k / (steps - 1) if steps > 1 else 1.0
            segments.append((D1.with_entries((1 - s) * D1.entries + s * D0.entries), piece))
        return cls(tuple(segments), label)

    def to_dict(self) -> Dict:
        return {"label": self.label, "ell": self.ell, "length": self.length, "segments": len(self.segments),
                "source": operator_label(self.source), "target": operator_label(self.target)}


def same_operator(D1: AdaptedOperator, D2: AdaptedOperator) -> bool:
    return D1.entries.shape == D2.entries.shape and bool(np.allclose(D1.entries, D2.entries, atol=1e-12))


def operator_label(D: AdaptedOperator) -> str:
    digest = hashlib.sha256(np.round(D.entries, 9).tobytes() + str(D.entries.shape).encode()).hexdigest()
    return f"O_{D.ell}({digest[:10]})"


def reference_chart(D: AdaptedOperator, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> float:
    """Smallest positive chart avoiding +-spectrum of the cylinder model."""
    return positive_cutoff(make_cylinder(D).A, cfg)


def reference_point(D: AdaptedOperator, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> OrientationPoint:
    ell = D.ell
    if ell not in (0, 1, 3, 7):
        return OrientationPoint(ell)
    c = reference_chart(D, cfg)
    if ell == 0:
        return OrientationPoint(ell, det_reference(D.entries, c, cfg))
    if ell == 1:
        return OrientationPoint(ell, pf_reference(D.entries, c, cfg))
    return OrientationPoint(ell, sp_make(D.entries, 0, c, cfg, D.field))


def point_offset(x: OrientationPoint, D: AdaptedOperator, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> int:
    """Offset of x from the reference point of D, in Gamma_{l+1}."""
    if x.is_trivial:
        return 0
    reference = reference_point(D, cfg).payload
    if x.ell == 0:
        return 0 if det_ratio(x.payload, reference, cfg) > 0 else 1
    if x.ell == 1:
        return 0 if pf_ratio(x.payload, reference, cfg) > 0 else 1
    return sp_chart(x.payload, reference.delta, cfg).m


def translate_point(x: OrientationPoint, h: int) -> OrientationPoint:
    if x.is_trivial or h == 0:
        return x
    if isinstance(x.payload, SpElement):
        y = x.payload
        return OrientationPoint(x.ell, SpElement(y.model, y.m + h, y.delta, y.modulus))
    return OrientationPoint(x.ell, x.payload.scaled(-1.0 if h % 2 else 1.0))


def dual_point(x: OrientationPoint, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> OrientationPoint:
    """The point of O(-D^*) pairing with x to the unit."""
    if x.is_trivial:
        return x
    if x.ell == 0:
        z0 = det_reference(-x.payload.operator.T, x.payload.delta, cfg)
        p = det_adjoint_pairing(det_negative_iso(z0, cfg), x.payload, cfg)
        return OrientationPoint(0, z0.scaled(1.0 / p))
    if x.ell == 1:
        z0 = pf_reference(-x.payload.operator, x.payload.delta, cfg)
        return OrientationPoint(1, z0.scaled(1.0 / pf_dual_pairing(z0, x.payload, cfg)))
    if x.ell in (3, 7):
        y = x.payload
        return OrientationPoint(x.ell, sp_make(-y.operator, -y.m, -y.delta, cfg, y.field, y.modulus))
    raise UsageError(f"No orientation duality implemented for l={x.ell}")


def pairing(x: OrientationPoint, z: OrientationPoint, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> int:
    """<x, z> in Gamma_{l+1} for x over D and z over -D^*."""
    if x.is_trivial:
        return 0
    if x.ell == 0:
        return 0 if det_adjoint_pairing(det_negative_iso(z.payload, cfg), x.payload, cfg) > 0 else 1
    if x.ell == 1:
        return 0 if pf_dual_pairing(z.payload, x.payload, cfg) > 0 else 1
    if x.ell in (3, 7):
        return sp_negative_dual(z.payload, x.payload, cfg)
    raise UsageError(f"No orientation pairing implemented for l={x.ell}")


def sum_point(x: OrientationPoint, y: OrientationPoint, cfg: ToleranceConfig = DEFAULT_TOLERANCES
              ) -> OrientationPoint:
    """O(D) (x) O(D~) -> O(D + D~)."""
    if x.ell != y.ell:
        raise UsageError("Orientation points over different l")
    if x.is_trivial:
        return x
    if x.ell == 0:
        return OrientationPoint(0, det_sum_iso(x.payload, y.payload, cfg=cfg))
    if x.ell == 1:
        return OrientationPoint(1, pf_sum(x.payload, y.payload, cfg))
    return OrientationPoint(x.ell, sp_sum(x.payload, y.payload, cfg))


def _check_grading(scenario: BordismScenario, cfg: ToleranceConfig) -> int:
    g0 = index_ell(scenario.source, cfg)
    g1 = index_ell(scenario.target, cfg)
    if g0 != g1:
        raise GradingMismatchError(f"Boundary models have index {g0} and {g1}",
                                   {"source_grading": g0, "target_grading": g1})
    return g0


def bordism_apply(scenario: BordismScenario, x: OrientationPoint, cfg: ToleranceConfig = DEFAULT_TOLERANCES,
                  mutate: Optional[bool] = None) -> OrientationPoint:
    """Image of x in O(target) under the map induced by the bordism."""
    ell = scenario.ell
    _check_grading(scenario, cfg)
    y0 = reference_point(scenario.target, cfg)
    if x.is_trivial:
        return y0
    if not np.allclose(x.payload.operator, scenario.source.entries, atol=1e-12):
        raise DimensionMismatchError("Point does not lie over the bordism's source")
    s = sum_point(dual_point(x, cfg), y0, cfg)
    t = tau(scenario.frame(far_first=True), s, cfg, mutate=mutate)
    logger.debug(f"bordism {scenario.label}: tau at reference = {t}")
    return translate_point(y0, -t if ell in (3, 7) else t)


def bordism_iso(scenario: BordismScenario, cfg: ToleranceConfig = DEFAULT_TOLERANCES,
                mutate: Optional[bool] = None) -> TorsorMorphism:
    """The bordism map written against the reference points of both ends."""
    ell = scenario.ell
    groups = TorsorGroups.for_ell(ell)
    grading = _check_grading(scenario, cfg)
    source = TorsorElement(grading, 0, operator_label(scenario.source), groups)
    target = TorsorElement(grading, 0, operator_label(scenario.target), groups)
    if groups.structure.order == 1:
        return TorsorMorphism(source, target, 0)
    image = bordism_apply(scenario, reference_point(scenario.source, cfg), cfg, mutate)
    shift = point_offset(image, scenario.target, cfg)
    logger.info(f"bordism {scenario.label} (l={ell}): shift {shift}")
    return TorsorMorphism(source, target, shift)


def closed_morphism(problem: CylinderProblem, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> TorsorMorphism:
    """X empty: translation of the unit torsor by ind_{l+1}(D_Y)."""
    if problem.monodromy is None:
        raise UsageError("A closed bordism needs a monodromy")
    value = closed_index(problem.cyl, problem.length, problem.monodromy, cfg, problem.segments).value
    return translation_morphism(TorsorGroups.for_ell(problem.cyl.ell), value)


def chain(scenarios: List[BordismScenario]) -> BordismScenario:
    """Compose left to right: the last one acts first."""
    result = scenarios[0]
    for nxt in scenarios[1:]:
        result = result.compose(nxt)
    return result


def conjugate_point(x: OrientationPoint, Q_in: np.ndarray, Q_out: np.ndarray,
                    cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> OrientationPoint:
    """Push x over D to the conjugated model Q_out D Q_in^T."""
    if x.is_trivial:
        return x
    y = x.payload
    operator = Q_out @ y.operator @ Q_in.T
    if isinstance(y, DetElement):
        element = LineTensor(replace(y.plus, word=Q_in @ y.plus.word), replace(y.dual, word=Q_out @ y.dual.word))
        return OrientationPoint(x.ell, DetElement(operator, y.delta, element))
    if isinstance(y, SpElement):
        return OrientationPoint(x.ell, sp_make(operator, y.m, y.delta, cfg, y.field, y.modulus))
    raise UsageError(f"No conjugation of orientation points for l={x.ell}")
