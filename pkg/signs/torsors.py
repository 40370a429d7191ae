"""G-graded H-torsors in based form, for the group pairs (Gamma_l, Gamma_{l+1}).

Every group is Z, Z_2 or trivial, encoded by its order (0 for Z). A torsor
element is an offset in H relative to a named base point; the unit torsor
has base label "1" and the dual of a base point b is labelled "b*".
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

from config import SYMMETRY_EXPONENT
from numeric.fields import torsor_orders
from utils.errors import GradingMismatchError, UsageError

logger = logging.getLogger(__name__)

UNIT_LABEL = "1"


@dataclass(frozen=True)
class CyclicGroup:
    """Z (order 0), Z_2 (order 2) or the trivial group (order 1)."""
    order: int

    def __post_init__(self):
        if self.order not in (0, 1, 2):
            raise UsageError(f"Unsupported group order {self.order}")

    @property
    def name(self) -> str:
        return {0: "Z", 1: "0", 2: "Z2"}[self.order]

    def reduce(self, x: int) -> int:
        return int(x) if self.order == 0 else int(x) % self.order

    def add(self, x: int, y: int) -> int:
        return self.reduce(x + y)

    def neg(self, x: int) -> int:
        return self.reduce(-x)

    def is_odd(self, x: int) -> bool:
        return self.reduce(x) % 2 == 1


@dataclass(frozen=True)
class TorsorGroups:
    grading: CyclicGroup
    structure: CyclicGroup

    @classmethod
    def for_ell(cls, ell: int) -> "TorsorGroups":
        g, h = torsor_orders(ell)
        return cls(CyclicGroup(g), CyclicGroup(h))

    def label(self) -> str:
        return f"{self.grading.name}//{self.structure.name}"


@dataclass(frozen=True)
class TorsorElement:
    """Point of the torsor with grading g, at offset p from the base point."""
    grading: int
    offset: int
    base_label: str
    groups: TorsorGroups

    def __post_init__(self):
        object.__setattr__(self, "grading", self.groups.grading.reduce(self.grading))
        object.__setattr__(self, "offset", self.groups.structure.reduce(self.offset))

    def translate(self, h: int) -> "TorsorElement":
        """Action of h in H."""
        return TorsorElement(self.grading, self.offset + h, self.base_label, self.groups)

    def same_torsor(self, other: "TorsorElement") -> bool:
        return (self.groups == other.groups and self.grading == other.grading
                and self.base_label == other.base_label)

    def difference(self, other: "TorsorElement") -> int:
        """The unique h with other.translate(h) == self."""
        if not self.same_torsor(other):
            raise GradingMismatchError("Points lie in different torsors",
                                       {"left": self.base_label, "right": other.base_label})
        return self.groups.structure.add(self.offset, -other.offset)

    def to_dict(self) -> dict:
        return {"grading": self.grading, "offset": self.offset, "base": self.base_label,
                "groups": self.groups.label()}


def unit_torsor(groups: TorsorGroups) -> TorsorElement:
    return TorsorElement(0, 0, UNIT_LABEL, groups)


def _tensor_label(a: str, b: str) -> str:
    if a == UNIT_LABEL:
        return b
    if b == UNIT_LABEL:
        return a
    return f"({a}⊗{b})"


def dual_label(label: str) -> str:
    if label == UNIT_LABEL:
        return UNIT_LABEL
    if label.endswith("*"):
        return label[:-1]
    return f"{label}*"


def _check_groups(x: TorsorElement, y: TorsorElement) -> None:
    if x.groups != y.groups:
        raise GradingMismatchError("Torsors over different group pairs",
                                   {"left": x.groups.label(), "right": y.groups.label()})


def torsor_tensor(x: TorsorElement, y: TorsorElement) -> TorsorElement:
    """(g, P) (x) (g', P') = (g + g', (P x P')/H)."""
    _check_groups(x, y)
    return TorsorElement(x.grading + y.grading, x.offset + y.offset,
                         _tensor_label(x.base_label, y.base_label), x.groups)


def torsor_dual(x: TorsorElement) -> TorsorElement:
    """(g, P)^* = (-g, P^*)."""
    return TorsorElement(-x.grading, -x.offset, dual_label(x.base_label), x.groups)


def torsor_evaluate(x: TorsorElement, phi: TorsorElement) -> TorsorElement:
    """The pairing (t, phi) -> <t, phi> into the unit torsor."""
    _check_groups(x, phi)
    if phi.base_label != dual_label(x.base_label) or phi.grading != x.groups.grading.neg(x.grading):
        raise GradingMismatchError("Pairing needs a point of the dual torsor",
                                   {"point": x.base_label, "functional": phi.base_label})
    return unit_torsor(x.groups).translate(x.offset + phi.offset)


def symmetry_translates(x: TorsorElement, y: TorsorElement, exponent: Optional[str] = None) -> bool:
    """Whether the symmetry x (x) y -> y (x) x acts by the nontrivial element of H."""
    exponent = exponent or SYMMETRY_EXPONENT
    if exponent not in ("sum", "product"):
        raise UsageError(f"Unknown symmetry exponent '{exponent}'")
    if x.groups.structure.order != 2:
        return False
    value = x.grading + y.grading if exponent == "sum" else x.grading * y.grading
    return value % 2 == 1


def torsor_symmetry(x: TorsorElement, y: TorsorElement,
                    exponent: Optional[str] = None) -> TorsorElement:
    """[p, p'] -> [(-1)^{e} p', p] with e = g + g' (or g g')."""
    _check_groups(x, y)
    swapped = torsor_tensor(y, x)
    return swapped.translate(1) if symmetry_translates(x, y, exponent) else swapped


@dataclass(frozen=True)
class TorsorMorphism:
    """Equivariant map between torsors of equal grading, given by its shift."""
    source: TorsorElement
    target: TorsorElement
    shift: int = 0

    def __post_init__(self):
        if self.source.groups != self.target.groups:
            raise GradingMismatchError("Morphism between different group pairs")
        if self.source.grading != self.target.grading:
            raise GradingMismatchError(
                f"Morphisms exist only between equal gradings: {self.source.grading} vs {self.target.grading}",
                {"source_grading": self.source.grading, "target_grading": self.target.grading})
        object.__setattr__(self, "shift", self.source.groups.structure.reduce(self.shift))

    def apply(self, x: TorsorElement) -> TorsorElement:
        """Image of a point of the source torsor."""
        h = x.difference(self.source)
        return TorsorElement(self.target.grading, self.target.offset + h + self.shift,
                             self.target.base_label, self.target.groups)

    def compose(self, other: "TorsorMorphism") -> "TorsorMorphism":
        """self after other."""
        if other.target.base_label != self.source.base_label:
            raise GradingMismatchError("Morphisms are not composable",
                                       {"first_target": other.target.base_label,
                                        "second_source": self.source.base_label})
        image = self.apply(other.apply(other.source))
        return TorsorMorphism(other.source, self.target, image.difference(self.target))

    def inverse(self) -> "TorsorMorphism":
        return TorsorMorphism(self.target, self.source, -self.shift)

    def equals(self, other: "TorsorMorphism") -> bool:
        witness = self.source
        try:
            return self.apply(witness) == other.apply(witness)
        except GradingMismatchError:
            return False

    def to_dict(self) -> dict:
        return {"source": self.source.to_dict(), "target": self.target.to_dict(), "shift": self.shift}


def identity_morphism(x: TorsorElement) -> TorsorMorphism:
    base = TorsorElement(x.grading, 0, x.base_label, x.groups)
    return TorsorMorphism(base, base, 0)


def translation_morphism(groups: TorsorGroups, h: int) -> TorsorMorphism:
    """Automorphism of the unit torsor given by h in H."""
    unit = unit_torsor(groups)
    return TorsorMorphism(unit, unit, h)


def torsor_pair(ell: int) -> Tuple[str, str]:
    groups = TorsorGroups.for_ell(ell)
    return groups.grading.name, groups.structure.name
