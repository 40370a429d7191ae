"""Signs suite: graded line conventions (exact) and the graded torsor groupoid axioms."""

import logging
from itertools import product
from typing import Any, Dict, List, Tuple

import numpy as np
import sympy

from data.scenarios import trial_rng
from numeric.subspaces import Subspace
from numeric.tolerances import ToleranceConfig
from signs.graded_lines import (GradedLineElement, braid, braid_sign, det_of_iso, dual_basis, dual_tensor_iso,
                                dual_volume, eval_pairing, omega_of_J, wedge_concat)
from signs.torsors import (TorsorElement, TorsorGroups, TorsorMorphism, identity_morphism, symmetry_translates,
                           torsor_dual, torsor_evaluate, torsor_symmetry, torsor_tensor, unit_torsor)
from utils.errors import GradingMismatchError
from utils.formatters import format_check
from verifiers.base_verifier import BaseVerifier

logger = logging.getLogger(__name__)

MAX_AMBIENT_DIM = 4
EXPONENTS = ("sum", "product")
_ROTATION = np.array([[0.0, -1.0], [1.0, 0.0]])


def integer_invertible(n: int, rng: np.random.Generator) -> sympy.Matrix:
    """Random integer matrix with nonzero determinant."""
    while True:
        M = sympy.Matrix(rng.integers(-2, 3, size=(n, n)).tolist())
        if n == 0 or M.det() != 0:
            return M


def block_word(ambient: int, start: int, length: int, rng: np.random.Generator) -> sympy.Matrix:
    """Integer word spanning the coordinates start..start+length-1."""
    word = sympy.zeros(ambient, length)
    if length:
        word[start:start + length, :] = integer_invertible(length, rng)
    return word


def _line(word: sympy.Matrix) -> GradedLineElement:
    return GradedLineElement(word, sympy.Integer(1))


def graded_line_checks(rng: np.random.Generator) -> List[Dict[str, Any]]:
    """All splits of ambient dims up to MAX_AMBIENT_DIM."""
    checks = []
    for d in range(1, MAX_AMBIENT_DIM + 1):
        for k1, k2 in product(range(d + 1), repeat=2):
            if k1 + k2 > d:
                continue
            a = _line(block_word(d, 0, k1, rng))
            b = _line(block_word(d, k1, k2, rng))
            tag = f"d{d}.k{k1}_{k2}"
            ab = wedge_concat(a, b)
            checks.append(format_check(f"concat_parity.{tag}", ab.parity == a.parity * b.parity))
            b_first, a_second = braid(a, b)
            checks.append(format_check(f"braid_sign.{tag}", b_first.coefficient == braid_sign(k1, k2)
                                       and a_second is a, sign=int(b_first.coefficient)))
            back, _ = braid(a_second, b_first)
            checks.append(format_check(f"braid_involution.{tag}", back.coefficient == a.coefficient))
            pairing = eval_pairing(wedge_concat(b, a), dual_tensor_iso(dual_volume(a), dual_volume(b)))
            checks.append(format_check(f"dual_tensor.{tag}", pairing == 1, value=str(pairing)))
            if k1 + k2 < d:
                c = _line(block_word(d, k1 + k2, 1, rng))
                left = wedge_concat(wedge_concat(a, b), c)
                right = wedge_concat(a, wedge_concat(b, c))
                checks.append(format_check(f"concat_associative.{tag}", left.equals(right)))
        for k in range(1, d + 1):
            omega = _line(integer_invertible(d, rng)[:, :k])
            checks.append(format_check(f"volume_pairing.d{d}.k{k}", eval_pairing(omega, dual_volume(omega)) == 1))
            naive = GradedLineElement(dual_basis(omega.word), sympy.Integer(1), True)
            expected = (-1) ** (k * (k - 1) // 2)
            value = eval_pairing(omega, naive)
            checks.append(format_check(f"naive_order.d{d}.k{k}", value == expected, value=str(value),
                                       expected=expected))
        f = integer_invertible(d, rng)
        other_basis = integer_invertible(d, rng)
        checks.append(format_check(f"det_of_iso_basis_free.d{d}",
                                   det_of_iso(f, sympy.eye(d)).equals(det_of_iso(f, other_basis))))
    checks.extend(complex_volume_checks(rng))
    return checks


def complex_volume_checks(rng: np.random.Generator) -> List[Dict[str, Any]]:
    """omega(J) on R^2 and R^4: reference values, sign under -J, orientation of other bases."""
    checks = []
    plane = Subspace.full(2)
    omega = omega_of_J(_ROTATION, plane)
    checks.append(format_check("omega_J.plane", omega.equals(GradedLineElement(np.eye(2)))))
    checks.append(format_check("omega_J.negated", omega_of_J(-_ROTATION, plane).equals(omega.negated())))
    J = np.kron(np.eye(2), _ROTATION)
    omega4 = omega_of_J(J, Subspace.full(4))
    v = rng.standard_normal((4, 2))
    word = np.column_stack([v[:, 0], v[:, 1], J @ v[:, 1], J @ v[:, 0]])
    if abs(np.linalg.det(word)) > 1e-6:
        other = GradedLineElement(word)
        checks.append(format_check("omega_J.orientation", other.orientation_sign(omega4) == 1))
    return checks


def _point(groups: TorsorGroups, rng: np.random.Generator, label: str) -> TorsorElement:
    return TorsorElement(int(rng.integers(-3, 4)), int(rng.integers(-3, 4)), label, groups)


def torsor_checks(ell: int, rng: np.random.Generator) -> List[Dict[str, Any]]:
    groups = TorsorGroups.for_ell(ell)
    unit = unit_torsor(groups)
    x, y, z = _point(groups, rng, "a"), _point(groups, rng, "b"), _point(groups, rng, "c")
    checks = [
        format_check("unit_left", torsor_tensor(unit, x) == x),
        format_check("unit_right", torsor_tensor(x, unit) == x),
        format_check("dual_pairing", torsor_evaluate(x, torsor_dual(x)) == unit),
        format_check("double_dual", torsor_dual(torsor_dual(x)) == x),
        format_check("tensor_associative",
                     torsor_tensor(torsor_tensor(x, y), z).offset == torsor_tensor(x, torsor_tensor(y, z)).offset)
    ]
    for exponent in EXPONENTS:
        swapped = torsor_symmetry(x, y, exponent)
        shift = int(symmetry_translates(x, y, exponent)) + int(symmetry_translates(y, x, exponent))
        back = torsor_tensor(x, y).translate(shift)
        checks.append(format_check(f"symmetry_involution.{exponent}", back == torsor_tensor(x, y),
                                   shift=shift, swapped=swapped.offset))
    h = int(rng.integers(-3, 4))
    phi = TorsorMorphism(x, x.translate(h))
    checks.append(format_check("morphism_inverse", phi.compose(phi.inverse()).equals(identity_morphism(x))))
    if groups.grading.order != 1:
        try:
            TorsorMorphism(x, TorsorElement(x.grading + 1, 0, x.base_label, groups))
            mismatch = False
        except GradingMismatchError:
            mismatch = True
        checks.append(format_check("morphism_needs_equal_grading", mismatch))
    for c in checks:
        c["details"]["ell"] = ell
    return checks


class SignsVerifier(BaseVerifier):
    """Exact graded line identities once, torsor axioms per trial and l."""

    def __init__(self):
        super().__init__("signs")

    def run_checks(self, seed: int, trials: int, cfg: ToleranceConfig,
                   options: Dict[str, Any]) -> Tuple[List[Dict[str, Any]], Dict[str, Any]]:
        checks = graded_line_checks(trial_rng(seed, self.suite_index, 0))
        for ell in self.ells(options.get("ells")):
            for k in range(trials):
                rng = trial_rng(seed, self.suite_index * 8 + ell, k + 1)
                checks.extend(torsor_checks(ell, rng))
        groups = {str(ell): TorsorGroups.for_ell(ell).label() for ell in range(8)}
        return checks, {"group_pairs": groups, "torsor_ells": self.ells(options.get("ells"))}


# Global signs verifier instance
signs_verifier = SignsVerifier()
