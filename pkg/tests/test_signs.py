import hypothesis.strategies as st
import numpy as np
import pytest
import sympy
from hypothesis import given, settings

from numeric.fields import complex_structure
from numeric.subspaces import Subspace
from signs.graded_lines import (GradedLineElement, braid, braid_sign, det_of_iso, dual_tensor_iso, dual_volume,
                                eval_pairing, omega_of_J, wedge_concat)
from signs.torsors import (CyclicGroup, TorsorElement, TorsorGroups, TorsorMorphism, identity_morphism,
                           torsor_dual, torsor_evaluate, torsor_pair, torsor_symmetry, torsor_tensor,
                           unit_torsor)
from utils.errors import DegeneratePairingError, DimensionMismatchError, GradingMismatchError, UsageError


def _line(*columns):
    return GradedLineElement(np.column_stack(columns).astype(float))


E = np.eye(3)


def test_braid_sign_table():
    assert braid_sign(1, 1) == -1
    assert braid_sign(2, 1) == 1
    assert braid_sign(3, 5) == -1


def test_braid_of_odd_lines_flips_sign():
    a, b = _line(E[:, 0]), _line(E[:, 1])
    first, second = braid(a, b)
    assert first.coefficient == -b.coefficient
    assert second is a
    # e2 ^ e1 = -(e1 ^ e2), so the signed swap wedges back to the same element
    assert wedge_concat(first, second).equals(wedge_concat(a, b))


def test_wedge_rejects_dependent_factors():
    with pytest.raises(DimensionMismatchError):
        wedge_concat(_line(E[:, 0]), _line(2 * E[:, 0]))


def test_dual_volume_pairs_to_one():
    omega = GradedLineElement(np.array([[1.0, 2.0], [0.0, 1.0], [1.0, 0.0]]), 3.0)
    assert abs(eval_pairing(omega, dual_volume(omega)) - 1.0) < 1e-12


def test_dual_volume_exact():
    omega = GradedLineElement(sympy.Matrix([[1, 2], [0, 1], [1, 0]]), sympy.Integer(3))
    assert eval_pairing(omega, dual_volume(omega)) == 1


def test_pairing_rejects_mismatched_lengths():
    omega = _line(E[:, 0], E[:, 1])
    with pytest.raises(DegeneratePairingError):
        eval_pairing(omega, dual_volume(_line(E[:, 0])))
    with pytest.raises(UsageError):
        eval_pairing(omega, omega)


def test_dual_tensor_pairs_with_reversed_product():
    a, b = _line(E[:, 0]), _line(E[:, 1])
    dual = dual_tensor_iso(dual_volume(a), dual_volume(b))
    assert abs(eval_pairing(wedge_concat(b, a), dual) - 1.0) < 1e-12
    assert abs(eval_pairing(wedge_concat(a, b), dual) + 1.0) < 1e-12


def test_det_of_iso_pairs_image_with_dual():
    f = np.array([[2.0, 1.0], [0.0, 3.0]])
    tensor = det_of_iso(f, np.eye(2))
    image = GradedLineElement(f @ np.eye(2))
    assert abs(eval_pairing(image, tensor.dual) - 1.0) < 1e-12
    with pytest.raises(DegeneratePairingError):
        det_of_iso(np.zeros((2, 2)), np.eye(2))


def test_omega_of_J_complex_line():
    omega = omega_of_J(complex_structure(1).astype(float), Subspace.full(2))
    assert omega.equals(_line(np.array([1.0, 0.0]), np.array([0.0, 1.0])))


def test_omega_of_J_frame_is_unitary():
    omega = omega_of_J(complex_structure(2).astype(float), Subspace.full(4))
    assert np.allclose(omega.word.T @ omega.word, np.eye(4))
    assert omega.orientation_sign(GradedLineElement(np.eye(4))) == 1
    with pytest.raises(UsageError):
        omega_of_J(np.eye(3), Subspace.full(3))


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=5).flatmap(
    lambda n: st.tuples(st.just(n), st.permutations(list(range(n))), st.integers(0, 2 ** 16))))
def test_permuting_a_word_multiplies_by_the_permutation_sign(case):
    n, perm, seed = case
    V = np.random.default_rng(seed).standard_normal((n, n)) + 3 * np.eye(n)
    original = GradedLineElement(V)
    permuted = GradedLineElement(V[:, list(perm)])
    sign = round(np.linalg.det(np.eye(n)[:, list(perm)]))
    assert abs(float(permuted.ratio_to(original)) - sign) < 1e-8


def test_cyclic_group_orders():
    assert CyclicGroup(2).reduce(3) == 1
    assert CyclicGroup(0).reduce(-3) == -3
    assert CyclicGroup(1).reduce(5) == 0
    with pytest.raises(UsageError):
        CyclicGroup(3)


def test_group_pairs_by_ell():
    assert torsor_pair(0) == ("Z", "Z2")
    assert torsor_pair(1) == ("Z2", "Z2")
    assert torsor_pair(7) == ("0", "Z")
    assert TorsorGroups.for_ell(3).label() == "0//Z"


def test_tensor_dual_evaluation():
    groups = TorsorGroups.for_ell(0)
    x = TorsorElement(3, 1, "P", groups)
    assert torsor_dual(x).base_label == "P*"
    assert torsor_dual(torsor_dual(x)) == x
    assert torsor_evaluate(x, torsor_dual(x)) == unit_torsor(groups)
    assert torsor_tensor(x, unit_torsor(groups)) == x
    with pytest.raises(GradingMismatchError):
        torsor_evaluate(x, x)


def test_symmetry_sign_conventions():
    groups = TorsorGroups.for_ell(1)
    x = TorsorElement(1, 0, "P", groups)
    y = TorsorElement(0, 0, "Q", groups)
    plain = torsor_tensor(y, x)
    assert torsor_symmetry(x, y, "sum") == plain.translate(1)
    assert torsor_symmetry(x, y, "product") == plain
    with pytest.raises(UsageError):
        torsor_symmetry(x, y, "max")


def test_symmetry_is_trivial_without_z2_structure():
    groups = TorsorGroups.for_ell(7)
    x = TorsorElement(0, 4, "P", groups)
    assert torsor_symmetry(x, x) == torsor_tensor(x, x)


def test_morphisms_compose_and_invert():
    groups = TorsorGroups.for_ell(7)
    a = TorsorElement(0, 0, "A", groups)
    b = TorsorElement(0, 2, "B", groups)
    f = TorsorMorphism(a, b, 3)
    assert f.apply(a.translate(1)).difference(b) == 4
    assert f.inverse().compose(f).equals(identity_morphism(a))
    with pytest.raises(GradingMismatchError):
        TorsorMorphism(TorsorElement(1, 0, "A", TorsorGroups.for_ell(0)),
                       TorsorElement(0, 0, "B", TorsorGroups.for_ell(0)))
