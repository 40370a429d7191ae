import math

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given, settings

from numeric.fields import ScalarField, field_for_ell, realify_complex, standard_structures, torsor_orders
from numeric.spectral import admissible_cutoffs, eig_selfadjoint, flow_map, spectral_interval
from numeric.subspaces import Subspace, direct_sum, subspace_meet
from numeric.tolerances import get_tolerances
from utils.errors import DimensionMismatchError, InadmissibleCutoffError, NonSymmetricError, UsageError


def test_field_table():
    assert "".join(field_for_ell(ell).value for ell in range(8)) == "RRCHHHCR"
    assert field_for_ell(9) is ScalarField.R


def test_torsor_group_pairs():
    # 0 = Z, 2 = Z_2, 1 = trivial
    assert torsor_orders(0) == (0, 2)
    assert torsor_orders(1) == (2, 2)
    assert torsor_orders(3) == (1, 0)
    assert torsor_orders(7) == (1, 0)


def test_standard_structures_square_to_minus_one():
    I, J = standard_structures(ScalarField.H, 8)
    eye = np.eye(8)
    assert np.allclose(I @ I, -eye)
    assert np.allclose(J @ J, -eye)
    assert np.allclose(I @ J, -J @ I)
    with pytest.raises(DimensionMismatchError):
        standard_structures(ScalarField.C, 3)


def test_realify_complex_multiplication():
    Z = np.array([[1 + 2j, 0.5j], [-1.0, 3 - 1j]])
    W = np.array([[2j, 1.0], [1 - 1j, 0.25]])
    assert np.allclose(realify_complex(Z) @ realify_complex(W), realify_complex(Z @ W))


def test_eig_swap_matrix(cfg):
    model = eig_selfadjoint(np.array([[0.0, 1.0], [1.0, 0.0]]), cfg)
    assert np.allclose(model.eigenvalues, [-1.0, 1.0])
    s = 1 / math.sqrt(2)
    assert np.allclose(model.clusters[0].basis[:, 0], [s, -s])
    assert np.allclose(model.clusters[1].basis[:, 0], [s, s])


def test_eig_clusters_degenerate_eigenvalues(cfg):
    model = eig_selfadjoint(np.diag([2.0, -1.0, 2.0]), cfg)
    assert [c.multiplicity for c in model.clusters] == [1, 2]
    assert model.count_in(1.0, 3.0) == 2


def test_eig_rejects_non_symmetric(cfg):
    with pytest.raises(NonSymmetricError):
        eig_selfadjoint(np.array([[0.0, 1.0], [0.0, 0.0]]), cfg)


def test_spectral_interval_checks_endpoints(cfg):
    model = eig_selfadjoint(np.diag([1.0, -1.0]), cfg)
    assert spectral_interval(model, -np.inf, 0.0, cfg).equals(Subspace.coordinate(2, [1]))
    with pytest.raises(InadmissibleCutoffError):
        spectral_interval(model, -np.inf, 1.0, cfg)


def test_flow_map_values_and_semigroup(cfg):
    model = eig_selfadjoint(np.diag([1.0, -1.0]), cfg)
    assert np.allclose(flow_map(model, math.log(2)), np.diag([0.5, 2.0]))
    assert np.allclose(flow_map(model, 0.0), np.eye(2))
    A = np.array([[1.0, 0.3, 0.0], [0.3, -0.5, 0.2], [0.0, 0.2, 2.0]])
    m = eig_selfadjoint(A, cfg)
    assert np.allclose(flow_map(m, 0.3) @ flow_map(m, 0.4), flow_map(m, 0.7))


def test_admissible_cutoffs_midpoints(cfg):
    assert admissible_cutoffs(np.array([1.0, 2.0]), cfg) == [0.5, 1.5, 3.0]
    assert admissible_cutoffs(np.array([]), cfg) == [1.0]


def test_tolerance_profiles():
    strict = get_tolerances("strict")
    assert strict.eig_tol == 1e-12 and strict.path_step == 5e-3
    with pytest.raises(UsageError):
        get_tolerances("loose")


def test_meet_of_coordinate_planes(cfg):
    S1 = Subspace.coordinate(3, [0, 1])
    S2 = Subspace.coordinate(3, [1, 2])
    assert subspace_meet(S1, S2, cfg).equals(Subspace.coordinate(3, [1]))


def test_perp_and_direct_sum():
    S = Subspace.span(np.array([[1.0], [1.0], [0.0]]))
    assert S.perp().dim == 2
    assert S.join(S.perp()).equals(Subspace.full(3))
    total = direct_sum(S, Subspace.full(1))
    assert total.ambient_dim == 4 and total.dim == 2


def test_canonical_basis_is_deterministic(rng):
    S = Subspace.span(rng.standard_normal((4, 2)))
    rotated = Subspace(S.basis @ np.array([[0.0, -1.0], [1.0, 0.0]]))
    assert np.allclose(S.canonical_basis(), rotated.canonical_basis())


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_dimension_formula(data):
    n = data.draw(st.integers(min_value=1, max_value=6))
    idx1 = data.draw(st.sets(st.integers(min_value=0, max_value=n - 1)))
    idx2 = data.draw(st.sets(st.integers(min_value=0, max_value=n - 1)))
    seed = data.draw(st.integers(min_value=0, max_value=2 ** 16))
    Q, _ = np.linalg.qr(np.random.default_rng(seed).standard_normal((n, n)))
    S1 = Subspace.coordinate(n, sorted(idx1)).apply(Q)
    S2 = Subspace.coordinate(n, sorted(idx2)).apply(Q)
    assert S1.meet(S2).dim + S1.join(S2).dim == S1.dim + S2.dim
    assert S1.meet(S2).dim == len(idx1 & idx2)
