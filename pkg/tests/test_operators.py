import numpy as np
import pytest

from data.scenarios import random_potential
from numeric.fields import ScalarField
from operators.adapted import (AdaptedOperator, check_adapted, combine, index_ell, kernel_dims, potential_sweep,
                               random_adapted, require_adapted, twist)
from operators.cylinders import check_cylinder_adapted, cylinder_sum, make_cylinder, reflect_iso
from utils.errors import AdaptednessError, DimensionMismatchError, UsageError


@pytest.mark.parametrize("ell", range(8))
def test_random_models_are_adapted(ell, rng):
    D = random_adapted(ell, 2, 3, rng)
    report = check_adapted(D)
    assert report.passed, report.failures()
    assert D.field.real_dim * 2 == D.entries.shape[1]


@pytest.mark.parametrize("ell", range(8))
def test_cylinders_are_next_adapted(ell, rng):
    D = random_adapted(ell, 2, 1, rng)
    cyl = make_cylinder(D)
    assert check_cylinder_adapted(cyl).passed
    assert cyl.field is ScalarField(("R", "R", "C", "H", "H", "H", "C", "R")[(ell + 1) % 8])


@pytest.mark.parametrize("ell", range(8))
def test_reflection_gauge_exists(ell, rng):
    gauge = reflect_iso(random_adapted(ell, 2, 2, rng))
    assert np.allclose(gauge.Phi0 @ gauge.Phi0.T, np.eye(gauge.Phi0.shape[0]))


def test_index_by_group():
    assert index_ell(AdaptedOperator.from_entries(0, [[1.0, 0.0]])) == 1
    assert index_ell(AdaptedOperator.from_entries(0, [[1.0], [0.0]])) == -1
    assert index_ell(AdaptedOperator.from_entries(1, np.zeros((2, 2)))) == 0
    rotation = [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]
    assert index_ell(AdaptedOperator.from_entries(1, rotation)) == 1
    assert index_ell(AdaptedOperator.from_entries(7, np.zeros((3, 3)))) == 0


def test_quaternionic_index_counts_in_h(rng):
    D = random_adapted(4, 3, 1, rng)
    assert kernel_dims(D) == (8, 0)
    assert index_ell(D) == 2


def test_non_adapted_models_are_reported():
    D = AdaptedOperator.from_entries(7, [[0.0, 1.0], [0.0, 0.0]])
    report = check_adapted(D)
    assert not report.passed
    assert report.failures() == ["symmetric"]
    with pytest.raises(AdaptednessError):
        require_adapted(D)
    with pytest.raises(AdaptednessError):
        make_cylinder(D)


def test_field_must_match_ell():
    with pytest.raises(UsageError):
        AdaptedOperator.from_entries(2, np.zeros((2, 2)), ScalarField.R)


def test_twist_multiplies_index():
    D = AdaptedOperator.from_entries(0, [[1.0, 0.0]])
    assert index_ell(twist(D, 3)) == 3
    with pytest.raises(UsageError):
        twist(D, 0)
    with pytest.raises(DimensionMismatchError):
        twist(D, 2, np.zeros((3, 3)))


@pytest.mark.parametrize("ell", [0, 1, 2, 4])
def test_index_is_constant_along_potential_paths(ell, rng):
    D = random_adapted(ell, 3, 2, rng)
    for rank in (1, 2):
        indices = potential_sweep(D, random_potential(D, rank, rng), rank)
        assert indices == [index_ell(twist(D, rank))] * 9


def test_odd_skew_kernel_survives_any_potential(rng):
    D = AdaptedOperator.from_entries(1, np.zeros((3, 3)))
    assert potential_sweep(D, random_potential(D, 1, rng), samples=5) == [1] * 5
    with pytest.raises(UsageError):
        potential_sweep(D, np.zeros((3, 3)), samples=1)


def test_twist_rejects_breaking_potential():
    D = AdaptedOperator.from_entries(7, [[1.0]])
    with pytest.raises(AdaptednessError):
        twist(D, 2, np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_combine_modes(rng):
    D1 = random_adapted(3, 1, None, rng)
    D2 = random_adapted(3, 2, None, rng)
    union = combine("disjoint_union", D1, D2)
    assert union.components == (4, 8)
    assert union.entries.shape == (12, 12)
    assert check_adapted(union).passed
    assert combine("direct_sum", AdaptedOperator.empty(3), D1) is D1
    with pytest.raises(DimensionMismatchError):
        combine("direct_sum", D1, random_adapted(7, 1, None, rng))
    with pytest.raises(UsageError):
        combine("tensor", D1, D2)


def test_operator_dict_restores_structures(rng):
    D = random_adapted(5, 1, None, rng)
    restored = AdaptedOperator.from_dict(D.to_dict())
    assert np.array_equal(restored.entries, D.entries)
    assert np.array_equal(restored.matrix.struct_J, D.matrix.struct_J)
    assert restored.ell == 5


def test_cylinder_sum_blocks(rng):
    c1 = make_cylinder(random_adapted(0, 1, 2, rng))
    c2 = make_cylinder(random_adapted(0, 2, 2, rng))
    total = cylinder_sum(c1, c2)
    assert total.dim == c1.dim + c2.dim
    assert check_cylinder_adapted(total).passed
    with pytest.raises(DimensionMismatchError):
        cylinder_sum(c1, make_cylinder(random_adapted(7, 1, None, rng)))
