import hypothesis.strategies as st
import numpy as np
import pytest
import sympy
from hypothesis import given, settings

from clifford.algebra import (CliffordElement, blade_product, cl_alpha, cl_mul, cl_volume, even_iso_identities,
                              volume_identities)
from clifford.dirac_blocks import cylinder_dirac_block
from clifford.intertwiners import adjacent_iso_phi
from clifford.representations import (DELTA_DIMS, build_delta, get_delta, half_spinor_split,
                                      representation_identities)
from config import N_MAX
from utils.errors import DimensionMismatchError, UsageError


def test_blade_product_signs():
    assert blade_product((1,), (1,)) == (-1, ())
    assert blade_product((2,), (1,)) == (-1, (1, 2))
    assert blade_product((1, 2), (1, 2)) == (-1, ())


def test_generators_anticommute():
    e1 = CliffordElement.generator(3, 1)
    e2 = CliffordElement.generator(3, 2)
    assert (cl_mul(e1, e2) + cl_mul(e2, e1)).is_zero()
    assert cl_mul(e1, e1) == CliffordElement.scalar(3, -1)


def test_grade_involution_is_multiplicative():
    a = CliffordElement.generator(4, 1) + CliffordElement.blade(4, (2, 3), 3)
    b = CliffordElement.blade(4, (1, 4)) + CliffordElement.scalar(4, sympy.Rational(1, 2))
    assert cl_alpha(cl_mul(a, b)) == cl_mul(cl_alpha(a), cl_alpha(b))


@pytest.mark.parametrize("n", range(1, N_MAX + 1))
def test_volume_and_even_identities(n):
    assert all(volume_identities(n).values())
    assert all(even_iso_identities(n).values())


def test_volume_square_sign():
    for n, sign in ((1, -1), (2, -1), (3, 1), (4, 1)):
        omega = cl_volume(n)
        assert cl_mul(omega, omega) == CliffordElement.scalar(n, sign)


def test_generator_outside_algebra():
    with pytest.raises(DimensionMismatchError):
        CliffordElement.generator(2, 3)


@pytest.mark.parametrize("n", range(1, N_MAX + 1))
def test_representations_satisfy_identities(n):
    for rep in build_delta(n):
        checks = representation_identities(rep)
        assert all(checks.values()), checks
        assert rep.dim == DELTA_DIMS[n]
        assert all(g.dtype.kind == "i" for g in rep.generators)


def test_pairs_at_three_and_seven():
    assert [r.flavor for r in build_delta(3)] == ["plus", "minus"]
    assert [r.flavor for r in build_delta(7)] == ["plus", "minus"]
    assert len(build_delta(4)) == 1
    minus = get_delta(3, "minus")
    assert np.array_equal(minus.volume(), -np.eye(minus.dim, dtype=np.int64))


def test_delta_bounds():
    with pytest.raises(UsageError):
        build_delta(N_MAX + 1)
    with pytest.raises(UsageError):
        get_delta(4, "minus")


@pytest.mark.parametrize("n", [1, 2, 4, 8, 9])
def test_half_spinors_split_evenly(n):
    rep = get_delta(n)
    plus, minus = half_spinor_split(rep)
    assert plus.dim == minus.dim == rep.dim // 2
    assert plus.join(minus).dim == rep.dim


@pytest.mark.parametrize("n", range(1, N_MAX))
def test_adjacent_isomorphisms(n):
    iso = adjacent_iso_phi(n)
    assert iso.passed, iso.identities
    assert iso.scale_square >= 1
    Phi = iso.matrix
    assert np.allclose(Phi.T @ Phi, np.eye(Phi.shape[1]))
    if n % 8 in (3, 7):
        assert iso.pair is not None


@pytest.mark.parametrize("n", range(1, 9))
def test_cylinder_dirac_blocks(n):
    report = cylinder_dirac_block(n)
    assert report.sides_equal
    assert report.passed, report.template_checks
    assert report.to_dict()["row"] == report.row


def _elements(n):
    blades = st.sets(st.integers(min_value=1, max_value=n)).map(lambda s: tuple(sorted(s)))
    terms = st.lists(st.tuples(blades, st.integers(min_value=-3, max_value=3)), max_size=4)
    return terms.map(lambda ts: sum((CliffordElement.blade(n, b, c) for b, c in ts), CliffordElement.scalar(n, 0)))


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=4).flatmap(
    lambda n: st.tuples(_elements(n), _elements(n), _elements(n))))
def test_product_is_associative_and_graded(triple):
    a, b, c = triple
    assert cl_mul(cl_mul(a, b), c) == cl_mul(a, cl_mul(b, c))
    assert cl_alpha(cl_mul(a, b)) == cl_mul(cl_alpha(a), cl_alpha(b))
    assert cl_mul(a + b, c) == cl_mul(a, c) + cl_mul(b, c)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=N_MAX).flatmap(
    lambda n: st.tuples(st.just(n), st.integers(min_value=1, max_value=n), st.integers(min_value=1, max_value=n))))
def test_generators_satisfy_the_clifford_relation(args):
    n, i, j = args
    ei, ej = CliffordElement.generator(n, i), CliffordElement.generator(n, j)
    assert cl_mul(ei, ej) + cl_mul(ej, ei) == CliffordElement.scalar(n, -2 if i == j else 0)
