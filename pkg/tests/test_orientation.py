import os

import numpy as np
import pytest

from config import MAIN_SUITES
from data.scenarios import random_bordism, random_like, random_model, trial_rng
from numeric.subspaces import Subspace
from operators.adapted import AdaptedOperator
from orientation.bordism import (BordismScenario, bordism_apply, bordism_iso, chain, closed_morphism, dual_point,
                                 pairing, point_offset, reference_point, translate_point)
from orientation.lagrangians import (OrientationPoint, canonical_graph_map, canonical_quaternionic_structure,
                                     component_comparison, graph_intersection_identity, lag_orientation,
                                     lag_stabilize, lagrangian_from_subspace, quaternionic_lagrangian,
                                     random_graph_map, real_graph, w_delta)
from orientation.tau import closed_tau, cylinder_halves, shuffle, tau
from orientation.theorems import (check_bordism_index_zero, check_empty_boundary, check_functoriality,
                                  check_homotopy, check_tau_invariance, verify_main)
from spectral.pfaffian_lines import pf_chart_change, pf_ratio
from utils.errors import DimensionMismatchError, UsageError
from utils.schemas import load_scenario_file


def _op(ell, entries):
    return AdaptedOperator.from_entries(ell, entries)


def _all_passed(checks):
    return all(c.passed for c in checks), [c.to_dict() for c in checks if not c.passed]


# orientation points and frames

def test_orientation_point_payload_must_match_ell():
    assert OrientationPoint(4).is_trivial
    with pytest.raises(UsageError):
        OrientationPoint(0)
    with pytest.raises(UsageError):
        OrientationPoint(2, reference_point(_op(0, [[1.0]])).payload)


def test_shuffle_interleaves_halves():
    P = shuffle((1, 1), (1, 1))
    v = np.array([1.0, 2.0, 3.0, 4.0])
    assert np.allclose(P @ v, [1.0, 3.0, 2.0, 4.0])


def test_cylinder_halves_per_ell():
    assert cylinder_halves(_op(0, [[1.0, 0.0, 2.0], [0.0, 1.0, 0.0]])) == (3, 2)
    assert cylinder_halves(_op(1, [[0.0, -1.0], [1.0, 0.0]])) == (4, 0)
    assert cylinder_halves(_op(7, np.eye(3))) == (3, 0)


# lagrangians of W_delta

def test_graph_of_canonical_map_is_lagrangian(cfg):
    space = w_delta(_op(0, [[0.0]]), 1.0, cfg)
    assert (space.dim, space.plus.dim, space.minus.dim) == (2, 1, 1)
    f = canonical_graph_map(space)
    L = real_graph(space, f)
    assert space.is_lagrangian(L.subspace)
    recovered = lagrangian_from_subspace(space, L.subspace)
    assert np.allclose(recovered.structure, f)
    assert space.inertia == 0


def test_real_graph_rejects_maps_into_v_plus(cfg):
    space = w_delta(_op(0, [[0.0]]), 1.0, cfg)
    with pytest.raises(UsageError):
        real_graph(space, np.eye(2))


def test_non_isotropic_subspace_is_not_lagrangian(cfg):
    space = w_delta(_op(0, [[0.0]]), 1.0, cfg)
    with pytest.raises(UsageError):
        lagrangian_from_subspace(space, Subspace.span(np.array([[1.0], [0.0]])))


def test_intersection_identity_and_component_comparison(cfg):
    space = w_delta(_op(0, [[0.0]]), 1.0, cfg)
    f = canonical_graph_map(space)
    assert graph_intersection_identity(space, f, f)
    assert graph_intersection_identity(space, f, -f)
    reflection = np.diag([-1.0, 1.0])
    assert component_comparison(space, f, reflection, real_graph(space, f).subspace)


def test_graph_intersection_under_a_reflection(cfg):
    space = w_delta(_op(0, np.zeros((2, 2))), 1.0, cfg)
    P, M = space.plus.canonical_basis(), space.minus.canonical_basis()
    f = M @ P.T
    h = M @ np.diag([1.0, -1.0]) @ P.T
    assert real_graph(space, f).subspace.meet(real_graph(space, h).subspace).dim == 1
    assert graph_intersection_identity(space, f, h, cfg)


def test_graph_intersection_on_random_graphs(cfg):
    space = w_delta(_op(0, np.zeros((3, 3))), 1.0, cfg)
    rng = trial_rng(11, 0, 0)
    for _ in range(20):
        f1, f2 = random_graph_map(space, rng), random_graph_map(space, rng)
        assert graph_intersection_identity(space, f1, f2, cfg)


def test_quaternionic_lagrangian_is_a_graph_over_v(cfg):
    space = w_delta(_op(2, np.zeros((4, 4))), 1.0, cfg)
    V, Vbar = space.quaternionic_halves
    assert (V.dim, Vbar.dim) == (4, 4)
    J = canonical_quaternionic_structure(space)
    L = quaternionic_lagrangian(space, J)
    assert space.is_lagrangian(L.subspace)
    for S in (space.struct_I, space.struct_J):
        assert L.subspace.contains_subspace(L.subspace.apply(S))
    recovered = lagrangian_from_subspace(space, L.subspace)
    assert recovered.kind == "quaternionic_structure"
    assert np.allclose(recovered.structure, J)


def test_odd_complex_real_part_has_no_quaternionic_lagrangian(cfg):
    space = w_delta(_op(2, np.zeros((2, 2))), 1.0, cfg)
    assert space.quaternionic_halves[0].dim == 2
    with pytest.raises(DimensionMismatchError):
        canonical_quaternionic_structure(space)
    with pytest.raises(UsageError):
        quaternionic_lagrangian(space, np.eye(space.ambient_dim))


def test_cylinder_cauchy_data_is_quaternionic(cfg):
    checks = check_bordism_index_zero(BordismScenario.identity(_op(2, np.zeros((2, 2)))), cfg)
    assert {"cauchy_data_quaternionic", "real_part_complex_dim_even"} <= {c.name for c in checks}
    ok, failures = _all_passed(checks)
    assert ok, failures




def test_stabilize_adds_the_negative_shell(cfg):
    space = w_delta(_op(0, [[2.0]]), 1.0, cfg)
    assert space.dim == 0
    L = real_graph(space, np.zeros((2, 2)))
    wider = lag_stabilize(L, 3.0, cfg)
    assert wider.delta == 3.0
    assert wider.subspace.dim == 1
    assert np.allclose(wider.structure, [[0.0, 0.0], [-1.0, 0.0]])
    with pytest.raises(UsageError):
        lag_stabilize(wider, 1.0, cfg)


def test_stabilized_complex_lagrangian_matches_the_pf_chart(cfg):
    D = _op(1, [[0.0, -1.0], [1.0, 0.0]])
    space = w_delta(D, 0.5, cfg)
    assert space.dim == 0
    L = lagrangian_from_subspace(space, Subspace.zero(4))
    wider = lag_stabilize(L, 2.0, cfg)
    # the shell Eig_{-1}(A_X) is L(D_X)
    assert np.allclose(wider.structure[np.ix_([0, 2], [0, 2])], D.entries)
    moved = pf_chart_change(lag_orientation(L, cfg).payload, 2.0, cfg)
    assert pf_ratio(lag_orientation(wider, cfg).payload, moved, cfg) == pytest.approx(1.0)


@pytest.mark.parametrize("seed", [3, 11, 17])
def test_tau_pf_ignores_chart_and_lagrangian(cfg, seed):
    for k in range(4):
        rng = trial_rng(seed, 1, k)
        ok, failures = _all_passed(check_tau_invariance(random_bordism(1, rng), rng, cfg))
        assert ok, failures


def test_lag_orientation_lives_over_the_boundary_model(cfg):
    D = _op(0, [[0.0]])
    space = w_delta(D, 1.0, cfg)
    point = lag_orientation(real_graph(space, canonical_graph_map(space)), cfg)
    assert point.ell == 0
    assert np.allclose(point.payload.operator, D.entries)


# tau

def test_tau_sp_shifts_with_the_point(cfg):
    frame = BordismScenario.identity(_op(7, [[1.0]])).frame()
    x = reference_point(frame.operator, cfg)
    base = tau(frame, x, cfg)
    assert tau(frame, translate_point(x, 2), cfg) == base + 2
    assert tau(frame, x, cfg, check_cutoffs=True) == base


def test_tau_det_flips_with_sign_and_mutation(cfg):
    frame = BordismScenario.identity(_op(0, [[1.0]])).frame()
    x = reference_point(frame.operator, cfg)
    base = tau(frame, x, cfg, mutate=False)
    assert tau(frame, translate_point(x, 1), cfg, mutate=False) == (base + 1) % 2
    assert tau(frame, x, cfg, mutate=True) == (base + 1) % 2


def test_tau_rejects_points_over_other_ell(cfg):
    frame = BordismScenario.identity(_op(7, [[1.0]])).frame()
    with pytest.raises(UsageError):
        tau(frame, OrientationPoint(3, reference_point(_op(3, np.eye(4)), cfg).payload), cfg)


def test_dual_point_pairs_to_unit(cfg):
    for D in [_op(0, [[1.0, 2.0]]), _op(1, [[0.0, -2.0], [2.0, 0.0]]), _op(7, np.diag([1.0, -2.0]))]:
        x = translate_point(reference_point(D, cfg), 1)
        assert pairing(x, dual_point(x, cfg), cfg) == 0


# bordisms

def test_bordism_scenario_validation():
    D = _op(7, [[1.0]])
    with pytest.raises(UsageError):
        BordismScenario(())
    with pytest.raises(UsageError):
        BordismScenario(((D, 0.0),))
    with pytest.raises(DimensionMismatchError):
        BordismScenario(((D, 1.0), (_op(7, np.eye(2)), 1.0)))
    with pytest.raises(UsageError):
        BordismScenario.path(D, _op(7, [[2.0]])).closed_problem()


def test_chain_composes_right_to_left():
    a, b, c = _op(7, [[-1.0]]), _op(7, [[0.5]]), _op(7, [[2.0]])
    first = BordismScenario.path(a, b, 1.0, 2)
    second = BordismScenario.path(b, c, 0.5, 2)
    Y = chain([second, first])
    assert np.allclose(Y.source.entries, a.entries)
    assert np.allclose(Y.target.entries, c.entries)
    assert Y.length == pytest.approx(1.5)
    with pytest.raises(UsageError):
        chain([first, second])


def test_complex_identity_cylinder_fixes_points(cfg):
    for D in (_op(1, [[0.0]]), _op(1, [[0.0, -1.0], [1.0, 0.0]]), _op(1, np.zeros((2, 2)))):
        Y = BordismScenario.identity(D)
        assert bordism_iso(Y, cfg).shift == 0
        x = reference_point(D, cfg)
        assert point_offset(bordism_apply(Y, x, cfg), D, cfg) == 0


def test_identity_cylinder_has_zero_shift(cfg):
    for D in (_op(7, np.diag([2.0, -1.0])), _op(0, [[1.0, 0.5]]), _op(3, np.eye(4))):
        assert bordism_iso(BordismScenario.identity(D), cfg).shift == 0


def test_crossing_eigenvalue_shift(cfg):
    Y = BordismScenario.path(_op(7, [[-1.0]]), _op(7, [[1.0]]), 1.0, 3)
    shift = bordism_iso(Y, cfg).shift
    assert abs(shift) == 1
    assert bordism_iso(Y.reversed(), cfg).shift == -shift
    assert bordism_iso(Y.twisted(3), cfg).shift == 3 * shift
    image = bordism_apply(Y, reference_point(Y.source, cfg), cfg)
    assert point_offset(image, Y.target, cfg) == shift


def test_crossing_file_scenario(cfg, scenarios_dir):
    scenario = load_scenario_file(os.path.join(scenarios_dir, "bordism_path.json"), "bordism_scenario")
    Y = scenario.payload.to_scenario()
    assert Y.ell == 7 and len(Y.segments) == 3
    # the spectrum returns to itself with no net crossing
    assert bordism_iso(Y, cfg).shift == 0


def test_closed_loop_shift_is_closed_index(cfg):
    loop = BordismScenario.identity(_op(0, [[0.0, 0.0]]))
    torus = loop.closed_problem()
    assert closed_tau(torus, 0, cfg) == 1
    assert closed_morphism(torus, cfg).shift == 1
    ok, failures = _all_passed(check_empty_boundary(loop, cfg))
    assert ok, failures


def test_functoriality_on_fixed_models(cfg):
    rng = trial_rng(11, 5, 0)
    Y1 = BordismScenario.path(_op(7, [[-1.0, 0.0], [0.0, 2.0]]), _op(7, [[1.0, 0.3], [0.3, 2.0]]), 1.0, 2)
    Y2 = BordismScenario.path(Y1.target, _op(7, [[-0.5, 0.0], [0.0, -2.0]]), 0.8, 3)
    ok, failures = _all_passed(check_functoriality(Y1, Y2, rng, cfg))
    assert ok, failures


@pytest.mark.parametrize("ell", [0, 3, 7])
def test_homotopy_on_random_models(cfg, ell):
    rng = trial_rng(2, 5, ell)
    D0 = random_model(ell, rng)
    ok, failures = _all_passed(check_homotopy(D0, random_like(D0, rng), rng, cfg))
    assert ok, failures


# suites

@pytest.mark.parametrize("seed", [3, 8])
@pytest.mark.parametrize("suite", MAIN_SUITES)
def test_main_suites_pass(cfg, suite, seed):
    report = verify_main(suite, seed, 2, cfg)
    assert report.checks
    assert report.passed, report.first_failure()


def test_mutated_sign_breaks_gluing(cfg):
    report = verify_main("gluing", 1, 2, cfg, ells=[0], mutate=True)
    assert not report.passed
    failure = report.first_failure()
    assert failure["name"] == "gluing_diagram"
    assert (failure["ell"], failure["trial"], failure["seed"]) == (0, 0, 1)
    assert report.per_ell()["0"]["failed"] >= 2


def test_verify_main_filters_ells(cfg):
    report = verify_main("gluing", 1, 1, cfg, ells=[5])
    assert report.checks == []
    assert report.passed
    assert report.per_ell() == {}


def test_verify_main_rejects_bad_requests(cfg):
    with pytest.raises(UsageError):
        verify_main("holonomy", 1, 1, cfg)
    with pytest.raises(UsageError):
        verify_main("gluing", 1, 0, cfg)


def test_reports_replay_from_seed(cfg):
    first = verify_main("direct_sum", 4, 1, cfg, ells=[0, 7]).to_dict()
    second = verify_main("direct_sum", 4, 1, cfg, ells=[0, 7]).to_dict()
    assert first == second
