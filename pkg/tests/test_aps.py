import os

import numpy as np
import pytest

from aps.boundary import BoundaryCondition, adjoint_bc, aps, nearly_aps, restate, separated
from aps.oracle import compare_with_oracle, oracle_solve
from aps.properties import verify_bvp_props
from aps.solver import CylinderProblem, segment_relation, solve
from aps.transmission import closed_index, cut_and_transmit
from data.scenarios import random_bvp_scenario, trial_rng
from numeric.subspaces import Subspace
from operators.adapted import AdaptedOperator
from operators.cylinders import make_cylinder
from utils.errors import InadmissibleCutoffError, UsageError
from utils.schemas import load_scenario_file


def _solve_file(scenarios_dir, name):
    scenario = load_scenario_file(os.path.join(scenarios_dir, name), "cylinder_problem")
    cfg = scenario.resolve_tolerances()
    problem = scenario.payload.to_problem(cfg)
    return problem, solve(problem, cfg)


def test_aps_example_has_index_zero(scenarios_dir):
    _, result = _solve_file(scenarios_dir, "aps_example.json")
    assert result.index == 0
    assert result.ker_dim == 0 and result.coker_dim == 0


def test_nearly_aps_pair_differs_by_dim_l(scenarios_dir):
    _, small = _solve_file(scenarios_dir, "nearly_aps_small.json")
    _, big = _solve_file(scenarios_dir, "nearly_aps_big.json")
    assert big.index - small.index == 1


def test_empty_operator_has_index_zero(scenarios_dir):
    _, result = _solve_file(scenarios_dir, "empty_operator.json")
    assert result.index == 0
    assert result.to_dict()["ker_basis"] == []


def test_constant_kernel(scenarios_dir):
    _, result = _solve_file(scenarios_dir, "constant_kernel.json")
    assert result.ker_dim == 1
    assert result.coker_dim == 0
    assert np.allclose(np.abs(result.ker_basis.basis[:, 0]), [1.0])


def test_mapping_torus_kernel(scenarios_dir, cfg):
    problem, result = _solve_file(scenarios_dir, "mapping_torus.json")
    assert result.ker_dim == 2
    closed = closed_index(problem.cyl, problem.length, problem.monodromy, cfg)
    assert closed.ker_dim == 2 and closed.value == 0


def test_cut_and_transmit_on_mapping_torus(scenarios_dir, cfg):
    problem, _ = _solve_file(scenarios_dir, "mapping_torus.json")
    report = cut_and_transmit(problem, 1.0, samples=5, cfg=cfg)
    assert report.passed, report.to_dict()
    assert report.path_indices == [0] * 5


def test_aps_sides_at_an_eigenvalue(cfg):
    A = np.diag([1.0, -1.0])
    assert aps(A, 0.0, cfg).dim == 1
    assert aps(A, 1.0, cfg, side="plus").dim == 2
    assert aps(A, 1.0, cfg, side="minus").dim == 1
    with pytest.raises(InadmissibleCutoffError):
        aps(A, 1.0, cfg)
    with pytest.raises(UsageError):
        aps(A, 0.0, cfg, side="middle")


def test_nearly_aps_validation(cfg):
    A = np.diag([-1.5, -0.5, 0.5, 1.5])
    B = nearly_aps(A, 1.0, Subspace.coordinate(4, [2]), cfg)
    assert B.subspace.equals(Subspace.coordinate(4, [0, 2]))
    with pytest.raises(UsageError):
        nearly_aps(A, 1.0, Subspace.coordinate(4, [3]), cfg)
    with pytest.raises(UsageError):
        nearly_aps(A, -1.0, Subspace.zero(4), cfg)


def test_restate_keeps_the_condition(cfg):
    A = np.diag([-1.5, -0.5, 0.5, 1.5])
    B = nearly_aps(A, 1.0, Subspace.coordinate(4, [2]), cfg)
    wider = restate(B, 2.0, A, cfg)
    assert wider.delta == 2.0
    assert wider.lagrangian.dim == 2
    assert wider.subspace.equals(B.subspace)
    with pytest.raises(UsageError):
        restate(B, 0.5, A, cfg)


def test_restate_absorbs_rounding_below_delta(cfg):
    A = np.diag([-1.5, -0.5, 0.5, 1.5])
    delta = 1.5 + 1.0
    B = nearly_aps(A, delta, Subspace.coordinate(4, [1, 2]), cfg)
    same = restate(B, np.nextafter(delta, 0.0), A, cfg)
    assert same.delta == delta
    assert same.subspace.equals(B.subspace)


def test_bvp_suite_runs_past_the_first_scenario(cfg):
    report = verify_bvp_props(random_bvp_scenario(1, trial_rng(5, 3, 0), cfg, seed=0), cfg)
    assert len(report.checks) > 1
    assert report.passed, report.failures()


def test_adjoint_condition():
    B = BoundaryCondition(Subspace.coordinate(2, [0]))
    assert adjoint_bc(B, np.eye(2)).subspace.equals(Subspace.coordinate(2, [1]))
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert adjoint_bc(B, swap).subspace.equals(Subspace.coordinate(2, [0]))


def test_segment_relation_stays_bounded(cfg):
    relation = segment_relation(np.diag([5.0, -5.0]), 10.0, cfg)
    assert np.abs(relation).max() <= 1.0 + 1e-12
    assert np.linalg.matrix_rank(relation) == 2


def test_problem_validation():
    cyl = make_cylinder(AdaptedOperator.from_entries(7, [[1.0]]))
    with pytest.raises(UsageError):
        CylinderProblem(cyl, 0.0, boundary=BoundaryCondition(Subspace.full(2)))
    with pytest.raises(UsageError):
        CylinderProblem(cyl, 1.0, end0=BoundaryCondition(Subspace.full(1)))


def test_index_equals_dim_b_minus_dim_w(cfg):
    cyl = make_cylinder(AdaptedOperator.from_entries(7, np.diag([2.0, -1.0, 0.5])))
    end0 = aps(cyl.A, 0.0, cfg)
    for endL in (aps(-cyl.A, 0.0, cfg), BoundaryCondition(Subspace.full(3)), BoundaryCondition(Subspace.zero(3))):
        result = solve(CylinderProblem(cyl, 0.7, end0=end0, endL=endL), cfg)
        assert result.index == separated(end0, endL).dim - 3


def test_oracle_agrees_on_small_problems(scenarios_dir):
    for name in ("aps_example.json", "constant_kernel.json", "mapping_torus.json"):
        problem, result = _solve_file(scenarios_dir, name)
        comparison = compare_with_oracle(problem, result, points=2000)
        assert comparison["dims_agree"], name
        if comparison["max_angle"] is not None:
            assert comparison["max_angle"] < 1e-4


def test_oracle_on_empty_problem(scenarios_dir):
    problem, _ = _solve_file(scenarios_dir, "empty_operator.json")
    assert oracle_solve(problem, 100).ker_dim == 0


@pytest.mark.parametrize("ell", [0, 1, 3, 7])
def test_random_bvp_properties(ell, cfg):
    for k in range(3):
        scenario = random_bvp_scenario(ell, trial_rng(5, 3, k), cfg, seed=k)
        report = verify_bvp_props(scenario, cfg)
        assert report.passed, report.failures()
