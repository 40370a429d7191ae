"""Randomized verification of the gluing, additivity and invariance properties of tau.

Each suite runs a number of seeded trials for every l where its statement is
nontrivial. A trial returns PropertyChecks; exceptions inside a trial become
failed checks so a report is always produced.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from aps.properties import PropertyCheck
from aps.solver import projected_cauchy_data
from aps.transmission import closed_index
from config import MAIN_SUITES, SUITE_CONFIGS
from data.scenarios import (random_bordism, random_like, random_loop, random_model, random_orientation,
                            random_orthogonal, random_potential, structure_gauge, trial_rng)
from numeric.subspaces import Subspace
from numeric.tolerances import DEFAULT_TOLERANCES, ToleranceConfig
from operators.adapted import AdaptedOperator, index_ell, potential_sweep
from operators.cylinders import make_cylinder
from orientation.bordism import (BordismScenario, bordism_apply, bordism_iso, chain, closed_morphism, conjugate_point,
                                 dual_point, pairing, point_offset, reference_point, sum_point)
from orientation.lagrangians import (OrientationPoint, SplitQuadraticSpace, boundary_form, boundary_is_lagrangian,
                                     canonical_complex_structure, complex_intersection_identity,
                                     complex_lagrangian, component_comparison, graph_intersection_identity,
                                     lag_orientation, lag_stabilize, lagrangian_from_subspace, positive_cutoff,
                                     random_graph_map, real_graph, w_delta)
from orientation.tau import closed_tau, cylinder_frame, sum_frame, tau, tau_det, tau_pf, union_frame
from signs.torsors import TorsorGroups, identity_morphism, unit_torsor
from spectral.det_lines import det_move
from spectral.pfaffian_lines import pf_chart_change, pf_ratio
from spectral.spectral_torsor import sp_equal
from spectral.transport import OperatorPath, transport_along_path
from utils.errors import UsageError, WorkbenchError

logger = logging.getLogger(__name__)

SUITE_ELLS: Dict[str, List[int]] = {
    "gluing": [0, 1, 3, 7],
    "disjoint_union": [0, 1, 3, 7],
    "direct_sum": [0, 1, 3, 7],
    "empty_boundary": [0, 1, 2, 3, 4, 7],
    "functoriality": [0, 1, 2, 3, 4, 7],
    "bordism_index_zero": [0, 1, 2, 4],
    "homotopy": [0, 3, 7]
}

TWIST_RANKS = (2, 3)


@dataclass
class TheoremReport:
    suite: str
    seed: int
    trials: int
    checks: List[Dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def failures(self) -> List[Dict]:
        return [c for c in self.checks if not c["passed"]]

    def first_failure(self) -> Optional[Dict]:
        failures = self.failures()
        return failures[0] if failures else None

    def per_ell(self) -> Dict[str, Dict[str, int]]:
        table: Dict[str, Dict[str, int]] = {}
        for c in self.checks:
            row = table.setdefault(str(c["ell"]), {"passed": 0, "failed": 0})
            row["passed" if c["passed"] else "failed"] += 1
        return table

    def to_dict(self) -> Dict:
        return {"suite": self.suite, "seed": self.seed, "trials": self.trials, "passed": self.passed,
                "per_ell": self.per_ell(), "failures": self.failures()}


def _groups(ell: int) -> TorsorGroups:
    return TorsorGroups.for_ell(ell)


def _add(ell: int, a: int, b: int) -> int:
    return _groups(ell).structure.add(a, b)


def _equal_check(name: str, left: int, right: int, **details) -> PropertyCheck:
    details.update({"left": int(left), "right": int(right)})
    return PropertyCheck(name, int(left) == int(right), details)


# gluing

def check_gluing(loop: BordismScenario, x: OrientationPoint, z: OrientationPoint,
                 cfg: ToleranceConfig = DEFAULT_TOLERANCES, mutate: Optional[bool] = None) -> List[PropertyCheck]:
    """Cut a mapping torus at X: tau on the cut cylinder of x (x) z equals <x, z> + ind_{l+1} of the torus."""
    ell = loop.ell
    frame = cylinder_frame(loop.problem(), loop.target, loop.source, far_first=False)
    left = tau(frame, sum_point(x, z, cfg), cfg, mutate=mutate)
    torus = loop.closed_problem()
    closed = closed_index(torus.cyl, torus.length, torus.monodromy, cfg, torus.segments)
    solved = closed_tau(torus, ell, cfg)
    right = _add(ell, pairing(x, z, cfg), solved)
    return [
        _equal_check("gluing_diagram", left, right, ker_dim=closed.ker_dim),
        _equal_check("closed_index_matches_solver", closed.value, solved)
    ]


# disjoint union and direct sum

def _tau_pair(Y1: BordismScenario, Y2: BordismScenario, rng: np.random.Generator, cfg: ToleranceConfig,
              combined_frame: Callable, name: str) -> List[PropertyCheck]:
    ell = Y1.ell
    F1, F2 = Y1.frame(), Y2.frame()
    o1 = random_orientation(F1.operator, rng, cfg)
    o2 = random_orientation(F2.operator, rng, cfg)
    combined = combined_frame(F1, F2)
    left = tau(combined, sum_point(o1, o2, cfg), cfg)
    right = _add(ell, tau(F1, o1, cfg), tau(F2, o2, cfg))
    return [_equal_check(name, left, right)]


def check_disjoint_union(Y1: BordismScenario, Y2: BordismScenario, rng: np.random.Generator,
                         cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> List[PropertyCheck]:
    return _tau_pair(Y1, Y2, rng, cfg, union_frame, "disjoint_union_additive")


def check_direct_sum(Y1: BordismScenario, Y2: BordismScenario, rng: np.random.Generator,
                     cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> List[PropertyCheck]:
    return _tau_pair(Y1, Y2, rng, cfg, sum_frame, "direct_sum_additive")


def check_tau_invariance(Y: BordismScenario, rng: np.random.Generator,
                         cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> List[PropertyCheck]:
    """tau is the same at two charts, for a stabilized Lagrangian and for any other Lagrangian."""
    ell = Y.ell
    frame = Y.frame()
    x = random_orientation(frame.operator, rng, cfg)
    base = tau(frame, x, cfg)
    checks = [_equal_check("tau_two_charts", base, tau(frame, x, cfg, check_cutoffs=True))]
    if ell not in (0, 1):
        return checks
    A_X = make_cylinder(frame.operator).A
    delta = positive_cutoff(A_X, cfg, above=x.payload.delta)
    epsilon = positive_cutoff(A_X, cfg, above=delta + cfg.gap_tol)
    space = w_delta(frame.operator, delta, cfg)
    if ell == 0:
        L = real_graph(space, random_graph_map(space, rng))
        o = det_move(x.payload, delta, cfg)
        other = tau_det(frame, o, cfg, lagrangian=L)
        stabilized = tau_det(frame, o, cfg, lagrangian=lag_stabilize(L, epsilon, cfg))
    else:
        J = canonical_complex_structure(space)
        R = _orthogonal_on(space.plus.basis, rng)
        L = complex_lagrangian(space, R @ J @ R.T)
        o = pf_chart_change(x.payload, delta, cfg)
        other = tau_pf(frame, o, cfg, lagrangian=L)
        stabilized = tau_pf(frame, o, cfg, lagrangian=lag_stabilize(L, epsilon, cfg))
    checks.append(_equal_check("tau_other_lagrangian", base, other, delta=delta))
    checks.append(_equal_check("tau_stabilized_lagrangian", base, stabilized, epsilon=epsilon))
    return checks


def _orthogonal_on(basis: np.ndarray, rng: np.random.Generator, reflect: Optional[bool] = None) -> np.ndarray:
    """Ambient orthogonal map acting by a random O(V) element on span(basis), identity elsewhere."""
    n, d = basis.shape
    if d == 0:
        return np.eye(n)
    Q = random_orthogonal(d, rng)
    if reflect is not None and (np.linalg.det(Q) < 0) != reflect:
        Q[:, 0] = -Q[:, 0]
    return np.eye(n) - basis @ basis.T + basis @ Q @ basis.T


# empty boundary

def check_empty_boundary(loop: BordismScenario, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> List[PropertyCheck]:
    ell = loop.ell
    torus = loop.closed_problem()
    closed = closed_index(torus.cyl, torus.length, torus.monodromy, cfg, torus.segments)
    morphism = closed_morphism(torus, cfg)
    image = morphism.apply(unit_torsor(_groups(ell)))
    return [
        _equal_check("closed_shift_is_index", morphism.shift, closed.value),
        _equal_check("closed_solver_agrees", closed_tau(torus, ell, cfg), closed.value),
        _equal_check("unit_translated", image.offset, closed.value)
    ]


# functoriality

def check_functoriality(Y1: BordismScenario, Y2: BordismScenario, rng: np.random.Generator,
                        cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> List[PropertyCheck]:
    """O[Y2 o Y1] = O[Y2] o O[Y1], and the identity cylinder induces the identity."""
    composite = bordism_iso(Y2.compose(Y1), cfg)
    stepwise = bordism_iso(Y2, cfg).compose(bordism_iso(Y1, cfg))
    identity = bordism_iso(BordismScenario.identity(Y1.source, Y1.length), cfg)
    checks = [
        PropertyCheck("composition", composite.equals(stepwise),
                      {"composite": composite.shift, "stepwise": stepwise.shift}),
        PropertyCheck("identity_cylinder", identity.equals(identity_morphism(identity.source)),
                      {"shift": identity.shift})
    ]
    if Y1.ell in (0, 1, 3, 7):
        x = random_orientation(Y1.source, rng, cfg)
        direct = point_offset(bordism_apply(Y2.compose(Y1), x, cfg), Y2.target, cfg)
        twice = point_offset(bordism_apply(Y2, bordism_apply(Y1, x, cfg), cfg), Y2.target, cfg)
        checks.append(_equal_check("composition_on_points", direct, twice))
    return checks


def check_duality(Y: BordismScenario, rng: np.random.Generator,
                  cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> List[PropertyCheck]:
    """The reflected bordism carries dual points to dual points and is adjoint for the pairing."""
    x = random_orientation(Y.source, rng, cfg)
    y = bordism_apply(Y, x, cfg)
    Yd = Y.dual()
    image = bordism_apply(Yd, dual_point(y, cfg), cfg).payload
    expected = dual_point(x, cfg).payload
    w = random_orientation(Yd.source, rng, cfg)
    adjoint_left = pairing(y, w, cfg)
    adjoint_right = pairing(x, bordism_apply(Yd, w, cfg), cfg)
    return [
        PropertyCheck("dual_bordism_on_duals", sp_equal(image, expected, cfg),
                      {"image_m": image.m, "expected_m": expected.m}),
        _equal_check("dual_bordism_adjoint", adjoint_left, adjoint_right)
    ]


def check_doubling(Y: BordismScenario, rng: np.random.Generator,
                   cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> List[PropertyCheck]:
    """Two bordisms with common ends agree iff the closed double has vanishing index."""
    middle = random_like(Y.source, rng)
    other = chain([BordismScenario.path(middle, Y.target, Y.length / 2, 2, "upper"),
                   BordismScenario.path(Y.source, middle, Y.length / 2, 2, "lower")])
    double = Y.compose(other.reversed())
    torus = double.closed_problem()
    value = closed_index(torus.cyl, torus.length, torus.monodromy, cfg, torus.segments).value
    difference = _add(Y.ell, bordism_iso(Y, cfg).shift, -bordism_iso(other, cfg).shift)
    return [_equal_check("doubling", difference, value)]


# bordism invariance of the index

def check_bordism_index_zero(Y: BordismScenario, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> List[PropertyCheck]:
    """The boundary of a cylinder has ind_l = 0 and Lagrangian projected Cauchy data."""
    ell = Y.ell
    frame = Y.frame()
    p = Y.problem()
    delta = positive_cutoff(p.boundary_operator, cfg)
    C = projected_cauchy_data(p, delta, cfg)
    if ell == 2:
        doubled = [np.kron(np.eye(2), S) for S in (p.cyl.struct_I, p.cyl.struct_J)]
        space = boundary_form(p.boundary_sigma, p.boundary_operator, delta, ell, cfg, *doubled)
    else:
        space = boundary_form(p.boundary_sigma, p.boundary_operator, delta, ell, cfg)
    checks = [
        _equal_check("boundary_index_zero", index_ell(frame.operator, cfg), 0),
        PropertyCheck("cauchy_data_lagrangian", boundary_is_lagrangian(space, C),
                      {"dim": C.dim, "W_dim": space.dim, "isotropy": space.isotropy_residual(C)})
    ]
    if ell == 2:
        checks += check_quaternionic_cauchy_data(space, C)
    return checks


def check_potential_path(D: AdaptedOperator, rng: np.random.Generator,
                         cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> List[PropertyCheck]:
    """ind_l stays constant along D (x) id + t P for a random adapted potential P."""
    rank = int(rng.choice((1,) + TWIST_RANKS))
    indices = potential_sweep(D, random_potential(D, rank, rng), rank, cfg=cfg)
    return [PropertyCheck("potential_path_index", len(set(indices)) == 1, {"rank": rank, "indices": indices})]


def check_quaternionic_cauchy_data(
space: SplitQuadraticSpace, C: Subspace) -> List[PropertyCheck]:
    """C is Gamma(J) for a quaternionic structure on V, so dim_C V is even."""
    V, _ = space.quaternionic_halves
    try:
        kind = lagrangian_from_subspace(space, C).kind
    except WorkbenchError as e:
        kind = e.message
    return [
        PropertyCheck("cauchy_data_quaternionic", kind == "quaternionic_structure", {"kind": kind, "V_dim": V.dim}),
        _equal_check("real_part_complex_dim_even", (V.dim // 2) % 2, 0)
    ]


def check_lagrangian_identities(D_X, rng: np.random.Generator,
                                cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> List[PropertyCheck]:
    """Intersection formulas and the component comparisons on W_delta(D_X)."""
    ell = D_X.ell
    delta = positive_cutoff(make_cylinder(D_X).A, cfg)
    space = w_delta(D_X, delta, cfg)
    if ell == 0:
        f1, f2 = random_graph_map(space, rng), random_graph_map(space, rng)
        g = _orthogonal_on(space.plus.basis, rng)
        L = real_graph(space, random_graph_map(space, rng)).subspace
        return [
            PropertyCheck("graph_intersection", graph_intersection_identity(space, f1, f2, cfg),
                          {"dim": space.dim}),
            PropertyCheck("component_comparison", component_comparison(space, f1, g, L), {"dim": space.dim}),
            PropertyCheck("graphs_lagrangian", space.is_lagrangian(real_graph(space, f1).subspace),
                          {"inertia": space.inertia})
        ]
    J = canonical_complex_structure(space)
    R = _orthogonal_on(space.plus.basis, rng)
    flip = _orthogonal_on(space.plus.basis, rng, reflect=True)
    keep = _orthogonal_on(space.plus.basis, rng, reflect=False)
    reference = lag_orientation(complex_lagrangian(space, J), cfg).payload
    flipped = lag_orientation(complex_lagrangian(space, flip @ J @ flip.T), cfg).payload
    kept = lag_orientation(complex_lagrangian(space, keep @ J @ keep.T), cfg).payload
    nontrivial = space.plus.dim > 0
    return [
        PropertyCheck("complex_intersection", complex_intersection_identity(space, J, R @ J @ R.T, cfg),
                      {"dim": space.dim}),
        PropertyCheck("reflection_flips_component",
                      (pf_ratio(flipped, reference, cfg) < 0) if nontrivial else True, {"dim": space.dim}),
        PropertyCheck("rotation_keeps_component", pf_ratio(kept, reference, cfg) > 0, {"dim": space.dim})
    ]


# homotopy, twisting and gauge invariance

def _two_paths(D0, D1, rng: np.random.Generator, length: float):
    straight = BordismScenario.path(D0, D1, length, 3, "straight")
    middle = random_like(D0, rng)
    bent = chain([BordismScenario.path(middle, D1, length / 2, 2, "bent_upper"),
                  BordismScenario.path(D0, middle, length / 2, 2, "bent_lower")])
    return straight, bent


def check_homotopy(D0, D1, rng: np.random.Generator, cfg: ToleranceConfig = DEFAULT_TOLERANCES
                   ) -> List[PropertyCheck]:
    """Homotopic bordisms induce equal maps, which agree with transport along the path."""
    ell = D0.ell
    straight, bent = _two_paths(D0, D1, rng, float(rng.uniform(0.5, 1.5)))
    iso_straight, iso_bent = bordism_iso(straight, cfg), bordism_iso(bent, cfg)
    path = OperatorPath.from_samples([D0.entries, D1.entries])
    moved = transport_along_path(path, reference_point(D0, cfg).payload, cfg)
    transported = point_offset(OrientationPoint(ell, moved), D1, cfg)
    return [
        _equal_check("homotopic_paths", iso_straight.shift, iso_bent.shift),
        _equal_check("transport_agrees", iso_straight.shift, transported)
    ]


def check_twisting(Y: BordismScenario, rank: int, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> List[PropertyCheck]:
    shift = bordism_iso(Y, cfg).shift
    twisted = bordism_iso(Y.twisted(rank), cfg).shift
    return [_equal_check("twist_scales_shift", twisted, rank * shift, rank=rank)]


def check_gauge(Y: BordismScenario, rng: np.random.Generator, cfg: ToleranceConfig = DEFAULT_TOLERANCES
                ) -> List[PropertyCheck]:
    """tau is unchanged when every datum is conjugated by structure-preserving orthogonal maps."""
    D = Y.source
    Q_in = structure_gauge(D, rng)
    Q_out = structure_gauge(D.negative_adjoint(), rng) if Y.ell == 0 else Q_in
    conjugated = Y.conjugated(Q_in, Q_out)
    frame, frame_q = Y.frame(), conjugated.frame()
    x = random_orientation(frame.operator, rng, cfg)
    if Y.ell == 0:
        # D_X = (-D0^T) + D1: domain out(D0) + in(D1), codomain in(D0) + out(D1)
        X_in = _block(Q_out, Q_in)
        X_out = _block(Q_in, Q_out)
    else:
        X_in = X_out = _block(Q_in, Q_in)
    x_q = conjugate_point(x, X_in, X_out, cfg)
    return [_equal_check("gauge_invariance", tau(frame, x, cfg), tau(frame_q, x_q, cfg))]


def _block(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((a.shape[0] + b.shape[0], a.shape[1] + b.shape[1]))
    out[:a.shape[0], :a.shape[1]] = a
    out[a.shape[0]:, a.shape[1]:] = b
    return out


# suite driver

def _trial(suite: str, ell: int, rng: np.random.Generator, cfg: ToleranceConfig,
           mutate: Optional[bool]) -> List[PropertyCheck]:
    if suite == "gluing":
        loop = random_loop(ell, rng)
        x = random_orientation(loop.target, rng, cfg)
        z = random_orientation(loop.source.negative_adjoint(), rng, cfg)
        return check_gluing(loop, x, z, cfg, mutate)
    if suite == "disjoint_union":
        Y1, Y2 = random_bordism(ell, rng), random_bordism(ell, rng)
        return check_disjoint_union(Y1, Y2, rng, cfg) + check_tau_invariance(Y1, rng, cfg)
    if suite == "direct_sum":
        Y1 = random_bordism(ell, rng)
        Y2 = random_bordism(ell, rng, steps=len(Y1.segments), length=Y1.length)
        return check_direct_sum(Y1, Y2, rng, cfg)
    if suite == "empty_boundary":
        return check_empty_boundary(random_loop(ell, rng), cfg)
    if suite == "functoriality":
        Y1 = random_bordism(ell, rng)
        Y2 = random_bordism(ell, rng, source=Y1.target)
        checks = check_functoriality(Y1, Y2, rng, cfg)
        if ell in (3, 7):
            checks += check_duality(Y1, rng, cfg) + check_doubling(Y1, rng, cfg)
        return checks
    if suite == "bordism_index_zero":
        Y = random_bordism(ell, rng)
        checks = check_bordism_index_zero(Y, cfg) + check_potential_path(Y.source, rng, cfg)
        if ell in (0, 1):
            checks += check_lagrangian_identities(Y.frame().operator, rng, cfg)
        return checks
    if suite == "homotopy":
        D0 = random_model(ell, rng)
        D1 = random_like(D0, rng)
        checks = check_homotopy(D0, D1, rng, cfg)
        Y = BordismScenario.path(D0, D1, float(rng.uniform(0.5, 1.5)), 2, "twisted")
        if ell in (3, 7):
            checks += check_twisting(Y, int(rng.choice(TWIST_RANKS)), cfg)
        return checks + check_gauge(Y, rng, cfg)
    raise UsageError(f"Unknown main suite '{suite}'")


def verify_main(suite: str, seed: int, trials: int, cfg: ToleranceConfig = DEFAULT_TOLERANCES,
                ells: Optional[List[int]] = None, mutate: Optional[bool] = None) -> TheoremReport:
    """Run one main-theorem suite; checks carry ell, trial and seed for replay."""
    if suite not in MAIN_SUITES:
        raise UsageError(f"Unknown main suite '{suite}'. Available: {', '.join(MAIN_SUITES)}")
    if trials < 1:
        raise UsageError(f"trials must be at least 1, got {trials}")
    allowed = set(SUITE_CONFIGS["main"]["ells"])
    ells = [e for e in (ells if ells is not None else SUITE_ELLS[suite]) if e in SUITE_ELLS[suite] and e in allowed]
    suite_index = len(SUITE_CONFIGS) + MAIN_SUITES.index(suite)
    report = TheoremReport(suite, seed, trials)
    for ell in ells:
        for k in range(trials):
            rng = trial_rng(seed, suite_index * 8 + ell, k)
            try:
                checks = _trial(suite, ell, rng, cfg, mutate)
            except WorkbenchError as e:
                logger.error(f"{suite} l={ell} trial {k}: {e.message}")
                checks = [PropertyCheck("trial_error", False, {"error_type": e.error_type, "message": e.message,
                                                               **e.details})]
            for c in checks:
                entry = c.to_dict()
                entry.update({"ell": ell, "trial": k, "seed": seed})
                report.checks.append(entry)
        logger.info(f"{suite} l={ell}: {trials} trial(s) done")
    return report
