"""Boundary frames of cylinder bordisms and the maps tau_l[D_Y] on O_l(D_X).

A frame records the whole boundary X as one l-adapted model D_X and an
orthogonal embedding of the cylinder model of D_X into solver coordinates
(values at t=0 and t=L of each cylinder). The far end of a cylinder over D
is read through the reflection gauge as the boundary model -D^*.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import block_diag

import config
from aps.boundary import BoundaryCondition, aps, nearly_aps
from aps.solver import CylinderProblem, cauchy_data, solve
from numeric.fields import field_for_ell, gamma_order
from numeric.subspaces import Subspace, direct_sum
from numeric.tolerances import DEFAULT_TOLERANCES, ToleranceConfig
from operators.adapted import AdaptedOperator, combine
from operators.cylinders import cylinder_sum, make_cylinder, reflect_iso
from orientation.lagrangians import (LagrangianElement, OrientationPoint, canonical_complex_structure,
                                     canonical_graph_map, complex_lagrangian, lag_orientation, positive_cutoff,
                                     real_graph, w_delta)
from spectral.det_lines import DetElement, det_move, det_ratio
from spectral.pfaffian_lines import PfElement, pf_chart_change, pf_ratio
from spectral.spectral_torsor import SpElement, sp_chart
from utils.errors import DimensionMismatchError, UsageError, VerificationError

logger = logging.getLogger(__name__)

FRAME_TOL = 1e-9


def cylinder_halves(D: AdaptedOperator) -> Tuple[int, int]:
    """Sizes of the two blocks of make_cylinder(D); the second is 0 for unsplit layouts."""
    rows, cols = D.entries.shape
    if D.ell in (0, 4):
        return cols, rows
    if D.ell == 2:
        return cols, cols
    if D.ell == 1:
        return 2 * cols, 0
    return cols, 0


def shuffle(first: Tuple[int, int], second: Tuple[int, int]) -> np.ndarray:
    """P with P [a1; a2; b1; b2] = [a1; b1; a2; b2]."""
    a1, a2 = first
    b1, b2 = second
    n = a1 + a2 + b1 + b2
    order = (list(range(0, a1)) + list(range(a1 + a2, a1 + a2 + b1))
             + list(range(a1, a1 + a2)) + list(range(a1 + a2 + b1, n)))
    return np.eye(n)[order]


def _halves_sum(a: Tuple[int, int], b: Tuple[int, int]) -> Tuple[int, int]:
    return a[0] + b[0], a[1] + b[1]


@dataclass(frozen=True, eq=False)
class BoundaryFrame:
    operator: AdaptedOperator
    embedding: np.ndarray
    problems: Tuple[CylinderProblem, ...]
    halves: Tuple[int, int] = (0, 0)

    def __post_init__(self):
        n = self.solver_dim
        if self.embedding.shape != (n, n):
            raise DimensionMismatchError(f"Frame embedding of shape {self.embedding.shape}, solver dim {n}")
        cyl = make_cylinder(self.operator)
        T = self.embedding
        residual = float(np.linalg.norm(T @ cyl.A @ T.T - self.boundary_operator))
        if self.ell in (0, 1):
            residual = max(residual, float(np.linalg.norm(T @ cyl.sigma @ T.T - self.boundary_sigma)))
        if residual > FRAME_TOL * max(1.0, float(np.linalg.norm(cyl.A))):
            raise VerificationError("Boundary frame does not match the cylinder ends",
                                    {"ell": self.ell, "residual": residual})

    @property
    def ell(self) -> int:
        return self.operator.ell

    @property
    def solver_dim(self) -> int:
        return sum(2 * p.dim for p in self.problems)

    @property
    def k(self) -> int:
        return field_for_ell(self.ell + 1).real_dim

    @property
    def boundary_operator(self) -> np.ndarray:
        return block_diag(*[p.boundary_operator for p in self.problems])

    @property
    def boundary_sigma(self) -> np.ndarray:
        return block_diag(*[p.boundary_sigma for p in self.problems])

    def to_solver(self, S: Subspace) -> Subspace:
        return S.apply(self.embedding)

    def _cauchy(self, cfg: ToleranceConfig) -> Subspace:
        C = cauchy_data(self.problems[0], cfg)
        for p in self.problems[1:]:
            C = direct_sum(C, cauchy_data(p, cfg))
        return C

    def kernel_dim(self, B: Subspace, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> int:
        """Real dim of the kernel under the condition B, given in the coordinates of Cyl(D_X)."""
        B_solver = self.to_solver(B)
        if len(self.problems) == 1:
            return solve(self.problems[0].with_boundary(BoundaryCondition(B_solver)), cfg).ker_dim
        return self._cauchy(cfg).meet(B_solver).dim

    def index(self, B: Subspace, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> int:
        """Index over K(l+1) under B."""
        B_solver = self.to_solver(B)
        if len(self.problems) == 1:
            return solve(self.problems[0].with_boundary(BoundaryCondition(B_solver)), cfg).index
        real = B_solver.dim - self.solver_dim // 2
        if real % self.k:
            raise DimensionMismatchError(f"Real index {real} is not divisible by {self.k}")
        return real // self.k

    def to_dict(self) -> dict:
        return {"ell": self.ell, "boundary_dim": self.solver_dim, "cylinders": len(self.problems)}


def cylinder_frame(problem: CylinderProblem, near: AdaptedOperator, far: AdaptedOperator,
                   far_first: bool = True) -> BoundaryFrame:
    """Frame of a cylinder with D_X = (-far^*) + near (far_first) or near + (-far^*)."""
    n = problem.dim
    gauge = reflect_iso(far)
    far_op = far.negative_adjoint()
    zero, eye = np.zeros((n, n)), np.eye(n)
    if far_first:
        D_X = combine("disjoint_union", far_op, near)
        G = np.block([[zero, eye], [gauge.Phi0.T, zero]])
        first, second = cylinder_halves(far_op), cylinder_halves(near)
    else:
        D_X = combine("disjoint_union", near, far_op)
        G = block_diag(eye, gauge.Phi0.T)
        first, second = cylinder_halves(near), cylinder_halves(far_op)
    P = shuffle(first, second)
    return BoundaryFrame(D_X, G @ P.T, (problem,), _halves_sum(first, second))


def union_frame(f1: BoundaryFrame, f2: BoundaryFrame) -> BoundaryFrame:
    """Frame of the disjoint union Y + Y', solved as two separate cylinders."""
    D_X = combine("disjoint_union", f1.operator, f2.operator)
    P = shuffle(f1.halves, f2.halves)
    T = block_diag(f1.embedding, f2.embedding) @ P.T
    return BoundaryFrame(D_X, T, f1.problems + f2.problems, _halves_sum(f1.halves, f2.halves))


def problem_sum(p1: CylinderProblem, p2: CylinderProblem) -> CylinderProblem:
    """One cylinder carrying the direct sum of two operators over the same interval."""
    pieces1, pieces2 = p1.pieces(), p2.pieces()
    if len(pieces1) != len(pieces2) or any(abs(a[1] - b[1]) > 1e-12 for a, b in zip(pieces1, pieces2)):
        raise UsageError("Direct sums need cylinders with matching segments")
    cyl = cylinder_sum(p1.cyl, p2.cyl)
    segments = tuple((block_diag(a[0], b[0]), a[1]) for a, b in zip(pieces1, pieces2))
    full = BoundaryCondition(Subspace.full(2 * cyl.dim))
    return CylinderProblem(cyl, p1.length, segments=segments if len(segments) > 1 else (), boundary=full)


def sum_frame(f1: BoundaryFrame, f2: BoundaryFrame) -> BoundaryFrame:
    """Frame of D_Y + D'_Y on one cylinder, with boundary model D_X + D'_X."""
    if len(f1.problems) != 1 or len(f2.problems) != 1:
        raise UsageError("Direct sums are taken of single-cylinder frames")
    p1, p2 = f1.problems[0], f2.problems[0]
    D_X = combine("direct_sum", f1.operator, f2.operator)
    P = shuffle(f1.halves, f2.halves)
    Q = shuffle((p1.dim, p1.dim), (p2.dim, p2.dim))
    T = Q @ block_diag(f1.embedding, f2.embedding) @ P.T
    return BoundaryFrame(D_X, T, (problem_sum(p1, p2),), _halves_sum(f1.halves, f2.halves))


def _check_operator(frame: BoundaryFrame, operator: np.ndarray) -> None:
    entries = frame.operator.entries
    if operator.shape != entries.shape or not np.allclose(operator, entries, atol=1e-12):
        raise DimensionMismatchError("Orientation point does not lie over the frame's boundary model")


def _offset(sign: int) -> int:
    return 0 if sign > 0 else 1


def _mutated(mutate: Optional[bool]) -> bool:
    return config.MUTATE_SIGN if mutate is None else mutate


def tau_det(frame: BoundaryFrame, o: DetElement, cfg: ToleranceConfig = DEFAULT_TOLERANCES,
            lagrangian: Optional[LagrangianElement] = None, mutate: Optional[bool] = None) -> int:
    """l=0: tau(O(Gamma(f))) = (-1)^{dim Ker D_{Y,B}} with B = B_APS(-delta) + Gamma(f); 0/1 encodes +-1."""
    _check_operator(frame, o.operator)
    if lagrangian is None:
        delta = o.delta if o.delta > 0 else positive_cutoff(make_cylinder(frame.operator).A, cfg)
        space = w_delta(frame.operator, delta, cfg)
        lagrangian = real_graph(space, canonical_graph_map(space))
    space = lagrangian.space
    o = det_move(o, space.delta, cfg)
    reference = lag_orientation(lagrangian, cfg).payload
    epsilon = 1 if det_ratio(o, reference, cfg) > 0 else -1
    B = nearly_aps(space.A, space.delta, lagrangian.subspace, cfg)
    ker = frame.kernel_dim(B.subspace, cfg)
    sign = epsilon * (-1) ** ker
    if _mutated(mutate):
        sign = -sign
    logger.debug(f"tau_0: delta={space.delta:.4g} ker={ker} sign={sign}")
    return _offset(sign)


def tau_pf(frame: BoundaryFrame, o: PfElement, cfg: ToleranceConfig = DEFAULT_TOLERANCES,
           lagrangian: Optional[LagrangianElement] = None) -> int:
    """l=1: tau((-1)^{dim_C Ker D_X} omega(J)) = (-1)^{dim_C Ker D_{Y,B}} with B = B_APS(-delta) + L(J)."""
    _check_operator(frame, o.operator)
    if lagrangian is None:
        delta = o.delta if o.delta > 0 else positive_cutoff(make_cylinder(frame.operator).A, cfg)
        space = w_delta(frame.operator, delta, cfg)
        lagrangian = complex_lagrangian(space, canonical_complex_structure(space))
    space = lagrangian.space
    o = pf_chart_change(o, space.delta, cfg)
    reference = lag_orientation(lagrangian, cfg).payload
    epsilon = 1 if pf_ratio(o, reference, cfg) > 0 else -1
    B = nearly_aps(space.A, space.delta, lagrangian.subspace, cfg)
    ker = frame.kernel_dim(B.subspace, cfg)
    sign = epsilon * (-1) ** (ker // 2)
    logger.debug(f"tau_1: delta={space.delta:.4g} ker_C={ker // 2} sign={sign}")
    return _offset(sign)


def tau_sp(frame: BoundaryFrame, x: SpElement, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> int:
    """l=3,7: tau([m, delta]) = m - ind D_{Y, B_APS(delta)}."""
    _check_operator(frame, x.operator)
    B = aps(make_cylinder(frame.operator).A, x.delta, cfg)
    index = frame.index(B.subspace, cfg)
    logger.debug(f"tau_sp: m={x.m} delta={x.delta:.4g} index={index}")
    return x.m - index


def tau(frame: BoundaryFrame, x: OrientationPoint, cfg: ToleranceConfig = DEFAULT_TOLERANCES,
        check_cutoffs: bool = False, mutate: Optional[bool] = None) -> int:
    """tau_l[D_Y](x) in Gamma_{l+1}; with check_cutoffs it is also evaluated one chart higher."""
    if x.ell != frame.ell:
        raise UsageError(f"Point over l={x.ell} on a frame over l={frame.ell}")
    if x.is_trivial:
        return 0
    if frame.ell == 0:
        value = tau_det(frame, x.payload, cfg, mutate=mutate)
    elif frame.ell == 1:
        value = tau_pf(frame, x.payload, cfg)
    else:
        value = tau_sp(frame, x.payload, cfg)
    if check_cutoffs:
        higher = _one_chart_up(frame, x, cfg)
        again = tau(frame, higher, cfg, mutate=mutate)
        if again != value:
            raise VerificationError("tau depends on the cutoff",
                                    {"ell": frame.ell, "values": [value, again]})
    return value


def _one_chart_up(frame: BoundaryFrame, x: OrientationPoint, cfg: ToleranceConfig) -> OrientationPoint:
    A = make_cylinder(frame.operator).A
    payload = x.payload
    epsilon = positive_cutoff(A, cfg, above=abs(payload.delta) + cfg.gap_tol)
    if isinstance(payload, DetElement):
        return OrientationPoint(x.ell, det_move(payload, epsilon, cfg))
    if isinstance(payload, PfElement):
        return OrientationPoint(x.ell, pf_chart_change(payload, epsilon, cfg))
    return OrientationPoint(x.ell, sp_chart(payload, epsilon, cfg))


def closed_tau(problem: CylinderProblem, ell: int, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> int:
    """X empty: the shift ind_{l+1}(D_Y), read off the solver on the glued problem."""
    if problem.monodromy is None:
        raise UsageError("closed_tau needs a mapping torus")
    result = solve(problem, cfg)
    order = gamma_order(ell + 1)
    if order == 0:
        return result.index
    if order == 2:
        return (result.ker_dim // result.k) % 2
    return 0
