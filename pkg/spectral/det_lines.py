"""Determinant lines DET D of real matrix models in delta-charts.

A point at chart delta is p (x) q^* with p in det V^+_{[0,delta]}(D) and
q^* in det V^-_{[0,delta]}(D)^*, where V^+ (V^-) is spanned by the right
(left) singular vectors with singular value at most delta.
"""

import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy.linalg import svd

from numeric.fields import as_array
from numeric.spectral import admissible_cutoffs
from numeric.subspaces import Subspace
from numeric.tolerances import DEFAULT_TOLERANCES, ToleranceConfig
from signs.graded_lines import GradedLineElement, LineTensor, eval_pairing, wedge_concat
from utils.errors import DimensionMismatchError, InadmissibleCutoffError, UsageError

logger = logging.getLogger(__name__)

SUM_CONVENTIONS = ("derived", "printed")


@dataclass(frozen=True, eq=False)
class SingularCluster:
    """Right singular vectors sharing one singular value, with their images J v = D v / s."""
    value: float
    right: np.ndarray
    left: np.ndarray


@dataclass(frozen=True, eq=False)
class SingularSplit:
    operator: np.ndarray
    clusters: Tuple[SingularCluster, ...]
    right_kernel: np.ndarray
    left_kernel: np.ndarray
    zero_tol: float

    @property
    def shape(self) -> Tuple[int, int]:
        return self.operator.shape

    def nonzero_values(self) -> np.ndarray:
        return np.array([c.value for c in self.clusters])

    def distance_to_singular_values(self, delta: float) -> float:
        values = self.nonzero_values()
        return float(np.min(np.abs(values - delta))) if values.size else float("inf")


def singular_split(D, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> SingularSplit:
    """SVD with clustered nonzero singular values and canonical bases."""
    A = as_array(D)
    rows, cols = A.shape
    if rows == 0 or cols == 0:
        return SingularSplit(A, tuple(), np.eye(cols), np.eye(rows), 0.0)

    U, s, Vt = svd(A, full_matrices=True)
    V = Vt.T
    zero_tol = cfg.rank_tol * max(1.0, float(s[0]) if s.size else 1.0)
    rank = int(np.sum(s > zero_tol))
    right_kernel = Subspace(V[:, rank:].copy()).canonical_basis()
    left_kernel = Subspace(U[:, rank:].copy()).canonical_basis()

    clusters: List[SingularCluster] = []
    order = np.argsort(s[:rank], kind="stable")
    values = s[:rank][order]
    vectors = V[:, :rank][:, order]
    start = 0
    for i in range(1, rank + 1):
        if i == rank or values[i] - values[i - 1] > cfg.eig_tol * max(1.0, values[-1]):
            value = float(np.mean(values[start:i]))
            right = Subspace(vectors[:, start:i].copy()).canonical_basis()
            left = A @ right / value
            clusters.append(SingularCluster(value, right, left))
            start = i
    return SingularSplit(A, tuple(clusters), right_kernel, left_kernel, zero_tol)


def check_det_cutoff(split: SingularSplit, delta: float, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> None:
    if delta < 0:
        raise InadmissibleCutoffError(f"Cutoff {delta} is negative")
    if split.distance_to_singular_values(delta) < cfg.gap_tol:
        raise InadmissibleCutoffError(
            f"Cutoff {delta:.6g} within gap_tol of a singular value",
            {"cutoff": delta, "distance": split.distance_to_singular_values(delta)})


def det_admissible(split: SingularSplit, delta: float, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> bool:
    return delta >= 0 and split.distance_to_singular_values(delta) >= cfg.gap_tol


def eigenspace_split(D, lo: float, hi: float, cfg: ToleranceConfig = DEFAULT_TOLERANCES,
                     include_lo: bool = True) -> Tuple[Subspace, Subspace, np.ndarray]:
    """(V^+_I, V^-_I, J_I) for the singular-value interval I = [lo, hi] (or (lo, hi]).

    J_I = sum u_i v_i^T over the nonzero singular values in I; the kernels of D
    and D^* belong to I exactly when lo is 0 and closed.
    """
    split = singular_split(D, cfg)
    if lo > 0 or not include_lo:
        check_det_cutoff(split, lo, cfg)
    check_det_cutoff(split, hi, cfg)
    rows, cols = split.shape
    plus: List[np.ndarray] = []
    minus: List[np.ndarray] = []
    if lo == 0 and include_lo:
        plus.append(split.right_kernel)
        minus.append(split.left_kernel)
    J = np.zeros((rows, cols))
    for c in split.clusters:
        if (c.value > lo or (include_lo and c.value >= lo)) and c.value <= hi:
            plus.append(c.right)
            minus.append(c.left)
            J += c.left @ c.right.T
    V_plus = Subspace(np.hstack(plus)) if plus else Subspace.zero(cols)
    V_minus = Subspace(np.hstack(minus)) if minus else Subspace.zero(rows)
    return V_plus, V_minus, J


def chart_bases(split: SingularSplit, delta: float) -> Tuple[np.ndarray, np.ndarray]:
    """Fixed orthonormal bases of V^+_delta and V^-_delta, kernel first, ascending singular value."""
    plus = [split.right_kernel]
    minus = [split.left_kernel]
    for c in split.clusters:
        if c.value <= delta:
            plus.append(c.right)
            minus.append(c.left)
    return np.hstack(plus), np.hstack(minus)


def shell(split: SingularSplit, lo: float, hi: float) -> Tuple[np.ndarray, np.ndarray]:
    """(W, J W) for the singular values in (lo, hi]."""
    rows, cols = split.shape
    right = [c.right for c in split.clusters if lo < c.value <= hi]
    left = [c.left for c in split.clusters if lo < c.value <= hi]
    if not right:
        return np.zeros((cols, 0)), np.zeros((rows, 0))
    return np.hstack(right), np.hstack(left)


@dataclass(frozen=True, eq=False)
class DetElement:
    """Point of DET D at chart delta."""
    operator: np.ndarray
    delta: float
    element: LineTensor

    @property
    def plus(self) -> GradedLineElement:
        return self.element.plus

    @property
    def dual(self) -> GradedLineElement:
        return self.element.dual

    def scaled(self, factor: float) -> "DetElement":
        return DetElement(self.operator, self.delta, self.element.scaled(factor))

    def to_dict(self) -> dict:
        return {"delta": self.delta, "element": self.element.to_dict()}


def det_reference(D, delta: float, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> DetElement:
    """The chart's reference point: basis of V^+ (x) dual volume of the basis of V^-."""
    split = singular_split(D, cfg)
    check_det_cutoff(split, delta, cfg)
    plus_basis, minus_basis = chart_bases(split, delta)
    plus = GradedLineElement(plus_basis, 1.0)
    dual = GradedLineElement(minus_basis[:, ::-1].copy(), 1.0, True)
    return DetElement(split.operator, float(delta), LineTensor(plus, dual))


def det_make(D, delta: float, plus_word: np.ndarray, dual_word: np.ndarray, coefficient: float = 1.0,
             cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> DetElement:
    """A point from explicit words, checked to span V^+_delta and V^-_delta."""
    reference = det_reference(D, delta, cfg)
    element = LineTensor(GradedLineElement(np.asarray(plus_word, dtype=float), coefficient),
                         GradedLineElement(np.asarray(dual_word, dtype=float), 1.0, True))
    element.ratio_to(reference.element)
    return DetElement(reference.operator, float(delta), element)


def det_chart_change(x: DetElement, epsilon: float, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> DetElement:
    """sigma_{delta,epsilon}: p (x) q^*  ->  (p ^ w_1..w_m) (x) (J w_m^* ^ .. ^ J w_1^* ^ q^*)."""
    split = singular_split(x.operator, cfg)
    check_det_cutoff(split, epsilon, cfg)
    if epsilon < x.delta:
        return det_move(x, epsilon, cfg)
    W, JW = shell(split, x.delta, epsilon)
    if W.shape[1] == 0:
        return DetElement(x.operator, float(epsilon), x.element)
    plus = wedge_concat(x.plus, GradedLineElement(W, 1.0))
    dual = wedge_concat(GradedLineElement(JW[:, ::-1].copy(), 1.0, True), x.dual)
    logger.debug(f"DET chart change {x.delta:.4g} -> {epsilon:.4g} wedged {W.shape[1]} pair(s)")
    return DetElement(x.operator, float(epsilon), LineTensor(plus, dual))


def det_move(x: DetElement, delta: float, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> DetElement:
    """Express x at any admissible chart, downwards through the inverse chart change."""
    if delta >= x.delta:
        return det_chart_change(x, delta, cfg)
    reference = det_reference(x.operator, delta, cfg)
    lifted = det_chart_change(reference, x.delta, cfg)
    return reference.scaled(x.element.ratio_to(lifted.element))


def _same_operator(x: DetElement, y: DetElement) -> None:
    if x.operator.shape != y.operator.shape or not np.allclose(x.operator, y.operator, atol=1e-12):
        raise DimensionMismatchError("Points of determinant lines of different operators")


def det_ratio(x: DetElement, y: DetElement, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> float:
    """r with x = r y, compared at the larger of the two charts."""
    _same_operator(x, y)
    top = max(x.delta, y.delta)
    return float(det_chart_change(x, top, cfg).element.ratio_to(det_chart_change(y, top, cfg).element))


def det_equal(x: DetElement, y: DetElement, tol: float = 1e-9,
              cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> bool:
    return abs(det_ratio(x, y, cfg) - 1.0) <= tol


def det_orientation(x: DetElement, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> int:
    """Sign of x against the reference point of its chart."""
    r = float(x.element.ratio_to(det_reference(x.operator, x.delta, cfg).element))
    return 1 if r > 0 else -1


def det_adjoint_pairing(z: DetElement, x: DetElement, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> float:
    """DET(D^*) -> DET(D)^*: z = a (x) b^* paired with x = p (x) q^* gives <p, b^*><a, q^*>."""
    if z.operator.shape != x.operator.T.shape or not np.allclose(z.operator, x.operator.T, atol=1e-12):
        raise DimensionMismatchError("First argument must lie in DET of the adjoint")
    top = max(z.delta, x.delta)
    z = det_chart_change(z, top, cfg)
    x = det_chart_change(x, top, cfg)
    return float(eval_pairing(x.plus, z.dual) * eval_pairing(z.plus, x.dual))


def det_negative_iso(x: DetElement, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> DetElement:
    """DET(-D) -> DET(D) with sign (-1)^{dim V^-_{[0,delta]}}."""
    dim_minus = x.dual.length
    sign = -1.0 if dim_minus % 2 else 1.0
    return DetElement(-x.operator, x.delta, x.element.scaled(sign))


def _pad(word: np.ndarray, before: int, after: int) -> np.ndarray:
    return np.vstack([np.zeros((before, word.shape[1])), word, np.zeros((after, word.shape[1]))])


def _common_chart(x: DetElement, y: DetElement, cfg: ToleranceConfig) -> float:
    """Smallest chart at or above both that is admissible for both operators."""
    sx = singular_split(x.operator, cfg)
    sy = singular_split(y.operator, cfg)
    candidate = max(x.delta, y.delta)
    if det_admissible(sx, candidate, cfg) and det_admissible(sy, candidate, cfg):
        return candidate
    values = np.concatenate([sx.nonzero_values(), sy.nonzero_values()])
    for c in admissible_cutoffs(values, cfg, lower=candidate):
        if det_admissible(sx, c, cfg) and det_admissible(sy, c, cfg):
            return c
    raise InadmissibleCutoffError("No common admissible chart", {"start": candidate})


def det_sum_iso(x: DetElement, y: DetElement, convention: str = "derived",
                cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> DetElement:
    """DET D (x) DET D~ -> DET(D + D~): (p ^ p~) (x) (q~^* ^ q^*) with a sign.

    derived: (-1)^{b(a~ + b~)}, which commutes with chart changes.
    printed: (-1)^{b(a + a~)}, kept for comparison.
    Here a, b are dim V^+, dim V^- of D and a~, b~ those of D~.
    """
    if convention not in SUM_CONVENTIONS:
        raise UsageError(f"Unknown sum convention '{convention}'")
    delta = _common_chart(x, y, cfg)
    x = det_chart_change(x, delta, cfg)
    y = det_chart_change(y, delta, cfg)
    a, b = x.plus.length, x.dual.length
    at, bt = y.plus.length, y.dual.length
    exponent = b * (at + bt) if convention == "derived" else b * (a + at)
    sign = -1.0 if exponent % 2 else 1.0

    (r1, c1), (r2, c2) = x.operator.shape, y.operator.shape
    operator = np.zeros((r1 + r2, c1 + c2))
    operator[:r1, :c1] = x.operator
    operator[r1:, c1:] = y.operator
    plus = GradedLineElement(np.hstack([_pad(x.plus.word, 0, c2), _pad(y.plus.word, c1, 0)]),
                             x.plus.coefficient * y.plus.coefficient * sign)
    dual = GradedLineElement(np.hstack([_pad(y.dual.word, r1, 0), _pad(x.dual.word, 0, r2)]),
                             x.dual.coefficient * y.dual.coefficient, True)
    return DetElement(operator, delta, LineTensor(plus, dual))


def det_structure_isos(kind: str, *inputs, **options):
    """Dispatch for the adjoint pairing, the negative iso and the sum iso."""
    if kind == "adjoint":
        return det_adjoint_pairing(*inputs, **options)
    if kind == "negative":
        return det_negative_iso(*inputs, **options)
    if kind == "sum":
        return det_sum_iso(*inputs, **options)
    raise UsageError(f"Unknown DET structure iso '{kind}'")
