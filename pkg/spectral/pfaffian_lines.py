"""Pfaffian lines PF D of skew-adjoint real models in delta-charts."""

import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from numeric.fields import as_array
from numeric.spectral import admissible_cutoffs, eig_selfadjoint
from numeric.subspaces import Subspace
from numeric.tolerances import DEFAULT_TOLERANCES, ToleranceConfig
from signs.graded_lines import GradedLineElement, eval_pairing, omega_of_J, wedge_concat
from utils.errors import DimensionMismatchError, InadmissibleCutoffError, UsageError

logger = logging.getLogger(__name__)


def check_skew(D, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> np.ndarray:
    A = as_array(D)
    if A.shape[0] != A.shape[1]:
        raise DimensionMismatchError(f"Pfaffian line needs a square model, got {A.shape}")
    if np.linalg.norm(A + A.T) > cfg.eig_tol * max(1.0, float(np.linalg.norm(A))):
        raise UsageError("Operator is not skew-adjoint",
                         {"defect": float(np.linalg.norm(A + A.T))})
    return (A - A.T) / 2.0


@dataclass(frozen=True, eq=False)
class SkewSpectrum:
    """Clusters of singular values s of a skew D, i.e. eigenvalues -s^2 of D^2."""
    operator: np.ndarray
    values: Tuple[float, ...]
    spaces: Tuple[np.ndarray, ...]
    kernel: np.ndarray

    def distance(self, delta: float) -> float:
        return min((abs(v - delta) for v in self.values), default=float("inf"))


def skew_spectrum(D, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> SkewSpectrum:
    A = check_skew(D, cfg)
    n = A.shape[0]
    if n == 0:
        return SkewSpectrum(A, tuple(), tuple(), np.zeros((0, 0)))
    model = eig_selfadjoint(A.T @ A, cfg)
    zero_tol = cfg.rank_tol * max(1.0, float(np.linalg.norm(A, 2)))
    kernel_blocks: List[np.ndarray] = []
    values: List[float] = []
    spaces: List[np.ndarray] = []
    for c in model.clusters:
        s = float(np.sqrt(max(c.value, 0.0)))
        if s <= zero_tol:
            kernel_blocks.append(c.basis)
        else:
            values.append(s)
            spaces.append(c.basis)
    kernel = np.hstack(kernel_blocks) if kernel_blocks else np.zeros((n, 0))
    return SkewSpectrum(A, tuple(values), tuple(spaces), Subspace(kernel).canonical_basis())


def check_pf_cutoff(spectrum: SkewSpectrum, delta: float, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> None:
    if delta < 0 or spectrum.distance(delta) < cfg.gap_tol:
        raise InadmissibleCutoffError(f"Cutoff {delta:.6g} is not admissible for the Pfaffian line",
                                      {"cutoff": delta, "distance": spectrum.distance(delta)})


def pf_space(spectrum: SkewSpectrum, delta: float) -> np.ndarray:
    """Basis of V_{[0,delta]}: kernel first, then ascending |eigenvalue|."""
    blocks = [spectrum.kernel] + [B for v, B in zip(spectrum.values, spectrum.spaces) if v <= delta]
    return np.hstack(blocks)


def pf_shell_structure(spectrum: SkewSpectrum, lo: float, hi: float) -> Tuple[Subspace, np.ndarray]:
    """V_{(lo,hi]} with J = D/s on each cluster."""
    n = spectrum.operator.shape[0]
    J = np.zeros((n, n))
    blocks = []
    for v, B in zip(spectrum.values, spectrum.spaces):
        if lo < v <= hi:
            blocks.append(B)
            J += spectrum.operator @ (B @ B.T) / v
    V = Subspace(np.hstack(blocks)) if blocks else Subspace.zero(n)
    return V, J


@dataclass(frozen=True, eq=False)
class PfElement:
    operator: np.ndarray
    delta: float
    element: GradedLineElement

    def scaled(self, factor: float) -> "PfElement":
        return PfElement(self.operator, self.delta, self.element.scaled(factor))

    def to_dict(self) -> dict:
        return {"delta": self.delta, "element": self.element.to_dict()}


def pf_reference(D, delta: float, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> PfElement:
    spectrum = skew_spectrum(D, cfg)
    check_pf_cutoff(spectrum, delta, cfg)
    return PfElement(spectrum.operator, float(delta), GradedLineElement(pf_space(spectrum, delta), 1.0))


def pf_make(D, delta: float, word: np.ndarray, coefficient: float = 1.0,
            cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> PfElement:
    reference = pf_reference(D, delta, cfg)
    element = GradedLineElement(np.asarray(word, dtype=float), coefficient)
    element.ratio_to(reference.element)
    return PfElement(reference.operator, float(delta), element)


def smallest_pf_cutoff(D, cfg: ToleranceConfig = DEFAULT_TOLERANCES, start: float = 0.0) -> float:
    spectrum = skew_spectrum(D, cfg)
    if spectrum.distance(start) >= cfg.gap_tol:
        return start
    return admissible_cutoffs(np.array(spectrum.values), cfg, lower=start)[0]


def pf_chart_change(x: PfElement, epsilon: float, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> PfElement:
    """v -> v ^ omega(J_{(delta, epsilon]}); downward moves use the inverse."""
    spectrum = skew_spectrum(x.operator, cfg)
    check_pf_cutoff(spectrum, epsilon, cfg)
    if epsilon < x.delta:
        reference = pf_reference(x.operator, epsilon, cfg)
        lifted = pf_chart_change(reference, x.delta, cfg)
        return reference.scaled(x.element.ratio_to(lifted.element))
    V, J = pf_shell_structure(spectrum, x.delta, epsilon)
    if V.dim == 0:
        return PfElement(x.operator, float(epsilon), x.element)
    logger.debug(f"PF chart change {x.delta:.4g} -> {epsilon:.4g} wedged omega of dim {V.dim}")
    return PfElement(x.operator, float(epsilon), wedge_concat(x.element, omega_of_J(J, V)))


def pf_ratio(x: PfElement, y: PfElement, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> float:
    if x.operator.shape != y.operator.shape or not np.allclose(x.operator, y.operator, atol=1e-12):
        raise DimensionMismatchError("Points of Pfaffian lines of different operators")
    top = max(x.delta, y.delta)
    return float(pf_chart_change(x, top, cfg).element.ratio_to(pf_chart_change(y, top, cfg).element))


def pf_equal(x: PfElement, y: PfElement, tol: float = 1e-9, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> bool:
    return abs(pf_ratio(x, y, cfg) - 1.0) <= tol


def pf_orientation(x: PfElement, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> int:
    r = float(x.element.ratio_to(pf_reference(x.operator, x.delta, cfg).element))
    return 1 if r > 0 else -1


def pf_dual(x: PfElement) -> GradedLineElement:
    """PF(D) -> PF(-D)^*: v_1 ^ ... ^ v_n -> v_1^flat ^ ... ^ v_n^flat."""
    return GradedLineElement(x.element.word.copy(), x.element.coefficient, True)


def pf_dual_pairing(y: PfElement, x: PfElement, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> float:
    """<y, pf_dual(x)> for y in PF(-D) and x in PF(D), on a common chart."""
    if not np.allclose(y.operator, -x.operator, atol=1e-12):
        raise DimensionMismatchError("First argument must lie in PF of the negative operator")
    top = max(x.delta, y.delta)
    x = pf_chart_change(x, top, cfg)
    y = pf_chart_change(y, top, cfg)
    return float(eval_pairing(y.element, pf_dual(x)))


def pf_sum(x: PfElement, y: PfElement, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> PfElement:
    """PF D (x) PF D~ -> PF(D + D~): (omega, 0) ^ (0, omega~)."""
    s1, s2 = skew_spectrum(x.operator, cfg), skew_spectrum(y.operator, cfg)
    delta = max(x.delta, y.delta)
    if s1.distance(delta) < cfg.gap_tol or s2.distance(delta) < cfg.gap_tol:
        values = np.array(s1.values + s2.values)
        delta = next(c for c in admissible_cutoffs(values, cfg, lower=delta)
                     if s1.distance(c) >= cfg.gap_tol and s2.distance(c) >= cfg.gap_tol)
    x = pf_chart_change(x, delta, cfg)
    y = pf_chart_change(y, delta, cfg)
    n1, n2 = x.operator.shape[0], y.operator.shape[0]
    operator = np.zeros((n1 + n2, n1 + n2))
    operator[:n1, :n1] = x.operator
    operator[n1:, n1:] = y.operator
    left = np.vstack([x.element.word, np.zeros((n2, x.element.length))])
    right = np.vstack([np.zeros((n1, y.element.length)), y.element.word])
    word = np.hstack([left, right])
    return PfElement(operator, delta, GradedLineElement(word, x.element.coefficient * y.element.coefficient))


def pf_structure_isos(kind: str, *inputs, **options):
    if kind == "dual":
        return pf_dual(*inputs)
    if kind == "dual_pairing":
        return pf_dual_pairing(*inputs, **options)
    if kind == "sum":
        return pf_sum(*inputs, **options)
    raise UsageError(f"Unknown PF structure iso '{kind}'")
