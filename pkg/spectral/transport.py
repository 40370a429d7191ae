"""Transport of DET, PF and SP points along sampled operator paths.

Each step picks a chart delta whose distance to the spectrum of the left
sample exceeds the operator-norm distance to the right sample (so by Weyl
the chart stays admissible across the step), moves the point to delta and
carries its words across by orthogonal projection. Steps without such a
chart are bisected.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Union

import numpy as np

from config import MAX_REFINEMENT_DEPTH
from numeric.fields import ScalarField, as_array
from numeric.spectral import admissible_cutoffs, eig_selfadjoint, operator_norm
from numeric.subspaces import Subspace
from numeric.tolerances import DEFAULT_TOLERANCES, ToleranceConfig
from signs.graded_lines import GradedLineElement, LineTensor
from spectral.det_lines import DetElement, chart_bases, det_chart_change, det_move, det_reference, singular_split
from spectral.pfaffian_lines import PfElement, pf_chart_change, pf_reference, pf_space, skew_spectrum
from spectral.spectral_torsor import SpElement, kcount, sp_chart, sp_make
from utils.errors import DimensionMismatchError, InadmissibleCutoffError, TransportError, UsageError

logger = logging.getLogger(__name__)

TransportPoint = Union[DetElement, PfElement, SpElement]

# Projected frames below this smallest singular value trigger refinement
MIN_FRAME_SINGULAR = 0.5


@dataclass(frozen=True, eq=False)
class OperatorPath:
    """Samples of a continuous family at increasing parameters.

    When a generating function is known, refinement evaluates it; otherwise
    the path is taken piecewise linear between samples.
    """
    samples: List[np.ndarray]
    parameters: List[float]
    function: Optional[Callable[[float], np.ndarray]] = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.samples) != len(self.parameters) or not self.samples:
            raise UsageError("An operator path needs one parameter per sample")
        shape = self.samples[0].shape
        if any(s.shape != shape for s in self.samples):
            raise DimensionMismatchError("Path samples must share one shape")

    @classmethod
    def from_samples(cls, samples: Sequence, step: float = 1.0) -> "OperatorPath":
        arrays = [as_array(s).copy() for s in samples]
        return cls(arrays, [k * step for k in range(len(arrays))])

    @classmethod
    def from_function(cls, f: Callable[[float], np.ndarray], t0: float, t1: float,
                      step: float) -> "OperatorPath":
        count = max(1, int(np.ceil(abs(t1 - t0) / step)))
        ts = list(np.linspace(t0, t1, count + 1))
        return cls([as_array(f(t)).copy() for t in ts], [float(t) for t in ts], f)

    @classmethod
    def constant(cls, D, length: int = 2) -> "OperatorPath":
        return cls.from_samples([as_array(D)] * length)

    @property
    def start(self) -> np.ndarray:
        return self.samples[0]

    @property
    def end(self) -> np.ndarray:
        return self.samples[-1]

    def evaluate_between(self, k: int, s: float) -> np.ndarray:
        """Operator at fraction s of step k."""
        t0, t1 = self.parameters[k], self.parameters[k + 1]
        if self.function is not None:
            return as_array(self.function(t0 + s * (t1 - t0)))
        return (1 - s) * self.samples[k] + s * self.samples[k + 1]

    def max_step_norm(self) -> float:
        return max((operator_norm(b - a) for a, b in zip(self.samples, self.samples[1:])), default=0.0)

    def concatenate(self, other: "OperatorPath") -> "OperatorPath":
        if not np.allclose(self.end, other.start, atol=1e-12):
            raise UsageError("Paths do not meet")
        offset = self.parameters[-1] - other.parameters[0]
        return OperatorPath(self.samples + other.samples[1:],
                            self.parameters + [t + offset for t in other.parameters[1:]])

    def reversed(self) -> "OperatorPath":
        t_end = self.parameters[-1]
        return OperatorPath(self.samples[::-1], [t_end - t for t in self.parameters[::-1]])


def _spectrum_values(x: TransportPoint, A: np.ndarray, cfg: ToleranceConfig) -> np.ndarray:
    if isinstance(x, SpElement):
        return eig_selfadjoint(A, cfg).eigenvalues
    # zero counts when the kernel exceeds the dimension forced by the shape
    if isinstance(x, PfElement):
        spectrum = skew_spectrum(A, cfg)
        values = list(spectrum.values)
        if spectrum.kernel.shape[1] > A.shape[0] % 2:
            values.append(0.0)
        return np.array(values)
    split = singular_split(A, cfg)
    values = list(split.nonzero_values())
    if len(values) < min(A.shape):
        values.append(0.0)
    return np.array(values)


def _candidate_cutoffs(x: TransportPoint, values: np.ndarray, cfg: ToleranceConfig) -> List[float]:
    """Current chart first, then gap midpoints ordered by distance to it."""
    if isinstance(x, SpElement):
        lower = float(values.min()) - 1.0 if values.size else x.delta - 1.0
        candidates = [lower] + admissible_cutoffs(values, cfg, lower=lower)
    else:
        candidates = [0.0] + admissible_cutoffs(values, cfg, lower=0.0)
    candidates.sort(key=lambda c: abs(c - x.delta))
    return [x.delta] + candidates


def _choose_cutoff(x: TransportPoint, A0: np.ndarray, A1: np.ndarray,
                   cfg: ToleranceConfig) -> Optional[float]:
    values = _spectrum_values(x, A0, cfg)
    margin = operator_norm(A1 - A0) + cfg.gap_tol
    for c in _candidate_cutoffs(x, values, cfg):
        distance = float(np.min(np.abs(values - c))) if values.size else float("inf")
        if distance > margin:
            return c
    return None


def _project_word(word: np.ndarray, target: np.ndarray) -> Optional[np.ndarray]:
    """Orthogonal projection of word onto span(target); None when badly conditioned."""
    if word.shape[1] == 0:
        return word
    projected = target @ (target.T @ word)
    source = Subspace.span(word).basis
    overlap = np.linalg.svd(target.T @ source, compute_uv=False)
    if overlap.size and overlap.min() < MIN_FRAME_SINGULAR:
        return None
    return projected


def _carry(x: TransportPoint, A1: np.ndarray, delta: float, cfg: ToleranceConfig) -> Optional[TransportPoint]:
    """x already at chart delta for its own operator, carried to A1."""
    if isinstance(x, SpElement):
        return sp_make(A1, x.m, delta, cfg, x.field, x.modulus)
    if isinstance(x, PfElement):
        target = pf_space(skew_spectrum(A1, cfg), delta)
        word = _project_word(x.element.word, target)
        if word is None:
            return None
        reference = pf_reference(A1, delta, cfg)
        moved = GradedLineElement(word, x.element.coefficient)
        return reference.scaled(moved.ratio_to(reference.element))
    plus_basis, minus_basis = chart_bases(singular_split(A1, cfg), delta)
    plus = _project_word(x.plus.word, plus_basis)
    dual = _project_word(x.dual.word, minus_basis)
    if plus is None or dual is None:
        return None
    reference = det_reference(A1, delta, cfg)
    moved = LineTensor(GradedLineElement(plus, x.plus.coefficient),
                       GradedLineElement(dual, x.dual.coefficient, True))
    return reference.scaled(moved.ratio_to(reference.element))


def _move(x: TransportPoint, delta: float, cfg: ToleranceConfig) -> TransportPoint:
    if isinstance(x, SpElement):
        return sp_chart(x, delta, cfg)
    if isinstance(x, PfElement):
        return pf_chart_change(x, delta, cfg)
    return det_move(x, delta, cfg)


def _with_operator(x: TransportPoint, A: np.ndarray) -> bool:
    return x.operator.shape == A.shape and np.allclose(x.operator, A, atol=1e-12)


def _step(x: TransportPoint, path: OperatorPath, k: int, s0: float, s1: float,
          cfg: ToleranceConfig, depth: int) -> TransportPoint:
    A0 = path.evaluate_between(k, s0) if s0 > 0 else path.samples[k]
    A1 = path.evaluate_between(k, s1) if s1 < 1 else path.samples[k + 1]
    delta = _choose_cutoff(x, A0, A1, cfg)
    carried = None
    if delta is not None:
        carried = _carry(_move(x, delta, cfg), A1, delta, cfg)
    if carried is not None:
        return carried
    if depth >= MAX_REFINEMENT_DEPTH:
        raise TransportError(f"No shared chart on step {k} after {depth} refinements",
                             {"step": k, "s0": s0, "s1": s1})
    mid = (s0 + s1) / 2.0
    logger.debug(f"Refining step {k} at depth {depth + 1}: [{s0:.4g}, {s1:.4g}]")
    halfway = _step(x, path, k, s0, mid, cfg, depth + 1)
    return _step(halfway, path, k, mid, s1, cfg, depth + 1)


def transport_along_path(path: OperatorPath, start: TransportPoint,
                         cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> TransportPoint:
    """Carry start from the first to the last sample; the result keeps its last chart."""
    if not _with_operator(start, path.start):
        raise DimensionMismatchError("Start point does not lie over the first path sample")
    x = start
    for k in range(len(path.samples) - 1):
        if np.array_equal(path.samples[k], path.samples[k + 1]):
            continue
        x = _step(x, path, k, 0.0, 1.0, cfg, 0)
    return x


def spectral_flow(path: OperatorPath, cutoff: float = 0.0, cfg: ToleranceConfig = DEFAULT_TOLERANCES,
                  field: ScalarField = ScalarField.R) -> int:
    """Net number of eigenvalues crossing cutoff upwards, read off SP transport."""
    start = sp_make(path.start, 0, cutoff, cfg, field)
    end = transport_along_path(path, start, cfg)
    try:
        end = sp_chart(end, cutoff, cfg)
    except InadmissibleCutoffError:
        raise InadmissibleCutoffError(f"Cutoff {cutoff} lies in the spectrum at the path end")
    return -end.m


def crossing_count_flow(path: OperatorPath, cutoff: float = 0.0, cfg: ToleranceConfig = DEFAULT_TOLERANCES,
                        field: ScalarField = ScalarField.R) -> int:
    """Oracle: change in the K-count of eigenvalues above cutoff between the path ends."""
    first = eig_selfadjoint(path.start, cfg, field)
    last = eig_selfadjoint(path.end, cfg, field)
    return kcount(last, cutoff, np.inf) - kcount(first, cutoff, np.inf)


def sp_mod2_orientation(x: SpElement, lam: Optional[float] = None,
                        cfg: ToleranceConfig = DEFAULT_TOLERANCES, step: Optional[float] = None) -> DetElement:
    """Orientation of DET_R D attached to [m + 2Z, lambda].

    The reference orientation of DET(D - lambda) at chart 0 is transported
    along t -> D - t lambda from t = 1 to t = 0 and multiplied by (-1)^m.
    """
    if x.field is not ScalarField.R:
        raise UsageError("sp_mod2_orientation needs a real self-adjoint model")
    lam = x.delta if lam is None else float(lam)
    m = sp_chart(x, lam, cfg).m
    D = x.operator
    eye = np.eye(D.shape[0])
    start = det_reference(D - lam * eye, 0.0, cfg)
    path = OperatorPath.from_function(lambda t: D - (1.0 - t) * lam * eye, 0.0, 1.0,
                                      step or cfg.path_step)
    end = transport_along_path(path, start, cfg)
    sign = -1.0 if m % 2 else 1.0
    logger.debug(f"mod-2 orientation: lambda={lam:.4g}, m={m}")
    return end.scaled(sign)
