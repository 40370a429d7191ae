"""Spectral Z-torsors SP D of self-adjoint models and their mod-k quotients.

A point is a class [m, delta] with delta off the spectrum, where
[m, delta] ~ [n, epsilon] for delta < epsilon iff n - m = dim_K Eig_{[delta, epsilon]}.
"""

import logging
from dataclasses import dataclass
from typing import List

import numpy as np

from numeric.fields import ScalarField
from numeric.spectral import SelfAdjointModel, admissible_cutoffs, eig_selfadjoint
from numeric.tolerances import DEFAULT_TOLERANCES, ToleranceConfig
from utils.errors import DimensionMismatchError, InadmissibleCutoffError, UsageError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SpElement:
    """[m, delta] in SP_K D; modulus 0 means Z, k >= 2 the quotient Z/k."""
    model: SelfAdjointModel
    m: int
    delta: float
    modulus: int = 0

    @property
    def operator(self) -> np.ndarray:
        return self.model.operator

    @property
    def field(self) -> ScalarField:
        return self.model.multiplicity_field

    def to_dict(self) -> dict:
        return {"m": self.m, "delta": self.delta, "modulus": self.modulus, "field": self.field.value}


def _reduce(m: int, modulus: int) -> int:
    return int(m) % modulus if modulus else int(m)


def kcount(model: SelfAdjointModel, lo: float, hi: float) -> int:
    """dim_K of the eigenspaces in [lo, hi]."""
    real = model.count_in(lo, hi)
    k = model.multiplicity_field.real_dim
    if real % k:
        raise DimensionMismatchError(f"Eigenspace of real dim {real} is not a {model.multiplicity_field.value}-module")
    return real // k


def _check_cutoff(model: SelfAdjointModel, delta: float, cfg: ToleranceConfig) -> None:
    if model.distance_to_spectrum(delta) < cfg.gap_tol:
        raise InadmissibleCutoffError(f"Cutoff {delta:.6g} lies in the spectrum",
                                      {"cutoff": delta, "distance": model.distance_to_spectrum(delta)})


def sp_make(D, m: int, delta: float, cfg: ToleranceConfig = DEFAULT_TOLERANCES,
            field: ScalarField = ScalarField.R, modulus: int = 0) -> SpElement:
    model = D if isinstance(D, SelfAdjointModel) else eig_selfadjoint(D, cfg, field)
    _check_cutoff(model, delta, cfg)
    return SpElement(model, _reduce(m, modulus), float(delta), modulus)


def sp_chart(x: SpElement, epsilon: float, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> SpElement:
    """The representative of x at chart epsilon."""
    _check_cutoff(x.model, epsilon, cfg)
    if epsilon >= x.delta:
        n = x.m + kcount(x.model, x.delta, epsilon)
    else:
        n = x.m - kcount(x.model, epsilon, x.delta)
    return SpElement(x.model, _reduce(n, x.modulus), float(epsilon), x.modulus)


def sp_equal(x: SpElement, y: SpElement, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> bool:
    if x.modulus != y.modulus or not np.allclose(x.operator, y.operator, atol=1e-12):
        return False
    return sp_chart(x, y.delta, cfg).m == y.m


def common_cutoff(models: List[SelfAdjointModel], start: float,
                  cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> float:
    """start if it is admissible for every model, else the first shared gap midpoint above it."""
    if all(model.distance_to_spectrum(start) >= cfg.gap_tol for model in models):
        return start
    values = np.concatenate([model.eigenvalues for model in models])
    for c in admissible_cutoffs(values, cfg, lower=start):
        if all(model.distance_to_spectrum(c) >= cfg.gap_tol for model in models):
            return c
    raise InadmissibleCutoffError("No common admissible cutoff", {"start": start})


def sp_sum(x: SpElement, y: SpElement, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> SpElement:
    """[m, delta] (x) [m~, delta] -> [m + m~, delta] in SP(D + D~)."""
    if x.field != y.field or x.modulus != y.modulus:
        raise DimensionMismatchError("Spectral torsors over different fields or moduli")
    delta = common_cutoff([x.model, y.model], max(x.delta, y.delta), cfg)
    x, y = sp_chart(x, delta, cfg), sp_chart(y, delta, cfg)
    n1, n2 = x.model.dim, y.model.dim
    block = np.zeros((n1 + n2, n1 + n2))
    block[:n1, :n1] = x.operator
    block[n1:, n1:] = y.operator
    return sp_make(block, x.m + y.m, delta, cfg, x.field, x.modulus)


def sp_negative_dual(y: SpElement, x: SpElement, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> int:
    """Pairing of [n, -delta] in SP(-D) with [m, delta] in SP(D): m + n."""
    if not np.allclose(y.operator, -x.operator, atol=1e-12):
        raise DimensionMismatchError("First argument must lie in SP of the negative operator")
    moved = sp_chart(x, -y.delta, cfg)
    return _reduce(moved.m + y.m, x.modulus)


def sp_mod_k(x: SpElement, k: int) -> SpElement:
    """Image in the quotient torsor SP D / kZ."""
    if k < 2:
        raise UsageError(f"Quotient modulus must be at least 2, got {k}")
    if x.modulus and x.modulus % k:
        raise UsageError(f"Cannot reduce Z/{x.modulus} to Z/{k}")
    return SpElement(x.model, _reduce(x.m, k), x.delta, k)


def sp_structure_isos(kind: str, *inputs, **options):
    if kind == "sum":
        return sp_sum(*inputs, **options)
    if kind == "negative_dual":
        return sp_negative_dual(*inputs, **options)
    if kind == "mod_k":
        return sp_mod_k(*inputs, **options)
    raise UsageError(f"Unknown SP structure iso '{kind}'")
