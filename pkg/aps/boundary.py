"""Boundary conditions on the boundary model: APS, nearly APS, graphs and adjoints."""

import logging
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from numeric.spectral import SelfAdjointModel, eig_selfadjoint, spectral_interval
from numeric.subspaces import Subspace, direct_sum
from numeric.tolerances import DEFAULT_TOLERANCES, ToleranceConfig
from utils.errors import DimensionMismatchError, UsageError

logger = logging.getLogger(__name__)

SIDES = (None, "minus", "plus")


@dataclass(frozen=True, eq=False)
class BoundaryCondition:
    """B inside the boundary model, optionally written as B_APS(-delta) + L_delta."""
    subspace: Subspace
    delta: Optional[float] = None
    lagrangian: Optional[Subspace] = None
    label: str = ""

    @property
    def dim(self) -> int:
        return self.subspace.dim

    @property
    def ambient_dim(self) -> int:
        return self.subspace.ambient_dim

    @property
    def is_nearly_aps(self) -> bool:
        return self.delta is not None and self.lagrangian is not None

    def contains(self, other: "BoundaryCondition") -> bool:
        return self.subspace.contains_subspace(other.subspace)

    def to_dict(self) -> Dict:
        data = {"dim": self.dim, "ambient_dim": self.ambient_dim, "label": self.label}
        if self.is_nearly_aps:
            data.update({"delta": self.delta, "lagrangian_dim": self.lagrangian.dim})
        return data


def _model(A, cfg: ToleranceConfig) -> SelfAdjointModel:
    return A if isinstance(A, SelfAdjointModel) else eig_selfadjoint(A, cfg)


def aps(A, delta: float, cfg: ToleranceConfig = DEFAULT_TOLERANCES,
        side: Optional[str] = None) -> BoundaryCondition:
    """B_APS(delta) = Eig_(-inf, delta)(A).

    side=None needs delta off the spectrum; 'minus' and 'plus' allow an
    eigenvalue at delta and read the cutoff as delta^- (excluded) or
    delta^+ (included).
    """
    if side not in SIDES:
        raise UsageError(f"Unknown cutoff side '{side}'")
    model = _model(A, cfg)
    if side is None:
        B = spectral_interval(model, -np.inf, delta, cfg, include_hi=False)
    else:
        B = spectral_interval(model, -np.inf, delta, cfg, include_hi=(side == "plus"), check=False)
    width = abs(float(delta))
    if side is None and delta > 0 and model.distance_to_spectrum(-delta) >= cfg.gap_tol:
        L = spectral_interval(model, -width, width, cfg, include_hi=False)
        return BoundaryCondition(B, width, L, f"APS({delta:.4g})")
    if side is None and delta <= 0:
        return BoundaryCondition(B, width, Subspace.zero(model.dim, cfg.rank_tol), f"APS({delta:.4g})")
    return BoundaryCondition(B, label=f"APS({delta:.4g}{side or ''})")


def small_eigenspace(A, delta: float, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> Subspace:
    """W_delta = Eig_[-delta, delta](A)."""
    return spectral_interval(_model(A, cfg), -delta, delta, cfg)


def nearly_aps(A, delta: float, L: Subspace, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> BoundaryCondition:
    """B_APS(-delta) + L with L inside Eig_[-delta, delta](A)."""
    if delta < 0:
        raise UsageError(f"Nearly APS cutoff must be non-negative, got {delta}")
    model = _model(A, cfg)
    W = spectral_interval(model, -delta, delta, cfg)
    if L.ambient_dim != model.dim:
        raise DimensionMismatchError(f"L_delta lives in dimension {L.ambient_dim}, boundary has {model.dim}")
    if not W.contains_subspace(L):
        raise UsageError("L_delta is not contained in Eig_[-delta, delta]", {"delta": delta})
    lower = spectral_interval(model, -np.inf, -delta, cfg, include_hi=False)
    B = lower.join(L)
    return BoundaryCondition(B, float(delta), L, f"nearlyAPS({delta:.4g}, dim L={L.dim})")


def restate(B: BoundaryCondition, epsilon: float, A,
            cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> BoundaryCondition:
    """Rewrite B_APS(-delta) + L_delta as B_APS(-epsilon) + L_epsilon for epsilon >= delta.

    epsilon within gap_tol below delta is read as delta itself.
    """
    if not B.is_nearly_aps:
        raise UsageError("Only nearly APS conditions can be restated")
    if epsilon < B.delta - cfg.gap_tol:
        raise UsageError(f"Cannot restate from {B.delta} down to {epsilon}")
    epsilon = max(float(epsilon), B.delta)
    model = _model(A, cfg)
    shell = spectral_interval(model, -epsilon, -B.delta, cfg, include_hi=False)
    restated = nearly_aps(model, epsilon, shell.join(B.lagrangian), cfg)
    if not restated.subspace.equals(B.subspace):
        raise UsageError("Restated condition differs from the original", {"delta": B.delta, "epsilon": epsilon})
    return restated


def adjoint_bc(B: BoundaryCondition, sigma: np.ndarray) -> BoundaryCondition:
    """B^adj = sigma(B)^perp."""
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape != (B.ambient_dim, B.ambient_dim):
        raise DimensionMismatchError(f"sigma of shape {sigma.shape} on boundary of dim {B.ambient_dim}")
    return BoundaryCondition(B.subspace.apply(sigma).perp(), label=f"adj({B.label})")


def graph_condition(g: np.ndarray, rank_tol: float = DEFAULT_TOLERANCES.rank_tol) -> BoundaryCondition:
    """Gamma(g) = {(v, g v)}: values at the two ends matched by g."""
    g = np.asarray(g, dtype=float)
    n = g.shape[1]
    return BoundaryCondition(Subspace.span(np.vstack([np.eye(n), g]), rank_tol), label="graph")


def separated(end0: BoundaryCondition, endL: BoundaryCondition) -> BoundaryCondition:
    """end0 + endL on the two ends of a cylinder."""
    return BoundaryCondition(direct_sum(end0.subspace, endL.subspace), label=f"{end0.label}|{endL.label}")
