"""Boundary normal forms sigma (d/dt + A) of cylinder operators and their gauges."""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.linalg import block_diag

from numeric.fields import COMPLEX_UNIT, ScalarField, field_for_ell
from operators.adapted import ADAPTED_TOL, AdaptedOperator, AdaptednessReport, require_adapted
from utils.errors import AdaptednessError, DimensionMismatchError, VerificationError

logger = logging.getLogger(__name__)

# Real and imaginary parts of C = R^2
_CONJ = np.diag([1.0, -1.0])
_UNIT = COMPLEX_UNIT.astype(float)


@dataclass(frozen=True, eq=False)
class CylinderData:
    """sigma (d/dt + A) on the boundary model W, for a cylinder over an l-adapted D."""
    sigma: np.ndarray
    A: np.ndarray
    ell: int
    struct_I: Optional[np.ndarray] = None
    struct_J: Optional[np.ndarray] = None
    antilinear: bool = False

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    @property
    def field(self) -> ScalarField:
        """Scalars of the cylinder operator, i.e. K(l+1)."""
        return field_for_ell(self.ell + 1)

    @property
    def zeroth_order(self) -> np.ndarray:
        return self.sigma @ self.A

    def with_data(self, sigma: np.ndarray, A: np.ndarray) -> "CylinderData":
        return CylinderData(sigma, A, self.ell, self.struct_I, self.struct_J, self.antilinear)

    def to_dict(self) -> Dict:
        return {"ell": self.ell, "sigma": self.sigma.tolist(), "A": self.A.tolist(),
                "antilinear": self.antilinear}


def _structure(D: AdaptedOperator) -> Tuple[Optional[np.ndarray], Optional[np.ndarray],
                                            Optional[np.ndarray], Optional[np.ndarray]]:
    M = D.matrix
    return M.struct_I, M.struct_J, M.codomain_I, M.codomain_J


def make_cylinder(D: AdaptedOperator) -> CylinderData:
    """Cyl(D) in the normal form (sigma, A), checked for (l+1)-adaptedness."""
    require_adapted(D)
    ell = D.ell
    M = D.entries
    I0, J0, I1, J1 = _structure(D)
    n_in, n_out = M.shape[1], M.shape[0]

    if ell == 0:
        sigma = block_diag(np.eye(n_in), -np.eye(n_out))
        A = np.block([[np.zeros((n_in, n_in)), M.T], [M, np.zeros((n_out, n_out))]])
        cyl = CylinderData(sigma, A, ell)
    elif ell == 1:
        eye = np.eye(n_in)
        cyl = CylinderData(np.kron(eye, _CONJ), np.kron(M, _UNIT), ell,
                           struct_I=np.kron(eye, _UNIT), antilinear=True)
    elif ell == 2:
        zero = np.zeros((n_in, n_in))
        eye = np.eye(n_in)
        IM = I0 @ M
        sigma = -block_diag(I0, I0)
        A = np.block([[zero, IM], [-IM, zero]])
        cyl = CylinderData(sigma, A, ell, struct_I=block_diag(I0, -I0),
                           struct_J=np.block([[zero, -eye], [eye, zero]]))
    elif ell in (3, 7):
        cyl = CylinderData(np.eye(n_in), M.copy(), ell, struct_I=I0, struct_J=J0)
    elif ell == 4:
        B = I1 @ M
        sigma = block_diag(I0, -I1)
        A = np.block([[np.zeros((n_in, n_in)), B.T], [B, np.zeros((n_out, n_out))]])
        cyl = CylinderData(sigma, A, ell, struct_I=block_diag(I0, I1), struct_J=block_diag(J0, -J1))
    elif ell == 5:
        cyl = CylinderData(J0.copy(), M.copy(), ell, struct_I=I0, antilinear=True)
    else:
        cyl = CylinderData(I0.copy(), M.copy(), ell)

    report = check_cylinder_adapted(cyl)
    if not report.passed:
        raise AdaptednessError(f"Cyl(D) is not {(ell + 1) % 8}-adapted: {report.failures()}", report.to_dict())
    logger.debug(f"Cylinder for l={ell}: dim W = {cyl.dim}")
    return cyl


def _n(M: np.ndarray) -> float:
    return float(np.linalg.norm(M)) if M.size else 0.0


def _relation(M: np.ndarray, S: Optional[np.ndarray], sign: int) -> float:
    if S is None:
        return 0.0
    return _n(M @ S - sign * S @ M)


def check_cylinder_adapted(cyl: CylinderData, tol: float = ADAPTED_TOL) -> AdaptednessReport:
    """(l+1)-case conditions on the formal coefficients (sigma, sigma A)."""
    target = (cyl.ell + 1) % 8
    sigma, M0 = cyl.sigma, cyl.zeroth_order
    I, J = cyl.struct_I, cyl.struct_J
    eye = np.eye(cyl.dim)
    defects: Dict[str, float] = {
        "sigma_orthogonal": _n(sigma.T @ sigma - eye),
        "A_symmetric": _n(cyl.A - cyl.A.T)
    }
    if target in (1, 2):
        defects["sigma_symmetric"] = _n(sigma - sigma.T)
        defects["zeroth_skew"] = _n(M0 + M0.T)
    elif target in (3, 5, 6, 7):
        defects["sigma_skew"] = _n(sigma + sigma.T)
        defects["zeroth_symmetric"] = _n(M0 - M0.T)
    if target == 2:
        defects["anticommutes_I"] = _relation(sigma, I, -1) + _relation(M0, I, -1)
    if target in (3, 4):
        defects["commutes_I"] = _relation(sigma, I, 1) + _relation(M0, I, 1)
        defects["commutes_J"] = _relation(sigma, J, 1) + _relation(M0, J, 1)
    if target == 5:
        defects["commutes_I"] = _relation(sigma, I, 1) + _relation(M0, I, 1)
        defects["anticommutes_J"] = _relation(sigma, J, -1) + _relation(M0, J, -1)
    if target == 6:
        defects["anticommutes_I"] = _relation(sigma, I, -1) + _relation(M0, I, -1)
    if anticommuting(cyl.ell):
        defects["sigma_A_anticommute"] = _n(sigma @ cyl.A + cyl.A @ sigma)
    scale = max(1.0, _n(cyl.A))
    return AdaptednessReport(target, defects, tol * scale * 10)


def anticommuting(ell: int) -> bool:
    """Cases where sigma and A anticommute and D_Y is formally (skew-)self-adjoint."""
    return ell % 8 in (0, 1, 2, 4, 5, 6)


@dataclass(frozen=True, eq=False)
class GaugeIso:
    """Pair (Phi0, Phi1) acting on values and on targets of a first-order operator."""
    Phi0: np.ndarray
    Phi1: np.ndarray

    def conjugate(self, cyl: CylinderData) -> CylinderData:
        """Phi1 sigma Phi0^T and Phi0 A Phi0^T."""
        return cyl.with_data(self.Phi1 @ cyl.sigma @ self.Phi0.T, self.Phi0 @ cyl.A @ self.Phi0.T)

    def reflected(self, cyl: CylinderData) -> Tuple[np.ndarray, np.ndarray]:
        """Far-end data (-sigma, -A) carried by the gauge."""
        return self.Phi1 @ (-cyl.sigma) @ self.Phi0.T, self.Phi0 @ (-cyl.A) @ self.Phi0.T

    def to_dict(self) -> Dict:
        return {"Phi0": self.Phi0.tolist(), "Phi1": self.Phi1.tolist()}


def _reflect_gauge(D: AdaptedOperator) -> GaugeIso:
    ell = D.ell
    M = D.entries
    n_in, n_out = M.shape[1], M.shape[0]
    if ell == 0:
        S = np.block([[np.zeros((n_out, n_in)), np.eye(n_out)],
                      [np.eye(n_in), np.zeros((n_in, n_out))]])
        return GaugeIso(S, S)
    if ell == 1:
        Phi = np.kron(np.eye(n_in), _UNIT)
        return GaugeIso(Phi, Phi)
    if ell == 2:
        I0 = D.matrix.struct_I
        Phi = block_diag(I0, I0)
        return GaugeIso(Phi, -Phi)
    if ell == 4:
        Phi = np.block([[np.zeros((n_out, n_in)), -np.eye(n_out)],
                        [np.eye(n_in), np.zeros((n_in, n_out))]])
        return GaugeIso(Phi, Phi)
    eye = np.eye(n_in)
    return GaugeIso(eye, -eye)


def reflect_iso(D: AdaptedOperator, tol: float = 1e-10) -> GaugeIso:
    """Gauge witnessing that the reversed collar of Cyl(D) is Cyl(-D^*)."""
    cyl = make_cylinder(D)
    gauge = _reflect_gauge(D)
    target = make_cylinder(D.negative_adjoint())
    sigma, A = gauge.reflected(cyl)
    if sigma.shape != target.sigma.shape:
        raise DimensionMismatchError(f"Reflected model has shape {sigma.shape}, expected {target.sigma.shape}")
    residual = max(_n(sigma - target.sigma), _n(A - target.A))
    if residual > tol * max(1.0, _n(cyl.A)):
        raise VerificationError(f"Reflection gauge fails for l={D.ell}",
                                {"ell": D.ell, "residual": residual})
    return gauge


def cylinder_sum(c1: CylinderData, c2: CylinderData) -> CylinderData:
    """Block-diagonal sum of cylinder data over the same l."""
    if c1.ell != c2.ell:
        raise DimensionMismatchError(f"Cannot add cylinders over l={c1.ell} and l={c2.ell}")

    def _blk(a, b, da, db):
        if a is None and b is None:
            return None
        return block_diag(np.zeros((da, da)) if a is None else a, np.zeros((db, db)) if b is None else b)

    d1, d2 = c1.dim, c2.dim
    return CylinderData(block_diag(c1.sigma, c2.sigma), block_diag(c1.A, c2.A), c1.ell,
                        _blk(c1.struct_I, c2.struct_I, d1, d2), _blk(c1.struct_J, c2.struct_J, d1, d2),
                        c1.antilinear or c2.antilinear)
