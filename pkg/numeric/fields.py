"""Scalar fields, the coefficient table and realified structured matrices.

Complex scalars act on R^2 blocks as [[a, -b], [b, a]]; quaternions act on
R^4 blocks (basis 1, i, j, k) by left multiplication. All K-dimensions are
real dimensions divided by dim_R K.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np

from utils.errors import DimensionMismatchError


class ScalarField(Enum):
    """Natural base (skew) field of an adapted operator."""
    R = "R"
    C = "C"
    H = "H"

    @property
    def real_dim(self) -> int:
        return {"R": 1, "C": 2, "H": 4}[self.value]


# Coefficient table indexed by ell mod 8
FIELD_TABLE: Dict[int, ScalarField] = {
    0: ScalarField.R,
    1: ScalarField.R,
    2: ScalarField.C,
    3: ScalarField.H,
    4: ScalarField.H,
    5: ScalarField.H,
    6: ScalarField.C,
    7: ScalarField.R
}

# Orders of the coefficient groups: 0 stands for Z, 2 for Z_2, 1 for the trivial group
GAMMA_ORDERS: Dict[int, int] = {
    0: 0,
    1: 2,
    2: 2,
    3: 1,
    4: 0,
    5: 1,
    6: 1,
    7: 1
}

COMPLEX_UNIT = np.array([[0, -1], [1, 0]], dtype=np.int64)

QUATERNION_I = np.array([
    [0, -1, 0, 0],
    [1, 0, 0, 0],
    [0, 0, 0, -1],
    [0, 0, 1, 0]
], dtype=np.int64)

QUATERNION_J = np.array([
    [0, 0, -1, 0],
    [0, 0, 0, 1],
    [1, 0, 0, 0],
    [0, -1, 0, 0]
], dtype=np.int64)


def field_for_ell(ell: int) -> ScalarField:
    """Field K for ell mod 8."""
    return FIELD_TABLE[ell % 8]


def gamma_order(ell: int) -> int:
    """Order code of Gamma_ell (0 = Z, 2 = Z_2, 1 = trivial)."""
    return GAMMA_ORDERS[ell % 8]


def torsor_orders(ell: int) -> Tuple[int, int]:
    """Order codes of the grading and structure groups (Gamma_ell, Gamma_{ell+1})."""
    return gamma_order(ell), gamma_order(ell + 1)


def complex_structure(k: int) -> np.ndarray:
    """Multiplication by i on C^k realified as R^{2k}."""
    return np.kron(np.eye(k, dtype=np.int64), COMPLEX_UNIT)


def quaternionic_structures(k: int) -> Tuple[np.ndarray, np.ndarray]:
    """Left multiplication by i and j on H^k realified as R^{4k}."""
    eye = np.eye(k, dtype=np.int64)
    return np.kron(eye, QUATERNION_I), np.kron(eye, QUATERNION_J)


def standard_structures(field: ScalarField, real_dim: int) -> Tuple[Optional[np.ndarray], Optional[np.ndarray]]:
    """Standard structure maps for a K-module of the given real dimension."""
    if real_dim % field.real_dim:
        raise DimensionMismatchError(
            f"Real dimension {real_dim} is not divisible by dim_R {field.value} = {field.real_dim}")
    k = real_dim // field.real_dim
    if field is ScalarField.C:
        return complex_structure(k).astype(float), None
    if field is ScalarField.H:
        I, J = quaternionic_structures(k)
        return I.astype(float), J.astype(float)
    return None, None


def realify_complex(Z: np.ndarray) -> np.ndarray:
    """Complex matrix as a real matrix in 2x2 blocks [[a, -b], [b, a]]."""
    Z = np.asarray(Z, dtype=complex)
    return np.kron(Z.real, np.eye(2)) + np.kron(Z.imag, COMPLEX_UNIT.astype(float))


def conjugation_projection(M: np.ndarray, S_in: np.ndarray, S_out: np.ndarray, sign: int = 1) -> np.ndarray:
    """Project M onto the maps with M S_in = sign * S_out M.

    S_in, S_out are orthogonal with square -1, so M -> S_out^{-1} M S_in is an
    involution and the projection is its (sign)-eigenspace average.
    """
    conjugated = -S_out @ M @ S_in
    return (M + sign * conjugated) / 2.0


@dataclass(frozen=True, eq=False)
class StructuredMatrix:
    """Real matrix together with the scalar actions on its domain and codomain."""
    entries: np.ndarray
    field: ScalarField = ScalarField.R
    struct_I: Optional[np.ndarray] = None
    struct_J: Optional[np.ndarray] = None
    target_I: Optional[np.ndarray] = None
    target_J: Optional[np.ndarray] = None

    @classmethod
    def standard(cls, entries: np.ndarray, field: ScalarField = ScalarField.R) -> "StructuredMatrix":
        """Wrap a matrix using the standard structure maps on domain and codomain."""
        entries = np.asarray(entries, dtype=float)
        I_in, J_in = standard_structures(field, entries.shape[1])
        I_out, J_out = standard_structures(field, entries.shape[0])
        return cls(entries, field, I_in, J_in, I_out, J_out)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.entries.shape

    @property
    def dim_in(self) -> int:
        return self.entries.shape[1]

    @property
    def dim_out(self) -> int:
        return self.entries.shape[0]

    @property
    def codomain_I(self) -> Optional[np.ndarray]:
        return self.target_I if self.target_I is not None else self.struct_I

    @property
    def codomain_J(self) -> Optional[np.ndarray]:
        return self.target_J if self.target_J is not None else self.struct_J

    @property
    def kdim_in(self) -> int:
        return self.dim_in // self.field.real_dim

    @property
    def kdim_out(self) -> int:
        return self.dim_out // self.field.real_dim

    def adjoint(self) -> "StructuredMatrix":
        """Transpose, with domain and codomain structures exchanged."""
        return StructuredMatrix(self.entries.T.copy(), self.field,
                                self.codomain_I, self.codomain_J,
                                self.struct_I, self.struct_J)

    def with_entries(self, entries: np.ndarray) -> "StructuredMatrix":
        return StructuredMatrix(np.asarray(entries, dtype=float), self.field,
                                self.struct_I, self.struct_J, self.target_I, self.target_J)

    def structure_defects(self) -> Dict[str, float]:
        """Norms of the structure-map defects: squares, anticommutation, orthogonality."""
        defects: Dict[str, float] = {}
        maps = {"I": self.struct_I, "J": self.struct_J,
                "target_I": self.target_I, "target_J": self.target_J}
        for name, S in maps.items():
            if S is None:
                continue
            eye = np.eye(S.shape[0])
            defects[f"{name}_square"] = float(np.linalg.norm(S @ S + eye))
            defects[f"{name}_orthogonal"] = float(np.linalg.norm(S.T @ S - eye))
        for I, J, label in ((self.struct_I, self.struct_J, "IJ"), (self.target_I, self.target_J, "target_IJ")):
            if I is not None and J is not None:
                defects[f"{label}_anticommute"] = float(np.linalg.norm(I @ J + J @ I))
        return defects

    def linearity_defect(self, which: str = "I", sign: int = 1) -> float:
        """Norm of D S_in - sign * S_out D for S = I or J."""
        S_in = self.struct_I if which == "I" else self.struct_J
        S_out = self.codomain_I if which == "I" else self.codomain_J
        if S_in is None or S_out is None:
            return 0.0
        return float(np.linalg.norm(self.entries @ S_in - sign * S_out @ self.entries))


def as_array(M) -> np.ndarray:
    """Plain float array from a StructuredMatrix or array-like."""
    if isinstance(M, StructuredMatrix):
        return M.entries
    return np.asarray(M, dtype=float)
