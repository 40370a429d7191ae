"""Irreducible real representations of Cl_n built step by step from Delta_1.

Every Delta_{n+1} is the Cl_{n+1}-module spanned by the generator formulas of
its residue case applied to Delta_n, so all matrices stay integral.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np
import sympy

from clifford.algebra import CliffordElement
from config import N_MAX
from numeric.fields import COMPLEX_UNIT, ScalarField, StructuredMatrix
from numeric.subspaces import Subspace
from utils.errors import DimensionMismatchError, UsageError

logger = logging.getLogger(__name__)

# Real dimension of Delta_n (or of each of Delta_n^+, Delta_n^-)
DELTA_DIMS: Dict[int, int] = {
    1: 2,
    2: 4,
    3: 4,
    4: 8,
    5: 8,
    6: 8,
    7: 8,
    8: 16,
    9: 32
}

DELTA_FIELDS: Dict[int, ScalarField] = {
    0: ScalarField.R,
    1: ScalarField.C,
    2: ScalarField.H,
    3: ScalarField.H,
    4: ScalarField.H,
    5: ScalarField.C,
    6: ScalarField.R,
    7: ScalarField.R
}

FLAVORS = ("unique", "plus", "minus")

_SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class IrreducibleRep:
    """Integer generator matrices of Delta_n with its extra structure maps.

    struct_I/struct_J commute with Clifford multiplication (the field K of
    Delta_n). spin_I/spin_J commute with Spin(n) only and anti-commute with
    Clifford multiplication by vectors. real_structure is the splitting
    involution sigma_n for n = 1 mod 8.
    """
    n: int
    flavor: str
    generators: Tuple[np.ndarray, ...]
    field: ScalarField
    struct_I: Optional[np.ndarray] = None
    struct_J: Optional[np.ndarray] = None
    spin_I: Optional[np.ndarray] = None
    spin_J: Optional[np.ndarray] = None
    real_structure: Optional[np.ndarray] = None

    @property
    def dim(self) -> int:
        return self.generators[0].shape[0]

    def rho(self, k: int) -> np.ndarray:
        """rho(e_k), 1-based."""
        if not 1 <= k <= self.n:
            raise DimensionMismatchError(f"e_{k} is not a generator of Cl_{self.n}")
        return self.generators[k - 1]

    def rho_blade(self, blade: Tuple[int, ...]) -> np.ndarray:
        out = np.eye(self.dim, dtype=np.int64)
        for k in blade:
            out = out @ self.rho(k)
        return out

    def volume(self) -> np.ndarray:
        """rho(omega_n)."""
        return self.rho_blade(tuple(range(1, self.n + 1)))

    def rho_element(self, a: CliffordElement) -> sympy.Matrix:
        """Exact image of a Clifford element."""
        if a.n != self.n:
            raise DimensionMismatchError(f"Element of Cl_{a.n} on a Cl_{self.n} module")
        out = sympy.zeros(self.dim, self.dim)
        for blade, c in a.coeffs.items():
            out += c * sympy.Matrix(self.rho_blade(blade))
        return out

    def structured(self, k: int) -> StructuredMatrix:
        M = self.rho(k).astype(float)
        I = None if self.struct_I is None else self.struct_I.astype(float)
        J = None if self.struct_J is None else self.struct_J.astype(float)
        return StructuredMatrix(M, self.field, I, J, I, J)

    def to_dict(self) -> Dict:
        payload = {
            "n": self.n,
            "flavor": self.flavor,
            "field": self.field.value,
            "dim": self.dim,
            "generators": [g.tolist() for g in self.generators]
        }
        for name in ("struct_I", "struct_J", "spin_I", "spin_J", "real_structure"):
            value = getattr(self, name)
            if value is not None:
                payload[name] = value.tolist()
        return payload


def _blockdiag(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((a.shape[0] + b.shape[0], a.shape[1] + b.shape[1]), dtype=np.int64)
    out[:a.shape[0], :a.shape[1]] = a
    out[a.shape[0]:, a.shape[1]:] = b
    return out


def _block_rotation(d: int) -> np.ndarray:
    """[[0, 1], [-1, 0]] with d x d identity blocks."""
    return np.kron(np.array([[0, 1], [-1, 0]], dtype=np.int64), np.eye(d, dtype=np.int64))


def _negated(rep: IrreducibleRep, flavor: str) -> IrreducibleRep:
    return IrreducibleRep(rep.n, flavor, tuple(-g for g in rep.generators), rep.field,
                          rep.struct_I, rep.struct_J, rep.spin_I, rep.spin_J, rep.real_structure)


def _base() -> IrreducibleRep:
    # rho(e_1) = i on C, with sigma_1 = complex conjugation
    unit = COMPLEX_UNIT.copy()
    return IrreducibleRep(1, "unique", (unit,), ScalarField.C,
                          struct_I=unit, real_structure=_SIGMA_Z.copy())


def _extend(prev: IrreducibleRep) -> List[IrreducibleRep]:
    """Delta_{n+1} (or the pair Delta_{n+1}^{+/-}) from Delta_n."""
    n = prev.n
    residue = n % 8
    gens = list(prev.generators)
    omega = prev.volume()
    d = prev.dim
    target_field = DELTA_FIELDS[(n + 1) % 8]

    if residue == 0:
        # E_k = rho(omega e_k) (x) i, E_{n+1} = rho(omega) (x) i
        new = [np.kron(COMPLEX_UNIT, omega @ g) for g in gens] + [np.kron(COMPLEX_UNIT, omega)]
        I = np.kron(COMPLEX_UNIT, np.eye(d, dtype=np.int64))
        sigma = np.kron(_SIGMA_Z, np.eye(d, dtype=np.int64))
        return [IrreducibleRep(n + 1, "unique", tuple(new), target_field,
                               struct_I=I, real_structure=sigma)]

    if residue == 1:
        # Delta_n (+) alpha^*(Delta_n) with E_{n+1} the block rotation and J built from sigma_n
        new = [_blockdiag(g, -g) for g in gens] + [_block_rotation(d)]
        I = _blockdiag(prev.struct_I, prev.struct_I)
        s = prev.real_structure
        J = np.block([[np.zeros_like(s), s], [-s, np.zeros_like(s)]])
        return [IrreducibleRep(n + 1, "unique", tuple(new), target_field, struct_I=I, struct_J=J)]

    if residue in (2, 6):
        # E_{n+1} = -rho(omega_n) gives omega_{n+1} = +1
        plus = IrreducibleRep(n + 1, "plus", tuple(gens + [-omega]), target_field,
                              prev.struct_I, prev.struct_J)
        return [plus, _negated(plus, "minus")]

    if residue in (3, 7):
        # built on Delta_n^+ (+) Delta_n^+
        new = [_blockdiag(g, -g) for g in gens] + [_block_rotation(d)]
        I = None if prev.struct_I is None else _blockdiag(prev.struct_I, prev.struct_I)
        J = None if prev.struct_J is None else _blockdiag(prev.struct_J, prev.struct_J)
        return [IrreducibleRep(n + 1, "unique", tuple(new), target_field, struct_I=I, struct_J=J)]

    if residue == 4:
        # E_{n+1} = I rho(omega_n); the Spin(n+1) quaternionic structure is J rho(omega_n)
        new = gens + [prev.struct_I @ omega]
        return [IrreducibleRep(n + 1, "unique", tuple(new), target_field,
                               struct_I=prev.struct_I, spin_J=prev.struct_J @ omega)]

    # residue 5: E_k = -rho(e_k) J, E_{n+1} = J
    J = prev.spin_J
    new = [-(g @ J) for g in gens] + [J]
    rep = IrreducibleRep(n + 1, "unique", tuple(new), target_field)
    return [IrreducibleRep(rep.n, rep.flavor, rep.generators, rep.field, spin_I=-rep.volume())]


@lru_cache(maxsize=None)
def build_delta(n: int) -> Tuple[IrreducibleRep, ...]:
    """Delta_n, or the pair (Delta_n^+, Delta_n^-) for n = 3, 7 mod 8."""
    if not 1 <= n <= N_MAX:
        raise UsageError(f"n must lie in 1..{N_MAX}, got {n}")
    if n == 1:
        return (_base(),)
    previous = build_delta(n - 1)
    # the step from n = 3, 7 uses the plus flavor
    reps = tuple(_extend(previous[0]))
    logger.debug(f"Built Delta_{n}: dim {reps[0].dim}, flavors {[r.flavor for r in reps]}")
    return reps


def get_delta(n: int, flavor: Optional[str] = None) -> IrreducibleRep:
    """Single representation; flavor defaults to plus when there are two."""
    reps = build_delta(n)
    if flavor is None:
        return reps[0]
    for rep in reps:
        if rep.flavor == flavor:
            return rep
    raise UsageError(f"Delta_{n} has no flavor '{flavor}'", {"available": [r.flavor for r in reps]})


def splitting_involution(rep: IrreducibleRep) -> np.ndarray:
    """Integer involution whose +/-1 eigenspaces are Sigma_n^+/-."""
    residue = rep.n % 8
    if residue in (0, 4):
        return rep.volume()
    if residue == 1:
        return rep.real_structure
    if residue == 2:
        # omega v = +I v  <=>  -I omega v = v
        return -(rep.struct_I @ rep.volume())
    raise UsageError(f"Sigma_{rep.n} does not split (n = {residue} mod 8)")


def split_bases(rep: IrreducibleRep) -> Tuple[sympy.Matrix, sympy.Matrix]:
    """Integer column bases of the two half-spinor spaces."""
    tau = sympy.Matrix(splitting_involution(rep))
    eye = sympy.eye(rep.dim)
    plus = (eye + tau).columnspace()
    minus = (eye - tau).columnspace()
    return sympy.Matrix.hstack(*plus), sympy.Matrix.hstack(*minus)


def half_spinor_split(rep: IrreducibleRep) -> Tuple[Subspace, Subspace]:
    """(Sigma_n^+, Sigma_n^-) as orthonormal subspaces of Delta_n."""
    plus, minus = split_bases(rep)
    to_array = lambda m: np.array(m.tolist(), dtype=float)
    return Subspace.span(to_array(plus)), Subspace.span(to_array(minus))


def representation_identities(rep: IrreducibleRep) -> Dict[str, bool]:
    """Exact checks of the Clifford relations, metric and structure maps."""
    d = rep.dim
    eye = np.eye(d, dtype=np.int64)
    checks: Dict[str, bool] = {}

    relations = True
    for k, Ek in enumerate(rep.generators):
        for l, El in enumerate(rep.generators):
            expected = -2 * eye if k == l else np.zeros_like(eye)
            relations = relations and np.array_equal(Ek @ El + El @ Ek, expected)
    checks["clifford_relations"] = relations
    checks["skew_adjoint"] = all(np.array_equal(E.T, -E) for E in rep.generators)
    checks["orthogonal"] = all(np.array_equal(E.T @ E, eye) for E in rep.generators)
    checks["dimension"] = DELTA_DIMS.get(rep.n) == d

    if rep.flavor in ("plus", "minus"):
        sign = 1 if rep.flavor == "plus" else -1
        checks["volume_flavor"] = np.array_equal(rep.volume(), sign * eye)

    for name in ("struct_I", "struct_J"):
        S = getattr(rep, name)
        if S is not None:
            checks[f"{name}_square"] = np.array_equal(S @ S, -eye)
            checks[f"{name}_linear"] = all(np.array_equal(S @ E, E @ S) for E in rep.generators)
    if rep.struct_I is not None and rep.struct_J is not None:
        checks["IJ_anticommute"] = np.array_equal(rep.struct_I @ rep.struct_J, -rep.struct_J @ rep.struct_I)

    for name in ("spin_I", "spin_J"):
        S = getattr(rep, name)
        if S is not None:
            checks[f"{name}_square"] = np.array_equal(S @ S, -eye)
            checks[f"{name}_antilinear"] = all(np.array_equal(S @ E, -E @ S) for E in rep.generators)

    if rep.real_structure is not None:
        s = rep.real_structure
        checks["real_structure_involution"] = np.array_equal(s @ s, eye)
        checks["real_structure_antilinear"] = (
            all(np.array_equal(s @ E, -E @ s) for E in rep.generators)
            and np.array_equal(s @ rep.struct_I, -rep.struct_I @ s))

    return checks
