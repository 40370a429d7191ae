"""Isomorphisms between Sigma_n and Sigma_{n+1} restricted to Spin(n).

Each Phi_{n+1} is found by solving the linear intertwiner equations of its
residue case. The solution is scaled to an integer matrix M with
M^T M = s * id, so Phi_{n+1} = M / sqrt(s), and every identity is then
re-checked in integer arithmetic.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np
import sympy
from scipy.linalg import null_space

from clifford.representations import IrreducibleRep, get_delta
from config import N_MAX
from utils.errors import UsageError, VerificationError

logger = logging.getLogger(__name__)

CASE_BY_RESIDUE: Dict[int, str] = {
    0: "a",
    1: "b",
    2: "c",
    3: "d",
    4: "e",
    5: "f",
    6: "g",
    7: "d"
}

_SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.int64)
_COMPLEX_UNIT = np.array([[0, -1], [1, 0]], dtype=np.int64)

# A term (L, R) stands for L Phi R; a constraint is a list of terms summing to zero
Term = Tuple[np.ndarray, np.ndarray]


@dataclass(frozen=True)
class Constraint:
    name: str
    terms: Tuple[Term, ...]

    @classmethod
    def intertwines(cls, name: str, target_op: np.ndarray, source_op: np.ndarray,
                    sign: int = 1) -> "Constraint":
        """target_op Phi = sign * Phi source_op."""
        eye_t = np.eye(target_op.shape[0], dtype=np.int64)
        eye_s = np.eye(source_op.shape[0], dtype=np.int64)
        return cls(name, ((target_op, eye_s), (-sign * eye_t, source_op)))

    def residual(self, M: np.ndarray) -> np.ndarray:
        return sum(L @ M @ R for L, R in self.terms)


@dataclass(frozen=True, eq=False)
class AdjacentIso:
    """Phi_{n+1} = numerator / sqrt(scale_square); the pair case keeps Phi^+ and Phi^-."""
    n: int
    case: str
    numerator: np.ndarray
    scale_square: int
    pair: Optional[Tuple[np.ndarray, np.ndarray]] = None
    identities: Dict[str, bool] = field(default_factory=dict)

    @property
    def matrix(self) -> np.ndarray:
        return self.numerator / np.sqrt(self.scale_square)

    @property
    def pair_scale_square(self) -> int:
        return 2 * self.scale_square

    @property
    def passed(self) -> bool:
        return all(self.identities.values())

    def to_dict(self) -> Dict:
        payload = {
            "n": self.n,
            "case": self.case,
            "scale_square": self.scale_square,
            "numerator": self.numerator.tolist(),
            "identities": dict(sorted(self.identities.items()))
        }
        if self.pair is not None:
            payload["plus"] = self.pair[0].tolist()
            payload["minus"] = self.pair[1].tolist()
        return payload


def _blockdiag(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    z = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    return np.block([[a, z], [z.T, b]])


def _block_rotation(d: int) -> np.ndarray:
    return np.kron(np.array([[0, 1], [-1, 0]], dtype=np.int64), np.eye(d, dtype=np.int64))


def case_constraints(n: int) -> Tuple[IrreducibleRep, IrreducibleRep, List[Constraint]]:
    """Source rep, target rep and the defining equations of Phi_{n+1}."""
    residue = n % 8
    source = get_delta(n, "plus" if residue in (3, 7) else None)
    target = get_delta(n + 1, "plus" if residue in (2, 6) else None)
    d = source.dim
    omega = source.volume()
    gens = source.generators
    eye = np.eye(d, dtype=np.int64)
    constraints: List[Constraint] = []

    if residue == 0:
        # source Delta_n (x) C realised as R^2 (x) Delta_n, i acting on the first factor
        for k, g in enumerate(gens, start=1):
            constraints.append(Constraint.intertwines(
                f"clifford_e{k}", target.rho(k), np.kron(_COMPLEX_UNIT, omega @ g)))
        constraints.append(Constraint.intertwines(
            f"clifford_e{n + 1}", target.rho(n + 1), np.kron(_COMPLEX_UNIT, omega)))
        constraints.append(Constraint.intertwines(
            "complex_linear", target.struct_I, np.kron(_COMPLEX_UNIT, eye)))
        constraints.append(Constraint.intertwines(
            "real_structure", target.real_structure, np.kron(_SIGMA_Z, eye)))

    elif residue == 1:
        for k, g in enumerate(gens, start=1):
            constraints.append(Constraint.intertwines(f"clifford_e{k}", target.rho(k), _blockdiag(g, -g)))
        constraints.append(Constraint.intertwines(f"clifford_e{n + 1}", target.rho(n + 1), _block_rotation(d)))
        s = source.real_structure
        constraints.append(Constraint.intertwines(
            "quaternionic_J", target.struct_J, np.block([[np.zeros_like(s), s], [-s, np.zeros_like(s)]])))
        constraints.append(Constraint.intertwines(
            "complex_linear", target.struct_I, _blockdiag(source.struct_I, source.struct_I)))

    elif residue == 2:
        for k, g in enumerate(gens, start=1):
            constraints.append(Constraint.intertwines(f"clifford_e{k}", target.rho(k), g))
        constraints.append(Constraint.intertwines(f"clifford_e{n + 1}", target.rho(n + 1), omega, sign=-1))
        constraints.append(Constraint.intertwines("linear_I", target.struct_I, source.struct_I))
        constraints.append(Constraint.intertwines("linear_J", target.struct_J, source.struct_J))

    elif residue in (3, 7):
        # solve for Psi on Delta_n^+ (+) Delta_n^+; Phi^+/- are its diagonal restrictions
        for k, g in enumerate(gens, start=1):
            constraints.append(Constraint.intertwines(f"clifford_e{k}", target.rho(k), _blockdiag(g, -g)))
        constraints.append(Constraint.intertwines(f"clifford_e{n + 1}", target.rho(n + 1), _block_rotation(d)))
        if source.struct_I is not None:
            constraints.append(Constraint.intertwines(
                "linear_I", target.struct_I, _blockdiag(source.struct_I, source.struct_I)))
            constraints.append(Constraint.intertwines(
                "linear_J", target.struct_J, _blockdiag(source.struct_J, source.struct_J)))

    elif residue == 4:
        for k, g in enumerate(gens, start=1):
            constraints.append(Constraint.intertwines(f"clifford_e{k}", target.rho(k), g))
        # rho(e_{n+1}) Phi = I Phi rho(omega_n)
        constraints.append(Constraint(f"clifford_e{n + 1}", (
            (target.rho(n + 1), eye), (-target.struct_I, omega))))
        constraints.append(Constraint.intertwines("linear_I", target.struct_I, source.struct_I))
        # Spin(n)-level quaternionic structure inherited from Delta_n
        constraints.append(Constraint.intertwines("linear_J", source.struct_J, source.struct_J))

    elif residue == 5:
        e_last = target.rho(n + 1)
        for k, g in enumerate(gens, start=1):
            constraints.append(Constraint.intertwines(f"clifford_e{k}e{n + 1}", target.rho(k) @ e_last, g))
        constraints.append(Constraint.intertwines("volume_to_I", target.volume(), source.struct_I))
        constraints.append(Constraint.intertwines(f"clifford_e{n + 1}_to_J", e_last, source.spin_J))

    else:
        for k, g in enumerate(gens, start=1):
            constraints.append(Constraint.intertwines(f"clifford_e{k}", target.rho(k), g))
        constraints.append(Constraint.intertwines(f"clifford_e{n + 1}_to_I", target.rho(n + 1), source.spin_I))

    return source, target, constraints


def _solve(constraints: List[Constraint]) -> np.ndarray:
    """Null space of the stacked Kronecker system in row-major vec(Phi)."""
    gram = None
    for c in constraints:
        block = sum(np.kron(L, R.T) for L, R in c.terms).astype(float)
        gram = block.T @ block if gram is None else gram + block.T @ block
    return null_space(gram, rcond=1e-9)


def _integer_normalize(v: np.ndarray, rows: int, cols: int) -> np.ndarray:
    """Scale a null vector to the smallest integer matrix, first nonzero entry positive."""
    nonzero = np.abs(v) > 1e-9 * np.abs(v).max()
    first = int(np.flatnonzero(nonzero)[0])
    if v[first] < 0:
        v = -v
    v = v / np.abs(v[nonzero]).min()
    ratios = [sympy.Rational(float(x)).limit_denominator(64) for x in v[nonzero]]
    denominator = int(np.lcm.reduce([int(r.q) for r in ratios]))
    scaled = v * denominator
    rounded = np.rint(scaled)
    if np.abs(scaled - rounded).max() > 1e-6:
        raise VerificationError("Intertwiner has no integral normalization",
                                {"max_rounding": float(np.abs(scaled - rounded).max())})
    return rounded.astype(np.int64).reshape(rows, cols)


def _pair_identities(target: IrreducibleRep, source: IrreducibleRep,
                     plus: np.ndarray, minus: np.ndarray) -> Dict[str, bool]:
    checks: Dict[str, bool] = {}
    n = source.n
    phis = {1: plus, -1: minus}
    for sign, phi in phis.items():
        label = "plus" if sign == 1 else "minus"
        other = phis[-sign]
        for k in range(1, n + 1):
            checks[f"{label}_clifford_e{k}"] = np.array_equal(target.rho(k) @ phi, other @ source.rho(k))
        checks[f"{label}_clifford_e{n + 1}"] = np.array_equal(target.rho(n + 1) @ phi, sign * other)
        checks[f"{label}_orthogonal"] = np.array_equal(
            phi.T @ phi, phi[:, 0] @ phi[:, 0] * np.eye(phi.shape[1], dtype=np.int64))
    return checks


@lru_cache(maxsize=None)
def adjacent_iso_phi(n: int) -> AdjacentIso:
    """Explicit Phi_{n+1} (or the pair Phi_{n+1}^+/-) with its identity checks."""
    if not 1 <= n <= N_MAX - 1:
        raise UsageError(f"adjacent_iso_phi needs 1 <= n <= {N_MAX - 1}, got {n}")
    residue = n % 8
    source, target, constraints = case_constraints(n)
    rows = target.dim
    cols = constraints[0].terms[0][1].shape[0]

    solutions = _solve(constraints)
    if solutions.shape[1] != 1:
        raise VerificationError(
            f"Intertwiner space for n={n} has dimension {solutions.shape[1]}, expected 1",
            {"n": n, "case": CASE_BY_RESIDUE[residue]})

    M = _integer_normalize(solutions[:, 0], rows, cols)
    s = int(M[:, 0] @ M[:, 0])
    identities = {c.name: not np.any(c.residual(M)) for c in constraints}
    identities["orthogonal"] = np.array_equal(M.T @ M, s * np.eye(cols, dtype=np.int64))

    pair = None
    if residue in (3, 7):
        d = source.dim
        eye = np.eye(d, dtype=np.int64)
        plus = M @ np.vstack([eye, eye])
        minus = M @ np.vstack([eye, -eye])
        pair = (plus, minus)
        identities.update(_pair_identities(target, source, plus, minus))

    iso = AdjacentIso(n, CASE_BY_RESIDUE[residue], M, s, pair, identities)
    failed = [name for name, ok in identities.items() if not ok]
    if failed:
        logger.error(f"Phi_{n + 1} failed identities: {failed}")
    else:
        logger.debug(f"Phi_{n + 1} (case {iso.case}) verified with scale {s}")
    return iso
