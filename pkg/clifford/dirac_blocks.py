"""Dirac operators on cylinders X x R as formal first-order coefficient data.

Both sides of each block identity are assembled from representation
matrices and Phi_{n+1}: the cylinder side pulls the Dirac operator of
Delta_{n+1} back along Phi, the boundary side pushes the operator built
from Delta_n forward. Derivatives are formal commuting symbols.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np
import sympy

from clifford.intertwiners import adjacent_iso_phi
from clifford.representations import get_delta, split_bases
from utils.errors import UsageError

logger = logging.getLogger(__name__)

TABLE_ROWS: Dict[int, str] = {
    0: "skew block (d/dt, D^-; -D^+, -d/dt)",
    1: "conj(d/dt + i D_C)",
    2: "(-i d/dt, D^-; D^+, i d/dt)",
    3: "d/dt + D",
    4: "(i d/dt, D^-; D^+, -i d/dt)",
    5: "J(d/dt + D)",
    6: "I d/dt + D",
    7: "d/dt + D"
}


@dataclass(frozen=True, eq=False)
class FormalCylinderOperator:
    """sum_k M_k nabla_k + M_t d/dt + M_0 with exact integer coefficients."""
    tangential: Tuple[sympy.Matrix, ...]
    dt: sympy.Matrix
    zeroth: sympy.Matrix

    @classmethod
    def from_arrays(cls, tangential: List[np.ndarray], dt: np.ndarray) -> "FormalCylinderOperator":
        return cls(tuple(sympy.Matrix(M) for M in tangential), sympy.Matrix(dt),
                   sympy.zeros(*dt.shape))

    def coefficients(self) -> List[sympy.Matrix]:
        return list(self.tangential) + [self.dt, self.zeroth]

    def conjugate(self, left: sympy.Matrix, right: sympy.Matrix) -> "FormalCylinderOperator":
        return FormalCylinderOperator(tuple(left * M * right for M in self.tangential),
                                      left * self.dt * right, left * self.zeroth * right)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FormalCylinderOperator):
            return NotImplemented
        mine, theirs = self.coefficients(), other.coefficients()
        return len(mine) == len(theirs) and all(a == b for a, b in zip(mine, theirs))

    def __hash__(self) -> int:
        return id(self)


@dataclass(frozen=True, eq=False)
class DiracBlockReport:
    n: int
    row: str
    cylinder_side: FormalCylinderOperator
    boundary_side: FormalCylinderOperator
    template_checks: Dict[str, bool] = field(default_factory=dict)

    @property
    def sides_equal(self) -> bool:
        return self.cylinder_side == self.boundary_side

    @property
    def passed(self) -> bool:
        return self.sides_equal and all(self.template_checks.values())

    def to_dict(self) -> Dict:
        return {
            "n": self.n,
            "row": self.row,
            "sides_equal": self.sides_equal,
            "template_checks": dict(sorted(self.template_checks.items())),
            "passed": self.passed
        }


def _split_frame(rep) -> Tuple[sympy.Matrix, sympy.Matrix, int]:
    plus, minus = split_bases(rep)
    T = sympy.Matrix.hstack(plus, minus)
    return T, T.inv(), plus.shape[1]


def _blocks(M: sympy.Matrix, p: int) -> Tuple[sympy.Matrix, sympy.Matrix, sympy.Matrix, sympy.Matrix]:
    return M[:p, :p], M[:p, p:], M[p:, :p], M[p:, p:]


def _is_zero(M: sympy.Matrix) -> bool:
    return all(x == 0 for x in M)


def _skew_template_checks(rep, dt_coeff: np.ndarray, tangential: List[np.ndarray]) -> Dict[str, bool]:
    """Split frame: d/dt -> diag(1, -1) and nabla_k -> (0, D^-; -D^+, 0)."""
    T, Tinv, p = _split_frame(rep)
    q = T.shape[0] - p
    checks: Dict[str, bool] = {}
    expected_dt = sympy.diag(sympy.eye(p), -sympy.eye(q))
    checks["dt_block"] = Tinv * sympy.Matrix(dt_coeff) * T == expected_dt
    for k, coeff in enumerate(tangential, start=1):
        clifford = Tinv * sympy.Matrix(rep.rho(k)) * T
        a, upper, lower, b = _blocks(clifford, p)
        exchanged = _is_zero(a) and _is_zero(b)
        expected = sympy.BlockMatrix([[sympy.zeros(p, p), upper], [-lower, sympy.zeros(q, q)]]).as_explicit()
        checks[f"nabla{k}_block"] = exchanged and Tinv * sympy.Matrix(coeff) * T == expected
    return checks


def _complex_template_checks(rep, dt_coeff: np.ndarray, signs: Tuple[int, int]) -> Dict[str, bool]:
    """Split frame: d/dt -> diag(s+ I_+, s- I_-) and Clifford vectors exchange the halves."""
    T, Tinv, p = _split_frame(rep)
    checks: Dict[str, bool] = {}
    I_split = Tinv * sympy.Matrix(rep.struct_I) * T
    i_pp, i_pm, i_mp, i_mm = _blocks(I_split, p)
    checks["I_preserves_split"] = _is_zero(i_pm) and _is_zero(i_mp)
    expected_dt = sympy.diag(signs[0] * i_pp, signs[1] * i_mm)
    checks["dt_block"] = Tinv * sympy.Matrix(dt_coeff) * T == expected_dt
    for k in range(1, rep.n + 1):
        a, _, _, b = _blocks(Tinv * sympy.Matrix(rep.rho(k)) * T, p)
        checks[f"nabla{k}_exchanges"] = _is_zero(a) and _is_zero(b)
    return checks


def cylinder_dirac_block(n: int) -> DiracBlockReport:
    """Both sides of the cylinder Dirac identity for Delta_n, compared exactly."""
    if not 1 <= n <= 8:
        raise UsageError(f"cylinder_dirac_block needs 1 <= n <= 8, got {n}")
    residue = n % 8
    iso = adjacent_iso_phi(n)
    source = get_delta(n, "plus" if residue in (3, 7) else None)
    target = get_delta(n + 1, "plus" if residue in (2, 6) else None)
    d = source.dim
    eye = np.eye(d, dtype=np.int64)
    M = iso.numerator
    cylinder_gens = [target.rho(k) for k in range(1, n + 1)]
    cylinder_dt = target.rho(n + 1)
    prefactor = np.eye(target.dim, dtype=np.int64)
    phi_in = phi_out = M
    checks: Dict[str, bool] = {}

    if residue == 0:
        # real points Sigma_n inside Sigma_n (x) C, pulled back with -I
        phi_in = phi_out = M @ np.kron(np.array([[1], [0]], dtype=np.int64), eye)
        prefactor = -target.struct_I
        omega = source.volume()
        boundary_gens = [omega @ g for g in source.generators]
        boundary_dt = omega
        checks = _skew_template_checks(source, boundary_dt, boundary_gens)
    elif residue == 1:
        # diagonal copy phi -> (phi, phi), pulled back with -J
        phi_in = phi_out = M @ np.vstack([eye, eye])
        prefactor = -target.struct_J
        sigma = source.real_structure
        boundary_gens = [sigma @ g for g in source.generators]
        boundary_dt = sigma
        checks = _skew_template_checks(source, boundary_dt, boundary_gens)
    elif residue == 2:
        boundary_gens = list(source.generators)
        boundary_dt = -source.volume()
        checks = _complex_template_checks(source, boundary_dt, (-1, 1))
    elif residue in (3, 7):
        phi_in, phi_out = iso.pair
        boundary_gens = list(source.generators)
        boundary_dt = eye
    elif residue == 4:
        boundary_gens = list(source.generators)
        boundary_dt = source.struct_I @ source.volume()
        checks = _complex_template_checks(source, boundary_dt, (1, -1))
    elif residue == 5:
        J = source.spin_J
        boundary_gens = [J @ g for g in source.generators]
        boundary_dt = J
        checks["J_anticommutes_with_D"] = all(np.array_equal(J @ g, -g @ J) for g in source.generators)
        checks["D_complex_linear"] = all(np.array_equal(source.struct_I @ g, g @ source.struct_I)
                                         for g in source.generators)
    else:
        I = source.spin_I
        boundary_gens = list(source.generators)
        boundary_dt = I
        checks["D_antilinear"] = all(np.array_equal(I @ g, -g @ I) for g in source.generators)

    cylinder_side = FormalCylinderOperator.from_arrays(
        [prefactor @ E @ phi_in for E in cylinder_gens], prefactor @ cylinder_dt @ phi_in)
    boundary_side = FormalCylinderOperator.from_arrays(
        [phi_out @ B for B in boundary_gens], phi_out @ boundary_dt)

    report = DiracBlockReport(n, TABLE_ROWS[residue], cylinder_side, boundary_side, checks)
    if not report.passed:
        logger.error(f"Cylinder Dirac block n={n} failed: sides_equal={report.sides_equal}, checks={checks}")
    return report
