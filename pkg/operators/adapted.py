"""Finite matrix models of l-adapted operators and their index.

Every operator is a real matrix with realified scalar actions. The case
conditions per l mod 8 become transpose and (anti)commutation identities:

    l=0  none                        l=4  intertwines (I0, J0) with (I1, J1)
    l=1  skew                        l=5  symmetric, commutes with I, anticommutes with J
    l=2  skew, anticommutes with I   l=6  symmetric, anticommutes with I
    l=3  symmetric, H-linear         l=7  symmetric
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.linalg import block_diag

from numeric.fields import (ScalarField, StructuredMatrix, conjugation_projection, field_for_ell,
                            gamma_order)
from numeric.tolerances import DEFAULT_TOLERANCES, ToleranceConfig
from utils.errors import AdaptednessError, DimensionMismatchError, UsageError

logger = logging.getLogger(__name__)

ADAPTED_TOL = 1e-12

COMBINE_MODES = ("direct_sum", "disjoint_union")


@dataclass(frozen=True, eq=False)
class AdaptedOperator:
    """An l-adapted model D: E_0 -> E_1 with the boundary-component partition it came from."""
    ell: int
    matrix: StructuredMatrix
    components: Tuple[int, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "ell", self.ell % 8)
        if self.matrix.field is not field_for_ell(self.ell):
            raise UsageError(f"l={self.ell} needs field {field_for_ell(self.ell).value}, "
                             f"got {self.matrix.field.value}")

    @property
    def field(self) -> ScalarField:
        return self.matrix.field

    @property
    def entries(self) -> np.ndarray:
        return self.matrix.entries

    @property
    def is_empty(self) -> bool:
        return self.matrix.entries.size == 0

    @classmethod
    def from_entries(cls, ell: int, entries, field: Optional[ScalarField] = None) -> "AdaptedOperator":
        """Wrap a real matrix with the standard structure maps of its field."""
        field = field or field_for_ell(ell)
        return cls(ell % 8, StructuredMatrix.standard(np.asarray(entries, dtype=float), field))

    @classmethod
    def empty(cls, ell: int) -> "AdaptedOperator":
        """The zero-dimensional model, unit of direct sum."""
        return cls.from_entries(ell, np.zeros((0, 0)))

    def negative_adjoint(self) -> "AdaptedOperator":
        """-D^*, the boundary model seen from the other side of a collar.

        For l=1 the far end has real part i V, where A_X = i D acts as -D = D^T,
        so the model is read off with a complex-linear gauge.
        """
        adjoint = self.matrix.adjoint()
        if self.ell == 1:
            return AdaptedOperator(self.ell, adjoint, self.components)
        return AdaptedOperator(self.ell, adjoint.with_entries(-adjoint.entries), self.components)

    def with_entries(self, entries: np.ndarray) -> "AdaptedOperator":
        return AdaptedOperator(self.ell, self.matrix.with_entries(entries), self.components)

    def to_dict(self) -> Dict:
        def _maybe(M):
            return None if M is None else np.asarray(M).tolist()

        return {
            "ell": self.ell,
            "field": self.field.value,
            "entries": self.entries.tolist(),
            "shape": list(self.entries.shape),
            "struct_I": _maybe(self.matrix.struct_I),
            "struct_J": _maybe(self.matrix.struct_J),
            "target_I": _maybe(self.matrix.target_I),
            "target_J": _maybe(self.matrix.target_J),
            "components": list(self.components)
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "AdaptedOperator":
        def _maybe(M):
            return None if M is None else np.asarray(M, dtype=float)

        shape = data.get("shape")
        entries = np.asarray(data["entries"], dtype=float)
        if shape is not None:
            entries = entries.reshape(shape)
        field = ScalarField(data["field"])
        if data.get("struct_I") is None and field is not ScalarField.R:
            matrix = StructuredMatrix.standard(entries, field)
        else:
            matrix = StructuredMatrix(entries, field, _maybe(data.get("struct_I")), _maybe(data.get("struct_J")),
                                      _maybe(data.get("target_I")), _maybe(data.get("target_J")))
        return cls(int(data["ell"]), matrix, tuple(data.get("components", ())))


@dataclass
class AdaptednessReport:
    ell: int
    defects: Dict[str, float]
    tolerance: float

    @property
    def passed(self) -> bool:
        return all(v <= self.tolerance for v in self.defects.values())

    def failures(self) -> List[str]:
        return sorted(k for k, v in self.defects.items() if v > self.tolerance)

    def to_dict(self) -> Dict:
        return {"ell": self.ell, "passed": self.passed,
                "defects": {k: float(v) for k, v in sorted(self.defects.items())}}


def _norm(M: np.ndarray) -> float:
    return float(np.linalg.norm(M)) if M.size else 0.0


def case_defects(M: StructuredMatrix, ell: int) -> Dict[str, float]:
    """Norms of the violated identities of the l-case for one matrix."""
    ell = ell % 8
    D = M.entries
    defects: Dict[str, float] = {}
    square = D.shape[0] == D.shape[1]
    if ell in (1, 2, 3, 5, 6, 7) and not square:
        defects["square"] = float("inf")
        return defects
    if ell in (1, 2):
        defects["skew"] = _norm(D + D.T)
    if ell in (3, 5, 6, 7):
        defects["symmetric"] = _norm(D - D.T)
    if ell == 2:
        defects["anticommutes_I"] = M.linearity_defect("I", -1)
    if ell in (3, 4, 5):
        defects["commutes_I"] = M.linearity_defect("I", 1)
    if ell in (3, 4):
        defects["commutes_J"] = M.linearity_defect("J", 1)
    if ell == 5:
        defects["anticommutes_J"] = M.linearity_defect("J", -1)
    if ell == 6:
        defects["anticommutes_I"] = M.linearity_defect("I", -1)
    defects.update(M.structure_defects())
    return defects


def check_adapted(D, ell: Optional[int] = None, tol: float = ADAPTED_TOL) -> AdaptednessReport:
    """Diagnostic check of the l-case conditions, scaled by the operator size."""
    if isinstance(D, AdaptedOperator):
        ell = D.ell if ell is None else ell
        matrix = D.matrix
    else:
        matrix = D if isinstance(D, StructuredMatrix) else StructuredMatrix.standard(D, field_for_ell(ell))
    if ell is None:
        raise UsageError("check_adapted needs l for a bare matrix")
    scale = max(1.0, _norm(matrix.entries))
    return AdaptednessReport(ell % 8, case_defects(matrix, ell), tol * scale * 10)


def require_adapted(D: AdaptedOperator) -> None:
    report = check_adapted(D)
    if not report.passed:
        raise AdaptednessError(f"Operator is not {D.ell}-adapted: {report.failures()}", report.to_dict())


def _kernel_dim(M: np.ndarray, cfg: ToleranceConfig) -> int:
    if M.shape[1] == 0:
        return 0
    if M.shape[0] == 0:
        return M.shape[1]
    s = np.linalg.svd(M, compute_uv=False)
    threshold = cfg.rank_tol * max(1.0, float(s[0]) if s.size else 1.0)
    return M.shape[1] - int(np.sum(s > threshold))


def kernel_dims(D: AdaptedOperator, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> Tuple[int, int]:
    """Real dimensions of Ker D and Coker D = Ker D^*."""
    return _kernel_dim(D.entries, cfg), _kernel_dim(D.entries.T, cfg)


def index_ell(D: AdaptedOperator, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> int:
    """ind_l in Gamma_l: Z for l=0,4; dim_K Ker mod 2 for l=1,2; 0 otherwise."""
    order = gamma_order(D.ell)
    k = D.field.real_dim
    ker, coker = kernel_dims(D, cfg)
    if order == 0:
        return (ker - coker) // k
    if order == 2:
        return (ker // k) % 2
    return 0


def adapted_projection(M: np.ndarray, template: StructuredMatrix, ell: int) -> np.ndarray:
    """Orthogonal projection of M onto the linear space of l-adapted maps with the template's structures."""
    ell = ell % 8
    P = np.asarray(M, dtype=float)
    if ell in (1, 2):
        P = (P - P.T) / 2.0
    elif ell in (3, 5, 6, 7):
        P = (P + P.T) / 2.0
    I_in, I_out = template.struct_I, template.codomain_I
    J_in, J_out = template.struct_J, template.codomain_J
    if ell in (3, 4, 5) and I_in is not None:
        P = conjugation_projection(P, I_in, I_out, 1)
    if ell in (2, 6) and I_in is not None:
        P = conjugation_projection(P, I_in, I_out, -1)
    if ell in (3, 4) and J_in is not None:
        P = conjugation_projection(P, J_in, J_out, 1)
    if ell == 5 and J_in is not None:
        P = conjugation_projection(P, J_in, J_out, -1)
    return P


def random_adapted(ell: int, dim_in: int, dim_out: Optional[int], rng: np.random.Generator,
                   scale: float = 1.0) -> AdaptedOperator:
    """Gaussian sample projected onto the l-adapted maps; dims are K-dimensions."""
    ell = ell % 8
    field = field_for_ell(ell)
    k = field.real_dim
    n_in = dim_in * k
    n_out = (dim_out if ell in (0, 4) and dim_out is not None else dim_in) * k
    template = StructuredMatrix.standard(np.zeros((n_out, n_in)), field)
    G = rng.standard_normal((n_out, n_in)) * scale
    return AdaptedOperator(ell, template.with_entries(adapted_projection(G, template, ell)))


def twist(D: AdaptedOperator, rank: int, potential: Optional[np.ndarray] = None) -> AdaptedOperator:
    """D (x) id_{K^rank} + potential, re-checked for adaptedness."""
    if rank < 1:
        raise UsageError(f"Twist rank must be positive, got {rank}")
    eye = np.eye(rank)
    M = D.matrix

    def _lift(S):
        return None if S is None else np.kron(eye, S)

    lifted = StructuredMatrix(np.kron(eye, M.entries), M.field, _lift(M.struct_I), _lift(M.struct_J),
                              _lift(M.target_I), _lift(M.target_J))
    if potential is not None:
        potential = np.asarray(potential, dtype=float)
        if potential.shape != lifted.shape:
            raise DimensionMismatchError(f"Potential of shape {potential.shape} on twisted model {lifted.shape}")
        lifted = lifted.with_entries(lifted.entries + potential)
    twisted = AdaptedOperator(D.ell, lifted, D.components)
    report = check_adapted(twisted)
    if not report.passed:
        raise AdaptednessError(f"Twisted operator violates the l={D.ell} constraints: {report.failures()}",
                               report.to_dict())
    return twisted


def potential_sweep(D: AdaptedOperator, potential: np.ndarray, rank: int = 1, samples: int = 9,
                    cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> List[int]:
    """ind_l of twist(D, rank, t * potential) on a uniform grid of t in [0, 1]."""
    if samples < 2:
        raise UsageError(f"A potential path needs at least 2 samples, got {samples}")
    indices = [index_ell(twist(D, rank, t * potential), cfg) for t in np.linspace(0.0, 1.0, samples)]
    logger.debug(f"Potential path for l={D.ell}, rank {rank}: indices {indices}")
    return indices



def _block(a: Optional[np.ndarray], b: Optional[np.ndarray], da: int, db: int) -> Optional[np.ndarray]:
    if a is None and b is None:
        return None
    a = np.zeros((da, da)) if a is None else a
    b = np.zeros((db, db)) if b is None else b
    return block_diag(a, b)


def combine(mode: str, D1: AdaptedOperator, D2: AdaptedOperator) -> AdaptedOperator:
    """Block-diagonal sum; disjoint_union also records the component partition."""
    if mode not in COMBINE_MODES:
        raise UsageError(f"Unknown combine mode '{mode}'")
    if D1.ell != D2.ell:
        raise DimensionMismatchError(f"Cannot combine l={D1.ell} with l={D2.ell}")
    if D1.is_empty and not D1.components:
        return D2
    if D2.is_empty and not D2.components:
        return D1
    M1, M2 = D1.matrix, D2.matrix
    entries = block_diag(M1.entries, M2.entries) if M1.entries.size or M2.entries.size else \
        np.zeros((M1.dim_out + M2.dim_out, M1.dim_in + M2.dim_in))
    entries = entries.reshape(M1.dim_out + M2.dim_out, M1.dim_in + M2.dim_in)
    matrix = StructuredMatrix(
        entries, M1.field,
        _block(M1.struct_I, M2.struct_I, M1.dim_in, M2.dim_in),
        _block(M1.struct_J, M2.struct_J, M1.dim_in, M2.dim_in),
        _block(M1.target_I, M2.target_I, M1.dim_out, M2.dim_out),
        _block(M1.target_J, M2.target_J, M1.dim_out, M2.dim_out))
    components: Tuple[int, ...] = ()
    if mode == "disjoint_union":
        components = (D1.components or (M1.dim_in,)) + (D2.components or (M2.dim_in,))
    return AdaptedOperator(D1.ell, matrix, components)
