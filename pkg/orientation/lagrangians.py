"""Lagrangian subspaces of the boundary form beta_delta(w1, w2) = <sigma w1, w2>.

W_delta is the small-eigenvalue space of the boundary operator A_X, laid out
as in make_cylinder(D_X). For l=0 every Lagrangian is the graph of an
orthogonal f: V^+ -> V^-; for l=1 it is L(J) = {v - I J v} for a complex
structure J on the real part V; for l=2 the quaternionic Lagrangians are the
graphs Gamma(J) in V + V-bar of orthogonal quaternionic structures.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import null_space

from numeric.spectral import SelfAdjointModel, admissible_cutoffs, eig_selfadjoint, spectral_interval
from numeric.subspaces import Subspace
from numeric.tolerances import DEFAULT_TOLERANCES, ToleranceConfig
from operators.adapted import AdaptedOperator
from operators.cylinders import anticommuting, make_cylinder
from signs.graded_lines import det_of_iso, omega_of_J
from spectral.det_lines import DetElement, det_make
from spectral.pfaffian_lines import PfElement, pf_make, skew_spectrum
from spectral.spectral_torsor import SpElement
from utils.errors import DimensionMismatchError, UsageError

logger = logging.getLogger(__name__)

LAGRANGIAN_KINDS = ("real_graph", "complex_structure", "quaternionic_structure", "subspace")

ISOTROPY_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class SplitQuadraticSpace:
    """W_delta with its form; operator is D_X when W is in the layout of make_cylinder(D_X)."""
    ell: int
    W: Subspace
    sigma: np.ndarray
    A: np.ndarray
    delta: float
    struct_I: Optional[np.ndarray] = None
    operator: Optional[AdaptedOperator] = None
    struct_J: Optional[np.ndarray] = None

    @property
    def dim(self) -> int:
        return self.W.dim

    @property
    def ambient_dim(self) -> int:
        return self.W.ambient_dim

    @property
    def beta(self) -> np.ndarray:
        """Gram matrix of beta_delta in the basis of W."""
        B = self.W.basis
        return B.T @ self.sigma @ B

    def isotropy_residual(self, L: Subspace) -> float:
        if L.dim == 0:
            return 0.0
        return float(np.linalg.norm(L.basis.T @ self.sigma @ L.basis))

    def is_lagrangian(self, L: Subspace, tol: float = ISOTROPY_TOL) -> bool:
        return (self.W.contains_subspace(L) and 2 * L.dim == self.dim
                and self.isotropy_residual(L) <= tol)

    def _involution_part(self, K: np.ndarray, sign: int) -> Subspace:
        if self.dim == 0:
            return Subspace.zero(self.ambient_dim)
        P = (np.eye(self.ambient_dim) + sign * K) / 2.0
        return Subspace.span(P @ self.W.basis)

    @property
    def plus(self) -> Subspace:
        """W cap Eig_{+1}(sigma): V^+ for l=0, the real part V for l=1."""
        return self._involution_part(self.sigma, 1)

    @property
    def minus(self) -> Subspace:
        return self._involution_part(self.sigma, -1)

    @property
    def quaternionic_halves(self) -> Tuple[Subspace, Subspace]:
        """(V, V-bar) = W cap Eig_{+-1}(-I sigma) for l=2, swapped by J."""
        if self.struct_I is None or self.struct_J is None:
            raise UsageError("V + V-bar needs the I and J structure of the boundary model")
        K = -self.struct_I @ self.sigma
        return self._involution_part(K, 1), self._involution_part(K, -1)

    @property
    def inertia(self) -> int:
        beta = self.beta
        if beta.size == 0:
            return 0
        if np.linalg.norm(beta - beta.T) > ISOTROPY_TOL:
            raise UsageError(f"beta_delta is not symmetric for l={self.ell}")
        values = np.linalg.eigvalsh((beta + beta.T) / 2.0)
        return int(np.sum(values > 0) - np.sum(values < 0))

    def to_dict(self) -> dict:
        data = {"ell": self.ell, "delta": self.delta, "dim": self.dim}
        if self.ell in (0, 1):
            data.update({"plus": self.plus.dim, "minus": self.minus.dim})
        elif self.ell == 2 and self.struct_J is not None:
            data["V"] = self.quaternionic_halves[0].dim
        return data


def w_delta(D_X: AdaptedOperator, delta: float, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> SplitQuadraticSpace:
    """W_delta(D_X) with beta_delta, in the coordinates of make_cylinder(D_X)."""
    cyl = make_cylinder(D_X)
    model = eig_selfadjoint(cyl.A, cfg)
    W = spectral_interval(model, -delta, delta, cfg)
    space = SplitQuadraticSpace(D_X.ell, W, cyl.sigma, cyl.A, float(delta), cyl.struct_I, D_X, cyl.struct_J)
    logger.debug(f"W_delta for l={D_X.ell} at {delta:.4g}: dim {W.dim}")
    return space


def boundary_form(sigma: np.ndarray, A: np.ndarray, delta: float, ell: int,
                  cfg: ToleranceConfig = DEFAULT_TOLERANCES, struct_I: Optional[np.ndarray] = None,
                  struct_J: Optional[np.ndarray] = None) -> SplitQuadraticSpace:
    """W_delta for an explicit boundary model such as diag(A, -A) of a cylinder."""
    W = spectral_interval(eig_selfadjoint(A, cfg), -delta, delta, cfg)
    return SplitQuadraticSpace(ell, W, np.asarray(sigma, dtype=float), np.asarray(A, dtype=float),
                               float(delta), struct_I, struct_J=struct_J)


def positive_cutoff(A, cfg: ToleranceConfig = DEFAULT_TOLERANCES, above: float = 0.0) -> float:
    """Smallest gap midpoint above `above` that avoids +-spectrum of A."""
    model = A if isinstance(A, SelfAdjointModel) else eig_selfadjoint(A, cfg)
    return admissible_cutoffs(np.abs(model.eigenvalues), cfg, lower=above)[0]


@dataclass(frozen=True, eq=False)
class LagrangianElement:
    """A Lagrangian of W_delta with the structure map that parametrizes it."""
    kind: str
    space: SplitQuadraticSpace
    subspace: Subspace
    structure: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in LAGRANGIAN_KINDS:
            raise UsageError(f"Unknown Lagrangian kind '{self.kind}'")

    @property
    def delta(self) -> float:
        return self.space.delta

    def to_dict(self) -> dict:
        return {"kind": self.kind, "delta": self.delta, "dim": self.subspace.dim,
                "isotropy": self.space.isotropy_residual(self.subspace)}


def _require_lagrangian(space: SplitQuadraticSpace, L: Subspace) -> None:
    if not space.is_lagrangian(L):
        raise UsageError("Subspace is not Lagrangian for beta_delta",
                         {"dim": L.dim, "dim_W": space.dim, "isotropy": space.isotropy_residual(L)})


def real_graph(space: SplitQuadraticSpace, f: np.ndarray) -> LagrangianElement:
    """Gamma(f) = {p + f p} for an ambient map f carrying V^+ isometrically onto V^-."""
    plus, minus = space.plus, space.minus
    if plus.dim != minus.dim:
        raise DimensionMismatchError(f"No Lagrangian: dim V+ = {plus.dim}, dim V- = {minus.dim}")
    f = np.asarray(f, dtype=float)
    image = f @ plus.basis
    if plus.dim and (np.linalg.norm(image.T @ image - np.eye(plus.dim)) > ISOTROPY_TOL
                     or not minus.contains_subspace(Subspace.span(image))):
        raise UsageError("f is not an orthogonal isomorphism V+ -> V-")
    L = Subspace.span(plus.basis + image) if plus.dim else Subspace.zero(space.ambient_dim)
    return LagrangianElement("real_graph", space, L, f)


def canonical_graph_map(space: SplitQuadraticSpace) -> np.ndarray:
    """f sending the canonical basis of V^+ to that of V^-."""
    P, M = space.plus.canonical_basis(), space.minus.canonical_basis()
    if P.shape[1] != M.shape[1]:
        raise DimensionMismatchError(f"No Lagrangian: dim V+ = {P.shape[1]}, dim V- = {M.shape[1]}")
    return M @ P.T


def random_graph_map(space: SplitQuadraticSpace, rng: np.random.Generator) -> np.ndarray:
    P, M = space.plus.basis, space.minus.basis
    if P.shape[1] != M.shape[1]:
        raise DimensionMismatchError(f"No Lagrangian: dim V+ = {P.shape[1]}, dim V- = {M.shape[1]}")
    if P.shape[1] == 0:
        return np.zeros((space.ambient_dim, space.ambient_dim))
    Q, _ = np.linalg.qr(rng.standard_normal((P.shape[1], P.shape[1])))
    return M @ Q @ P.T


def complex_lagrangian(space: SplitQuadraticSpace, J: np.ndarray) -> LagrangianElement:
    """L(J) = {v - I J v} for an orthogonal complex structure J on the real part V."""
    if space.struct_I is None:
        raise UsageError("L(J) needs the complex structure of the boundary model")
    V = space.plus
    J = np.asarray(J, dtype=float)
    B = V.basis
    if V.dim and (np.linalg.norm(J @ J @ B + B) > ISOTROPY_TOL
                  or np.linalg.norm((J @ B).T @ (J @ B) - np.eye(V.dim)) > ISOTROPY_TOL):
        raise UsageError("J is not an orthogonal complex structure on V")
    L = Subspace.span(B - space.struct_I @ (J @ B)) if V.dim else Subspace.zero(space.ambient_dim)
    return LagrangianElement("complex_structure", space, L, J)


def canonical_complex_structure(space: SplitQuadraticSpace) -> np.ndarray:
    """Standard J on the canonical basis of V, paired as (e1, e2), (e3, e4), ..."""
    Q = space.plus.canonical_basis()
    if Q.shape[1] % 2:
        raise DimensionMismatchError(f"Real part of odd dimension {Q.shape[1]} has no complex structure")
    block = np.kron(np.eye(Q.shape[1] // 2), np.array([[0.0, -1.0], [1.0, 0.0]]))
    return Q @ block @ Q.T


def quaternionic_lagrangian(space: SplitQuadraticSpace, J: np.ndarray) -> LagrangianElement:
    """Gamma(J) = {v + J v} for an I-linear isometry J: V -> V-bar with Jbar J = -1."""
    V, Vbar = space.quaternionic_halves
    if V.dim != Vbar.dim:
        raise DimensionMismatchError(f"No quaternionic Lagrangian: dim V = {V.dim}, dim V-bar = {Vbar.dim}")
    J = np.asarray(J, dtype=float)
    B = V.basis
    if V.dim == 0:
        return LagrangianElement("quaternionic_structure", space, Subspace.zero(space.ambient_dim), J)
    image = J @ B
    # Jbar J = -1 reads (J_W^{-1} J)^2 = -1 on V
    Q = -space.struct_J @ image
    if (np.linalg.norm(image.T @ image - np.eye(V.dim)) > ISOTROPY_TOL
            or not Vbar.contains_subspace(Subspace.span(image))
            or np.linalg.norm(J @ space.struct_I @ B - space.struct_I @ image) > ISOTROPY_TOL
            or np.linalg.norm(-space.struct_J @ J @ Q + B) > ISOTROPY_TOL):
        raise UsageError("J is not an orthogonal quaternionic structure V -> V-bar")
    return LagrangianElement("quaternionic_structure", space, Subspace.span(B + image), J)


def _complex_frame(basis: np.ndarray, I: np.ndarray) -> np.ndarray:
    """u_1..u_m with u_1, I u_1, ..., u_m, I u_m orthonormal and spanning span(basis)."""
    n = basis.shape[0]
    chosen, span = [], np.zeros((n, 0))
    for v in basis.T:
        w = v - span @ (span.T @ v)
        norm = np.linalg.norm(w)
        if norm <= ISOTROPY_TOL:
            continue
        u = w / norm
        chosen.append(u)
        span = np.column_stack([span, u, I @ u])
    return np.column_stack(chosen) if chosen else np.zeros((n, 0))


def canonical_quaternionic_structure(space: SplitQuadraticSpace) -> np.ndarray:
    """J = J_W Q for the quaternionic structure Q: u_{2k-1} -> u_{2k} on a complex frame of V."""
    V, _ = space.quaternionic_halves
    I = space.struct_I
    U = _complex_frame(V.basis, I)
    m = U.shape[1]
    if m % 2:
        raise DimensionMismatchError(f"Real part of odd complex dimension {m} has no quaternionic structure")
    src, dst = [], []
    for k in range(0, m, 2):
        a, b = U[:, k], U[:, k + 1]
        src += [a, I @ a, b, I @ b]
        dst += [b, -I @ b, -a, I @ a]
    if not src:
        return np.zeros((space.ambient_dim, space.ambient_dim))
    Q = np.column_stack(dst) @ np.column_stack(src).T
    return space.struct_J @ Q


def lagrangian_from_subspace(space: SplitQuadraticSpace, L: Subspace) -> LagrangianElement:
    """Recover f (l=0), J (l=1) or the quaternionic J (l=2) from a Lagrangian subspace."""
    _require_lagrangian(space, L)
    if space.ell == 0:
        P, M = space.plus.basis, space.minus.basis
        a, b = P.T @ L.basis, M.T @ L.basis
        if a.size and abs(np.linalg.det(a)) < ISOTROPY_TOL:
            raise UsageError("Lagrangian is not a graph over V+")
        f = M @ (b @ np.linalg.inv(a)) @ P.T if a.size else np.zeros((space.ambient_dim,) * 2)
        return LagrangianElement("real_graph", space, L, f)
    if space.ell == 1:
        V = space.plus.basis
        a = V.T @ L.basis
        b = (space.struct_I @ V).T @ L.basis
        if a.size and abs(np.linalg.det(a)) < ISOTROPY_TOL:
            raise UsageError("Lagrangian is not of the form L(J)")
        J = -V @ (b @ np.linalg.inv(a)) @ V.T if a.size else np.zeros((space.ambient_dim,) * 2)
        return LagrangianElement("complex_structure", space, L, J)
    if space.ell == 2 and space.struct_J is not None:
        V, Vbar = space.quaternionic_halves
        a, b = V.basis.T @ L.basis, Vbar.basis.T @ L.basis
        if a.size and abs(np.linalg.det(a)) < ISOTROPY_TOL:
            raise UsageError("Lagrangian is not a graph over V")
        J = Vbar.basis @ (b @ np.linalg.inv(a)) @ V.basis.T if a.size else np.zeros((space.ambient_dim,) * 2)
        return quaternionic_lagrangian(space, J)
    return LagrangianElement("subspace", space, L)



def lag_stabilize(L: LagrangianElement, epsilon: float, cfg: ToleranceConfig = DEFAULT_TOLERANCES
                  ) -> LagrangianElement:
    """L_delta -> L_delta + Eig_[-epsilon, -delta)(A_X) inside W_epsilon."""
    space = L.space
    if epsilon < space.delta:
        raise UsageError(f"Cannot stabilize from {space.delta} down to {epsilon}")
    model = eig_selfadjoint(space.A, cfg)
    shell = spectral_interval(model, -epsilon, -space.delta, cfg, include_hi=False)
    bigger = SplitQuadraticSpace(space.ell, spectral_interval(model, -epsilon, epsilon, cfg), space.sigma,
                                 space.A, float(epsilon), space.struct_I, space.operator, space.struct_J)
    return lagrangian_from_subspace(bigger, L.subspace.join(shell))


def _det_layout(space: SplitQuadraticSpace) -> Tuple[int, int]:
    if space.operator is None or space.ell != 0:
        raise UsageError("DET orientations need an l=0 space built by w_delta")
    rows, cols = space.operator.entries.shape
    return cols, rows


@dataclass(frozen=True, eq=False)
class OrientationPoint:
    """Point of O_l(D_X): DET for l=0, PF for l=1, SP for l=3,7, trivial otherwise."""
    ell: int
    payload: Optional[object] = None

    def __post_init__(self):
        expected = {0: DetElement, 1: PfElement, 3: SpElement, 7: SpElement}.get(self.ell % 8)
        if expected is None and self.payload is not None:
            raise UsageError(f"l={self.ell} has a trivial orientation torsor")
        if expected is not None and not isinstance(self.payload, expected):
            raise UsageError(f"l={self.ell} orientations are {expected.__name__} points")

    @property
    def is_trivial(self) -> bool:
        return self.payload is None

    def to_dict(self) -> dict:
        return {"ell": self.ell, "payload": None if self.payload is None else self.payload.to_dict()}


def lag_orientation(L: LagrangianElement, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> OrientationPoint:
    """(-1)^{dim V+} O(det f) for l=0 and (-1)^{dim_C Ker D_X} omega(J) for l=1.

    The l=1 sign is the printed (-1)^{dim_C V_[0,delta]} at delta = 0, carried
    to larger charts by the PF chart maps.
    """
    space = L.space
    if space.ell == 0 and L.kind == "real_graph":
        n0, _ = _det_layout(space)
        P = space.plus.canonical_basis()
        plus_word = P[:n0]
        f_block = L.structure[n0:, :n0]
        element = det_of_iso(f_block, plus_word)
        sign = -1.0 if P.shape[1] % 2 else 1.0
        point = det_make(space.operator.entries, space.delta, element.plus.word, element.dual.word, sign, cfg)
        return OrientationPoint(0, point)
    if space.ell == 1 and L.kind == "complex_structure":
        if space.operator is None:
            raise UsageError("PF orientations need an l=1 space built by w_delta")
        # real part sits in the even coordinates of the realified boundary model
        V = space.plus
        rows = np.arange(0, space.ambient_dim, 2)
        V_real = Subspace.span(V.basis[rows]) if V.dim else Subspace.zero(rows.size)
        J_real = L.structure[np.ix_(rows, rows)]
        omega = omega_of_J(J_real, V_real)
        # PF charts wedge the shell Eig_{-s}(A_X) = L(D_X / s); the sign is read at delta = 0
        kernel = skew_spectrum(space.operator.entries, cfg).kernel.shape[1]
        sign = -1.0 if (kernel // 2) % 2 else 1.0
        point = pf_make(space.operator.entries, space.delta, omega.word, sign * omega.coefficient, cfg)
        return OrientationPoint(1, point)
    raise UsageError(f"lag_orientation is defined for l=0 graphs and l=1 complex structures, got l={space.ell}")


def _eigenspace(basis: np.ndarray, g: np.ndarray, value: float, ambient_dim: int, rank_tol: float) -> Subspace:
    """Eig_value(g) for g given in the coordinates of basis, embedded in the ambient space."""
    if basis.shape[1] == 0:
        return Subspace.zero(ambient_dim, rank_tol)
    fixed = null_space(g - value * np.eye(basis.shape[1]), rcond=rank_tol)
    if fixed.shape[1] == 0:
        return Subspace.zero(ambient_dim, rank_tol)
    return Subspace.span(basis @ fixed, rank_tol)


def _projected_meet(L1: Subspace, L2: Subspace, onto: Subspace, rank_tol: float) -> Subspace:
    meet = Subspace(L1.basis, rank_tol).meet(Subspace(L2.basis, rank_tol))
    if meet.dim == 0:
        return Subspace.zero(meet.ambient_dim, rank_tol)
    return Subspace.span(onto.projector @ meet.basis, rank_tol)


def graph_intersection_identity(space: SplitQuadraticSpace, f1: np.ndarray, f2: np.ndarray,
                                cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> bool:
    """Gamma(f1) cap Gamma(f2) projects onto Eig_{+1}(f1 f2^{-1}) in V^-."""
    M = space.minus
    image = _projected_meet(real_graph(space, f1).subspace, real_graph(space, f2).subspace, M, cfg.rank_tol)
    g = M.basis.T @ f1 @ f2.T @ M.basis
    eig = _eigenspace(M.basis, g, 1.0, space.ambient_dim, cfg.rank_tol)
    return image.dim == eig.dim and image.equals(eig)


def complex_intersection_identity(space: SplitQuadraticSpace, J1: np.ndarray, J2: np.ndarray,
                                  cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> bool:
    """L(J1) cap L(J2) has its real part equal to Eig_{-1}(J1 J2) on V."""
    V = space.plus
    image = _projected_meet(complex_lagrangian(space, J1).subspace, complex_lagrangian(space, J2).subspace,
                            V, cfg.rank_tol)
    g = V.basis.T @ J1 @ J2 @ V.basis
    eig = _eigenspace(V.basis, g, -1.0, space.ambient_dim, cfg.rank_tol)
    return image.dim == eig.dim and image.equals(eig)


def component_comparison(space: SplitQuadraticSpace, f: np.ndarray, g: np.ndarray, L: Subspace) -> bool:
    """(-1)^{dim Gamma(f) cap L} = det(g) (-1)^{dim Gamma(f g) cap L} for g orthogonal on V^+."""
    P = space.plus.basis
    det_g = float(np.linalg.det(P.T @ g @ P)) if P.shape[1] else 1.0
    left = real_graph(space, f).subspace.meet(L).dim
    right = real_graph(space, f @ g).subspace.meet(L).dim
    return (-1) ** left == int(np.sign(det_g)) * (-1) ** right


def boundary_is_lagrangian(space: SplitQuadraticSpace, C: Subspace) -> bool:
    """Cauchy data of a bounding configuration is Lagrangian when sigma and A anticommute."""
    if not anticommuting(space.ell):
        raise UsageError(f"beta_delta is degenerate for l={space.ell}")
    return space.is_lagrangian(C)
