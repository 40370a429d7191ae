"""Graded lines det V as explicit wedge words over a Euclidean ambient space.

A word is a matrix whose columns are the wedge factors. Dual words store
covectors through the metric and are written in the order they are wedged:
the stored word [w_1, ..., w_n] is w_1^* ^ ... ^ w_n^*, and it pairs with
v_1 ^ ... ^ v_n through det[<v_j, w_{n+1-i}>]. Words are numpy arrays
(float mode) or sympy matrices (exact mode).
"""

import logging
from dataclasses import dataclass, replace
from typing import Tuple, Union

import numpy as np
import sympy

from numeric.subspaces import Subspace
from utils.errors import DegeneratePairingError, DimensionMismatchError, UsageError

logger = logging.getLogger(__name__)

Word = Union[np.ndarray, sympy.Matrix]

_FLOAT_TOL = 1e-9


def is_exact(word: Word) -> bool:
    return isinstance(word, sympy.MatrixBase)


def _cols(word: Word) -> int:
    return word.shape[1]


def _hstack(a: Word, b: Word) -> Word:
    if is_exact(a) or is_exact(b):
        return sympy.Matrix.hstack(sympy.Matrix(a), sympy.Matrix(b))
    return np.hstack([a, b])


def _reverse(word: Word) -> Word:
    if is_exact(word):
        return word[:, list(range(word.shape[1] - 1, -1, -1))]
    return word[:, ::-1].copy()


def _det(M: Word):
    if is_exact(M):
        return M.det() if M.shape[0] else sympy.Integer(1)
    return float(np.linalg.det(M)) if M.shape[0] else 1.0


def _rank(word: Word) -> int:
    if is_exact(word):
        return word.rank()
    if word.size == 0:
        return 0
    return int(np.linalg.matrix_rank(word, tol=_FLOAT_TOL * max(1.0, np.abs(word).max())))


def dual_basis(word: Word) -> Word:
    """Vectors representing the dual basis on span(word): V (V^T V)^{-1}."""
    if _cols(word) == 0:
        return word
    if is_exact(word):
        return word * (word.T * word).inv()
    return word @ np.linalg.inv(word.T @ word)


def coordinates(word: Word, basis: Word) -> Word:
    """C with word = basis C; raises if word leaves span(basis)."""
    if is_exact(word) or is_exact(basis):
        word, basis = sympy.Matrix(word), sympy.Matrix(basis)
        C = (basis.T * basis).inv() * basis.T * word
        if basis * C != word:
            raise DimensionMismatchError("Words span different subspaces")
        return C
    C, *_ = np.linalg.lstsq(basis, word, rcond=None)
    residual = np.linalg.norm(basis @ C - word)
    if residual > 1e-7 * max(1.0, np.linalg.norm(word)):
        raise DimensionMismatchError("Words span different subspaces", {"residual": float(residual)})
    return C


@dataclass(frozen=True, eq=False)
class GradedLineElement:
    """coefficient * (wedge of the columns of word), in det V or det(V^*)."""
    word: Word
    coefficient: Union[float, sympy.Expr] = 1.0
    dual_flag: bool = False

    @classmethod
    def unit(cls, ambient_dim: int, dual_flag: bool = False, exact: bool = False) -> "GradedLineElement":
        """The empty wedge, 1 in det(0)."""
        word = sympy.zeros(ambient_dim, 0) if exact else np.zeros((ambient_dim, 0))
        return cls(word, sympy.Integer(1) if exact else 1.0, dual_flag)

    @property
    def ambient_dim(self) -> int:
        return self.word.shape[0]

    @property
    def length(self) -> int:
        return _cols(self.word)

    @property
    def parity(self) -> int:
        return -1 if self.length % 2 else 1

    @property
    def exact(self) -> bool:
        return is_exact(self.word)

    def span(self) -> Subspace:
        return Subspace.span(np.array(self.word, dtype=float))

    def scaled(self, factor) -> "GradedLineElement":
        return replace(self, coefficient=self.coefficient * factor)

    def negated(self) -> "GradedLineElement":
        return self.scaled(-1)

    def ratio_to(self, other: "GradedLineElement"):
        """The scalar r with self = r * other."""
        _check_compatible(self, other)
        if self.length != other.length:
            raise DimensionMismatchError(f"Wedge lengths differ: {self.length} vs {other.length}")
        if self.length == 0:
            return self.coefficient / other.coefficient
        C = coordinates(self.word, other.word)
        return self.coefficient * _det(C) / other.coefficient

    def equals(self, other: "GradedLineElement", tol: float = 1e-9) -> bool:
        try:
            r = self.ratio_to(other)
        except DimensionMismatchError:
            return False
        if self.exact and other.exact:
            return sympy.simplify(r - 1) == 0
        return abs(float(r) - 1.0) <= tol

    def orientation_sign(self, reference: "GradedLineElement") -> int:
        r = float(self.ratio_to(reference))
        if r == 0:
            raise DegeneratePairingError("Zero element has no orientation")
        return 1 if r > 0 else -1

    def to_dict(self) -> dict:
        return {
            "word": np.array(self.word, dtype=float).tolist(),
            "coefficient": float(self.coefficient),
            "dual": self.dual_flag,
            "parity": self.parity
        }


def _check_compatible(a: GradedLineElement, b: GradedLineElement) -> None:
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatchError(f"Ambient dims differ: {a.ambient_dim} vs {b.ambient_dim}")
    if a.dual_flag != b.dual_flag:
        raise DimensionMismatchError("Cannot combine a line with a dual line")


def wedge_concat(a: GradedLineElement, b: GradedLineElement) -> GradedLineElement:
    """det U (x) det W -> det(U + W) by concatenating words."""
    _check_compatible(a, b)
    word = _hstack(a.word, b.word)
    if _rank(word) < _cols(word):
        raise DimensionMismatchError("Wedge factors span dependent subspaces",
                                     {"lengths": [a.length, b.length]})
    return GradedLineElement(word, a.coefficient * b.coefficient, a.dual_flag)


def braid_sign(n1: int, n2: int) -> int:
    return -1 if (n1 * n2) % 2 else 1


def braid(a: GradedLineElement, b: GradedLineElement) -> Tuple[GradedLineElement, GradedLineElement]:
    """a (x) b -> (-1)^{|a||b|} b (x) a; the sign is carried by the first factor."""
    return b.scaled(braid_sign(a.length, b.length)), a


def dual_volume(omega: GradedLineElement) -> GradedLineElement:
    """omega^* = v_n^* ^ ... ^ v_1^* / c for omega = c v_1 ^ ... ^ v_n."""
    if omega.dual_flag:
        raise UsageError("dual_volume expects an element of det V")
    if _rank(omega.word) < omega.length:
        raise DegeneratePairingError("Volume word is degenerate")
    return GradedLineElement(_reverse(dual_basis(omega.word)), 1 / omega.coefficient, True)


def eval_pairing(omega: GradedLineElement, eta: GradedLineElement):
    """<omega, eta> = c d det[<v_j, alpha_i>] with alpha_i the i-th covector from the right."""
    if omega.dual_flag or not eta.dual_flag:
        raise UsageError("eval_pairing pairs det V with det(V^*)")
    if omega.ambient_dim != eta.ambient_dim or omega.length != eta.length:
        raise DegeneratePairingError("Pairing between lines of different shapes",
                                     {"lengths": [omega.length, eta.length]})
    alphas = _reverse(eta.word)
    gram = alphas.T * omega.word if omega.exact or eta.exact else alphas.T @ omega.word
    value = omega.coefficient * eta.coefficient * _det(gram)
    if (is_exact(gram) and value == 0) or (not is_exact(gram) and abs(float(value)) < _FLOAT_TOL):
        raise DegeneratePairingError("Pairing is degenerate")
    return value


def dual_tensor_iso(a_dual: GradedLineElement, b_dual: GradedLineElement) -> GradedLineElement:
    """a^* (x) b^* -> (b (x) a)^*, pairing factor by factor with b ^ a."""
    if not (a_dual.dual_flag and b_dual.dual_flag):
        raise UsageError("dual_tensor_iso expects two dual lines")
    return wedge_concat(a_dual, b_dual)


@dataclass(frozen=True, eq=False)
class LineTensor:
    """plus (x) dual with plus in det U and dual in det(W^*); the coefficient lives on plus."""
    plus: GradedLineElement
    dual: GradedLineElement

    @property
    def parity(self) -> int:
        return self.plus.parity * self.dual.parity

    def ratio_to(self, other: "LineTensor"):
        return self.plus.ratio_to(other.plus) * self.dual.ratio_to(other.dual)

    def equals(self, other: "LineTensor", tol: float = 1e-9) -> bool:
        try:
            r = self.ratio_to(other)
        except DimensionMismatchError:
            return False
        if self.plus.exact:
            return sympy.simplify(r - 1) == 0
        return abs(float(r) - 1.0) <= tol

    def scaled(self, factor) -> "LineTensor":
        return LineTensor(self.plus.scaled(factor), self.dual)

    def to_dict(self) -> dict:
        return {"plus": self.plus.to_dict(), "dual": self.dual.to_dict()}


def det_of_iso(f: Word, basis: Word) -> LineTensor:
    """v_1 ^ ... ^ v_n (x) f(v_n)^* ^ ... ^ f(v_1)^* for an isomorphism f: V -> W."""
    image = f * basis if is_exact(f) or is_exact(basis) else np.asarray(f) @ basis
    if _rank(image) < _cols(basis):
        raise DegeneratePairingError("det_of_iso needs an invertible map")
    one = sympy.Integer(1) if is_exact(image) else 1.0
    plus = GradedLineElement(basis, one)
    dual = GradedLineElement(_reverse(dual_basis(image)), one, True)
    return LineTensor(plus, dual)


def omega_of_J(J: np.ndarray, V: Subspace, tol: float = 1e-8) -> GradedLineElement:
    """v_1 ^ ... ^ v_m ^ J v_m ^ ... ^ J v_1 for a complex structure J on V."""
    J = np.asarray(getattr(J, "entries", J), dtype=float)
    B = V.basis
    if V.dim % 2:
        raise UsageError("omega_of_J needs an even-dimensional space")
    if V.dim and (np.linalg.norm(J @ B - V.projector @ J @ B) > tol
                  or np.linalg.norm(J @ (J @ B) + B) > tol):
        raise UsageError("J is not a complex structure on V")
    chosen = []
    images = []
    remaining = V.canonical_basis()
    span = np.zeros((V.ambient_dim, 0))
    while len(chosen) < V.dim // 2:
        residual = remaining - span @ (span.T @ remaining)
        norms = np.linalg.norm(residual, axis=0)
        pick = int(np.flatnonzero(norms > 1e-6)[0])
        # unit vector orthogonal to the J-invariant span, so the frame stays unitary
        v = residual[:, pick] / norms[pick]
        chosen.append(v)
        images.append(J @ v)
        span = Subspace.span(np.column_stack(chosen + images)).basis
    word = np.column_stack(chosen + images[::-1]) if chosen else np.zeros((V.ambient_dim, 0))
    return GradedLineElement(word, 1.0)
