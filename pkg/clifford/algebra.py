"""Exact Clifford algebras Cl_n with e_k e_l + e_l e_k = -2 delta_kl."""

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Dict, Iterator, Tuple

import sympy

from utils.errors import DimensionMismatchError

Blade = Tuple[int, ...]


def blade_product(a: Blade, b: Blade) -> Tuple[int, Blade]:
    """Sign and blade of e_a e_b, generators squaring to -1."""
    word = list(a) + list(b)
    sign = 1
    # bubble sort, one sign flip per transposition of distinct generators
    for i in range(len(word)):
        for j in range(len(word) - 1 - i):
            if word[j] > word[j + 1]:
                word[j], word[j + 1] = word[j + 1], word[j]
                sign = -sign
    reduced = []
    for g in word:
        if reduced and reduced[-1] == g:
            reduced.pop()
            sign = -sign
        else:
            reduced.append(g)
    return sign, tuple(reduced)


@dataclass(frozen=True)
class CliffordElement:
    """Element of Cl_n as rational coefficients on increasing blades."""
    n: int
    coeffs: Dict[Blade, sympy.Rational] = field(default_factory=dict)

    @classmethod
    def scalar(cls, n: int, value=1) -> "CliffordElement":
        return cls(n, {(): sympy.Rational(value)}) if value else cls(n, {})

    @classmethod
    def generator(cls, n: int, k: int) -> "CliffordElement":
        if not 1 <= k <= n:
            raise DimensionMismatchError(f"Generator e_{k} not in Cl_{n}")
        return cls(n, {(k,): sympy.Rational(1)})

    @classmethod
    def blade(cls, n: int, indices: Blade, value=1) -> "CliffordElement":
        sign, blade = blade_product(tuple(indices), ())
        return cls(n, {blade: sympy.Rational(sign * value)})

    def terms(self) -> Iterator[Tuple[Blade, sympy.Rational]]:
        return iter(sorted(self.coeffs.items()))

    def __add__(self, other: "CliffordElement") -> "CliffordElement":
        _check_same(self, other)
        out = dict(self.coeffs)
        for blade, c in other.coeffs.items():
            out[blade] = out.get(blade, 0) + c
        return CliffordElement(self.n, _prune(out))

    def __neg__(self) -> "CliffordElement":
        return CliffordElement(self.n, {b: -c for b, c in self.coeffs.items()})

    def __sub__(self, other: "CliffordElement") -> "CliffordElement":
        return self + (-other)

    def __mul__(self, other: "CliffordElement") -> "CliffordElement":
        return cl_mul(self, other)

    def scale(self, value) -> "CliffordElement":
        return CliffordElement(self.n, _prune({b: c * value for b, c in self.coeffs.items()}))

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, CliffordElement):
            return NotImplemented
        return self.n == other.n and (self - other).is_zero()

    def __hash__(self) -> int:
        return hash((self.n, tuple(sorted(self.coeffs.items()))))

    def to_dict(self) -> Dict[str, str]:
        return {"".join(map(str, b)) or "1": str(c) for b, c in self.terms()}


def _prune(coeffs: Dict[Blade, sympy.Rational]) -> Dict[Blade, sympy.Rational]:
    return {b: sympy.Rational(c) for b, c in coeffs.items() if c != 0}


def _check_same(a: CliffordElement, b: CliffordElement) -> None:
    if a.n != b.n:
        raise DimensionMismatchError(f"Cl_{a.n} and Cl_{b.n} elements cannot be combined")


def cl_mul(a: CliffordElement, b: CliffordElement) -> CliffordElement:
    """Product in the blade basis with exact signs."""
    _check_same(a, b)
    out: Dict[Blade, sympy.Rational] = {}
    for blade_a, ca in a.coeffs.items():
        for blade_b, cb in b.coeffs.items():
            sign, blade = blade_product(blade_a, blade_b)
            out[blade] = out.get(blade, 0) + sign * ca * cb
    return CliffordElement(a.n, _prune(out))


def cl_volume(n: int) -> CliffordElement:
    """omega_n = e_1 ... e_n."""
    return CliffordElement.blade(n, tuple(range(1, n + 1)))


def cl_alpha(a: CliffordElement) -> CliffordElement:
    """Grade involution e_k -> -e_k."""
    return CliffordElement(a.n, {b: c * (-1) ** len(b) for b, c in a.coeffs.items()})


def cl_even_iso(n: int) -> Callable[[CliffordElement], CliffordElement]:
    """The map j_{n-1}: Cl_{n-1} -> Cl_n^0 with e_k -> e_k e_n, extended multiplicatively."""
    if n < 1:
        raise DimensionMismatchError("cl_even_iso needs n >= 1")
    images = {k: cl_mul(CliffordElement.generator(n, k), CliffordElement.generator(n, n))
              for k in range(1, n)}

    def apply(x: CliffordElement) -> CliffordElement:
        if x.n != n - 1:
            raise DimensionMismatchError(f"j_{n - 1} expects an element of Cl_{n - 1}")
        result = CliffordElement(n, {})
        for blade, c in x.coeffs.items():
            term = CliffordElement.scalar(n, 1)
            for k in blade:
                term = cl_mul(term, images[k])
            result = result + term.scale(c)
        return result

    return apply


def all_blades(n: int) -> Iterator[Blade]:
    for k in range(n + 1):
        yield from combinations(range(1, n + 1), k)


def volume_identities(n: int) -> Dict[str, bool]:
    """omega_n^2 = (-1)^{n(n+1)/2} and omega_n e_k = (-1)^{n+1} e_k omega_n."""
    omega = cl_volume(n)
    square_ok = cl_mul(omega, omega) == CliffordElement.scalar(n, (-1) ** (n * (n + 1) // 2))
    commute_ok = all(
        cl_mul(omega, CliffordElement.generator(n, k))
        == cl_mul(CliffordElement.generator(n, k), omega).scale((-1) ** (n + 1))
        for k in range(1, n + 1)
    )
    return {"omega_square": square_ok, "omega_commutation": commute_ok}


def even_iso_identities(n: int) -> Dict[str, bool]:
    """j_{n-1} respects the Clifford relations and lands in the even part."""
    j = cl_even_iso(n)
    relations = True
    even = True
    for k in range(1, n):
        ek = j(CliffordElement.generator(n - 1, k))
        even = even and all(len(b) % 2 == 0 for b in ek.coeffs)
        for l in range(1, n):
            el = j(CliffordElement.generator(n - 1, l))
            expected = CliffordElement.scalar(n, -2 if k == l else 0)
            relations = relations and (cl_mul(ek, el) + cl_mul(el, ek) == expected)
    return {"even_relations": relations, "even_part": even}
