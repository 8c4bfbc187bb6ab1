"""Exact multivariate polynomials over the rationals.

Polynomials in ``d`` variables are stored as maps from exponent tuples to
``Fraction`` coefficients, so every ring operation, differentiation, and
determinant expansion below is exact.  This is the substrate for the
symbolic divergence-form identity checks: a residual there is the zero
polynomial or the identity fails, no tolerances involved.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations

__all__ = [
    "PolyField",
    "poly_zero",
    "poly_const",
    "poly_var",
    "poly_det",
    "perm_sign",
]

_Expo = tuple[int, ...]


def perm_sign(perm: tuple[int, ...]) -> int:
    """Sign of a permutation given as a tuple of 0-based images."""
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@dataclass(frozen=True)
class PolyField:
    """Polynomial in ``d`` variables with Fraction coefficients."""

    d: int
    terms: dict[_Expo, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean = {e: c for e, c in self.terms.items() if c != 0}
        object.__setattr__(self, "terms", clean)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def __add__(self, other: "PolyField") -> "PolyField":
        if self.d != other.d:
            raise ValueError("variable count mismatch")
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return PolyField(self.d, out)

    def __neg__(self) -> "PolyField":
        return PolyField(self.d, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "PolyField") -> "PolyField":
        return self + (-other)

    def __mul__(self, other: "PolyField") -> "PolyField":
        if self.d != other.d:
            raise ValueError("variable count mismatch")
        out: dict[_Expo, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return PolyField(self.d, out)

    def scale(self, c: Fraction | int) -> "PolyField":
        c = Fraction(c)
        return PolyField(self.d, {e: c * v for e, v in self.terms.items()})

    def diff(self, axis: int) -> "PolyField":
        """Exact partial derivative in variable ``axis``."""
        if not 0 <= axis < self.d:
            raise ValueError("axis out of range")
        out: dict[_Expo, Fraction] = {}
        for e, c in self.terms.items():
            k = e[axis]
            if k == 0:
                continue
            e2 = e[:axis] + (k - 1,) + e[axis + 1 :]
            out[e2] = out.get(e2, Fraction(0)) + c * k
        return PolyField(self.d, out)

    def eval(self, point: tuple[Fraction | int, ...]) -> Fraction:
        if len(point) != self.d:
            raise ValueError("point dimension mismatch")
        xs = [Fraction(x) for x in point]
        total = Fraction(0)
        for e, c in self.terms.items():
            v = c
            for x, k in zip(xs, e):
                v *= x**k
            total += v
        return total

    def __repr__(self) -> str:
        if not self.terms:
            return "PolyField(0)"
        parts = []
        for e, c in sorted(self.terms.items()):
            mono = "*".join(f"x{i}^{k}" for i, k in enumerate(e) if k)
            parts.append(f"{c}{'*' + mono if mono else ''}")
        return "PolyField(" + " + ".join(parts) + ")"


def poly_zero(d: int) -> PolyField:
    return PolyField(d, {})


def poly_const(d: int, c: Fraction | int) -> PolyField:
    return PolyField(d, {(0,) * d: Fraction(c)})


def poly_var(d: int, axis: int) -> PolyField:
    if not 0 <= axis < d:
        raise ValueError("axis out of range")
    expo = tuple(1 if i == axis else 0 for i in range(d))
    return PolyField(d, {expo: Fraction(1)})


def poly_det(matrix: list[list[PolyField]]) -> PolyField:
    """Determinant of a square matrix of polynomials (Leibniz expansion)."""
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("matrix is not square")
    if n == 0:
        raise ValueError("empty matrix")
    d = matrix[0][0].d
    out = poly_zero(d)
    for perm in permutations(range(n)):
        term = poly_const(d, perm_sign(perm))
        for i in range(n):
            term = term * matrix[i][perm[i]]
        out = out + term
    return out
