"""Gegenbauer polynomials normalized to ``G_k(1) = 1`` and expansions in them."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .polycore import Polynomial
from .ratcore import RationalLike, format_rational, to_rational
from .types import DomainError


def _check_dim(d: int) -> None:
    if d < 3:
        raise DomainError(f"Gegenbauer recursion needs d >= 3, got d={d}")


@lru_cache(maxsize=None)
def gegenbauer_poly(d: int, k: int) -> Polynomial:
    """``G_k^(d)`` via ``(d+k-3) G_k = (d+2k-4) t G_{k-1} - (k-1) G_{k-2}``."""
    _check_dim(d)
    if k < 0:
        raise DomainError(f"Gegenbauer index must be >= 0, got k={k}")
    if k == 0:
        return Polynomial.constant(1)
    if k == 1:
        return Polynomial.identity()
    t = Polynomial.identity()
    num = gegenbauer_poly(d, k - 1) * t * (d + 2 * k - 4) - gegenbauer_poly(d, k - 2) * (k - 1)
    return num * Fraction(1, d + k - 3)


def gegenbauer_values(d: int, degree: int, t: RationalLike) -> list[Fraction]:
    """``[G_0(t), ..., G_degree(t)]`` by running the recursion on numbers."""
    _check_dim(d)
    x = to_rational(t)
    values = [Fraction(1), x]
    for k in range(2, degree + 1):
        values.append(((d + 2 * k - 4) * x * values[-1] - (k - 1) * values[-2]) / (d + k - 3))
    return values[: degree + 1]


@dataclass(frozen=True)
class GegenbauerExpansion:
    """``sum(c_k * G_k^(dim))`` with a sparse coefficient map; zeros are dropped."""

    dim: int
    coeffs: Mapping[int, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        _check_dim(self.dim)
        cleaned = {}
        for k, c in sorted(self.coeffs.items()):
            if k < 0:
                raise DomainError(f"negative Gegenbauer index {k}")
            q = to_rational(c)
            if q != 0:
                cleaned[int(k)] = q
        object.__setattr__(self, "coeffs", cleaned)

    @classmethod
    def from_pairs(cls, dim: int, pairs: Sequence[tuple[int, RationalLike]]) -> GegenbauerExpansion:
        return cls(dim, {k: to_rational(c) for k, c in pairs})

    def coeff(self, k: int) -> Fraction:
        return self.coeffs.get(k, Fraction(0))

    @property
    def degree(self) -> int:
        return max(self.coeffs, default=0)

    @property
    def c0(self) -> Fraction:
        return self.coeff(0)

    def is_admissible(self) -> bool:
        return all(c >= 0 for c in self.coeffs.values())

    def negative_indices(self) -> list[int]:
        return [k for k, c in self.coeffs.items() if c < 0]

    def with_coeff(self, k: int, c: RationalLike) -> GegenbauerExpansion:
        updated = dict(self.coeffs)
        updated[k] = to_rational(c)
        return GegenbauerExpansion(self.dim, updated)

    def negated(self, k: int) -> GegenbauerExpansion:
        return self.with_coeff(k, -self.coeff(k))

    def pairs(self) -> list[tuple[int, str]]:
        return [(k, format_rational(c)) for k, c in self.coeffs.items()]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GegenbauerExpansion):
            return NotImplemented
        return self.dim == other.dim and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.dim, tuple(self.coeffs.items())))


def expansion_to_poly(e: GegenbauerExpansion) -> Polynomial:
    total = Polynomial()
    for k, c in e.coeffs.items():
        total = total + gegenbauer_poly(e.dim, k) * c
    return total


def poly_to_expansion(p: Polynomial, d: int) -> GegenbauerExpansion:
    """Invert :func:`expansion_to_poly` by peeling off the top degree."""
    _check_dim(d)
    rest = p
    coeffs: dict[int, Fraction] = {}
    while not rest.is_zero:
        k = rest.degree
        g = gegenbauer_poly(d, k)
        c = rest.leading / g.leading
        coeffs[k] = c
        rest = rest - g * c
    return GegenbauerExpansion(d, coeffs)


def positivity_quadform(points: Sequence[Sequence[RationalLike]], d: int, k: int) -> Fraction:
    """Exact ``sum_{i,j} G_k(<x_i, x_j>)`` over unit points with rational coordinates.

    Nonnegative for every finite point set (Delsarte positivity).
    """
    vecs = [tuple(to_rational(x) for x in p) for p in points]
    for v in vecs:
        if len(v) != d:
            raise DomainError(f"point {v} does not have dimension {d}")
        if sum(x * x for x in v) != 1:
            raise DomainError(f"point is not on the unit sphere: {[format_rational(x) for x in v]}")
    g = gegenbauer_poly(d, k)
    total = Fraction(0)
    n = len(vecs)
    for i in range(n):
        total += g(1)
        for j in range(i + 1, n):
            total += 2 * g(sum(a * b for a, b in zip(vecs[i], vecs[j])))
    return total
