"""Exact polynomial algebra over the rationals.

Evaluation and calculus, Sturm chains, root counting and isolation, sign
certification on intervals, range enclosures of ``P + Q*sqrt(R)`` expressions,
and a best-first branch-and-bound that proves upper bounds on their maxima.
Every decision is made by exact rational comparison.
"""

from __future__ import annotations

import heapq
import itertools
import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from .ratcore import (
    RationalInterval,
    RationalLike,
    format_rational,
    sqrt_enclose,
    to_rational,
)
from .types import DomainError, PreconditionError, SignTag, Verdict

logger = logging.getLogger(__name__)


class Polynomial:
    """Dense monomial-basis polynomial; ``coeffs[i]`` multiplies ``t**i``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[RationalLike] = (0,)) -> None:
        cs = [to_rational(c) for c in coeffs]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        if not cs:
            cs = [Fraction(0)]
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def constant(cls, c: RationalLike) -> Polynomial:
        return cls([c])

    @classmethod
    def identity(cls) -> Polynomial:
        return cls([0, 1])

    @classmethod
    def from_roots(cls, roots: Iterable[RationalLike], lead: RationalLike = 1) -> Polynomial:
        p = cls.constant(lead)
        for r in roots:
            p = p * cls([-to_rational(r), 1])
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1]

    def __call__(self, t: RationalLike) -> Fraction:
        x = to_rational(t)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Polynomial):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == (Fraction(other),)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Polynomial([{', '.join(format_rational(c) for c in self.coeffs)}])"

    def __neg__(self) -> Polynomial:
        return Polynomial(-c for c in self.coeffs)

    def __add__(self, other: Polynomial | RationalLike) -> Polynomial:
        o = other if isinstance(other, Polynomial) else Polynomial.constant(other)
        n = max(len(self.coeffs), len(o.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = o.coeffs + (Fraction(0),) * (n - len(o.coeffs))
        return Polynomial(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __sub__(self, other: Polynomial | RationalLike) -> Polynomial:
        o = other if isinstance(other, Polynomial) else Polynomial.constant(other)
        return self + (-o)

    def __rsub__(self, other: RationalLike) -> Polynomial:
        return Polynomial.constant(other) - self

    def __mul__(self, other: Polynomial | RationalLike) -> Polynomial:
        if not isinstance(other, Polynomial):
            q = to_rational(other)
            return Polynomial(c * q for c in self.coeffs)
        if self.is_zero or other.is_zero:
            return Polynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __divmod__(self, other: Polynomial) -> tuple[Polynomial, Polynomial]:
        if other.is_zero:
            raise DomainError("polynomial division by zero")
        rem = list(self.coeffs)
        dv = other.coeffs
        dn = len(dv) - 1
        quot = [Fraction(0)] * max(len(rem) - dn, 1)
        for i in range(len(rem) - 1 - dn, -1, -1):
            coef = rem[i + dn] / dv[-1]
            quot[i] = coef
            if coef:
                for j, d in enumerate(dv):
                    rem[i + j] -= coef * d
        return Polynomial(quot), Polynomial(rem[:dn] if dn else [0])

    def __floordiv__(self, other: Polynomial) -> Polynomial:
        return divmod(self, other)[0]

    def __mod__(self, other: Polynomial) -> Polynomial:
        return divmod(self, other)[1]

    def derivative(self) -> Polynomial:
        if len(self.coeffs) == 1:
            return Polynomial()
        return Polynomial(i * c for i, c in enumerate(self.coeffs) if i > 0)

    def compose(self, inner: Polynomial) -> Polynomial:
        acc = Polynomial()
        for c in reversed(self.coeffs):
            acc = acc * inner + c
        return acc

    def taylor_shift(self, m: RationalLike) -> list[Fraction]:
        """Coefficients ``b`` with ``p(m + h) = sum(b[i] * h**i)``."""
        x = to_rational(m)
        b = list(self.coeffs)
        n = len(b)
        for i in range(n - 1):
            for j in range(n - 2, i - 1, -1):
                b[j] += x * b[j + 1]
        return b

    def to_strings(self) -> list[str]:
        return [format_rational(c) for c in self.coeffs]


def poly_eval(p: Polynomial, t: RationalLike) -> Fraction:
    return p(t)


def poly_derivative(p: Polynomial) -> Polynomial:
    return p.derivative()


# ── Sturm chains and roots ────────────────────────────────────────────


def sturm_sequence(p: Polynomial) -> list[Polynomial]:
    """``s0 = p, s1 = p', s_{i+1} = -rem(s_{i-1}, s_i)`` down to the gcd."""
    if p.is_zero:
        raise DomainError("Sturm sequence of the zero polynomial")
    seq = [p]
    dp = p.derivative()
    if dp.is_zero:
        return seq
    seq.append(dp)
    while True:
        r = seq[-2] % seq[-1]
        if r.is_zero:
            return seq
        seq.append(-r)


def _sign_variations(seq: Sequence[Polynomial], x: Fraction) -> int:
    signs = [v > 0 for v in (s(x) for s in seq) if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _count_between(seq: Sequence[Polynomial], a: Fraction, b: Fraction) -> int:
    # roots of seq[0] in (a, b); neither endpoint may be a root
    return _sign_variations(seq, a) - _sign_variations(seq, b)


def deflate(p: Polynomial, r: RationalLike) -> Polynomial:
    """Divide out every factor ``(t - r)`` of ``p``."""
    x = to_rational(r)
    factor = Polynomial([-x, 1])
    while not p.is_zero and p.degree > 0 and p(x) == 0:
        p = p // factor
    return p


def count_roots(p: Polynomial, iv: RationalInterval) -> int:
    """Number of distinct real roots of ``p`` in the closed interval ``iv``.

    Rational endpoint roots are counted and then removed by exact deflation,
    so the Sturm count always runs between non-root endpoints.
    """
    if p.is_zero:
        raise PreconditionError("the zero polynomial has infinitely many roots")
    count = 0
    q = p
    for r in dict.fromkeys((iv.lo, iv.hi)):
        if q(r) == 0:
            count += 1
            q = deflate(q, r)
    if iv.is_point or q.degree == 0:
        return count
    return count + _count_between(sturm_sequence(q), iv.lo, iv.hi)


def isolate_roots(
    p: Polynomial, iv: RationalInterval, width: RationalLike
) -> list[RationalInterval]:
    """Disjoint intervals, each of width <= ``width`` and holding exactly one
    root of ``p``, covering every root in ``iv``.

    Rational roots hit exactly are returned as point intervals; the other
    intervals have non-root endpoints.
    """
    if p.is_zero:
        raise PreconditionError("cannot isolate the roots of the zero polynomial")
    w = to_rational(width)
    if w <= 0:
        raise DomainError(f"isolation width must be positive, got {w}")

    exact: list[Fraction] = []
    q = p
    for r in dict.fromkeys((iv.lo, iv.hi)):
        if q(r) == 0:
            exact.append(r)
            q = deflate(q, r)
    found: list[RationalInterval] = [RationalInterval.point(r) for r in exact]
    if iv.is_point or q.degree == 0:
        return sorted(found, key=lambda j: (j.lo, j.hi))

    seq = sturm_sequence(q)
    stack = [(iv.lo, iv.hi, _count_between(seq, iv.lo, iv.hi))]
    while stack:
        a, b, n = stack.pop()
        if n == 0:
            continue
        if n == 1 and b - a <= w and p(a) != 0 and p(b) != 0:
            found.append(RationalInterval(a, b))
            continue
        m = (a + b) / 2
        if q(m) == 0:
            found.append(RationalInterval.point(m))
            q = deflate(q, m)
            seq = sturm_sequence(q) if q.degree > 0 else [q]
        stack.append((m, b, _count_between(seq, m, b)))
        stack.append((a, m, _count_between(seq, a, m)))
    return sorted(found, key=lambda j: (j.lo, j.hi))


# ── Sign certification ────────────────────────────────────────────────


@dataclass(frozen=True)
class SignVerdict:
    tag: SignTag
    witnesses: tuple[RationalInterval, ...] = ()

    @property
    def is_nonpositive(self) -> bool:
        return self.tag in (SignTag.NONPOSITIVE, SignTag.STRICTLY_NEGATIVE_INTERIOR)

    @property
    def is_nonnegative(self) -> bool:
        return self.tag == SignTag.NONNEGATIVE

    @property
    def root_count(self) -> int:
        return len(self.witnesses)

    def to_dict(self) -> dict:
        return {
            "tag": str(self.tag),
            "root_count": self.root_count,
            "witnesses": [str(w) for w in self.witnesses],
        }


def certify_sign(p: Polynomial, iv: RationalInterval) -> SignVerdict:
    """Decide exactly whether ``p`` keeps one sign on ``iv``.

    The roots in ``iv`` split it into open pieces on which ``p`` has constant
    nonzero sign; one exact sample per piece settles the verdict.
    """
    if p.is_zero:
        return SignVerdict(SignTag.NONPOSITIVE)
    if iv.is_point:
        v = p(iv.lo)
        if v > 0:
            return SignVerdict(SignTag.NONNEGATIVE)
        if v < 0:
            return SignVerdict(SignTag.STRICTLY_NEGATIVE_INTERIOR)
        return SignVerdict(SignTag.NONPOSITIVE, (iv,))

    roots = isolate_roots(p, iv, iv.width)
    edges = [iv.lo, *itertools.chain.from_iterable((j.lo, j.hi) for j in roots), iv.hi]
    signs: list[int] = []
    for left, right in zip(edges[::2], edges[1::2]):
        v = p((left + right) / 2)
        if v != 0:
            signs.append(1 if v > 0 else -1)

    if all(s < 0 for s in signs):
        interior = [j for j in roots if not (j.is_point and j.lo in (iv.lo, iv.hi))]
        tag = SignTag.NONPOSITIVE if interior else SignTag.STRICTLY_NEGATIVE_INTERIOR
        return SignVerdict(tag, tuple(roots))
    if all(s > 0 for s in signs):
        return SignVerdict(SignTag.NONNEGATIVE, tuple(roots))

    return SignVerdict(SignTag.MIXED, tuple(roots))


# ── Range enclosures ──────────────────────────────────────────────────


def poly_enclose(p: Polynomial, iv: RationalInterval) -> RationalInterval:
    """Taylor-form enclosure of ``{p(t) : t in iv}`` around the midpoint."""
    if iv.is_point or p.degree == 0:
        v = p(iv.lo)
        return RationalInterval(v, v)
    b = p.taylor_shift(iv.mid)
    r = iv.width / 2
    lo = hi = b[0]
    power = Fraction(1)
    for i, c in enumerate(b[1:], start=1):
        power *= r
        term = c * power
        if i % 2:
            lo -= abs(term)
            hi += abs(term)
        elif term > 0:
            hi += term
        else:
            lo += term
    return RationalInterval(lo, hi)


@dataclass(frozen=True)
class PolyMax:
    enclosure: RationalInterval
    argmax: Fraction
    candidates: int
    values: tuple[tuple[Fraction, RationalInterval], ...] = ()


def poly_max_enclose(
    p: Polynomial, iv: RationalInterval, width: RationalLike
) -> PolyMax:
    """Certified enclosure of ``max p`` over ``iv`` from exact endpoint values
    and enclosures of ``p`` on isolated critical points.

    ``values`` lists every candidate as ``(point, enclosure of p there)``.
    """
    values: list[tuple[Fraction, RationalInterval]] = [
        (x, RationalInterval.point(p(x))) for x in dict.fromkeys((iv.lo, iv.hi))
    ]
    dp = p.derivative()
    if not dp.is_zero and not iv.is_point:
        for j in isolate_roots(dp, iv, width):
            values.append((j.mid, poly_enclose(p, j)))
    lo = max(v.lo for _, v in values)
    hi = max(v.hi for _, v in values)
    argmax = max(values, key=lambda item: item[1].lo)[0]
    return PolyMax(RationalInterval(lo, hi), argmax, len(values), tuple(values))


def poly_min_enclose(
    p: Polynomial, iv: RationalInterval, width: RationalLike
) -> PolyMax:
    res = poly_max_enclose(-p, iv, width)
    return PolyMax(
        -res.enclosure,
        res.argmax,
        res.candidates,
        tuple((x, -v) for x, v in res.values),
    )


# ── P + Q*sqrt(R) expressions ─────────────────────────────────────────


@dataclass(frozen=True)
class RadicalExpr:
    """``t -> p(t) + q(t) * sqrt(r(t))``."""

    p: Polynomial
    q: Polynomial = field(default_factory=Polynomial)
    r: Polynomial = field(default_factory=Polynomial)

    @classmethod
    def polynomial(cls, p: Polynomial | RationalLike) -> RadicalExpr:
        poly = p if isinstance(p, Polynomial) else Polynomial.constant(p)
        return cls(poly)

    @property
    def is_polynomial(self) -> bool:
        return self.q.is_zero

    def _radicand_with(self, other: RadicalExpr) -> Polynomial:
        if self.is_polynomial:
            return other.r
        if other.is_polynomial or self.r == other.r:
            return self.r
        raise DomainError("cannot combine expressions with different radicands")

    def __add__(self, other: RadicalExpr | Polynomial | RationalLike) -> RadicalExpr:
        o = other if isinstance(other, RadicalExpr) else RadicalExpr.polynomial(other)
        r = self._radicand_with(o)
        return RadicalExpr(self.p + o.p, self.q + o.q, r)

    __radd__ = __add__

    def __mul__(self, other: RadicalExpr | Polynomial | RationalLike) -> RadicalExpr:
        o = other if isinstance(other, RadicalExpr) else RadicalExpr.polynomial(other)
        r = self._radicand_with(o)
        return RadicalExpr(
            self.p * o.p + self.q * o.q * r,
            self.p * o.q + self.q * o.p,
            r if not (self.is_polynomial and o.is_polynomial) else Polynomial(),
        )

    __rmul__ = __mul__

    def value_at(self, t: RationalLike, eps: RationalLike) -> RationalInterval:
        return _point_value(_Prepared.of(self), to_rational(t), to_rational(eps))

    def to_dict(self) -> dict:
        return {"p": self.p.to_strings(), "q": self.q.to_strings(), "r": self.r.to_strings()}


def radical_compose(f: Polynomial, inner: RadicalExpr) -> RadicalExpr:
    """Exact ``f(inner(t))`` with even powers of the radical folded into P."""
    if f.is_zero:
        return RadicalExpr(Polynomial(), Polynomial(), inner.r)
    acc = RadicalExpr.polynomial(f.leading)
    for c in reversed(f.coeffs[:-1]):
        acc = acc * inner + c
    if acc.is_polynomial:
        return RadicalExpr(acc.p, Polynomial(), inner.r)
    return acc


@dataclass(frozen=True)
class _Prepared:
    expr: RadicalExpr
    dp: Polynomial
    dq: Polynomial
    dr: Polynomial

    @classmethod
    def of(cls, e: RadicalExpr) -> _Prepared:
        return cls(e, e.p.derivative(), e.q.derivative(), e.r.derivative())


def _sqrt_eps(eps: Fraction, q_mag: Fraction) -> Fraction:
    return eps / (4 * (1 + q_mag))


def _point_value(g: _Prepared, t: Fraction, eps: Fraction) -> RationalInterval:
    e = g.expr
    pv = e.p(t)
    if e.is_polynomial:
        return RationalInterval(pv, pv)
    rv = e.r(t)
    if rv < 0:
        raise DomainError(f"radicand is negative at t={format_rational(t)}")
    qv = e.q(t)
    s = sqrt_enclose(RationalInterval(rv, rv), _sqrt_eps(eps, abs(qv)))
    return s.scale(qv).shift(pv)


def _radicand_range(
    g: _Prepared, tv: RationalInterval, certified: bool
) -> RationalInterval:
    rn = poly_enclose(g.expr.r, tv)
    if rn.lo >= 0:
        return rn
    if not certified and not certify_sign(g.expr.r, tv).is_nonnegative:
        raise DomainError(f"radicand may be negative on {tv}")
    return RationalInterval(0, max(rn.hi, Fraction(0)))


def _enclose(
    g: _Prepared, tv: RationalInterval, eps: Fraction, certified: bool
) -> RationalInterval:
    e = g.expr
    if tv.is_point:
        return _point_value(g, tv.lo, eps)
    pn = poly_enclose(e.p, tv)
    if e.is_polynomial:
        return pn
    qn = poly_enclose(e.q, tv)
    sn = sqrt_enclose(_radicand_range(g, tv, certified), _sqrt_eps(eps, qn.magnitude()))
    natural = pn + qn * sn
    if sn.lo <= 0:
        return natural
    # mean-value form: e(t) in e(m) + e'(tv) * (tv - m)
    half = tv.width / 2
    slope = (
        poly_enclose(g.dp, tv)
        + poly_enclose(g.dq, tv) * sn
        + qn * poly_enclose(g.dr, tv) * sn.reciprocal().scale(Fraction(1, 2))
    )
    mean_value = _point_value(g, tv.mid, eps) + slope * RationalInterval(-half, half)
    return natural.intersect(mean_value)


def radical_eval_enclose(
    e: RadicalExpr, tv: RationalInterval, eps: RationalLike
) -> RationalInterval:
    """Enclosure of ``{e(t) : t in tv}``; the radicand must be certified
    nonnegative on ``tv`` (checked exactly when the range bound dips below 0)."""
    return _enclose(_Prepared.of(e), tv, to_rational(eps), certified=False)


# ── Branch and bound ──────────────────────────────────────────────────


@dataclass(frozen=True)
class BoundResult:
    verdict: Verdict
    enclosure: RationalInterval | None = None
    witness: RationalInterval | None = None
    nodes: int = 0
    depth: int = 0
    argmax: Fraction | None = None

    def to_dict(self) -> dict:
        return {
            "verdict": str(self.verdict),
            "enclosure": str(self.enclosure) if self.enclosure else None,
            "witness": str(self.witness) if self.witness else None,
            "nodes": self.nodes,
            "max_depth_reached": self.depth,
        }


def combine_terms(terms: Sequence[RadicalExpr]) -> list[RadicalExpr]:
    """Sum terms sharing a radicand into single expressions."""
    poly_part = Polynomial()
    groups: list[RadicalExpr] = []
    for term in terms:
        if term.is_polynomial:
            poly_part = poly_part + term.p
            continue
        for i, g in enumerate(groups):
            if g.r == term.r:
                groups[i] = g + term
                break
        else:
            groups.append(term)
    if not groups:
        return [RadicalExpr.polynomial(poly_part)]
    groups[0] = groups[0] + poly_part
    return groups


def certify_max_bound(
    terms: Sequence[RadicalExpr],
    iv: RationalInterval,
    bound: RationalLike | None,
    eps: RationalLike,
    max_depth: int,
) -> BoundResult:
    """Prove ``sup over iv of sum(terms) <= bound`` by best-first bisection.

    A node closes once its upper enclosure is <= bound and within ``eps`` of
    the best certified lower sample (or at ``max_depth``), so a Pass also
    carries a tight enclosure of the maximum. A sample or node whose lower
    enclosure exceeds ``bound`` is returned as a Fail witness. With
    ``bound=None`` the search only tightens the enclosure of the maximum.
    """
    tol = to_rational(eps)
    groups = [_Prepared.of(g) for g in combine_terms(terms)]
    for g in groups:
        if not g.expr.is_polynomial and not certify_sign(g.expr.r, iv).is_nonnegative:
            raise DomainError(f"radicand is not certified nonnegative on {iv}")

    def enclose(tv: RationalInterval) -> RationalInterval:
        total = RationalInterval(0, 0)
        for g in groups:
            total = total + _enclose(g, tv, tol, certified=True)
        return total

    def sample(t: Fraction) -> RationalInterval:
        total = RationalInterval(0, 0)
        for g in groups:
            total = total + _point_value(g, t, tol)
        return total

    root = enclose(iv)
    limit = root.hi if bound is None else to_rational(bound)

    best: Fraction | None = None
    best_at = iv.lo
    for t in dict.fromkeys((iv.lo, iv.hi, iv.mid)):
        s = sample(t)
        if s.lo > limit:
            return BoundResult(Verdict.FAIL, s, RationalInterval.point(t), 0, 0, t)
        if best is None or s.lo > best:
            best, best_at = s.lo, t

    counter = itertools.count()
    heap = [(-root.hi, next(counter), iv, root, 0)]
    nodes = 0
    deepest = 0
    while heap:
        _, _, tv, enc, depth = heapq.heappop(heap)
        nodes += 1
        deepest = max(deepest, depth)
        exhausted = depth >= max_depth or tv.is_point
        if enc.hi <= limit and (enc.hi - best <= tol or exhausted):
            lo = min(best, enc.hi)
            logger.debug("bound %s certified after %d nodes", format_rational(limit), nodes)
            return BoundResult(
                Verdict.PASS, RationalInterval(lo, enc.hi), None, nodes, deepest, best_at
            )
        if enc.lo > limit:
            return BoundResult(Verdict.FAIL, enc, tv, nodes, deepest, tv.mid)
        if exhausted:
            logger.debug("max depth %d reached on %s", max_depth, tv)
            return BoundResult(Verdict.INCONCLUSIVE, enc, tv, nodes, deepest, tv.mid)
        m = tv.mid
        s = sample(m)
        if s.lo > limit:
            return BoundResult(Verdict.FAIL, s, RationalInterval.point(m), nodes, deepest, m)
        if s.lo > best:
            best, best_at = s.lo, m
        for child in (RationalInterval(tv.lo, m), RationalInterval(m, tv.hi)):
            ce = enclose(child)
            heapq.heappush(heap, (-ce.hi, next(counter), child, ce, depth + 1))
    raise AssertionError("branch-and-bound heap drained without a verdict")


def enclose_max(
    terms: Sequence[RadicalExpr], iv: RationalInterval, eps: RationalLike, max_depth: int
) -> BoundResult:
    """Enclosure of ``max over iv of sum(terms)`` to width about ``eps``."""
    return certify_max_bound(terms, iv, None, eps, max_depth)
