"""Delsarte linear programs over exact rationals.

``solve_lp`` runs a two-phase dense-tableau simplex with Bland's rule on a
growing subset of the constraint rows, adding the most violated rows until the
subset optimum is feasible for every row. ``verify_and_refine`` then checks
the resulting polynomial on whole intervals and feeds violations back as new
rows (cutting planes) until it is certified.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Protocol

from .config import VerifierConfig
from .gegenbauer import GegenbauerExpansion, expansion_to_poly, gegenbauer_poly, gegenbauer_values
from .polycore import (
    RadicalExpr,
    certify_sign,
    enclose_max,
    poly_enclose,
    poly_max_enclose,
    poly_min_enclose,
    radical_compose,
)
from .proofcheck import (
    ProofConstants,
    alpha_expr,
    beta_expr,
    check_claim,
    derive_bound,
    with_function,
)
from .ratcore import RationalInterval, RationalLike, format_rational, to_rational
from .types import ClaimId, DomainError, LPInfeasibleError, LPStatus, RefinementError, Relation, Verdict

logger = logging.getLogger(__name__)

COEFF_BITS = 64
NODE_BITS = 24
CUT_BITS = 40
SHIFT_MARGIN = Fraction(1, 1 << 40)


# ── Problem and solution types ────────────────────────────────────────


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[Fraction, ...]
    relation: Relation
    rhs: Fraction
    label: str = ""

    def lhs(self, x: Sequence[Fraction]) -> Fraction:
        return sum((a * v for a, v in zip(self.coeffs, x)), Fraction(0))

    def violation(self, x: Sequence[Fraction]) -> Fraction:
        """Positive amount by which ``x`` misses the constraint, else <= 0."""
        lhs = self.lhs(x)
        if self.relation == Relation.LE:
            return lhs - self.rhs
        if self.relation == Relation.GE:
            return self.rhs - lhs
        return abs(lhs - self.rhs)

    def blocks(self, ray: Sequence[Fraction]) -> Fraction:
        """How strongly the row stops movement along ``ray`` (> 0 blocks)."""
        d = self.lhs(ray)
        if self.relation == Relation.LE:
            return d
        if self.relation == Relation.GE:
            return -d
        return abs(d)


@dataclass
class LPProblem:
    """Maximize ``objective . x`` subject to the rows and ``x >= var_lower_bounds``."""

    num_vars: int
    objective: list[Fraction]
    constraints: list[Constraint]
    var_lower_bounds: list[Fraction]
    var_names: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.var_names:
            self.var_names = [f"x{i}" for i in range(self.num_vars)]
        if len(self.objective) != self.num_vars or len(self.var_lower_bounds) != self.num_vars:
            raise DomainError("objective and bounds must have one entry per variable")
        for con in self.constraints:
            if len(con.coeffs) != self.num_vars:
                raise DomainError(f"row {con.label!r} has {len(con.coeffs)} coefficients")

    def value(self, x: Sequence[Fraction]) -> Fraction:
        return sum((c * v for c, v in zip(self.objective, x)), Fraction(0))

    def is_feasible(self, x: Sequence[Fraction]) -> bool:
        return all(v >= lb for v, lb in zip(x, self.var_lower_bounds)) and all(
            con.violation(x) <= 0 for con in self.constraints
        )

    def with_constraints(self, rows: Iterable[Constraint]) -> LPProblem:
        return LPProblem(
            self.num_vars,
            list(self.objective),
            [*self.constraints, *rows],
            list(self.var_lower_bounds),
            list(self.var_names),
        )


@dataclass
class LPSolution:
    status: LPStatus
    x: list[Fraction] = field(default_factory=list)
    objective_value: Fraction | None = None
    ray: list[Fraction] | None = None
    active: tuple[int, ...] = ()
    pivots: int = 0


# ── Dense tableau simplex ─────────────────────────────────────────────


class _Tableau:
    def __init__(self, rows: list[list[Fraction]], rhs: list[Fraction], basis: list[int]):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.pivots = 0

    @property
    def width(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def pivot(self, r: int, j: int) -> None:
        piv = self.rows[r][j]
        row = [v / piv if v else v for v in self.rows[r]]
        rhs = self.rhs[r] / piv
        self.rows[r] = row
        self.rhs[r] = rhs
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            f = other[j]
            if f:
                self.rows[i] = [a - f * b if b else a for a, b in zip(other, row)]
                self.rhs[i] -= f * rhs
        self.basis[r] = j
        self.pivots += 1

    def value(self, cost: Sequence[Fraction]) -> Fraction:
        return sum((cost[b] * v for b, v in zip(self.basis, self.rhs)), Fraction(0))

    def optimize(self, cost: Sequence[Fraction], banned: set[int]) -> int | None:
        """Bland's rule; returns None at an optimum or the entering column of
        an unbounded direction."""
        n = len(cost)
        d = list(cost)
        for i, b in enumerate(self.basis):
            cb = cost[b]
            if cb:
                row = self.rows[i]
                for j in range(n):
                    if row[j]:
                        d[j] -= cb * row[j]
        while True:
            j = next((k for k in range(n) if k not in banned and d[k] > 0), None)
            if j is None:
                return None
            best: tuple[Fraction, int, int] | None = None
            for i, row in enumerate(self.rows):
                if row[j] > 0:
                    key = (self.rhs[i] / row[j], self.basis[i], i)
                    if best is None or key < best:
                        best = key
            if best is None:
                return j
            r = best[2]
            self.pivot(r, j)
            dj = d[j]
            row = self.rows[r]
            d = [a - dj * b if b else a for a, b in zip(d, row)]

    def drop_row(self, r: int) -> None:
        del self.rows[r]
        del self.rhs[r]
        del self.basis[r]


def _solve_subset(p: LPProblem, rows: Sequence[int]) -> LPSolution:
    n = p.num_vars
    lb = p.var_lower_bounds
    normalized: list[tuple[list[Fraction], int, Fraction, bool]] = []
    n_slack = 0
    for idx in rows:
        con = p.constraints[idx]
        a = list(con.coeffs)
        b = con.rhs - sum((c * v for c, v in zip(a, lb)), Fraction(0))
        if con.relation == Relation.GE:
            a, b = [-c for c in a], -b
        slack = 0
        if con.relation != Relation.EQ:
            n_slack += 1
            slack = 1
        if b < 0:
            a, b, slack = [-c for c in a], -b, -slack
        needs_art = con.relation == Relation.EQ or slack < 0
        normalized.append((a, slack, b, needs_art))

    n_art = sum(1 for *_, art in normalized if art)
    width = n + n_slack + n_art
    tab_rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    basis: list[int] = []
    s_col, a_col = n, n + n_slack
    for a, slack, b, art in normalized:
        row = a + [Fraction(0)] * (width - n)
        if slack:
            row[s_col] = Fraction(slack)
            if not art:
                basis.append(s_col)
            s_col += 1
        if art:
            row[a_col] = Fraction(1)
            basis.append(a_col)
            a_col += 1
        tab_rows.append(row)
        rhs.append(b)
    tab = _Tableau(tab_rows, rhs, basis)
    artificial = set(range(n + n_slack, width))

    if artificial:
        phase1 = [Fraction(-1) if j in artificial else Fraction(0) for j in range(width)]
        tab.optimize(phase1, set())
        if tab.value(phase1) < 0:
            return LPSolution(LPStatus.INFEASIBLE, active=tuple(rows), pivots=tab.pivots)
        r = 0
        while r < len(tab.rows):
            if tab.basis[r] in artificial:
                j = next((k for k in range(n + n_slack) if tab.rows[r][k]), None)
                if j is None:
                    tab.drop_row(r)
                    continue
                tab.pivot(r, j)
            r += 1

    cost = list(p.objective) + [Fraction(0)] * (width - n)
    entering = tab.optimize(cost, artificial)
    y = [Fraction(0)] * n
    for b, v in zip(tab.basis, tab.rhs):
        if b < n:
            y[b] = v
    x = [v + l for v, l in zip(y, lb)]
    if entering is None:
        return LPSolution(LPStatus.OPTIMAL, x, p.value(x), active=tuple(rows), pivots=tab.pivots)
    ray = [Fraction(0)] * n
    if entering < n:
        ray[entering] = Fraction(1)
    for i, b in enumerate(tab.basis):
        if b < n:
            ray[b] -= tab.rows[i][entering]
    return LPSolution(LPStatus.UNBOUNDED, x, p.value(x), ray, tuple(rows), tab.pivots)


def _initial_rows(p: LPProblem) -> list[int]:
    eq = [i for i, c in enumerate(p.constraints) if c.relation == Relation.EQ]
    rest = [i for i, c in enumerate(p.constraints) if c.relation != Relation.EQ]
    want = 2 * p.num_vars + 2
    if len(rest) <= want:
        return sorted(eq + rest)
    step = (len(rest) - 1) / (want - 1)
    picked = {rest[round(k * step)] for k in range(want)}
    return sorted(set(eq) | picked)


def solve_lp(p: LPProblem, initial_rows: Iterable[int] | None = None) -> LPSolution:
    """Exact optimum of ``p`` by row generation over the exact simplex."""
    active = set(_initial_rows(p) if initial_rows is None else initial_rows)
    active |= {i for i, c in enumerate(p.constraints) if c.relation == Relation.EQ}
    pivots = 0
    batch = p.num_vars + 1
    while True:
        sub = _solve_subset(p, sorted(active))
        pivots += sub.pivots
        if sub.status == LPStatus.INFEASIBLE:
            return LPSolution(LPStatus.INFEASIBLE, active=tuple(sorted(active)), pivots=pivots)
        outside = [i for i in range(len(p.constraints)) if i not in active]
        violated = sorted(
            (-v, i) for i in outside if (v := p.constraints[i].violation(sub.x)) > 0
        )
        add = [i for _, i in violated[:batch]]
        if sub.status == LPStatus.UNBOUNDED:
            blocking = sorted(
                (-s, i) for i in outside if (s := p.constraints[i].blocks(sub.ray)) > 0
            )
            add += [i for _, i in blocking[:batch] if i not in add]
            if not add:
                return LPSolution(
                    LPStatus.UNBOUNDED, sub.x, sub.objective_value, sub.ray, tuple(sorted(active)), pivots
                )
        elif not add:
            logger.debug("LP optimal with %d of %d rows active", len(active), len(p.constraints))
            return LPSolution(
                LPStatus.OPTIMAL, sub.x, sub.objective_value, None, tuple(sorted(active)), pivots
            )
        active.update(add)


# ── Grids ─────────────────────────────────────────────────────────────


def _round_up(q: Fraction, bits: int = COEFF_BITS) -> Fraction:
    scale = 1 << bits
    return Fraction(math.ceil(q * scale), scale)


def _round_down(q: Fraction, bits: int = COEFF_BITS) -> Fraction:
    scale = 1 << bits
    return Fraction(math.floor(q * scale), scale)


def _round_into(q: Fraction, iv: RationalInterval, bits: int) -> Fraction:
    scale = 1 << bits
    r = Fraction(round(q * scale), scale)
    return min(max(r, iv.lo), iv.hi)


def uniform_nodes(lo: RationalLike, hi: RationalLike, n: int) -> list[Fraction]:
    a, b = to_rational(lo), to_rational(hi)
    return [a + (b - a) * j / (n - 1) for j in range(n)]


def lobatto_nodes(iv: RationalInterval, n: int, bits: int = NODE_BITS) -> list[Fraction]:
    """Chebyshev-Lobatto nodes rounded to dyadic rationals; endpoints exact."""
    if n < 2:
        raise DomainError(f"a grid needs at least 2 nodes, got {n}")
    mid, half = float(iv.mid), float(iv.width) / 2
    scale = 1 << bits
    inner = {
        Fraction(round((mid - half * math.cos(math.pi * j / (n - 1))) * scale), scale)
        for j in range(1, n - 1)
    }
    inside = sorted(t for t in inner if iv.lo < t < iv.hi)
    return [iv.lo, *inside, iv.hi]


# ── Classical Delsarte LP ─────────────────────────────────────────────


def _classical_row(d: int, degree: int, t: Fraction) -> Constraint:
    g = gegenbauer_values(d, degree, t)
    return Constraint(tuple(g[1:]), Relation.LE, Fraction(-1), f"grid:{format_rational(t)}")


def build_classical_lp(d: int, cos_theta: RationalLike, degree: int, grid_size: int) -> LPProblem:
    """``f = 1 + sum c_k G_k`` with ``c_k >= 0`` and ``f(t) <= 0`` on a uniform
    grid of ``[-1, cos_theta]``; maximizing ``-sum c_k`` minimizes ``f(1)``."""
    ct = to_rational(cos_theta)
    if d < 3:
        raise DomainError(f"dimension must be >= 3, got {d}")
    if not -1 < ct < 1:
        raise DomainError(f"cos_theta must lie in (-1, 1), got {ct}")
    if degree < 1:
        raise DomainError(f"degree must be >= 1, got {degree}")
    if grid_size < 2:
        raise DomainError(f"grid_size must be >= 2, got {grid_size}")
    rows = [_classical_row(d, degree, t) for t in uniform_nodes(-1, ct, grid_size)]
    return LPProblem(
        num_vars=degree,
        objective=[Fraction(-1)] * degree,
        constraints=rows,
        var_lower_bounds=[Fraction(0)] * degree,
        var_names=[f"c{k}" for k in range(1, degree + 1)],
    )


# ── Extended (case-analysis) LP ───────────────────────────────────────

FAMILIES = ("negativity", "one_point", "two_point", "three_point", "monotone", "convexity")

# how many copies of f each shift-correctable family contains
_SHIFT_WEIGHT = {"negativity": 1, "one_point": 2, "two_point": 3, "three_point": 4}


@dataclass(frozen=True)
class Violation:
    family: str
    point: Fraction
    amount: Fraction


class ExtendedRows:
    """Row factory for the six families of the three-dimensional argument."""

    def __init__(self, support: Sequence[int], threshold: RationalLike, config: VerifierConfig):
        support = sorted(set(support))
        if not support:
            raise DomainError("support must not be empty")
        if support[0] < 0:
            raise DomainError(f"negative Gegenbauer index in support: {support[0]}")
        if 0 not in support:
            raise DomainError("support must contain 0")
        self.support = support
        self.threshold = to_rational(threshold)
        self.config = config
        self.constants = ProofConstants(self.threshold, GegenbauerExpansion(3, {}), config.enclosure_width)
        self._polys = [gegenbauer_poly(3, k) for k in support]
        self._d1 = [g.derivative() for g in self._polys]
        self._d2 = [g.derivative() for g in self._d1]
        self.alpha = alpha_expr()
        self.beta = beta_expr()

    def interval(self, family: str) -> RationalInterval:
        c = self.constants
        return {
            "negativity": c.negativity_interval,
            "one_point": c.one_point_interval,
            "two_point": c.two_point_interval,
            "three_point": c.three_point_interval,
            "monotone": c.two_point_interval,
            "convexity": c.shape_interval,
        }[family]

    def _values(self, t: Fraction) -> list[Fraction]:
        g = gegenbauer_values(3, self.support[-1], t)
        return [g[k] for k in self.support]

    def _radical_hi(self, expr: RadicalExpr, t: Fraction) -> list[Fraction]:
        at = expr.value_at(t, self.config.enclosure_width)
        return [poly_enclose(g, at).hi for g in self._polys]

    def row(self, family: str, t: Fraction, margin: Fraction = Fraction(0)) -> Constraint:
        label = f"{family}:{format_rational(t)}"
        if family == "negativity":
            coeffs = [_round_up(v) for v in self._values(t)]
            return Constraint(tuple(coeffs), Relation.LE, Fraction(0), label)
        if family == "one_point":
            coeffs = [_round_up(1 + v) for v in self._values(t)]
            return Constraint(tuple(coeffs), Relation.LE, self.threshold, label)
        if family == "two_point":
            far = self._radical_hi(self.alpha, t)
            coeffs = [_round_up(1 + v + w) for v, w in zip(self._values(t), far)]
            return Constraint(tuple(coeffs), Relation.LE, self.threshold, label)
        if family == "three_point":
            far = self._radical_hi(self.beta, t)
            coeffs = [_round_up(1 + 2 * v + w) for v, w in zip(self._values(t), far)]
            return Constraint(tuple(coeffs), Relation.LE, self.threshold, label)
        if family == "monotone":
            coeffs = [_round_up(g(t)) for g in self._d1]
            return Constraint(tuple(coeffs), Relation.LE, -margin, label)
        if family == "convexity":
            coeffs = [_round_down(g(t)) for g in self._d2]
            return Constraint(tuple(coeffs), Relation.GE, margin, label)
        raise DomainError(f"unknown constraint family {family!r}")


def build_extended_lp(
    support: Sequence[int],
    threshold: RationalLike,
    grids: int | dict[str, int] = 512,
    config: VerifierConfig | None = None,
) -> LPProblem:
    """Maximize ``c_0`` over ``c_k >= 0`` (k in support) subject to the six
    families sampled on Chebyshev-Lobatto grids.

    Radical terms use upper enclosure endpoints and every coefficient is
    rounded outward, so a grid-feasible point satisfies the exact grid
    constraints.
    """
    return _extended_problem(ExtendedRows(support, threshold, config or VerifierConfig()), grids)


def _extended_problem(rows: ExtendedRows, grids: int | dict[str, int]) -> LPProblem:
    sizes = grids if isinstance(grids, dict) else {f: grids for f in FAMILIES}
    constraints = [
        rows.row(family, t)
        for family in FAMILIES
        for t in lobatto_nodes(rows.interval(family), sizes.get(family, 512))
    ]
    n = len(rows.support)
    return LPProblem(
        num_vars=n,
        objective=[Fraction(1) if k == 0 else Fraction(0) for k in rows.support],
        constraints=constraints,
        var_lower_bounds=[Fraction(0)] * n,
        var_names=[f"c{k}" for k in rows.support],
    )


# ── Refinement ────────────────────────────────────────────────────────


class RefinableProgram(Protocol):
    problem: LPProblem

    def expansion(self, x: Sequence[Fraction]) -> GegenbauerExpansion: ...

    def violations(self, f: GegenbauerExpansion) -> list[Violation]: ...

    def cut_rows(self, found: Sequence[Violation]) -> list[Constraint]: ...

    def repair(self, f: GegenbauerExpansion, found: Sequence[Violation]) -> tuple[GegenbauerExpansion, Fraction] | None: ...

    def certify(self, f: GegenbauerExpansion) -> bool: ...


class ClassicalProgram:
    def __init__(self, d: int, cos_theta: RationalLike, degree: int, grid_size: int, config: VerifierConfig):
        self.d = d
        self.cos_theta = to_rational(cos_theta)
        self.degree = degree
        self.config = config
        self.problem = build_classical_lp(d, self.cos_theta, degree, grid_size)
        self.interval = RationalInterval(-1, self.cos_theta)

    def expansion(self, x: Sequence[Fraction]) -> GegenbauerExpansion:
        return GegenbauerExpansion(self.d, {0: Fraction(1), **{k + 1: v for k, v in enumerate(x)}})

    def violations(self, f: GegenbauerExpansion) -> list[Violation]:
        p = expansion_to_poly(f)
        if certify_sign(p, self.interval).is_nonpositive:
            return []
        peak = poly_max_enclose(p, self.interval, self.config.isolation_width)
        return [Violation("grid", t, v.hi) for t, v in peak.values if v.hi > 0]

    def cut_rows(self, found: Sequence[Violation]) -> list[Constraint]:
        points = sorted({_round_into(v.point, self.interval, CUT_BITS) for v in found})
        return [_classical_row(self.d, self.degree, t) for t in points]

    def repair(self, f: GegenbauerExpansion, found: Sequence[Violation]) -> tuple[GegenbauerExpansion, Fraction] | None:
        worst = max((v.amount for v in found), default=Fraction(0))
        shift = _round_up(worst, CUT_BITS)
        if shift >= f.c0:
            return None
        return f.with_coeff(0, f.c0 - shift), shift

    def certify(self, f: GegenbauerExpansion) -> bool:
        return (
            f.c0 > 0
            and f.is_admissible()
            and certify_sign(expansion_to_poly(f), self.interval).is_nonpositive
        )


class ExtendedProgram:
    def __init__(self, support: Sequence[int], threshold: RationalLike, grids: int | dict[str, int], config: VerifierConfig):
        self.rows = ExtendedRows(support, threshold, config)
        self.config = config
        self.problem = _extended_problem(self.rows, grids)

    def expansion(self, x: Sequence[Fraction]) -> GegenbauerExpansion:
        return GegenbauerExpansion(3, dict(zip(self.rows.support, x)))

    def solution_for(self, f: GegenbauerExpansion) -> LPSolution:
        x = [f.coeff(k) for k in self.rows.support]
        return LPSolution(LPStatus.OPTIMAL, x, self.problem.value(x))

    def violations(self, f: GegenbauerExpansion) -> list[Violation]:
        cfg = self.config
        rows = self.rows
        p = expansion_to_poly(f)
        f1 = p(1)
        thr = rows.threshold
        w = cfg.isolation_width
        found: list[Violation] = []

        iv = rows.interval("negativity")
        if not certify_sign(p, iv).is_nonpositive:
            peak = poly_max_enclose(p, iv, w)
            found += [Violation("negativity", t, v.hi) for t, v in peak.values if v.hi > 0]

        peak = poly_max_enclose(p, rows.interval("one_point"), w)
        found += [
            Violation("one_point", t, f1 + v.hi - thr) for t, v in peak.values if f1 + v.hi > thr
        ]

        base = RadicalExpr.polynomial(p)
        for family, terms in (
            ("two_point", [base, radical_compose(p, rows.alpha)]),
            ("three_point", [base, base, radical_compose(p, rows.beta)]),
        ):
            res = enclose_max(terms, rows.interval(family), cfg.bnb_eps, cfg.bnb_max_depth)
            excess = f1 + res.enclosure.hi - thr
            if excess > 0:
                found.append(Violation(family, res.argmax, excess))

        iv = rows.interval("monotone")
        dp = p.derivative()
        if not certify_sign(dp, iv).is_nonpositive:
            peak = poly_max_enclose(dp, iv, w)
            found += [Violation("monotone", t, v.hi) for t, v in peak.values if v.hi > 0]

        iv = rows.interval("convexity")
        d2p = dp.derivative()
        if not certify_sign(d2p, iv).is_nonnegative:
            low = poly_min_enclose(d2p, iv, w)
            found += [Violation("convexity", t, -v.lo) for t, v in low.values if v.lo < 0]
        return found

    def cut_rows(self, found: Sequence[Violation]) -> list[Constraint]:
        cuts = {}
        for v in found:
            iv = self.rows.interval(v.family)
            t = _round_into(v.point, iv, CUT_BITS)
            margin = v.amount if v.family in ("monotone", "convexity") else Fraction(0)
            key = (v.family, t)
            cuts[key] = max(cuts.get(key, margin), margin)
        return [self.rows.row(fam, t, margin) for (fam, t), margin in sorted(cuts.items())]

    def repair(self, f: GegenbauerExpansion, found: Sequence[Violation]) -> tuple[GegenbauerExpansion, Fraction] | None:
        if any(v.family not in _SHIFT_WEIGHT for v in found):
            return None
        shift = max((v.amount / _SHIFT_WEIGHT[v.family] for v in found), default=Fraction(0))
        shift = _round_up(shift, CUT_BITS) + SHIFT_MARGIN
        if shift >= f.c0:
            return None
        return f.with_coeff(0, f.c0 - shift), shift

    def certify(self, f: GegenbauerExpansion) -> bool:
        if not f.is_admissible() or f.c0 <= 0:
            return False
        constants = with_function(self.rows.constants, f)
        return all(check_claim(cid, constants, self.config).verdict == Verdict.PASS for cid in ClaimId)


@dataclass
class RefineReport:
    expansion: GegenbauerExpansion | None
    certified: bool
    rounds: int
    cuts: int
    shift: Fraction
    solution: LPSolution
    problem: LPProblem
    remaining: list[Violation] = field(default_factory=list)
    message: str = ""


def verify_and_refine(program: RefinableProgram, sol: LPSolution, max_rounds: int) -> RefineReport:
    """Certify the polynomial behind ``sol`` on whole intervals.

    Each round turns the violations found by exact interval checks into new
    LP rows and re-solves. Whatever violation is left after ``max_rounds`` is
    repaired by lowering ``c_0`` where that helps; the result is only reported
    as certified after an independent replay of every check.
    """
    if sol.status != LPStatus.OPTIMAL:
        raise DomainError(f"cannot refine a {sol.status} solution")
    problem = program.problem
    f = program.expansion(sol.x)
    rounds = cuts = 0
    found = program.violations(f)
    while found and rounds < max_rounds:
        new_rows = program.cut_rows(found)
        first = len(problem.constraints)
        problem = problem.with_constraints(new_rows)
        sol = solve_lp(problem, [*sol.active, *range(first, len(problem.constraints))])
        rounds += 1
        cuts += len(new_rows)
        logger.info("refinement round %d: %d cuts, objective %s", rounds, len(new_rows), sol.objective_value)
        if sol.status != LPStatus.OPTIMAL:
            return RefineReport(None, False, rounds, cuts, Fraction(0), sol, problem, list(found), f"cut LP is {sol.status}")
        f = program.expansion(sol.x)
        found = program.violations(f)

    shift = Fraction(0)
    if found:
        repaired = program.repair(f, found)
        if repaired is None:
            return RefineReport(
                f, False, rounds, cuts, shift, sol, problem, list(found),
                f"{len(found)} violations left after {rounds} rounds",
            )
        f, shift = repaired
    certified = program.certify(f)
    message = "certified" if certified else "replay failed"
    return RefineReport(f, certified, rounds, cuts, shift, sol, problem, [] if certified else list(found), message)


# ── Entry points ──────────────────────────────────────────────────────


@dataclass
class ClassicalBound:
    d: int
    cos_theta: Fraction
    degree: int
    bound: Fraction
    grid_value: Fraction
    refine: RefineReport


def classical_bound(
    d: int,
    cos_theta: RationalLike,
    degree: int,
    grid_size: int | None = None,
    max_rounds: int | None = None,
    config: VerifierConfig | None = None,
) -> ClassicalBound:
    """Certified Delsarte bound ``f(1)/c_0`` for spherical codes with minimal
    angular distance ``arccos(cos_theta)``."""
    cfg = config or VerifierConfig()
    program = ClassicalProgram(d, cos_theta, degree, grid_size or cfg.classical_grid, cfg)
    sol = solve_lp(program.problem)
    if sol.status != LPStatus.OPTIMAL:
        raise LPInfeasibleError(f"classical LP for d={d}, degree={degree} is {sol.status}")
    grid_value = 1 - sol.objective_value
    report = verify_and_refine(program, sol, cfg.refine_rounds if max_rounds is None else max_rounds)
    if not report.certified or report.expansion is None:
        raise RefinementError(f"could not certify the classical LP solution: {report.message}")
    f = report.expansion
    bound = expansion_to_poly(f)(1) / f.c0
    logger.info("d=%d degree=%d: grid value %s, certified %s", d, degree, grid_value, bound)
    return ClassicalBound(d, to_rational(cos_theta), degree, bound, grid_value, report)


def kissing_bound(d: int, degree: int, grid_size: int | None = None, config: VerifierConfig | None = None) -> Fraction:
    """Certified classical LP bound on the kissing number in dimension ``d``."""
    return classical_bound(d, Fraction(1, 2), degree, grid_size, config=config).bound


def grid_lp_value(d: int, cos_theta: RationalLike, degree: int, grid_size: int) -> Fraction | None:
    """Optimal ``f(1)`` of the grid LP, or None when it is infeasible."""
    sol = solve_lp(build_classical_lp(d, cos_theta, degree, grid_size))
    if sol.status != LPStatus.OPTIMAL:
        return None
    return 1 - sol.objective_value


@dataclass
class SearchResult:
    support: list[int]
    threshold: Fraction
    solution: LPSolution
    refine: RefineReport | None
    ratio: Fraction | None
    max_n: int | None

    @property
    def expansion(self) -> GegenbauerExpansion | None:
        return self.refine.expansion if self.refine else None

    @property
    def certified(self) -> bool:
        return bool(self.refine and self.refine.certified and self.max_n is not None)


def extended_search(
    support: Sequence[int],
    threshold: RationalLike,
    grids: int | dict[str, int] | None = None,
    config: VerifierConfig | None = None,
    warm_start: GegenbauerExpansion | None = None,
) -> SearchResult:
    """Maximize the constant term under the case-analysis constraints, then
    certify the result on the continuous intervals."""
    cfg = config or VerifierConfig()
    program = ExtendedProgram(support, threshold, cfg.extended_grid if grids is None else grids, cfg)
    thr = to_rational(threshold)
    sol = program.solution_for(warm_start) if warm_start is not None else solve_lp(program.problem)
    if sol.status != LPStatus.OPTIMAL:
        logger.warning("extended LP is %s", sol.status)
        return SearchResult(program.rows.support, thr, sol, None, None, None)
    report = verify_and_refine(program, sol, cfg.refine_rounds)
    ratio = max_n = None
    f = report.expansion
    if report.certified and f is not None and f.c0 > 0:
        ratio, max_n = derive_bound(thr, f.c0)
    return SearchResult(program.rows.support, thr, report.solution, report, ratio, max_n)
