"""Points on spheres, the cap lemma, the icosahedron, and randomized checks of
the master inequality and of Delsarte positivity."""

from __future__ import annotations

import heapq
import itertools
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial

import numpy as np

from .gegenbauer import GegenbauerExpansion, expansion_to_poly, positivity_quadform
from .polycore import Polynomial, poly_enclose
from .ratcore import RationalInterval, RationalLike, format_rational, sqrt_enclose, sqrt_rational, to_rational
from .types import DomainError, ModeError, PointMode, Verdict
from .workers import ordered_map

logger = logging.getLogger(__name__)

FLOAT_UNIT_TOL = 1e-12
FLOAT_SEPARATION_TOL = 1e-9
MIN_COS_SEP = Fraction(1, 2)

_CAP_CHUNK = 10_000


@dataclass(frozen=True)
class SpherePoint:
    coords: tuple
    mode: PointMode

    @classmethod
    def exact(cls, coords: Sequence[RationalLike]) -> SpherePoint:
        cs = tuple(to_rational(c) for c in coords)
        if sum(c * c for c in cs) != 1:
            raise DomainError(f"not a unit vector: {[format_rational(c) for c in cs]}")
        return cls(cs, PointMode.EXACT)

    @classmethod
    def from_float(cls, coords: Sequence[float]) -> SpherePoint:
        cs = tuple(float(c) for c in coords)
        if abs(math.fsum(c * c for c in cs) - 1.0) > FLOAT_UNIT_TOL:
            raise DomainError(f"not a unit vector within {FLOAT_UNIT_TOL}: {cs}")
        return cls(cs, PointMode.FLOAT)

    @property
    def dim(self) -> int:
        return len(self.coords)

    def as_array(self) -> np.ndarray:
        return np.array([float(c) for c in self.coords])

    def to_strings(self) -> list[str]:
        if self.mode == PointMode.EXACT:
            return [format_rational(c) for c in self.coords]
        return [repr(c) for c in self.coords]


def rational_sphere_point_nd(u: Sequence[RationalLike]) -> SpherePoint:
    """Inverse stereographic projection of ``u`` in Q^(n-1) onto S^(n-1)."""
    us = [to_rational(x) for x in u]
    s = sum(x * x for x in us)
    return SpherePoint.exact([*(2 * x / (s + 1) for x in us), (s - 1) / (s + 1)])


def rational_sphere_point(a: RationalLike, b: RationalLike) -> SpherePoint:
    return rational_sphere_point_nd([a, b])


def inner(u: SpherePoint, v: SpherePoint) -> Fraction | float:
    if u.mode != v.mode:
        raise ModeError(f"cannot mix {u.mode} and {v.mode} points")
    if u.dim != v.dim:
        raise DomainError(f"dimension mismatch: {u.dim} != {v.dim}")
    if u.mode == PointMode.EXACT:
        return sum((a * b for a, b in zip(u.coords, v.coords)), Fraction(0))
    return math.fsum(a * b for a, b in zip(u.coords, v.coords))


def spherical_cos_rule(a: float, b: float, gamma: float) -> float:
    """Cosine of the side opposite ``gamma`` in a spherical triangle."""
    return float(np.cos(a) * np.cos(b) + np.sin(a) * np.sin(b) * np.cos(gamma))


@dataclass
class Configuration:
    points: list[SpherePoint]
    min_cos_sep: Fraction = MIN_COS_SEP

    def gram(self) -> np.ndarray:
        if not self.points:
            return np.zeros((0, 0))
        x = np.stack([p.as_array() for p in self.points])
        return np.clip(np.einsum("id,jd->ij", x, x), -1.0, 1.0)

    def max_off_diagonal(self) -> float:
        n = len(self.points)
        if n < 2:
            return -1.0
        g = self.gram()
        return float(g[~np.eye(n, dtype=bool)].max())

    def is_valid(self) -> bool:
        if all(p.mode == PointMode.EXACT for p in self.points):
            return all(
                inner(u, v) <= self.min_cos_sep
                for u, v in itertools.combinations(self.points, 2)
            )
        return self.max_off_diagonal() <= float(self.min_cos_sep) + FLOAT_SEPARATION_TOL

    def min_separation(self) -> float:
        """Smallest pairwise angle in radians."""
        return float(np.arccos(self.max_off_diagonal()))


def master_sums(config: Configuration, f: GegenbauerExpansion) -> np.ndarray:
    """Float ``sum_j f(<x_i, x_j>)`` for every point ``x_i``."""
    coeffs = [float(c) for c in expansion_to_poly(f).coeffs]
    return np.polynomial.polynomial.polyval(config.gram(), coeffs).sum(axis=1)


# ── Cap lemma ─────────────────────────────────────────────────────────


@dataclass
class CapLemmaReport:
    verdict: Verdict
    infimum: RationalInterval
    minimizer_boxes: int
    boxes_touch_corner: bool
    nodes: int
    samples: int
    seed: int
    counterexamples: int
    worst_max_cos: float | None = None


def _cos_rule_bounds(box: tuple[RationalInterval, ...], eps: Fraction) -> tuple[Fraction, Fraction]:
    """Lower bound of ``sqrt(pq) + sqrt((1-p)(1-q)) w`` on the box and an
    upper bound of its value at the lower corner."""
    p, q, w = box
    one = RationalInterval(1, 1)
    near = sqrt_enclose(p * q, eps)
    far = sqrt_enclose((one - p) * (one - q), eps)
    lower = near.lo + far.lo * w.lo
    corner_near = sqrt_enclose(RationalInterval.point(p.lo * q.lo), eps)
    corner_far = sqrt_enclose(RationalInterval.point((1 - p.lo) * (1 - q.lo)), eps)
    upper = corner_near.hi + corner_far.hi * w.lo
    return lower, upper


def _cap_lemma_analytic(max_depth: int) -> tuple[RationalInterval, int, bool, int]:
    """Infimum of the cosine rule over ``cos^2 a, cos^2 b in [1/2, 1]``,
    ``cos(gamma) in [0, 1]``.

    Boxes whose lower bound exceeds 1/2 are dropped; the rest are split down
    to ``max_depth`` and returned as minimizer candidates.
    """
    eps = Fraction(1, 1 << (2 * max_depth + 8))
    half = Fraction(1, 2)
    root = (RationalInterval(half, 1), RationalInterval(half, 1), RationalInterval(0, 1))
    best_upper: Fraction | None = None
    lowest = None
    survivors: list[tuple[RationalInterval, ...]] = []
    counter = itertools.count()
    heap = [(Fraction(0), next(counter), root, 0)]
    nodes = 0
    while heap:
        _, _, box, depth = heapq.heappop(heap)
        nodes += 1
        lower, upper = _cos_rule_bounds(box, eps)
        best_upper = upper if best_upper is None else min(best_upper, upper)
        if lower > half:
            lowest = lower if lowest is None else min(lowest, lower)
            continue
        if depth >= max_depth:
            survivors.append(box)
            lowest = lower if lowest is None else min(lowest, lower)
            continue
        axis = max(range(3), key=lambda i: box[i].width)
        piece = box[axis]
        for part in (RationalInterval(piece.lo, piece.mid), RationalInterval(piece.mid, piece.hi)):
            child = tuple(part if i == axis else iv for i, iv in enumerate(box))
            heapq.heappush(heap, (lower, next(counter), child, depth + 1))
    touch = all(b[0].lo == half and b[1].lo == half and b[2].lo == 0 for b in survivors)
    return RationalInterval(lowest, max(lowest, best_upper)), len(survivors), touch, nodes


def _cap_samples(center_cos: float, seed: int, chunk: tuple[int, int]) -> tuple[int, float]:
    """Count 4-point samples in the open cap whose pairwise angles are all >= pi/3."""
    index, count = chunk
    rng = np.random.default_rng(np.random.SeedSequence([seed, index]))
    u = rng.random((count, 4))
    phi = rng.random((count, 4)) * 2 * np.pi
    # uniform in the cap by Archimedes: the height is uniform
    z = 1.0 - u * (1.0 - center_cos)
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    pts = np.stack([r * np.cos(phi), r * np.sin(phi), -z], axis=-1)
    gram = np.einsum("nid,njd->nij", pts, pts)
    off = gram[:, ~np.eye(4, dtype=bool)]
    worst = off.max(axis=1)
    return int(np.count_nonzero(worst <= 0.5)), float(worst.min()) if count else 1.0


def verify_cap_lemma(samples: int, seed: int, max_depth: int = 24, workers: int = 1) -> CapLemmaReport:
    """Two checks that at most three pi/3-separated points fit in an open cap
    of angular radius pi/4: an exact branch-and-bound on the cosine rule and
    a randomized search for four separated points."""
    infimum, minimizers, touch, nodes = _cap_lemma_analytic(max_depth)
    analytic_ok = infimum.lo >= Fraction(1, 2) and touch
    chunks = [
        (i, min(_CAP_CHUNK, samples - i * _CAP_CHUNK))
        for i in range(math.ceil(samples / _CAP_CHUNK))
    ]
    results = ordered_map(partial(_cap_samples, math.cos(math.pi / 4), seed), chunks, workers)
    counterexamples = sum(c for c, _ in results)
    worst = min((w for _, w in results), default=None)
    ok = analytic_ok and counterexamples == 0
    logger.info("cap lemma: infimum %s, %d counterexamples in %d samples", infimum, counterexamples, samples)
    return CapLemmaReport(
        verdict=Verdict.PASS if ok else Verdict.FAIL,
        infimum=infimum,
        minimizer_boxes=minimizers,
        boxes_touch_corner=touch,
        nodes=nodes,
        samples=samples,
        seed=seed,
        counterexamples=counterexamples,
        worst_max_cos=worst,
    )


# ── Icosahedron ───────────────────────────────────────────────────────


def icosahedron_witness() -> Configuration:
    phi = (1 + math.sqrt(5)) / 2
    norm = math.sqrt(1 + phi * phi)
    raw = []
    for s1, s2 in itertools.product((1, -1), repeat=2):
        raw += [(0, s1, s2 * phi), (s1, s2 * phi, 0), (s2 * phi, 0, s1)]
    return Configuration([SpherePoint.from_float(np.array(v) / norm) for v in raw])


def icosahedron_master_sum(f: Polynomial, eps: RationalLike) -> RationalInterval:
    """Certified ``f(1) + 5 f(1/sqrt5) + 5 f(-1/sqrt5) + f(-1)``."""
    s = sqrt_rational(Fraction(1, 5), eps)
    near = poly_enclose(f, s).scale(5)
    far = poly_enclose(f, -s).scale(5)
    return near + far + (f(1) + f(-1))


@dataclass
class IcosahedronReport:
    vertices: int
    max_cos: float
    min_separation: float
    worst_master_sum: float
    certified_master_sum: RationalInterval
    threshold: Fraction

    @property
    def ok(self) -> bool:
        return (
            self.vertices == 12
            and self.max_cos <= 0.5 + FLOAT_SEPARATION_TOL
            and self.certified_master_sum.hi <= self.threshold
        )


def icosahedron_report(f: GegenbauerExpansion, threshold: Fraction, eps: RationalLike) -> IcosahedronReport:
    config = icosahedron_witness()
    return IcosahedronReport(
        vertices=len(config.points),
        max_cos=config.max_off_diagonal(),
        min_separation=config.min_separation(),
        worst_master_sum=float(master_sums(config, f).max()),
        certified_master_sum=icosahedron_master_sum(expansion_to_poly(f), eps),
        threshold=threshold,
    )


# ── Randomized master-inequality stress ───────────────────────────────


@dataclass
class StressReport:
    n_points: int
    trials: int
    seed: int
    worst: float | None
    worst_trial: int | None
    exhausted: list[int] = field(default_factory=list)
    threshold: float = 1.23

    @property
    def ok(self) -> bool:
        return not self.exhausted and self.worst is not None and self.worst <= self.threshold + FLOAT_SEPARATION_TOL


def _random_unit(rng: np.random.Generator, n: int) -> np.ndarray:
    x = rng.standard_normal((n, 3))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def _rejection_sample(rng: np.random.Generator, n: int, attempts: int) -> np.ndarray | None:
    pts: list[np.ndarray] = []
    for _ in range(n):
        for _ in range(attempts):
            cand = _random_unit(rng, 1)[0]
            if all(float(cand @ p) <= 0.5 for p in pts):
                pts.append(cand)
                break
        else:
            return None
    return np.stack(pts)


def _repulsion_sample(
    rng: np.random.Generator, n: int, restarts: int = 20, steps: int = 4000, target: float = 0.49
) -> np.ndarray | None:
    off = ~np.eye(n, dtype=bool)
    for _ in range(restarts):
        x = _random_unit(rng, n)
        for _ in range(steps):
            g = x @ x.T
            excess = np.where(off, np.clip(g - target, 0.0, None), 0.0)
            if not excess.any():
                return x
            x = x - 0.5 * excess @ x
            x /= np.linalg.norm(x, axis=1, keepdims=True)
        if (x @ x.T)[off].max() <= 0.5:
            return x
    return None


def _stress_trial(n_points: int, seed: int, coeffs: list[float], trial: int) -> float | None:
    rng = np.random.default_rng(np.random.SeedSequence([seed, trial]))
    x = _rejection_sample(rng, n_points, attempts=200)
    if x is None:
        x = _repulsion_sample(rng, n_points)
    if x is None:
        return None
    gram = np.clip(x @ x.T, -1.0, 1.0)
    return float(np.polynomial.polynomial.polyval(gram, coeffs).sum(axis=1).max())


def config_stress(
    n_points: int,
    trials: int,
    seed: int,
    f: GegenbauerExpansion,
    threshold: RationalLike = Fraction(123, 100),
    workers: int = 1,
) -> StressReport:
    """Worst ``max_i sum_j f(<x_i, x_j>)`` over random pi/3-separated configurations."""
    if not 1 <= n_points <= 12:
        raise DomainError(f"n_points must be in 1..12, got {n_points}")
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    coeffs = [float(c) for c in expansion_to_poly(f).coeffs]
    values = ordered_map(partial(_stress_trial, n_points, seed, coeffs), range(trials), workers)
    exhausted = [i for i, v in enumerate(values) if v is None]
    placed = [(v, i) for i, v in enumerate(values) if v is not None]
    worst, worst_trial = max(placed, default=(None, None))
    if exhausted:
        logger.warning("sampler could not place %d points in %d trials", n_points, len(exhausted))
    return StressReport(
        n_points=n_points,
        trials=trials,
        seed=seed,
        worst=worst,
        worst_trial=worst_trial,
        exhausted=exhausted,
        threshold=float(to_rational(threshold)),
    )


# ── Exact Delsarte positivity trials ──────────────────────────────────


@dataclass
class Prop1Report:
    trials: int
    seed: int
    minimum: Fraction | None
    failures: list[int] = field(default_factory=list)
    dims: dict[int, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures


def _prop1_trial(seed: int, trial: int) -> tuple[int, Fraction]:
    rng = np.random.default_rng(np.random.SeedSequence([seed, trial]))
    d = int(rng.choice([3, 4]))
    n = int(rng.integers(1, 13))
    k = int(rng.integers(0, 13))
    points = []
    for _ in range(n):
        nums = rng.integers(-8, 9, size=d - 1)
        dens = rng.integers(1, 9, size=d - 1)
        points.append(rational_sphere_point_nd([Fraction(int(a), int(b)) for a, b in zip(nums, dens)]))
    return d, positivity_quadform([p.coords for p in points], d, k)


def prop1_trials(trials: int, seed: int, workers: int = 1) -> Prop1Report:
    """Exact ``sum G_k(<x_i, x_j>) >= 0`` on random rational point sets
    (N <= 12, k <= 12, d in {3, 4})."""
    results = ordered_map(partial(_prop1_trial, seed), range(trials), workers)
    dims: dict[int, int] = {}
    for d, _ in results:
        dims[d] = dims.get(d, 0) + 1
    return Prop1Report(
        trials=trials,
        seed=seed,
        minimum=min((v for _, v in results), default=None),
        failures=[i for i, (_, v) in enumerate(results) if v < 0],
        dims=dict(sorted(dims.items())),
    )
