"""The three-dimensional kissing bound: certificate polynomial, the six case
inequalities, and the certificate that assembles them.

Irrational interval endpoints (-1/sqrt2, -cos(pi/12), -sqrt2/4 - 1/2,
-sqrt(2/3)) are replaced by rational enclosures, and every claim is checked on
the rational superset of its interval. Each claim holds for every t in its
interval, so proving it on a superset is sound.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, partial

from .config import VerifierConfig
from .gegenbauer import GegenbauerExpansion, expansion_to_poly
from .polycore import (
    Polynomial,
    RadicalExpr,
    SignVerdict,
    certify_max_bound,
    certify_sign,
    poly_max_enclose,
    radical_compose,
    radical_eval_enclose,
)
from .ratcore import (
    RationalInterval,
    RationalLike,
    format_rational,
    rational_from_decimal,
    sqrt_rational,
    to_rational,
)
from .spheregeom import IcosahedronReport, icosahedron_report
from .types import ClaimId, DomainError, SignTag, Verdict
from .workers import ordered_map

logger = logging.getLogger(__name__)

THRESHOLD = Fraction(123, 100)

KISSING_COEFFS = {
    0: "0.09465869",
    1: "0.17273741",
    2: "0.33128438",
    3: "0.17275228",
    4: "0.18905584",
    5: "0.00334265",
    9: "0.03616728",
}

ASSUMPTIONS = (
    "at most three neighbours of a point lie in the open cap of radius pi/4 around its antipode",
    "one neighbour in the cap: its inner product with the centre lies in [-1, -1/sqrt2]",
    "two neighbours in the cap: rotating them reduces to t in [-cos(pi/12), -1/sqrt2] with the second at alpha(t)",
    "three neighbours in the cap: rotating the regular triangle reduces to t in [-sqrt2/4 - 1/2, -sqrt(2/3)] with the third at beta(t)",
    "the constant -sqrt2/4 - 1/2 bounding <x, z> in the three-point case is taken as given",
)

MAX_IDENTITY_WIDTH = Fraction(1, 10**15)


def kissing_f() -> GegenbauerExpansion:
    return GegenbauerExpansion(3, {k: rational_from_decimal(v) for k, v in KISSING_COEFFS.items()})


def alpha_expr() -> RadicalExpr:
    """``alpha(t) = t/2 - sqrt(3 - 3t^2)/2``, the inner product reached by a
    rotation through pi/3."""
    return RadicalExpr(
        Polynomial([0, Fraction(1, 2)]),
        Polynomial([Fraction(-1, 2)]),
        Polynomial([3, 0, -3]),
    )


def beta_expr() -> RadicalExpr:
    """``beta(t) = 2t/3 - (2/3) sqrt(3/2 - 2t^2)``."""
    return RadicalExpr(
        Polynomial([0, Fraction(2, 3)]),
        Polynomial([Fraction(-2, 3)]),
        Polynomial([Fraction(3, 2), 0, -2]),
    )


def _neg_sqrt(q: Fraction, eps: Fraction) -> RationalInterval:
    return -sqrt_rational(q, eps)


@dataclass(frozen=True)
class ProofConstants:
    threshold: Fraction
    f: GegenbauerExpansion
    enclosure_width: Fraction
    min_cos: Fraction = Fraction(-1)
    max_cos: Fraction = Fraction(1, 2)

    @cached_property
    def cap_cos_boundary(self) -> RationalInterval:
        """Enclosure of -1/sqrt2."""
        return _neg_sqrt(Fraction(1, 2), self.enclosure_width)

    @cached_property
    def i_lo(self) -> RationalInterval:
        """Enclosure of -cos(pi/12) = -(sqrt6 + sqrt2)/4."""
        w = self.enclosure_width
        return -(sqrt_rational(6, w) + sqrt_rational(2, w)).scale(Fraction(1, 4))

    @cached_property
    def j_lo(self) -> RationalInterval:
        """Enclosure of -sqrt2/4 - 1/2."""
        return (-sqrt_rational(2, self.enclosure_width)).scale(Fraction(1, 4)).shift(Fraction(-1, 2))

    @cached_property
    def j_hi(self) -> RationalInterval:
        """Enclosure of -sqrt(2/3)."""
        return _neg_sqrt(Fraction(2, 3), self.enclosure_width)

    @property
    def negativity_interval(self) -> RationalInterval:
        return RationalInterval(self.cap_cos_boundary.lo, self.max_cos)

    @property
    def one_point_interval(self) -> RationalInterval:
        return RationalInterval(self.min_cos, self.cap_cos_boundary.hi)

    @property
    def two_point_interval(self) -> RationalInterval:
        return RationalInterval(self.i_lo.lo, self.cap_cos_boundary.hi)

    @property
    def shape_interval(self) -> RationalInterval:
        return RationalInterval(self.j_lo.lo, self.cap_cos_boundary.hi)

    @property
    def three_point_interval(self) -> RationalInterval:
        return RationalInterval(self.j_lo.lo, self.j_hi.hi)

    @cached_property
    def f_poly(self) -> Polynomial:
        return expansion_to_poly(self.f)

    @property
    def f_at_one(self) -> Fraction:
        return self.f_poly(1)

    @property
    def remaining(self) -> Fraction:
        """Budget left for the neighbours once the ``i = j`` term is paid."""
        return self.threshold - self.f_at_one


def default_constants(config: VerifierConfig | None = None) -> ProofConstants:
    cfg = config or VerifierConfig()
    return ProofConstants(THRESHOLD, kissing_f(), cfg.enclosure_width)


def with_threshold(constants: ProofConstants, threshold: RationalLike) -> ProofConstants:
    return dataclasses.replace(constants, threshold=to_rational(threshold))


def with_negated(constants: ProofConstants, k: int) -> ProofConstants:
    return dataclasses.replace(constants, f=constants.f.negated(k))


def with_function(constants: ProofConstants, f: GegenbauerExpansion) -> ProofConstants:
    if f.dim != 3:
        raise DomainError(f"the kissing certificate lives in dimension 3, got d={f.dim}")
    return dataclasses.replace(constants, f=f)


@dataclass
class ClaimResult:
    claim_id: ClaimId
    verdict: Verdict
    quantity: str
    interval: RationalInterval
    enclosure: RationalInterval | None = None
    bound: Fraction | None = None
    evidence: dict = field(default_factory=dict)

    @property
    def slack(self) -> Fraction | None:
        if self.bound is None or self.enclosure is None:
            return None
        return self.bound - self.enclosure.hi

    @property
    def passed(self) -> bool:
        return self.verdict == Verdict.PASS


def _sign_verdict(required: SignTag | tuple[SignTag, ...], got: SignVerdict) -> Verdict:
    wanted = required if isinstance(required, tuple) else (required,)
    return Verdict.PASS if got.tag in wanted else Verdict.FAIL


_NONPOSITIVE = (SignTag.NONPOSITIVE, SignTag.STRICTLY_NEGATIVE_INTERIOR)


def _bound_verdict(enclosure: RationalInterval, bound: Fraction) -> Verdict:
    if enclosure.hi <= bound:
        return Verdict.PASS
    if enclosure.lo > bound:
        return Verdict.FAIL
    return Verdict.INCONCLUSIVE


def _check_negativity(c: ProofConstants, cfg: VerifierConfig) -> ClaimResult:
    iv = c.negativity_interval
    sign = certify_sign(c.f_poly, iv)
    return ClaimResult(
        ClaimId.A_NEGATIVITY,
        _sign_verdict(_NONPOSITIVE, sign),
        "f(t) <= 0",
        iv,
        evidence={"sign": sign.to_dict(), "strict": sign.tag == SignTag.STRICTLY_NEGATIVE_INTERIOR},
    )


def _check_one_point(c: ProofConstants, cfg: VerifierConfig) -> ClaimResult:
    iv = c.one_point_interval
    peak = poly_max_enclose(c.f_poly, iv, cfg.isolation_width)
    enclosure = peak.enclosure.shift(c.f_at_one)
    return ClaimResult(
        ClaimId.B_ONE_POINT,
        _bound_verdict(enclosure, c.threshold),
        "f(1) + max f(t)",
        iv,
        enclosure,
        c.threshold,
        {"candidates": peak.candidates, "argmax": format_rational(peak.argmax)},
    )


def _check_monotone(c: ProofConstants, cfg: VerifierConfig) -> ClaimResult:
    iv = c.two_point_interval
    sign = certify_sign(c.f_poly.derivative(), iv)
    return ClaimResult(
        ClaimId.C_MONOTONE_I,
        _sign_verdict(_NONPOSITIVE, sign),
        "f'(t) <= 0",
        iv,
        evidence={"sign": sign.to_dict()},
    )


def _max_claim(
    claim_id: ClaimId,
    quantity: str,
    terms: list[RadicalExpr],
    iv: RationalInterval,
    c: ProofConstants,
    cfg: VerifierConfig,
) -> ClaimResult:
    res = certify_max_bound(terms, iv, c.remaining, cfg.bnb_eps, cfg.bnb_max_depth)
    enclosure = res.enclosure.shift(c.f_at_one) if res.enclosure else None
    return ClaimResult(
        claim_id,
        res.verdict,
        quantity,
        iv,
        enclosure,
        c.threshold,
        {"branch_and_bound": res.to_dict()},
    )


def _check_two_point(c: ProofConstants, cfg: VerifierConfig) -> ClaimResult:
    f = RadicalExpr.polynomial(c.f_poly)
    f_alpha = radical_compose(c.f_poly, alpha_expr())
    return _max_claim(
        ClaimId.D_TWO_POINT, "f(1) + max (f(t) + f(alpha(t)))", [f, f_alpha], c.two_point_interval, c, cfg
    )


def _check_shape(c: ProofConstants, cfg: VerifierConfig) -> ClaimResult:
    iv = c.shape_interval
    slope = certify_sign(c.f_poly.derivative(), iv)
    curvature = certify_sign(c.f_poly.derivative().derivative(), iv)
    both = (
        _sign_verdict(_NONPOSITIVE, slope) == Verdict.PASS
        and _sign_verdict(SignTag.NONNEGATIVE, curvature) == Verdict.PASS
    )
    return ClaimResult(
        ClaimId.E_SHAPE_J,
        Verdict.PASS if both else Verdict.FAIL,
        "f'(t) <= 0 and f''(t) >= 0",
        iv,
        evidence={"slope": slope.to_dict(), "curvature": curvature.to_dict()},
    )


def _check_three_point(c: ProofConstants, cfg: VerifierConfig) -> ClaimResult:
    f = RadicalExpr.polynomial(c.f_poly)
    f_beta = radical_compose(c.f_poly, beta_expr())
    return _max_claim(
        ClaimId.F_THREE_POINT,
        "f(1) + max (2 f(t) + f(beta(t)))",
        [f, f, f_beta],
        c.three_point_interval,
        c,
        cfg,
    )


_CHECKS = {
    ClaimId.A_NEGATIVITY: _check_negativity,
    ClaimId.B_ONE_POINT: _check_one_point,
    ClaimId.C_MONOTONE_I: _check_monotone,
    ClaimId.D_TWO_POINT: _check_two_point,
    ClaimId.E_SHAPE_J: _check_shape,
    ClaimId.F_THREE_POINT: _check_three_point,
}


def check_claim(
    claim_id: ClaimId,
    constants: ProofConstants | None = None,
    config: VerifierConfig | None = None,
) -> ClaimResult:
    cfg = config or VerifierConfig()
    c = constants or default_constants(cfg)
    result = _CHECKS[ClaimId(claim_id)](c, cfg)
    logger.info("claim %s: %s", result.claim_id, result.verdict)
    return result


def derive_bound(threshold: RationalLike, c0: RationalLike) -> tuple[Fraction, int]:
    """``N <= threshold / c0``."""
    c = to_rational(c0)
    if c <= 0:
        raise DomainError(f"the constant coefficient must be positive, got {c}")
    ratio = to_rational(threshold) / c
    return ratio, math.floor(ratio)


@dataclass
class IdentityCheck:
    name: str
    computed: RationalInterval
    expected: RationalInterval

    @property
    def verdict(self) -> Verdict:
        if not self.computed.overlaps(self.expected):
            return Verdict.FAIL
        if max(self.computed.width, self.expected.width) > MAX_IDENTITY_WIDTH:
            return Verdict.INCONCLUSIVE
        return Verdict.PASS

    @property
    def holds(self) -> bool:
        return self.verdict == Verdict.PASS


def endpoint_identities(constants: ProofConstants, eps: RationalLike) -> list[IdentityCheck]:
    """The rotations alpha and beta map the interval endpoints onto each other."""
    a, b = alpha_expr(), beta_expr()
    cap, i_lo, j_lo, j_hi = constants.cap_cos_boundary, constants.i_lo, constants.j_lo, constants.j_hi
    return [
        IdentityCheck("alpha(-1/sqrt2) = -cos(pi/12)", radical_eval_enclose(a, cap, eps), i_lo),
        IdentityCheck("alpha(-cos(pi/12)) = -1/sqrt2", radical_eval_enclose(a, i_lo, eps), cap),
        IdentityCheck("beta(-sqrt2/4 - 1/2) = -1/sqrt2", radical_eval_enclose(b, j_lo, eps), cap),
        IdentityCheck("beta(-sqrt(2/3)) = -sqrt(2/3)", radical_eval_enclose(b, j_hi, eps), j_hi),
    ]


@dataclass
class Admissibility:
    ok: bool
    negative_indices: list[int]


@dataclass
class Certificate:
    constants: ProofConstants
    admissibility: Admissibility
    claims: list[ClaimResult]
    identities: list[IdentityCheck]
    icosahedron: IcosahedronReport
    bound_ratio: Fraction | None
    conclusion: int | None
    assumptions: tuple[str, ...] = ASSUMPTIONS

    @property
    def has_positive_c0(self) -> bool:
        return self.constants.f.c0 > 0

    @property
    def verdict(self) -> Verdict:
        """Pass only with a conclusion; identities and the icosahedron count too."""
        checks = [c.verdict for c in self.claims] + [i.verdict for i in self.identities]
        if (
            not self.admissibility.ok
            or not self.has_positive_c0
            or not self.icosahedron.ok
            or Verdict.FAIL in checks
        ):
            return Verdict.FAIL
        if Verdict.INCONCLUSIVE in checks:
            return Verdict.INCONCLUSIVE
        if self.conclusion is None:
            return Verdict.FAIL
        return Verdict.PASS

    @property
    def counting_slack(self) -> Fraction | None:
        if self.bound_ratio is None or self.conclusion is None:
            return None
        return self.conclusion + 1 - self.bound_ratio


def _run_claim(constants: ProofConstants, config: VerifierConfig, claim_id: ClaimId) -> ClaimResult:
    return check_claim(claim_id, constants, config)


def run_full_verification(
    constants: ProofConstants | None = None, config: VerifierConfig | None = None
) -> Certificate:
    """All six claims, admissibility and the counting bound.

    A conclusion is only drawn when every claim and endpoint identity passes,
    the icosahedron stays under the threshold, and every Gegenbauer
    coefficient is nonnegative.
    """
    cfg = config or VerifierConfig()
    c = constants or default_constants(cfg)
    admissibility = Admissibility(c.f.is_admissible(), c.f.negative_indices())
    if not admissibility.ok:
        logger.warning("negative Gegenbauer coefficients at k=%s", admissibility.negative_indices)
    claims = ordered_map(partial(_run_claim, c, cfg), list(ClaimId), cfg.workers)
    identities = endpoint_identities(c, cfg.enclosure_width)
    icosahedron = icosahedron_report(c.f, c.threshold, cfg.enclosure_width)

    ratio: Fraction | None = None
    conclusion: int | None = None
    if c.f.c0 > 0:
        ratio, max_n = derive_bound(c.threshold, c.f.c0)
        if (
            admissibility.ok
            and all(r.passed for r in claims)
            and all(i.holds for i in identities)
            and icosahedron.ok
        ):
            conclusion = max_n
    else:
        logger.warning("c0 = %s: no bound follows", format_rational(c.f.c0))
    return Certificate(c, admissibility, claims, identities, icosahedron, ratio, conclusion)
