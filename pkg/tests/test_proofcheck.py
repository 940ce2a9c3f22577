"""Tests for the certificate polynomial, the six claims and the full certificate."""

from fractions import Fraction

import numpy as np
import pytest

from kissing.gegenbauer import GegenbauerExpansion
from kissing.proofcheck import (
    ASSUMPTIONS,
    THRESHOLD,
    Admissibility,
    Certificate,
    ClaimResult,
    IdentityCheck,
    alpha_expr,
    beta_expr,
    check_claim,
    default_constants,
    derive_bound,
    endpoint_identities,
    run_full_verification,
    with_function,
    with_negated,
    with_threshold,
)
from kissing.ratcore import RationalInterval
from kissing.spheregeom import icosahedron_report
from kissing.types import ClaimId, DomainError, Verdict


class TestKissingFunction:
    def test_constant_term(self, f_kissing):
        assert f_kissing.c0 == Fraction(9465869, 100_000_000)
        assert sorted(f_kissing.coeffs) == [0, 1, 2, 3, 4, 5, 9]

    def test_remaining_budget(self, constants):
        assert constants.f_at_one == Fraction(99999853, 10**8)
        assert constants.remaining == Fraction(23000147, 10**8)

    def test_threshold(self, constants):
        assert constants.threshold == THRESHOLD == Fraction(123, 100)


class TestIntervals:
    def test_cap_boundary_encloses_minus_inv_sqrt2(self, constants):
        cap = constants.cap_cos_boundary
        assert cap.hi < 0
        assert cap.lo * cap.lo >= Fraction(1, 2) >= cap.hi * cap.hi
        assert cap.width <= constants.enclosure_width

    def test_interval_ordering(self, constants):
        c = constants
        assert c.one_point_interval.lo == -1
        assert c.negativity_interval.hi == Fraction(1, 2)
        assert c.i_lo.hi < c.cap_cos_boundary.lo
        assert c.i_lo.hi < c.j_lo.lo
        assert c.j_lo.hi < c.j_hi.lo
        assert c.three_point_interval.hi < c.shape_interval.hi

    def test_rotations_at_rational_points(self):
        eps = Fraction(1, 10**20)
        assert alpha_expr().value_at(Fraction(-1, 2), eps) == RationalInterval.point(-1)
        # beta(-1/2) = -1/3 - (2/3) * sqrt(1)
        assert beta_expr().value_at(Fraction(-1, 2), eps) == RationalInterval.point(-1)

    def test_endpoint_identities_hold(self, constants, config):
        checks = endpoint_identities(constants, config.enclosure_width)
        assert len(checks) == 4
        assert all(c.holds for c in checks)


class TestClaims:
    def test_negativity(self, constants, config):
        r = check_claim(ClaimId.A_NEGATIVITY, constants, config)
        assert r.verdict == Verdict.PASS
        assert r.quantity == "f(t) <= 0"

    def test_one_point_slack(self, constants, config):
        r = check_claim(ClaimId.B_ONE_POINT, constants, config)
        assert r.verdict == Verdict.PASS
        # f(1) + f(-1) is already within 2.2e-6 of the threshold
        assert r.enclosure.lo >= Fraction(122999782, 10**8)
        assert 0 <= r.slack <= Fraction(109, 50_000_000)

    def test_monotone(self, constants, config):
        assert check_claim(ClaimId.C_MONOTONE_I, constants, config).passed

    def test_shape(self, constants, config):
        r = check_claim(ClaimId.E_SHAPE_J, constants, config)
        assert r.passed
        assert set(r.evidence) == {"slope", "curvature"}

    @pytest.mark.slow
    def test_two_point(self, constants, config):
        r = check_claim(ClaimId.D_TWO_POINT, constants, config)
        assert r.verdict == Verdict.PASS
        assert r.slack > 0

    @pytest.mark.slow
    def test_three_point(self, constants, config):
        r = check_claim(ClaimId.F_THREE_POINT, constants, config)
        assert r.verdict == Verdict.PASS
        assert r.slack > 0

    def test_lower_threshold_fails_one_point(self, constants, config):
        r = check_claim(ClaimId.B_ONE_POINT, with_threshold(constants, "1.2"), config)
        assert r.verdict == Verdict.FAIL
        assert r.slack < 0

    def test_threshold_just_below_fails_one_point(self, constants, config):
        r = check_claim(ClaimId.B_ONE_POINT, with_threshold(constants, "122/100"), config)
        assert r.verdict == Verdict.FAIL
        assert Fraction(-1, 100) < r.slack < Fraction(-9, 1000)

    def test_claim_id_accepts_string(self, constants, config):
        assert check_claim("A_negativity", constants, config).claim_id == ClaimId.A_NEGATIVITY


class TestConstantsUpdates:
    def test_default_arguments(self):
        assert default_constants().threshold == THRESHOLD

    def test_with_negated(self, constants):
        c = with_negated(constants, 9)
        assert c.f.negative_indices() == [9]
        assert constants.f.is_admissible()

    def test_with_function_rejects_other_dimensions(self, constants):
        with pytest.raises(DomainError):
            with_function(constants, GegenbauerExpansion(4, {0: 1}))

    def test_with_function(self, constants):
        g = GegenbauerExpansion(3, {0: 1})
        assert with_function(constants, g).f_at_one == 1


class TestDeriveBound:
    def test_kissing_bound(self, f_kissing):
        ratio, n = derive_bound(THRESHOLD, f_kissing.c0)
        assert ratio == Fraction(123_000_000, 9_465_869)
        assert n == 12

    def test_integer_ratio(self):
        assert derive_bound(3, 1) == (3, 3)

    @pytest.mark.parametrize("c0", [0, Fraction(-1, 10)])
    def test_rejects_nonpositive_c0(self, c0):
        with pytest.raises(DomainError):
            derive_bound(THRESHOLD, c0)


@pytest.mark.slow
class TestFullVerification:
    def test_certificate(self, constants, config):
        cert = run_full_verification(constants, config)
        assert cert.verdict == Verdict.PASS
        assert [c.claim_id for c in cert.claims] == list(ClaimId)
        assert cert.conclusion == 12
        assert cert.bound_ratio == Fraction(123_000_000, 9_465_869)
        assert 0 < cert.counting_slack < 1
        assert all(i.holds for i in cert.identities)
        assert cert.icosahedron.ok
        assert cert.assumptions == ASSUMPTIONS

    def test_negated_coefficient_withholds_conclusion(self, constants, config):
        cert = run_full_verification(with_negated(constants, 9), config)
        assert cert.verdict == Verdict.FAIL
        assert cert.conclusion is None
        assert cert.admissibility.negative_indices == [9]

    def test_zero_constant_term_has_no_conclusion(self, constants, config):
        f = constants.f.with_coeff(0, 0)
        cert = run_full_verification(with_function(constants, f), config)
        assert all(c.passed for c in cert.claims)
        assert cert.bound_ratio is None
        assert cert.conclusion is None
        assert cert.verdict == Verdict.FAIL


def _passing_claims():
    iv = RationalInterval(Fraction(-1), Fraction(1, 2))
    return [ClaimResult(cid, Verdict.PASS, "q", iv) for cid in ClaimId]


class TestCertificateVerdict:
    @pytest.fixture
    def parts(self, constants, config):
        identities = endpoint_identities(constants, config.enclosure_width)
        icosahedron = icosahedron_report(constants.f, constants.threshold, config.enclosure_width)
        return identities, icosahedron

    def _certificate(self, constants, parts, conclusion=12, claims=None, identities=None):
        default_identities, icosahedron = parts
        ratio = derive_bound(constants.threshold, constants.f.c0)[0] if constants.f.c0 > 0 else None
        return Certificate(
            constants,
            Admissibility(constants.f.is_admissible(), constants.f.negative_indices()),
            claims or _passing_claims(),
            default_identities if identities is None else identities,
            icosahedron,
            ratio,
            conclusion,
        )

    def test_all_checks_pass(self, constants, parts):
        assert self._certificate(constants, parts).verdict == Verdict.PASS

    def test_zero_constant_term_fails(self, constants, parts):
        c = with_function(constants, constants.f.with_coeff(0, 0))
        cert = self._certificate(c, parts, conclusion=None)
        assert not cert.has_positive_c0
        assert cert.verdict == Verdict.FAIL

    def test_missing_conclusion_fails(self, constants, parts):
        assert self._certificate(constants, parts, conclusion=None).verdict == Verdict.FAIL

    def test_inconclusive_claim(self, constants, parts):
        claims = _passing_claims()
        claims[3].verdict = Verdict.INCONCLUSIVE
        cert = self._certificate(constants, parts, conclusion=None, claims=claims)
        assert cert.verdict == Verdict.INCONCLUSIVE

    def test_disjoint_identity_fails(self, constants, parts):
        broken = IdentityCheck("x = y", RationalInterval.point(0), RationalInterval.point(1))
        assert broken.verdict == Verdict.FAIL
        assert not broken.holds
        cert = self._certificate(constants, parts, identities=[broken])
        assert cert.verdict == Verdict.FAIL

    def test_wide_identity_is_inconclusive(self, constants, parts):
        wide = IdentityCheck("x = y", RationalInterval(Fraction(0), Fraction(1)), RationalInterval.point(0))
        assert wide.verdict == Verdict.INCONCLUSIVE
        cert = self._certificate(constants, parts, identities=[wide])
        assert cert.verdict == Verdict.INCONCLUSIVE

    def test_icosahedron_over_threshold_fails(self, constants, config, parts):
        identities, _ = parts
        low = icosahedron_report(constants.f, Fraction(1, 2), config.enclosure_width)
        assert not low.ok
        cert = self._certificate(constants, (identities, low))
        assert cert.verdict == Verdict.FAIL


def _float_poly(c):
    return np.polynomial.Polynomial([float(a) for a in c.f_poly.coeffs])


@pytest.mark.slow
class TestDenseGrid:
    """Float sampling on a dense grid never exceeds the certified enclosures."""

    N = 1_000_000

    def _grid(self, iv):
        return np.linspace(float(iv.lo), float(iv.hi), self.N)

    def test_two_point_enclosure(self, constants, config):
        r = check_claim(ClaimId.D_TWO_POINT, constants, config)
        f = _float_poly(constants)
        t = self._grid(r.interval)
        alpha = t / 2 - np.sqrt(np.clip(3 - 3 * t * t, 0, None)) / 2
        values = f(1.0) + f(t) + f(alpha)
        assert values.max() <= float(r.enclosure.hi) + 1e-12
        assert values.max() >= float(r.enclosure.lo) - 1e-6

    def test_three_point_enclosure(self, constants, config):
        r = check_claim(ClaimId.F_THREE_POINT, constants, config)
        f = _float_poly(constants)
        t = self._grid(r.interval)
        beta = 2 * t / 3 - 2 * np.sqrt(np.clip(1.5 - 2 * t * t, 0, None)) / 3
        values = f(1.0) + 2 * f(t) + f(beta)
        assert values.max() <= float(r.enclosure.hi) + 1e-12
        assert values.max() >= float(r.enclosure.lo) - 1e-6
