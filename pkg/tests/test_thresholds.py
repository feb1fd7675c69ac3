"""Criterion root finding, certified probability bounds, and the two
degree certificates.
"""

import math

import pytest

from treeline import (
    DomainError,
    ProbabilityParams,
    bound_report,
    check_degree_four_bound,
    check_inverse_degree_bound,
    criterion_threshold,
    critical_upper_bound,
    find_criterion_root,
    gf_series,
    growth_lower_bound,
    pole_criterion,
    reference_bounds,
)

# roots located independently with mpmath bisection at 60 digits
ROOT_0225 = 2.949708491541529
ROOT_03 = 2.010757964
ROOT_0334333 = 1.746019681

# boundary probabilities where the root crosses d - 1, same oracle
P0_BY_D = {3: 0.3012231, 4: 0.2221568, 5: 0.1784795, 10: 0.0925838, 20: 0.0478465}

SURROGATE_0225_2999 = 3.493281884110605


class TestFindRoot:
    def test_frozen_root_0225(self):
        result = find_criterion_root(ProbabilityParams(0.225))
        assert abs(result.root - ROOT_0225) <= 1e-8

    @pytest.mark.parametrize("p, expected", [(0.3, ROOT_03), (0.334333, ROOT_0334333)])
    def test_frozen_roots(self, p, expected):
        assert abs(find_criterion_root(ProbabilityParams(p)).root - expected) <= 1e-8

    def test_result_certificate(self):
        result = find_criterion_root(ProbabilityParams(0.3), tol=1e-10)
        assert result.lo <= result.root <= result.hi
        assert result.hi - result.lo <= 1e-10
        assert result.residual <= 1e-10
        assert 0 < result.iterations <= 200

    def test_residual_is_criterion_gap(self):
        params = ProbabilityParams(0.25)
        result = find_criterion_root(params)
        gap = abs(pole_criterion(params, result.root) - criterion_threshold(params))
        assert math.isclose(gap, result.residual, rel_tol=0, abs_tol=1e-15)

    def test_deterministic(self):
        a = find_criterion_root(ProbabilityParams(0.3))
        b = find_criterion_root(ProbabilityParams(0.3))
        assert a == b

    @pytest.mark.parametrize("p", [0.05, 0.45])
    def test_root_below_pole(self, p):
        root = find_criterion_root(ProbabilityParams(p)).root
        assert 1.0 < root < 1.0 / p

    def test_rejects_half(self):
        with pytest.raises(DomainError):
            find_criterion_root(ProbabilityParams(0.5))

    def test_rejects_bad_tol(self):
        with pytest.raises(DomainError):
            find_criterion_root(ProbabilityParams(0.3), tol=0.0)


class TestRootIdentities:
    @pytest.mark.parametrize("p", [0.225, 0.3, 0.4])
    def test_continuation_hits_minus_one(self, p):
        from treeline import gf_continued

        params = ProbabilityParams(p)
        root = find_criterion_root(params).root
        assert abs(gf_continued(params, root) + 1.0) <= 1e-6

    @pytest.mark.parametrize("p", [0.225, 0.3])
    def test_pole_cancellation_identity(self, p):
        """At the root, the series value at p**2 x0 is pinned by the value
        at p x0, which is what removes the would-be singularity."""
        params = ProbabilityParams(p)
        root = find_criterion_root(params).root
        ratio = (1.0 - p) / p
        lhs = gf_series(params, p * p * root)
        rhs = ratio * ratio - 2.0 * ratio * gf_series(params, p * root)
        assert abs(lhs - rhs) <= 1e-6


class TestGrowthBound:
    def test_exceeds_one_third_at_0225(self):
        assert growth_lower_bound(ProbabilityParams(0.225)) > 1.0 / 3.0

    def test_increasing_in_p(self):
        values = [growth_lower_bound(ProbabilityParams(p)) for p in (0.2, 0.25, 0.3)]
        assert values[0] < values[1] < values[2]

    def test_reciprocal_of_root(self):
        params = ProbabilityParams(0.3)
        assert growth_lower_bound(params) == 1.0 / find_criterion_root(params).root


class TestCriticalUpperBound:
    @pytest.mark.parametrize("d", sorted(P0_BY_D))
    def test_frozen_boundaries(self, d):
        p0 = critical_upper_bound(d)
        assert abs(p0 - P0_BY_D[d]) <= 2e-6
        assert p0 < 1.0 / d

    def test_certified_at_returned_point(self):
        d = 4
        p0 = critical_upper_bound(d)
        assert find_criterion_root(ProbabilityParams(p0)).root < d - 1.0

    def test_rejects_degree_two(self):
        with pytest.raises(DomainError):
            critical_upper_bound(2)

    def test_rejects_bad_p_tol(self):
        with pytest.raises(DomainError):
            critical_upper_bound(4, p_tol=-1.0)


class TestReferenceBounds:
    def test_degree_three_values(self):
        ref = reference_bounds(3)
        assert math.isclose(ref.pc_upper, (3.0 - math.sqrt(5.0)) / 2.0, rel_tol=1e-15)

    def test_degree_four_values(self):
        ref = reference_bounds(4)
        assert math.isclose(ref.pc_upper, 2.0 - math.sqrt(3.0), rel_tol=1e-15)
        assert abs(ref.pu_lower - 0.23246101817124268) <= 1e-15

    def test_report_degree_four(self):
        report = bound_report(4, p_tol=1e-4)
        assert report.inverse_degree == 0.25
        assert report.pc_upper < 0.225 < report.pu_lower < report.prior_pc_upper
        assert report.gap_nonempty


class TestInverseDegreeCertificate:
    @pytest.mark.parametrize("d", [3, 10, 50])
    def test_passes(self, d):
        check = check_inverse_degree_bound(d)
        assert check.passed
        assert check.point_ok and check.criterion_ok and check.floor_ok
        assert check.point < d - 1.0
        assert check.criterion_value >= check.threshold
        assert check.floor_factor >= 1.0

    def test_floor_factor_formula(self):
        check = check_inverse_degree_bound(4)
        a = (check.p / (1.0 - check.p)) ** 2
        assert math.isclose(check.floor_factor, 2.0 * math.exp(-2.0 * a), rel_tol=1e-15)

    @pytest.mark.parametrize("d", [3, 4])
    def test_eps_zero_fails_strictness(self, d):
        check = check_inverse_degree_bound(d, eps=0.0)
        assert not check.point_ok
        assert not check.passed

    def test_rejects_eps_out_of_range(self):
        with pytest.raises(DomainError):
            check_inverse_degree_bound(4, eps=0.5 - 0.25)
        with pytest.raises(DomainError):
            check_inverse_degree_bound(4, eps=-1e-9)


class TestDegreeFourCertificate:
    def test_passes(self):
        check = check_degree_four_bound()
        assert check.passed
        assert check.p == 0.225
        assert check.point == 2.999
        assert check.point_ok

    def test_frozen_values(self):
        check = check_degree_four_bound()
        assert math.isclose(check.surrogate_value, SURROGATE_0225_2999, rel_tol=1e-12)
        assert abs(check.threshold - (1.0 - 0.225) / 0.225) <= 1e-15
        assert abs(check.criterion_value - 3.618395736284444) <= 1e-11

    def test_surrogate_undercuts_criterion(self):
        check = check_degree_four_bound()
        assert check.surrogate_value < check.criterion_value
        assert check.surrogate_value >= check.threshold
