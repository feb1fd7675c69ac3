"""Core series layer: domain guards, frozen values, tail-bound honesty.

Frozen reference values were produced by an independent high-precision
summation (mpmath, 60 digits, 400 terms) and pasted here to full double
precision.
"""

import math

import pytest

from treeline import (
    DEFAULT_CONFIG,
    ConvergenceError,
    DomainError,
    ProbabilityParams,
    ProductCache,
    SeriesConfig,
    coeff_product,
    criterion_threshold,
    gf_continued,
    gf_series,
    pole_criterion,
)

# independent-summation references
H_03_05 = 0.751651590807434097452746
H_03_09 = 6.437752681591187889695157
H_02_05 = 0.8971086103554443167295165
PHI_03_5 = 0.8396164922409709976147221
LITTLE_H_0225_2999 = 3.618395736284443813028782


class TestProbabilityParams:
    def test_accepts_half(self):
        assert ProbabilityParams(0.5).p == 0.5

    @pytest.mark.parametrize("bad", [0.0, -0.1, 0.5000001, 0.6, 1.0, float("nan")])
    def test_rejects_bad_p(self, bad):
        with pytest.raises(DomainError):
            ProbabilityParams(bad)

    @pytest.mark.parametrize("bad_d", [2, 0, -3, 3.5, True])
    def test_rejects_bad_degree(self, bad_d):
        with pytest.raises(DomainError):
            ProbabilityParams(0.3, bad_d)

    def test_degree_optional(self):
        assert ProbabilityParams(0.3).d is None
        assert ProbabilityParams(0.3, 4).d == 4

    def test_frozen(self):
        params = ProbabilityParams(0.3)
        with pytest.raises(AttributeError):
            params.p = 0.2


class TestSeriesConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"tail_tol": 0.0},
            {"tail_tol": -1e-9},
            {"max_terms": 0},
            {"singularity_margin": 0.0},
        ],
    )
    def test_rejects_nonpositive(self, kwargs):
        with pytest.raises(DomainError):
            SeriesConfig(**kwargs)

    def test_defaults(self):
        assert DEFAULT_CONFIG.tail_tol == 1e-12
        assert DEFAULT_CONFIG.max_terms == 100_000
        assert DEFAULT_CONFIG.singularity_margin == 1e-6


class TestCoeffProduct:
    def test_empty_product(self):
        assert coeff_product(ProbabilityParams(0.3), 0) == 1.0

    def test_single_factor_half(self):
        # 0.5 / (0.5 + 0.25)
        assert math.isclose(coeff_product(ProbabilityParams(0.5), 1), 2.0 / 3.0, rel_tol=1e-15)

    def test_two_factors_half(self):
        assert math.isclose(coeff_product(ProbabilityParams(0.5), 2), 8.0 / 15.0, rel_tol=1e-15)

    def test_frozen_value(self):
        assert abs(coeff_product(ProbabilityParams(0.3), 5) - PHI_03_5) < 1e-15

    @pytest.mark.parametrize("p", [0.1, 0.3, 0.5])
    def test_decreasing(self, p):
        """Strict decrease while p**(l+1) is resolvable in doubles; the
        factors round to exactly 1.0 beyond that, so only non-increase can
        hold for the far tail."""
        params = ProbabilityParams(p)
        values = [coeff_product(params, l) for l in range(201)]
        assert all(a > b for a, b in zip(values[:12], values[1:13]))
        assert all(a >= b for a, b in zip(values, values[1:]))
        assert all(0.0 < v <= 1.0 for v in values)

    @pytest.mark.parametrize("p", [0.05, 0.1, 0.2, 0.3, 0.33])
    def test_exponential_floor(self, p):
        """The products never drop below exp(-(p/(1-p))**2)."""
        params = ProbabilityParams(p)
        floor = math.exp(-((p / (1.0 - p)) ** 2))
        assert all(coeff_product(params, l) >= floor for l in range(1, 201))

    def test_negative_index_rejected(self):
        with pytest.raises(DomainError):
            coeff_product(ProbabilityParams(0.3), -1)

    def test_cache_reuse_and_mismatch(self):
        cache = ProductCache(0.3)
        params = ProbabilityParams(0.3)
        a = coeff_product(params, 7, cache)
        b = coeff_product(params, 7, cache)
        assert a == b == coeff_product(params, 7)
        with pytest.raises(DomainError):
            coeff_product(ProbabilityParams(0.2), 3, cache)


class TestGfSeries:
    def test_zero(self):
        assert gf_series(ProbabilityParams(0.3), 0.0) == 0.0

    @pytest.mark.parametrize(
        "p, z, expected",
        [(0.3, 0.5, H_03_05), (0.3, 0.9, H_03_09), (0.2, 0.5, H_02_05)],
    )
    def test_frozen_values(self, p, z, expected):
        assert abs(gf_series(ProbabilityParams(p), z) - expected) <= 2e-12

    def test_tail_tolerance_honest(self):
        """Loosening the tail target moves the result by at most that target."""
        params = ProbabilityParams(0.3)
        tight = gf_series(params, 0.8, SeriesConfig(tail_tol=1e-14))
        loose = gf_series(params, 0.8, SeriesConfig(tail_tol=1e-6))
        assert abs(tight - loose) <= 1e-6

    def test_monotone_in_z(self):
        params = ProbabilityParams(0.2)
        grid = [0.1, 0.3, 0.5, 0.7, 0.9]
        values = [gf_series(params, z) for z in grid]
        assert all(a < b for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("z", [-0.1, 1.0, 0.99999999, 1.5])
    def test_domain(self, z):
        with pytest.raises(DomainError):
            gf_series(ProbabilityParams(0.3), z)

    def test_term_cap(self):
        with pytest.raises(ConvergenceError):
            gf_series(ProbabilityParams(0.3), 0.9, SeriesConfig(max_terms=5))


class TestGfContinued:
    @pytest.mark.parametrize("p", [0.1, 0.2, 0.3, 0.4])
    @pytest.mark.parametrize("z", [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
    def test_agrees_with_series_on_disc(self, p, z):
        params = ProbabilityParams(p)
        direct = gf_series(params, z)
        continued = gf_continued(params, z)
        assert abs(direct - continued) <= 2.0 * DEFAULT_CONFIG.tail_tol

    def test_finite_beyond_disc(self):
        value = gf_continued(ProbabilityParams(0.225), 2.999)
        assert math.isfinite(value)

    @pytest.mark.parametrize("x", [-0.5, 1.0, 1.0000000001])
    def test_rejects_near_one_and_negative(self, x):
        with pytest.raises(DomainError):
            gf_continued(ProbabilityParams(0.3), x)

    def test_rejects_at_inverse_p(self):
        with pytest.raises(DomainError):
            gf_continued(ProbabilityParams(0.3), 1.0 / 0.3)


class TestPoleCriterion:
    def test_zero(self):
        assert pole_criterion(ProbabilityParams(0.3), 0.0) == 0.0

    def test_frozen_value(self):
        value = pole_criterion(ProbabilityParams(0.225), 2.999)
        assert abs(value - LITTLE_H_0225_2999) <= 1e-12

    def test_meets_level_at_reference_point(self):
        params = ProbabilityParams(0.225)
        assert pole_criterion(params, 2.999) >= criterion_threshold(params)

    @pytest.mark.parametrize("p", [0.2, 0.3, 0.45])
    def test_strictly_increasing(self, p):
        params = ProbabilityParams(p)
        top = 1.0 / p - 0.05
        grid = [top * i / 8 for i in range(1, 9)]
        values = [pole_criterion(params, x) for x in grid]
        assert all(a < b for a, b in zip(values, values[1:]))

    def test_domain(self):
        with pytest.raises(DomainError):
            pole_criterion(ProbabilityParams(0.3), -0.1)
        with pytest.raises(DomainError):
            pole_criterion(ProbabilityParams(0.3), 1.0 / 0.3)

    def test_threshold(self):
        assert criterion_threshold(ProbabilityParams(0.225)) == pytest.approx(
            0.775 / 0.225, rel=1e-15
        )
