import math

import numpy as np
import pytest
from scipy.integrate import quad

from telesim.errors import ValidationError
from telesim.stats import (
    FrequencyEstimate,
    consistency_test,
    estimate,
    frequency_cdf,
    frequency_density,
    required_sample_size,
)


class TestEstimate:
    def test_all_one_category(self):
        est = estimate([0, 0, 0, 0], 2)
        assert est.counts == (4, 0)
        assert est.f == (1.0, 0.0)
        assert est.n == 4

    def test_balanced(self):
        est = estimate([0, 1, 0, 1], 2)
        assert est.f == (0.5, 0.5)
        assert est.sigma[0] == pytest.approx(math.sqrt(0.25 / 4), abs=1e-15)

    def test_frequencies_sum_to_one(self, rng):
        outcomes = rng.integers(0, 5, size=1000)
        est = estimate(outcomes, 5)
        assert sum(est.counts) == est.n
        assert sum(est.f) == pytest.approx(1.0, abs=1e-12)

    def test_permutation_invariance(self, rng):
        outcomes = list(rng.integers(0, 3, size=100))
        shuffled = list(outcomes)
        rng.shuffle(shuffled)
        assert estimate(outcomes, 3) == estimate(shuffled, 3)

    def test_seeded_coin_within_three_sigma(self):
        draws = np.random.default_rng(21).integers(0, 2, size=10000)
        est = estimate(draws, 2)
        assert abs(est.f[0] - 0.5) < 3.0 * math.sqrt(0.25 / 10000)

    def test_validation(self):
        with pytest.raises(ValidationError):
            estimate([], 2)
        with pytest.raises(ValidationError):
            estimate([0, 2], 2)
        with pytest.raises(ValidationError):
            estimate([-1], 2)
        with pytest.raises(ValidationError):
            estimate([0.5], 2)
        with pytest.raises(ValidationError):
            estimate([0], 1)

    def test_csv_rows(self):
        est = estimate([0, 1, 1], 2)
        rows = est.csv_rows()
        assert rows[0] == (0, 1, 1 / 3, est.sigma[0])
        assert len(rows) == 2


class TestFrequencyDensity:
    def test_peak_value(self):
        assert frequency_density(0.5, 0.5, 100) == pytest.approx(
            5.6418958354775629, abs=1e-12
        )

    def test_off_peak_value(self):
        assert frequency_density(0.6, 0.5, 100) == pytest.approx(
            2.0755374871029735, abs=1e-12
        )

    def test_peak_formula_any_n(self):
        for p, n in ((0.3, 50), (0.7, 1000)):
            assert frequency_density(p, p, n) == pytest.approx(
                math.sqrt(n / (2 * math.pi * p)), abs=1e-12
            )

    def test_binomial_variance_mode(self):
        value = frequency_density(0.5, 0.5, 100, variance="binomial")
        assert value == pytest.approx(math.sqrt(100 / (2 * math.pi * 0.25)), abs=1e-12)

    def test_validation(self):
        with pytest.raises(ValidationError):
            frequency_density(0.5, 0.0, 100)
        with pytest.raises(ValidationError):
            frequency_density(0.5, 1.0, 100)
        with pytest.raises(ValidationError):
            frequency_density(0.5, 0.5, 0)
        with pytest.raises(ValidationError):
            frequency_density(0.5, 0.5, 100, variance="exotic")

    @pytest.mark.parametrize("p", [0.2, 0.5, 0.8])
    @pytest.mark.parametrize("n", [100, 1000])
    def test_total_mass_is_one(self, p, n):
        width = 12 * math.sqrt(p / n)
        total, _ = quad(frequency_density, p - width, p + width, args=(p, n))
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_unit_interval_mass_near_one(self):
        # at p=0.5 the tails outside [0, 1] are negligible for n >= 100
        total, _ = quad(frequency_density, 0.0, 1.0, args=(0.5, 100), points=[0.5])
        assert abs(total - 1.0) <= 0.01


class TestFrequencyCdf:
    def test_median_at_p(self):
        assert frequency_cdf(0.25, 0.25, 400) == 0.5

    def test_monotone(self):
        values = [frequency_cdf(f, 0.5, 200) for f in np.linspace(0, 1, 21)]
        assert all(b >= a for a, b in zip(values, values[1:]))

    def test_matches_density_derivative(self):
        p, n, f, h = 0.4, 500, 0.42, 1e-6
        slope = (frequency_cdf(f + h, p, n) - frequency_cdf(f - h, p, n)) / (2 * h)
        assert slope == pytest.approx(frequency_density(f, p, n), rel=1e-6)


class TestConsistencyTest:
    def test_accepts_true_distribution(self):
        draws = np.random.default_rng(5).integers(0, 4, size=10000)
        est = estimate(draws, 4)
        assert consistency_test(est, [0.25] * 4, 1e-3)

    def test_rejects_wrong_distribution(self):
        rng = np.random.default_rng(6)
        draws = (rng.random(10000) > 0.9).astype(int)  # true (0.9, 0.1)
        est = estimate(draws, 2)
        assert not consistency_test(est, [0.5, 0.5], 1e-3)

    def test_single_sample_uses_exact_test(self):
        est = estimate([0], 2)
        assert consistency_test(est, [0.5, 0.5], 1e-3)

    def test_small_sample_three_categories(self):
        est = estimate([0, 0, 1, 2, 0, 1, 0, 0, 1, 2, 0, 0], 3)
        assert consistency_test(est, [0.5, 0.3, 0.2], 1e-3)

    def test_impossible_category_observed(self):
        est = estimate([0, 1, 1, 0], 2)
        assert not consistency_test(est, [1.0, 0.0], 1e-3)

    def test_impossible_category_empty(self):
        est = estimate([0, 0, 0, 0], 2)
        assert consistency_test(est, [1.0, 0.0], 1e-3)

    def test_calibration_under_null(self):
        # rejection rate at significance 0.05 should sit near 5%
        rng = np.random.default_rng(77)
        rejections = 0
        for _ in range(200):
            est = estimate(rng.integers(0, 4, size=1000), 4)
            if not consistency_test(est, [0.25] * 4, 0.05):
                rejections += 1
        assert rejections <= 30

    def test_validation(self):
        est = estimate([0, 1], 2)
        with pytest.raises(ValidationError):
            consistency_test(est, [0.5, 0.4], 1e-3)
        with pytest.raises(ValidationError):
            consistency_test(est, [0.5, 0.5, 0.0], 1e-3)
        with pytest.raises(ValidationError):
            consistency_test(est, [1.5, -0.5], 1e-3)
        with pytest.raises(ValidationError):
            consistency_test(est, [0.5, 0.5], 0.0)


class TestRequiredSampleSize:
    def test_quadratic_growth_in_grid_spacing(self):
        ratio = required_sample_size(8, 1e-3) / required_sample_size(4, 1e-3)
        assert ratio == pytest.approx(2**8, rel=0.01)

    def test_prohibitive_at_high_precision(self):
        assert required_sample_size(16, 1e-3) > 10**9

    def test_vacuous_test_needs_one_sample(self):
        assert required_sample_size(8, 1.0) == 1

    def test_stricter_significance_needs_more_samples(self):
        assert required_sample_size(8, 1e-6) > required_sample_size(8, 1e-2)

    def test_validation(self):
        with pytest.raises(ValidationError):
            required_sample_size(0, 1e-3)
        with pytest.raises(ValidationError):
            required_sample_size(8, 0.0)
        with pytest.raises(ValidationError):
            required_sample_size(8, 1e-3, power=1.0)


class TestFrequencyEstimateType:
    def test_json_shape(self):
        est = estimate([0, 1, 1], 2)
        doc = est.to_json()
        assert doc["counts"] == [1, 2]
        assert doc["n"] == 3
        assert len(doc["f"]) == 2 and len(doc["sigma"]) == 2

    def test_k_property(self):
        assert estimate([0, 1, 2], 3).k == 3
