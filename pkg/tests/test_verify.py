import math

import numpy as np
import pytest

from telesim.errors import ValidationError
from telesim.precision import GridMode, PrecisionSpec
from telesim.qmath import SIGMA_X, SIGMA_Z, UP, PureQubit, apply, fidelity, rotation_y
from telesim.rng import make_rng, substream
from telesim.verify import (
    VerificationOp,
    VerificationReport,
    _binomial_pass,
    measure_verify,
    rotate_then_measure,
    success_bound,
    truncation_experiment,
    verification_experiment,
    verification_op,
)

SQRT_HALF = 1.0 / math.sqrt(2.0)


class TestVerificationOp:
    def test_alpha_one_is_sigma_z(self):
        op = verification_op(1.0)
        assert op.theta == 0.0
        assert np.allclose(op.matrix.mat, SIGMA_Z.mat, atol=1e-15)
        assert fidelity(op.plus_eigenvector, UP) == 1.0

    def test_alpha_sqrt_half_is_sigma_x(self):
        op = verification_op(SQRT_HALF)
        assert op.theta == pytest.approx(math.pi / 2.0, abs=1e-15)
        assert np.allclose(op.matrix.mat, SIGMA_X.mat, atol=1e-12)

    def test_alpha_domain(self):
        with pytest.raises(ValidationError):
            verification_op(1.1)
        with pytest.raises(ValidationError):
            verification_op(-0.1)

    @pytest.mark.parametrize("theta", [0.0, 0.1, 1.0, 2.2, math.pi - 0.01])
    def test_structure_invariants(self, theta):
        op = VerificationOp.from_theta(theta)
        m = op.matrix.mat
        assert np.allclose(m @ m, np.eye(2), atol=1e-12)
        assert abs(np.trace(m)) < 1e-12
        assert op.matrix.is_hermitian(1e-12)
        assert op.matrix.is_unitary(1e-12)

    @pytest.mark.parametrize("alpha", [0.0, 0.2, SQRT_HALF, 0.9, 1.0])
    def test_plus_eigenvector_has_eigenvalue_one(self, alpha):
        op = verification_op(alpha)
        v = op.plus_eigenvector.vec
        assert np.allclose(op.matrix.mat @ v, v, atol=1e-12)
        assert op.plus_eigenvector.a0 == pytest.approx(alpha, abs=1e-12)


class TestMeasurement:
    def test_eigenstates_are_deterministic(self, rng):
        op = verification_op(0.9)
        plus = op.plus_eigenvector
        minus = PureQubit(-plus.a1, plus.a0)  # orthogonal partner
        assert all(measure_verify(plus, op, rng) == 1 for _ in range(100))
        assert all(measure_verify(minus, op, rng) == -1 for _ in range(100))

    def test_born_statistics(self):
        rng = make_rng(11)
        op = verification_op(1.0)  # sigma_z measurement
        phi = 0.6
        state = PureQubit(math.cos(phi), math.sin(phi))
        n = 20000
        plus = sum(measure_verify(state, op, rng) == 1 for _ in range(n))
        p = math.cos(phi) ** 2
        assert abs(plus / n - p) < 5.0 * math.sqrt(p * (1 - p) / n)

    def test_rotation_inverse_always_succeeds(self, rng):
        for theta in (0.0, 0.4, 1.7):
            state = apply(rotation_y(theta), UP)
            assert rotate_then_measure(state, theta, rng) == 1

    def test_procedures_statistically_equivalent(self):
        theta = 1.234
        state = apply(rotation_y(0.9), UP)
        op = VerificationOp.from_theta(theta)
        n = 20000
        rng = make_rng(3)
        direct = sum(measure_verify(state, op, rng) == 1 for _ in range(n))
        rng = make_rng(4)
        rotated = sum(rotate_then_measure(state, theta, rng) == 1 for _ in range(n))
        f1, f2 = direct / n, rotated / n
        pooled = (direct + rotated) / (2 * n)
        sigma = math.sqrt(2 * pooled * (1 - pooled) / n)
        assert abs(f1 - f2) < 5.0 * sigma


class TestSuccessBound:
    def test_reference_values(self):
        assert success_bound(16) == 1.0 - 2.0**-16
        assert success_bound(16, 8) == 1.0 - 2.0**-8
        assert success_bound(2) == 0.75

    def test_monotonicity(self):
        for m in range(2, 20):
            assert success_bound(m + 1) > success_bound(m)
        for n in range(0, 15):
            assert success_bound(16, n + 1) < success_bound(16, n)

    def test_validation(self):
        with pytest.raises(ValidationError):
            success_bound(16, 16)
        with pytest.raises(ValidationError):
            success_bound(0)
        with pytest.raises(ValidationError):
            success_bound(16, -1)

    def test_worst_case_failure_stays_under_bound(self):
        # second-order margin: sin^2(phi) < phi^2 = 2^-m
        for m in range(2, 33):
            assert math.sin(2.0 ** (-m / 2.0)) ** 2 < 2.0 ** (-m)


class TestBinomialGate:
    def test_far_below_bound_rejects(self):
        assert not _binomial_pass(400, 1000, 0.5, 1e-3)

    def test_at_bound_accepts(self):
        assert _binomial_pass(500, 1000, 0.5, 1e-3)
        assert _binomial_pass(1000, 1000, 0.5, 1e-3)

    def test_significance_moves_the_cut(self):
        # 465/1000 at p=0.5 sits near the 1.4% lower tail
        assert _binomial_pass(465, 1000, 0.5, 1e-3)
        assert not _binomial_pass(465, 1000, 0.5, 0.05)


class TestVerificationExperiment:
    def test_analytic_sentinel(self):
        spec = PrecisionSpec(8)
        report = verification_experiment(spec, 0)
        assert report.trials == 0
        phi = 2.0**-4
        assert report.p_hat == pytest.approx(math.cos(phi) ** 2, abs=1e-15)
        assert report.bound == 1.0 - 2.0**-8
        assert report.passed

    def test_sampled_run_is_deterministic(self):
        spec = PrecisionSpec(8)
        a = verification_experiment(spec, 5000, substream(7, 0))
        b = verification_experiment(spec, 5000, substream(7, 0))
        assert a == b

    def test_sampled_success_rate_near_analytic(self):
        spec = PrecisionSpec(8)
        analytic = verification_experiment(spec, 0).p_hat
        report = verification_experiment(spec, 100000, substream(1, 0))
        sigma = math.sqrt(analytic * (1 - analytic) / report.trials)
        assert abs(report.p_hat - analytic) < 5 * sigma
        assert report.successes <= report.trials
        assert report.p_hat == report.successes / report.trials

    def test_requires_real_rotation_grid(self):
        with pytest.raises(ValidationError):
            verification_experiment(PrecisionSpec(8, GridMode.GENERAL), 0)

    def test_report_serialization(self):
        report = verification_experiment(PrecisionSpec(8), 0)
        doc = report.to_json()
        assert doc["kind"] == "verification"
        row = report.csv_row()
        assert row == (8, 0, 0, 0, report.p_hat, report.bound, True)


class TestTruncationExperiment:
    # independently derived closed-form failure ratios
    @pytest.mark.parametrize(
        "m,n,expected",
        [
            (16, 2, 3.9999389651541902),
            (16, 4, 15.998779332885596),
            (16, 8, 255.66814062210918),
            (8, 4, 15.689850934043182),
        ],
    )
    def test_analytic_ratios(self, m, n, expected):
        _, _, ratio = truncation_experiment(PrecisionSpec(m), n, 0)
        assert ratio == pytest.approx(expected, rel=1e-9)

    def test_analytic_failure_probabilities(self):
        full, trunc, _ = truncation_experiment(PrecisionSpec(8), 4, 0)
        assert 1.0 - full.p_hat == pytest.approx(0.0039011663853354734, rel=1e-12)
        assert 1.0 - trunc.p_hat == pytest.approx(0.061208719054813642, rel=1e-12)

    def test_zero_truncation_ratio_is_one(self):
        _, _, ratio = truncation_experiment(PrecisionSpec(8), 0, 0)
        assert ratio == 1.0

    def test_sampled_ratio_within_three_sigma(self):
        m, n, trials = 8, 4, 200000
        full_a, trunc_a, ratio_a = truncation_experiment(PrecisionSpec(m), n, 0)
        _, _, ratio = truncation_experiment(PrecisionSpec(m), n, trials, substream(2, 0))
        pf, pt = 1.0 - full_a.p_hat, 1.0 - trunc_a.p_hat
        sigma = math.sqrt(
            pt * (1 - pt) / trials / pf**2
            + pt**2 / pf**4 * pf * (1 - pf) / trials
        )
        assert abs(ratio - ratio_a) < 3.0 * sigma

    def test_average_mode_dilutes_amplification(self):
        spec = PrecisionSpec(12)
        _, _, worst = truncation_experiment(spec, 6, 0)
        _, _, averaged = truncation_experiment(spec, 6, 0, average=True)
        assert averaged < worst

    def test_validation(self):
        with pytest.raises(ValidationError):
            truncation_experiment(PrecisionSpec(8), 8, 0)
        with pytest.raises(ValidationError):
            truncation_experiment(PrecisionSpec(8), -1, 0)

    def test_truncated_bound_still_holds_analytically(self):
        for m, n in ((8, 2), (12, 4), (16, 8)):
            _, trunc, _ = truncation_experiment(PrecisionSpec(m), n, 0)
            assert trunc.p_hat > trunc.bound
            assert trunc.bound == success_bound(m, n)
