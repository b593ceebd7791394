"""Tests for the noise model, the analytic index oracle and the correction."""

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from sobolnoise.correction import (
    DELTA_GUARD,
    NoiseSpec,
    analytic_noised_indices,
    apply_correction,
    correct_main,
    correct_total,
    correction_bias,
    corrected_variance,
    noisy_eval,
    noisy_eval_batch,
    passthrough,
)
from sobolnoise.errors import NoiseGuardError
from sobolnoise.estimators import IndexEstimateSet
from sobolnoise.models import TrueIndices, benchmark, output_moments, true_indices
from sobolnoise.sampling import stream_rng

LINEAR_NOISE = NoiseSpec(alpha=(0.0, 1.0), beta=(0.0, 3.0))
GFUNCTION_NOISE = NoiseSpec(alpha=(-0.25, 0.25), beta=(-1.0, 1.0))


def make_estimates(main, total, virtual_total, var_virtual=0.0):
    main = np.asarray(main, dtype=float)
    return IndexEstimateSet(
        main=main,
        total=np.asarray(total, dtype=float),
        virtual_total=virtual_total,
        total_variance=1.0,
        var_main=np.zeros_like(main),
        var_total=np.zeros_like(main),
        var_virtual=var_virtual,
        n=100,
    )


class TestNoiseSpec:
    def test_closed_form_moments(self):
        spec = NoiseSpec(alpha=(0.0, 1.0), beta=(-3.0, 3.0))
        assert spec.alpha_mean == 0.5
        assert spec.alpha_var == pytest.approx(1 / 12)
        assert spec.beta_var == pytest.approx(3.0)

    def test_moments_match_sampling(self):
        rng = stream_rng(0, 0)
        a = rng.uniform(*LINEAR_NOISE.alpha, size=200_000)
        b = rng.uniform(*LINEAR_NOISE.beta, size=200_000)
        assert a.mean() == pytest.approx(LINEAR_NOISE.alpha_mean, abs=0.005)
        assert a.var() == pytest.approx(LINEAR_NOISE.alpha_var, rel=0.05)
        assert b.var() == pytest.approx(LINEAR_NOISE.beta_var, rel=0.05)

    def test_rejects_inverted_bounds(self):
        with pytest.raises(ValueError):
            NoiseSpec(alpha=(1.0, 0.0), beta=(0.0, 0.0))


class TestNoisyEval:
    def test_zero_width_noise_is_exact(self):
        model = benchmark("linear")
        rng = stream_rng(0, 2)
        silent = NoiseSpec(alpha=(0.0, 0.0), beta=(0.0, 0.0))
        x = np.array([0.3, 0.7, 0.1, 0.9])
        assert noisy_eval(model, x, silent, rng) == model.evaluate(x)

    def test_constant_noise_is_exact(self):
        model = benchmark("linear")
        rng = stream_rng(0, 2)
        constant = NoiseSpec(alpha=(0.25, 0.25), beta=(-2.0, -2.0))
        x = np.array([0.3, 0.7, 0.1, 0.9])
        assert noisy_eval(model, x, constant, rng) == 1.25 * model.evaluate(x) - 2.0

    def test_mean_at_fixed_input(self):
        """E[(1+a)g + b] = 1.5*g(x) + 1.5 for the preset noise levels;
        the sample mean of 1e6 draws must land within 5 sigma."""
        model = benchmark("linear")
        x = np.array([0.2, 0.8, 0.5, 0.5])
        g = model.evaluate(x)
        rng = stream_rng(7, 2)
        draws = noisy_eval_batch(model, np.tile(x, (1_000_000, 1)), LINEAR_NOISE, rng)
        sigma = np.sqrt((LINEAR_NOISE.alpha_var * g**2 + LINEAR_NOISE.beta_var) / 1e6)
        assert abs(draws.mean() - (1.5 * g + 1.5)) < 5 * sigma

    def test_fresh_draws_every_call(self):
        model = benchmark("linear")
        rng = stream_rng(0, 2)
        x = np.array([0.3, 0.7, 0.1, 0.9])
        first = noisy_eval(model, x, LINEAR_NOISE, rng)
        second = noisy_eval(model, x, LINEAR_NOISE, rng)
        assert first != second


class TestAnalyticNoisedIndices:
    def test_zero_width_noise_is_identity(self):
        truth = true_indices("linear")
        silent = NoiseSpec(alpha=(0.0, 0.0), beta=(0.0, 0.0))
        main_eps, total_eps, t_noise = analytic_noised_indices(truth, 7 / 6, 61 / 6, silent)
        np.testing.assert_array_equal(main_eps, truth.main)
        np.testing.assert_array_equal(total_eps, truth.total)
        assert t_noise == 0.0

    def test_linear_preset_values(self):
        """Noisy output variance 2.25*(7/6) + (1/12)*(61/6) + 0.75 = 38/9,
        noise share 115/304 ~ 0.3783, first main index ~ 0.3997."""
        truth = true_indices("linear")
        main_eps, total_eps, t_noise = analytic_noised_indices(
            truth, 7 / 6, 61 / 6, LINEAR_NOISE
        )
        signal = 2.625 / (38 / 9)
        assert t_noise == pytest.approx(115 / 304, rel=1e-12)
        assert t_noise == pytest.approx(0.3783, abs=1e-4)
        assert main_eps[0] == pytest.approx(signal * 9 / 14, rel=1e-12)
        assert main_eps[0] == pytest.approx(0.3997, abs=1e-4)
        assert total_eps[3] == pytest.approx(t_noise, rel=1e-12)  # inert x4

    def test_pure_additive_reduction(self):
        """With zero-width alpha the noise share reduces to Vb/(Vg + Vb)."""
        truth = true_indices("linear")
        additive = NoiseSpec(alpha=(0.0, 0.0), beta=(0.0, 3.0))
        _, _, t_noise = analytic_noised_indices(truth, 7 / 6, 61 / 6, additive)
        assert t_noise == pytest.approx(0.75 / (7 / 6 + 0.75), rel=1e-12)

    def test_matches_brute_force_variance(self):
        """The noisy-variance expansion behind the oracle agrees with the
        Monte Carlo variance of noisy evaluations."""
        model = benchmark("linear")
        rng = stream_rng(3, 2)
        x = rng.random((400_000, 4))
        y = noisy_eval_batch(model, x, LINEAR_NOISE, rng)
        gain = (1 + LINEAR_NOISE.alpha_mean) ** 2
        predicted = gain * (7 / 6) + LINEAR_NOISE.alpha_var * (61 / 6) + LINEAR_NOISE.beta_var
        assert y.var() == pytest.approx(predicted, rel=0.01)

    def test_rejects_bad_moments(self):
        truth = true_indices("linear")
        with pytest.raises(ValueError):
            analytic_noised_indices(truth, 0.0, 1.0, LINEAR_NOISE)
        with pytest.raises(ValueError):
            analytic_noised_indices(truth, 2.0, 1.0, LINEAR_NOISE)

    def test_noise_share_grows_with_noise_variance(self):
        truth = true_indices("linear")
        shares = [
            analytic_noised_indices(truth, 7 / 6, 61 / 6, spec)[2]
            for spec in (
                NoiseSpec((0.0, 0.0), (0.0, 0.0)),
                NoiseSpec((0.0, 0.5), (0.0, 1.0)),
                NoiseSpec((0.0, 1.0), (0.0, 3.0)),
                NoiseSpec((0.0, 2.0), (0.0, 6.0)),
            )
        ]
        assert all(0 <= s < 1 for s in shares)
        assert shares == sorted(shares)


class TestCorrectionFormulas:
    def test_main_identity_without_noise(self):
        assert correct_main(0.4, 0.0) == 0.4

    def test_main_hand_example(self):
        assert correct_main(0.4, 0.36) == pytest.approx(0.625, rel=1e-12)

    def test_total_of_pure_noise_variable_is_zero(self):
        assert correct_total(0.37, 0.37) == 0.0

    def test_total_identity_without_noise(self):
        assert correct_total(0.55, 0.0) == 0.55

    def test_guard_refuses_dominant_noise(self):
        with pytest.raises(NoiseGuardError):
            correct_main(0.01, 1.0 - DELTA_GUARD)
        with pytest.raises(NoiseGuardError):
            correct_total(0.995, 0.9951)

    def test_linear_round_trip(self):
        truth = true_indices("linear")
        main_eps, total_eps, t_noise = analytic_noised_indices(
            truth, 7 / 6, 61 / 6, LINEAR_NOISE
        )
        np.testing.assert_allclose(correct_main(main_eps, t_noise), truth.main, atol=1e-12)
        np.testing.assert_allclose(correct_total(total_eps, t_noise), truth.total, atol=1e-12)

    def test_gfunction_round_trip(self):
        truth = true_indices("gfunction")
        variance, second = output_moments("gfunction")
        main_eps, total_eps, t_noise = analytic_noised_indices(
            truth, variance, second, GFUNCTION_NOISE
        )
        corrected = correct_total(total_eps, t_noise)
        np.testing.assert_allclose(corrected, truth.total, atol=1e-12)
        assert corrected[0] == pytest.approx(0.690086, abs=1e-6)

    @given(
        s=st.floats(0, 1),
        t_extra=st.floats(0, 1),
        v_g=st.floats(0.1, 10),
        mean_sq=st.floats(0, 20),
        a_lo=st.floats(-0.9, 1.5),
        a_width=st.floats(0, 1.5),
        b_lo=st.floats(-5, 5),
        b_width=st.floats(0, 5),
    )
    @settings(max_examples=200, deadline=None)
    def test_round_trip_property(self, s, t_extra, v_g, mean_sq, a_lo, a_width, b_lo, b_width):
        """correct(noised(S, T)) recovers (S, T) to 1e-12 whenever the
        noise share stays below the guard."""
        t = min(1.0, s + t_extra * (1 - s))
        clean = TrueIndices(main=[s], total=[t])
        noise = NoiseSpec(alpha=(a_lo, a_lo + a_width), beta=(b_lo, b_lo + b_width))
        main_eps, total_eps, t_noise = analytic_noised_indices(
            clean, v_g, v_g + mean_sq, noise
        )
        assume(t_noise <= 1 - DELTA_GUARD - 1e-9)
        assert correct_main(main_eps[0], t_noise) == pytest.approx(s, abs=1e-12)
        assert correct_total(total_eps[0], t_noise) == pytest.approx(t, abs=1e-12)

    @given(
        s1=st.floats(0.01, 0.99),
        s2=st.floats(0.01, 0.99),
        t1=st.floats(0.0, 0.9),
        t2=st.floats(0.0, 0.9),
    )
    @settings(max_examples=100)
    def test_monotonicity(self, s1, s2, t1, t2):
        """Strictly increasing in the noised main index and, for positive
        estimates, in the noise share."""
        lo, hi = sorted((s1, s2))
        assume(hi > lo)
        assert correct_main(hi, t1) > correct_main(lo, t1)
        t_lo, t_hi = sorted((t1, t2))
        assume(t_hi - t_lo > 1e-9)
        assert correct_main(s1, t_hi) > correct_main(s1, t_lo)


class TestErrorPropagation:
    def test_bias_vanishes_without_estimation_noise(self):
        assert correction_bias(0.7, 0.0, 0.3) == 0.0

    def test_bias_hand_example(self):
        assert correction_bias(0.5, 0.01, 0.5) == pytest.approx(0.02, rel=1e-12)

    def test_variance_identity_without_noise(self):
        assert corrected_variance(0.003, 0.5, 0.0, 0.0) == 0.003

    def test_variance_hand_example(self):
        v = corrected_variance(0.001, 0.5, 0.002, 0.5)
        assert v == pytest.approx(0.004, rel=1e-12)

    def test_standard_ratio_form(self):
        v = corrected_variance(0.001, 0.5, 0.002, 0.5, variance_form="standard_ratio")
        assert v == pytest.approx((0.001 + 0.25 * 0.002) / 0.25, rel=1e-12)

    def test_unknown_form_rejected(self):
        with pytest.raises(ValueError):
            corrected_variance(0.001, 0.5, 0.002, 0.5, variance_form="other")

    def test_negative_variance_rejected(self):
        with pytest.raises(ValueError):
            correction_bias(0.5, -0.01, 0.5)

    @given(
        v=st.floats(0, 0.1),
        coeff=st.floats(0, 1),
        w=st.floats(0, 0.1),
        t=st.floats(0.0, 0.98),
    )
    @settings(max_examples=200)
    def test_variance_never_shrinks(self, v, coeff, w, t):
        """Correcting can only inflate the variance of an estimate."""
        assert corrected_variance(v, coeff, w, t) >= v
        assert corrected_variance(v, coeff, w, t, "standard_ratio") >= v


class TestApplyCorrection:
    def test_zero_noise_share_is_identity(self):
        raw = make_estimates([0.5, 0.2], [0.6, 0.3], virtual_total=0.0)
        out = apply_correction(raw)
        np.testing.assert_array_equal(out.main, raw.main)
        np.testing.assert_array_equal(out.total, raw.total)
        np.testing.assert_array_equal(out.bias_main, 0.0)
        np.testing.assert_array_equal(out.bias_total, 0.0)
        assert out.correction_applied

    def test_pure_noise_variable_corrects_to_zero(self):
        raw = make_estimates([0.4, 0.0], [0.7, 0.37], virtual_total=0.37)
        out = apply_correction(raw)
        assert out.total[1] == 0.0

    def test_requires_replicate_pass(self):
        raw = make_estimates([0.5], [0.6], virtual_total=None, var_virtual=None)
        with pytest.raises(ValueError):
            apply_correction(raw)

    def test_guard_propagates(self):
        raw = make_estimates([0.001], [0.999], virtual_total=0.999)
        with pytest.raises(NoiseGuardError):
            apply_correction(raw)

    def test_variance_forms_differ(self):
        raw = IndexEstimateSet(
            main=np.array([0.4]),
            total=np.array([0.7]),
            virtual_total=0.3,
            total_variance=1.0,
            var_main=np.array([0.001]),
            var_total=np.array([0.002]),
            var_virtual=0.004,
            n=100,
        )
        printed = apply_correction(raw, "as_printed")
        ratio = apply_correction(raw, "standard_ratio")
        s = printed.main[0]
        assert printed.var_main[0] == pytest.approx((0.001 + s * 0.004) / 0.7)
        assert ratio.var_main[0] == pytest.approx((0.001 + s**2 * 0.004) / 0.49)

    def test_passthrough_mirrors_raw(self):
        raw = make_estimates([0.5, 0.2], [0.6, 0.3], virtual_total=None, var_virtual=None)
        out = passthrough(raw)
        assert not out.correction_applied
        assert out.virtual_total_used == 0.0
        np.testing.assert_array_equal(out.main, raw.main)
        np.testing.assert_array_equal(out.total, raw.total)
        np.testing.assert_array_equal(out.var_main, raw.var_main)
