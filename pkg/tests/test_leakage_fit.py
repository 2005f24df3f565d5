import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from leakqec.leakage_fit import (
    FitConvergenceError,
    LeakageRateFit,
    export_rate_fits_csv,
    fit_rates,
    fit_rates_constrained,
    per_round_prob_to_rate,
    rate_model,
    rate_to_per_round_prob,
)


def make_fit(gamma_up, gamma_down, p0=0.0):
    gamma = gamma_up + gamma_down
    return LeakageRateFit(
        gamma_up=gamma_up,
        gamma_down=gamma_down,
        Gamma=gamma,
        p0=p0,
        p_inf=gamma_up / gamma,
        residual_norm=0.0,
    )


class TestRateModel:
    def test_k_zero_returns_p0(self):
        fit = make_fit(0.001, 0.08, p0=0.42)
        assert rate_model(fit, 0) == pytest.approx(0.42, abs=1e-15)

    def test_large_k_returns_p_inf(self):
        fit = make_fit(0.001, 0.08)
        assert rate_model(fit, 10_000) == pytest.approx(fit.p_inf, abs=1e-12)

    def test_measure_qubit_numbers_at_thirty_rounds(self):
        # gamma_up 0.11%/round, gamma_down 8.1%/round
        fit = make_fit(0.0011, 0.081)
        assert rate_model(fit, 30) == pytest.approx(0.012257041008449666, abs=1e-12)
        assert fit.p_inf == pytest.approx(0.0134, abs=1e-4)

    def test_negative_round_rejected(self):
        with pytest.raises(ValueError):
            rate_model(make_fit(0.001, 0.08), -1)

    @given(
        gu=st.floats(1e-5, 0.05),
        gd=st.floats(1e-3, 0.5),
        p0=st.floats(0.0, 1.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_monotone_between_p0_and_p_inf(self, gu, gd, p0):
        fit = LeakageRateFit(
            gamma_up=gu, gamma_down=gd, Gamma=gu + gd,
            p0=p0, p_inf=gu / (gu + gd), residual_norm=0.0,
        )
        vals = rate_model(fit, np.arange(0, 200))
        diffs = np.diff(vals)
        if p0 < fit.p_inf:
            assert np.all(diffs >= -1e-15)
        else:
            assert np.all(diffs <= 1e-15)


class TestFitRates:
    def test_noiseless_inversion(self):
        truth = make_fit(0.0009, 0.091)
        curve = rate_model(truth, np.arange(1, 31))
        fit = fit_rates(curve)
        assert fit.gamma_up == pytest.approx(0.0009, abs=1e-8)
        assert fit.gamma_down == pytest.approx(0.091, abs=1e-8)
        assert abs(fit.p0) < 1e-8

    def test_p_inf_consistency_is_structural(self):
        curve = rate_model(make_fit(0.002, 0.05, p0=0.01), np.arange(1, 25))
        fit = fit_rates(curve)
        assert abs(fit.p_inf - fit.gamma_up / fit.Gamma) < 1e-12

    def test_noisy_recovery_within_bootstrap_bars(self):
        rng = np.random.default_rng(42)
        truth = make_fit(0.0011, 0.081)
        k = np.arange(1, 31)
        ideal = rate_model(truth, k)
        shots = 100_000
        curve = rng.binomial(shots, ideal) / shots
        fit = fit_rates(curve)
        boot = []
        for _ in range(200):
            resampled = rng.binomial(shots, rate_model(fit, k)) / shots
            boot.append(fit_rates(resampled))
        sig_up = np.std([b.gamma_up for b in boot])
        sig_down = np.std([b.gamma_down for b in boot])
        assert abs(fit.gamma_up - truth.gamma_up) < 3 * sig_up
        assert abs(fit.gamma_down - truth.gamma_down) < 3 * sig_down

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            fit_rates([0.001, 0.002])

    def test_populations_out_of_range(self):
        with pytest.raises(ValueError):
            fit_rates([0.1, 1.2, 0.3])

    def test_flat_zero_curve_clips_cleanly(self):
        fit = fit_rates([0.0] * 10)
        assert fit.gamma_up == pytest.approx(0.0, abs=1e-9)


class TestConstrainedFit:
    def test_table_style_estimate(self):
        # gamma_up fixed at 0.11%/round, flat curve at 0.03%
        fit = fit_rates_constrained([0.0003] * 30, 0.0011)
        assert fit.constrained
        assert fit.gamma_down == pytest.approx(3.66557, rel=1e-4)
        assert fit.p_inf == pytest.approx(0.0003, abs=1e-15)

    def test_inversion_identity(self):
        gu, gd = 0.0011, 0.081
        p_inf = gu / (gu + gd)
        fit = fit_rates_constrained([p_inf] * 20, gu)
        assert fit.gamma_down == pytest.approx(gd, rel=1e-12)

    def test_zero_curve_gives_infinite_decay(self):
        fit = fit_rates_constrained([0.0] * 5, 0.0011)
        assert math.isinf(fit.gamma_down)

    def test_exclude_first_round(self):
        fit = fit_rates_constrained([0.9, 0.1, 0.1], 0.01, exclude_first_round=True)
        assert fit.p_inf == pytest.approx(0.1, abs=1e-15)

    def test_empty_curve_rejected(self):
        with pytest.raises(ValueError):
            fit_rates_constrained([], 0.001)


class TestConversions:
    @given(st.floats(0.0, 5.0))
    @settings(max_examples=50, deadline=None)
    def test_rate_prob_roundtrip(self, gamma):
        p = rate_to_per_round_prob(gamma)
        assert 0.0 <= p < 1.0
        assert per_round_prob_to_rate(p) == pytest.approx(gamma, rel=1e-9, abs=1e-12)

    def test_large_rate_exceeds_unity_as_rate_not_prob(self):
        # a 328%/round decay rate is a rate, not a probability
        assert rate_to_per_round_prob(3.28) == pytest.approx(0.9624, abs=1e-4)


def test_export_csv(tmp_path):
    rows = [
        ("data", False, make_fit(0.0009, 0.091)),
        ("measure", True, fit_rates_constrained([0.0003] * 10, 0.0011)),
    ]
    path = tmp_path / "rates.csv"
    with path.open("w") as fh:
        export_rate_fits_csv(rows, fh)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "role,reset,gamma_up,gamma_down,p_inf,constrained"
    assert lines[1].startswith("data,0,")
    assert lines[2].startswith("measure,1,")
    assert lines[2].endswith(",1")
