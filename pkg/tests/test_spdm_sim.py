import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from homodyne_flux.harness import dispersion_test
from homodyne_flux.spdm_sim import (
    CountRecord,
    SpdmConfig,
    _resolve_afterpulses,
    click_probability,
    estimate_flux_from_counts,
    simulate_counts,
)

NO_DARK = SpdmConfig(dark_rate=0.0, seed=5)


def ideal_record(p, gates=10**12):
    """Record whose click fraction equals ``p`` up to rounding."""
    clicks = round(p * gates)
    return CountRecord(clicks, gates, np.array([clicks]))


class TestConfig:
    def test_default_gate_count(self):
        cfg = SpdmConfig()
        assert cfg.n_gates == 30_000_000
        assert cfg.gates_per_bin == 100_000

    @pytest.mark.parametrize(
        "kw",
        [dict(eta_s=0), dict(gate_width=20e-6), dict(integration_seconds=0), dict(dark_rate=-1),
         dict(afterpulse_prob=1.5), dict(background_flux=-3)],
    )
    def test_rejects_invalid(self, kw):
        with pytest.raises(ValueError):
            SpdmConfig(**kw)


class TestClickProbability:
    def test_dark_free_zero_flux(self):
        assert click_probability(0.0, NO_DARK) == 0.0

    def test_default_operating_point(self):
        # mu = 0.11 * 1e5 * 100e-9 = 1.1e-3
        assert click_probability(1e5, NO_DARK) == pytest.approx(-math.expm1(-1.1e-3), rel=1e-12)
        assert click_probability(1e5, NO_DARK) == pytest.approx(1.0993953e-3, rel=1e-7)

    def test_saturates(self):
        assert click_probability(1e12, NO_DARK) == 1.0

    def test_background_and_dark_add(self):
        cfg = replace(NO_DARK, dark_rate=2000.0, background_flux=1e4)
        mu = (0.11 * (5e4 + 1e4) + 2000) * 100e-9
        assert click_probability(5e4, cfg) == pytest.approx(-math.expm1(-mu), rel=1e-12)

    def test_rejects_negative_flux(self):
        with pytest.raises(ValueError):
            click_probability(-1, NO_DARK)


class TestAfterpulseResolution:
    @staticmethod
    def loop(base, ap, carry):
        out, prev = np.zeros(base.size, dtype=bool), carry
        for i in range(base.size):
            prev = bool(base[i] or (prev and ap[i]))
            out[i] = prev
        return out

    @settings(max_examples=200)
    @given(st.lists(st.tuples(st.booleans(), st.booleans()), min_size=1, max_size=60), st.booleans())
    def test_matches_sequential_loop(self, gates, carry):
        base = np.array([g[0] for g in gates])
        ap = np.array([g[1] for g in gates])
        assert np.array_equal(_resolve_afterpulses(base, ap, carry), self.loop(base, ap, carry))

    def test_stationary_click_rate(self):
        # a click repeats with prob a, so the rate is p / (1 - a (1 - p))
        cfg = replace(NO_DARK, integration_seconds=30.0, afterpulse_prob=0.2)
        p = click_probability(2e6, cfg)
        rec = simulate_counts(2e6, cfg)
        want = p / (1 - 0.2 * (1 - p))
        sd = math.sqrt(rec.gates * want) * 2  # clustering inflates the variance
        assert abs(rec.clicks - rec.gates * want) < 4 * sd


class TestSimulateCounts:
    def test_no_light_no_dark(self):
        rec = simulate_counts(0.0, NO_DARK)
        assert rec.clicks == 0 and rec.gates == 30_000_000
        assert rec.binned_clicks.size == 300

    def test_mean_count(self):
        rec = simulate_counts(1e5, NO_DARK)
        want = rec.gates * click_probability(1e5, NO_DARK)
        assert want == pytest.approx(32981.86, rel=1e-6)
        assert abs(rec.clicks - want) < 4 * math.sqrt(want)

    def test_binned_sum(self):
        rec = simulate_counts(3e5, NO_DARK)
        assert rec.binned_clicks.sum() == rec.clicks

    def test_deterministic_and_stream_separated(self):
        a = simulate_counts(1e5, NO_DARK)
        b = simulate_counts(1e5, NO_DARK)
        c = simulate_counts(1e5, NO_DARK, stream="dark")
        assert np.array_equal(a.binned_clicks, b.binned_clicks)
        assert not np.array_equal(a.binned_clicks, c.binned_clicks)

    @pytest.mark.parametrize("exact", [False, True])
    def test_shorter_run_is_prefix(self, exact):
        short = simulate_counts(1e6, replace(NO_DARK, integration_seconds=7.0), exact_gates=exact)
        long = simulate_counts(1e6, replace(NO_DARK, integration_seconds=20.0), exact_gates=exact)
        assert np.array_equal(short.binned_clicks, long.binned_clicks[:7])

    def test_partial_trailing_bin(self):
        rec = simulate_counts(1e6, replace(NO_DARK, integration_seconds=2.5))
        assert rec.gates == 250_000
        assert rec.binned_clicks.size == 3

    def test_gate_level_agrees_with_binomial(self):
        cfg = replace(NO_DARK, integration_seconds=20.0)
        fast = simulate_counts(5e6, cfg)
        exact = simulate_counts(5e6, cfg, exact_gates=True)
        p = click_probability(5e6, cfg)
        sd = math.sqrt(fast.gates * p * (1 - p))
        assert abs(fast.clicks - exact.clicks) < 4 * math.sqrt(2) * sd

    def test_saturation_ceiling(self):
        cfg = replace(NO_DARK, integration_seconds=5.0)
        rec = simulate_counts(1e11, cfg)
        assert rec.clicks <= rec.gates
        assert rec.clicks == rec.gates == 500_000  # one click per gate: 1e5 clicks/s

    def test_poisson_binned_counts(self):
        for flux, stream in ((1e5, "bright"), (0.0, "dark")):
            rec = simulate_counts(flux, SpdmConfig(seed=9), stream=stream)
            assert dispersion_test(rec.binned_clicks)["p_value"] > 0.01


class TestEstimateFlux:
    def test_equal_records_give_zero(self):
        rec = simulate_counts(1e5, NO_DARK)
        for mode in ("linear", "log_corrected"):
            assert estimate_flux_from_counts(rec, rec, NO_DARK, mode).phi_raw == 0

    def test_log_inverts_click_probability(self):
        p = click_probability(1e5, NO_DARK)
        est = estimate_flux_from_counts(ideal_record(p), ideal_record(0.0), NO_DARK, "log_corrected")
        assert est.phi == pytest.approx(1e5, rel=1e-6)
        assert est.method == "spdm_log"

    def test_linear_bias_factor_at_half(self):
        mu = 0.5
        flux = mu / (0.11 * 100e-9)
        est = estimate_flux_from_counts(ideal_record(-math.expm1(-mu)), ideal_record(0.0), NO_DARK, "linear")
        assert est.phi / flux == pytest.approx(0.7869386805747332, rel=1e-6)

    @pytest.mark.parametrize("mu", [0.01, 0.05, 0.09, 0.11, 0.2, 0.5])
    def test_linearity_window(self, mu):
        flux = mu / (0.11 * 100e-9)
        est = estimate_flux_from_counts(ideal_record(-math.expm1(-mu)), ideal_record(0.0), NO_DARK, "linear")
        assert (abs(est.phi / flux - 1) < 0.05) == (mu <= 0.1)

    def test_linear_sigma(self):
        b = CountRecord(1100, 10**6, np.array([1100]))
        d = CountRecord(100, 10**6, np.array([100]))
        est = estimate_flux_from_counts(b, d, NO_DARK, "linear")
        scale = 10**6 * 100e-9 * 0.11
        assert est.phi == pytest.approx(1000 / scale)
        assert est.sigma == pytest.approx(math.sqrt(1200) / scale)

    def test_saturated_record_rejected(self):
        full = CountRecord(100, 100, np.array([100]))
        with pytest.raises(ValueError):
            estimate_flux_from_counts(full, ideal_record(0.0, 100), NO_DARK, "log_corrected")
        est = estimate_flux_from_counts(full, ideal_record(0.0, 100), NO_DARK, "linear")
        assert est.phi > 0

    def test_negative_flux_is_flagged(self):
        b = CountRecord(90, 10**6, np.array([90]))
        d = CountRecord(100, 10**6, np.array([100]))
        for mode in ("linear", "log_corrected"):
            est = estimate_flux_from_counts(b, d, NO_DARK, mode)
            assert est.negative_mean_deleted and est.phi == 0 and est.phi_raw < 0

    def test_unknown_mode(self):
        rec = ideal_record(0.1, 100)
        with pytest.raises(ValueError):
            estimate_flux_from_counts(rec, rec, NO_DARK, "cubic")

    def test_log_unbiased_with_dark_over_seeds(self):
        cfg = SpdmConfig(integration_seconds=30.0)
        flux = 2e5
        ests = []
        for seed in range(20):
            c = cfg.with_seed(seed)
            ests.append(estimate_flux_from_counts(
                simulate_counts(flux, c), simulate_counts(0.0, c, stream="dark"), c, "log_corrected"))
        mean = np.mean([e.phi_raw for e in ests])
        sigma = math.sqrt(sum(e.sigma**2 for e in ests)) / len(ests)
        assert abs(mean - flux) < 4 * sigma
