import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from homodyne_flux import (
    HomodyneConfig,
    HomodyneFluxEstimator,
    SidebandField,
    SpdmConfig,
    SpdmFluxEstimator,
    dark_record,
    homodyne_flux_quantum,
    measure_variance,
    simulate_counts,
    subtract_dark,
    synthesize_variance_record,
)
from homodyne_flux.homodyne_sim import dark_samples
from homodyne_flux.spdm_sim import estimate_flux_from_counts


@pytest.fixture
def homodyne_data():
    cfg = HomodyneConfig(seed=21)
    field = SidebandField.single_sideband(math.sqrt(2e3 / cfg.rbw_measured))
    records = np.stack([synthesize_variance_record(field, cfg.with_seed(s)) for s in range(5)])
    return cfg, field, records


class TestHomodyneFluxEstimator:
    def test_params_round_trip(self):
        est = HomodyneFluxEstimator(eta_det=0.8, model="semiclassical")
        params = est.get_params()
        assert params["eta_det"] == 0.8 and params["model"] == "semiclassical"
        twin = clone(est)
        assert twin.get_params() == params
        twin.set_params(visibility=0.5)
        assert twin.visibility == 0.5 and est.visibility == 0.93

    def test_not_fitted(self, homodyne_data):
        with pytest.raises(NotFittedError):
            HomodyneFluxEstimator().predict(homodyne_data[2])

    def test_matches_function_api(self, homodyne_data):
        cfg, field, records = homodyne_data
        est = HomodyneFluxEstimator().fit(dark_samples(cfg))
        want = homodyne_flux_quantum(subtract_dark(measure_variance(records[0]), dark_record(cfg)), cfg)
        got = est.estimate(records[0])
        assert got.phi_raw == pytest.approx(want.phi_raw, rel=1e-12)
        assert got.sigma == pytest.approx(want.sigma, rel=1e-12)

    def test_predict_shape_and_accuracy(self, homodyne_data):
        cfg, _, records = homodyne_data
        est = HomodyneFluxEstimator().fit(dark_samples(cfg))
        phi = est.predict(records)
        assert phi.shape == (5,)
        assert abs(phi.mean() - 2e3) < 4 * est.estimate(records[0]).sigma / math.sqrt(5) * 1.5
        assert est.predict(records[0]).shape == (1,)

    def test_transform(self, homodyne_data):
        cfg, _, records = homodyne_data
        est = HomodyneFluxEstimator().fit(dark_samples(cfg))
        assert est.transform(records).shape == (5,)

    def test_semiclassical_offset(self, homodyne_data):
        cfg, _, records = homodyne_data
        dark = dark_samples(cfg)
        q = HomodyneFluxEstimator().fit(dark).predict(records)
        s = HomodyneFluxEstimator(model="semiclassical").fit(dark).predict(records)
        assert np.allclose(s - q, 33.18 / (0.93**2 * 0.9), rtol=1e-9)

    def test_path_referral(self, homodyne_data):
        cfg, _, records = homodyne_data
        dark = dark_samples(cfg)
        base = HomodyneFluxEstimator().fit(dark).predict(records)
        referred = HomodyneFluxEstimator(path_transmissions=[0.5, 0.5]).fit(dark).predict(records)
        assert np.allclose(referred, base / 0.25)

    @pytest.mark.parametrize("kw", [dict(model="classical"), dict(eta_det=0), dict(rbw_measured=-1)])
    def test_invalid_params_rejected_at_fit(self, kw):
        with pytest.raises(ValueError):
            HomodyneFluxEstimator(**kw).fit(np.ones(10))


class TestSpdmFluxEstimator:
    def test_matches_function_api(self):
        cfg = SpdmConfig(seed=4, integration_seconds=20.0)
        bright = simulate_counts(1e6, cfg)
        dark = simulate_counts(0.0, cfg, stream="dark")
        est = SpdmFluxEstimator().fit(dark.binned_clicks)
        want = estimate_flux_from_counts(bright, dark, cfg, "log_corrected")
        assert est.estimate(bright.binned_clicks).phi_raw == pytest.approx(want.phi_raw, rel=1e-12)
        assert est.predict(bright.binned_clicks)[0] == pytest.approx(want.phi_raw, rel=1e-12)
        assert est.predict(bright)[0] == pytest.approx(want.phi_raw, rel=1e-12)

    def test_linear_mode_and_clone(self):
        est = clone(SpdmFluxEstimator(mode="linear"))
        dark = np.zeros(10, dtype=int)
        bright = np.full(10, 110)  # 1.1e-3 of 1e5 gates
        phi = est.fit(dark).predict(bright)[0]
        assert phi == pytest.approx(1100 / (1e6 * 100e-9 * 0.11))

    def test_gate_mismatch(self):
        est = SpdmFluxEstimator().fit(np.zeros(10, dtype=int))
        with pytest.raises(ValueError):
            est.predict(np.zeros(11, dtype=int))

    def test_rejects_impossible_counts(self):
        with pytest.raises(ValueError):
            SpdmFluxEstimator(gates_per_bin=10).fit(np.array([11]))

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            SpdmFluxEstimator(mode="quadratic").fit(np.zeros(3, dtype=int))
