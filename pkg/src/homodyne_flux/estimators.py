"""scikit-learn style front ends for the flux estimators.

``fit`` learns the dark (no optical input) level from a dark record and
``predict`` turns bright records into photon fluxes, so the estimators can be
cloned, grid-searched and dropped into pipelines like any other estimator.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_positive, check_probability, check_samples
from .estimation import (
    OpticalPath,
    homodyne_flux_quantum,
    homodyne_flux_semiclassical,
    refer_to_reference,
)
from .homodyne_sim import HomodyneConfig, measure_variance, subtract_dark
from .spdm_sim import CountRecord, SpdmConfig, estimate_flux_from_counts


def _as_records(X):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[np.newaxis, :]
    if X.ndim != 2:
        raise ValueError(f"expected a record or a 2-D array of records, got shape {X.shape}")
    return X


def _path(transmissions):
    if transmissions is None:
        return None
    return OpticalPath.from_pairs([(f"element{i}", t) for i, t in enumerate(transmissions)])


class HomodyneFluxEstimator(BaseEstimator):
    """Photon flux from spectrum-analyser bin powers in QNL units.

    Parameters
    ----------
    rbw_measured : float
        Measured resolution bandwidth in Hz.
    eta_det, visibility : float
        Photodiode quantum efficiency and fringe visibility.
    model : {"quantum", "semiclassical"}
        ``quantum`` removes the vacuum unit from the variance; ``semiclassical``
        treats it as signal.
    path_transmissions : sequence of float, optional
        Losses from the reference point to the detector. When given, fluxes are
        referred back to the reference point.
    """

    def __init__(self, rbw_measured=33.18, eta_det=0.9, visibility=0.93, model="quantum",
                 path_transmissions=None):
        self.rbw_measured = rbw_measured
        self.eta_det = eta_det
        self.visibility = visibility
        self.model = model
        self.path_transmissions = path_transmissions

    def _config(self):
        return HomodyneConfig(eta_det=self.eta_det, visibility=self.visibility,
                              rbw_measured=self.rbw_measured)

    def fit(self, X, y=None):
        """Learn the dark-noise level from a dark record (or several, concatenated)."""
        check_positive(self.rbw_measured, "rbw_measured")
        check_probability(self.eta_det, "eta_det", open_low=True)
        check_probability(self.visibility, "visibility", open_low=True)
        if self.model not in ("quantum", "semiclassical"):
            raise ValueError(f"model must be 'quantum' or 'semiclassical', got {self.model!r}")
        self.dark_ = measure_variance(check_samples(X, name="dark record"))
        self.config_ = self._config()
        self.path_ = _path(self.path_transmissions)
        return self

    def estimate(self, samples):
        """FluxEstimate for one record of bin powers."""
        check_is_fitted(self, "dark_")
        v = subtract_dark(measure_variance(check_samples(samples)), self.dark_)
        rule = homodyne_flux_quantum if self.model == "quantum" else homodyne_flux_semiclassical
        est = rule(v, self.config_)
        return est if self.path_ is None else refer_to_reference(est, self.path_)

    def predict(self, X):
        """Raw (untruncated) flux for each record in ``X``."""
        return np.array([self.estimate(row).phi_raw for row in _as_records(X)])

    def transform(self, X):
        """Dark-subtracted variance per record, QNL units."""
        check_is_fitted(self, "dark_")
        return np.array(
            [subtract_dark(measure_variance(row), self.dark_).value for row in _as_records(X)]
        )


class SpdmFluxEstimator(BaseEstimator):
    """Photon flux from binned click counts of a gated photon counter.

    ``X`` holds clicks per display bin; each bin spans ``gates_per_bin`` gates.
    """

    def __init__(self, eta_s=0.11, gate_width=100e-9, gates_per_bin=100_000,
                 mode="log_corrected", path_transmissions=None):
        self.eta_s = eta_s
        self.gate_width = gate_width
        self.gates_per_bin = gates_per_bin
        self.mode = mode
        self.path_transmissions = path_transmissions

    def _record(self, binned):
        if isinstance(binned, CountRecord):
            return binned
        binned = np.asarray(binned)
        if binned.ndim != 1 or binned.size == 0:
            raise ValueError("a count record must be a non-empty 1-D array of clicks per bin")
        if np.any(binned < 0) or np.any(binned > self.gates_per_bin):
            raise ValueError(f"clicks per bin must lie in [0, {self.gates_per_bin}]")
        binned = binned.astype(np.int64)
        return CountRecord(int(binned.sum()), int(self.gates_per_bin * binned.size), binned)

    def fit(self, X, y=None):
        if self.mode not in ("linear", "log_corrected"):
            raise ValueError(f"mode must be 'linear' or 'log_corrected', got {self.mode!r}")
        self.config_ = SpdmConfig(eta_s=self.eta_s, gate_width=self.gate_width,
                                  gate_interval=max(10e-6, 2 * self.gate_width))
        self.dark_ = self._record(X)
        self.path_ = _path(self.path_transmissions)
        return self

    def estimate(self, binned):
        check_is_fitted(self, "dark_")
        bright = self._record(binned)
        if bright.gates != self.dark_.gates:
            raise ValueError(
                f"bright record spans {bright.gates} gates but the dark record spans {self.dark_.gates}"
            )
        est = estimate_flux_from_counts(bright, self.dark_, self.config_, mode=self.mode)
        return est if self.path_ is None else refer_to_reference(est, self.path_)

    def predict(self, X):
        if isinstance(X, CountRecord):
            return np.array([self.estimate(X).phi_raw])
        X = np.asarray(X)
        if X.ndim == 1:
            X = X[np.newaxis, :]
        return np.array([self.estimate(row).phi_raw for row in X])
