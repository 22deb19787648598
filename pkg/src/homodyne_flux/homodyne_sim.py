"""Monte Carlo model of a homodyne detector read out by a spectrum analyser.

Each resolution-bandwidth bin is one complex circular Gaussian draw ``z`` and
the recorded power is ``|z|^2 / 2``, so noise-only bins are exponentially
distributed and their dB values follow the log-Rician family seen on a swept
analyser. Loss mixes in vacuum, so the per-bin mean power is

    eta * (V - 1) + 1 + dark_variance

in QNL units, with ``V`` the variance of the field at the LO phase.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _rng
from ._validation import (
    check_non_negative,
    check_positive,
    check_probability,
    check_samples,
    floor_count,
)
from .quantum_states import SidebandField, variance_spectrum

BLOCK_BINS = 4096


@dataclass(frozen=True)
class HomodyneConfig:
    eta_det: float = 0.9
    visibility: float = 0.93
    lo_phase: float = 0.0
    rbw_nominal: float = 30.0
    rbw_measured: float = 33.18
    record_seconds: float = 30.0
    dark_variance: float = 0.1
    seed: int = 0

    def __post_init__(self):
        check_probability(self.eta_det, "eta_det", open_low=True)
        check_probability(self.visibility, "visibility", open_low=True)
        check_positive(self.rbw_nominal, "rbw_nominal")
        check_positive(self.rbw_measured, "rbw_measured")
        check_positive(self.record_seconds, "record_seconds")
        check_non_negative(self.dark_variance, "dark_variance")
        if self.n_samples < 2:
            raise ValueError(
                f"record_seconds * rbw_measured gives {self.n_samples} bins; at least 2 are needed"
            )

    @property
    def n_samples(self) -> int:
        return floor_count(self.record_seconds, 1.0 / self.rbw_measured)

    @property
    def bin_seconds(self) -> float:
        """Duration of one independent bin, ``1 / RBW``."""
        return 1.0 / self.rbw_measured

    def with_seed(self, seed):
        return replace(self, seed=seed)


@dataclass(frozen=True)
class VarianceEstimate:
    value: float
    n_samples: int
    sigma: float
    dark_subtracted: bool = False

    def __post_init__(self):
        if self.n_samples < 2:
            raise ValueError(f"n_samples must be >= 2, got {self.n_samples}")
        if not self.sigma >= 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")


def effective_efficiency(cfg: HomodyneConfig) -> float:
    """Overall efficiency: mode overlap ``VIS^2`` times detector quantum efficiency."""
    return cfg.visibility**2 * cfg.eta_det


def _exponential_bins(mean_power, n, seed, stream):
    key = _rng.stream_key(seed, "homodyne", stream)
    out = np.empty(n)
    for block, start in enumerate(range(0, n, BLOCK_BINS)):
        stop = min(start + BLOCK_BINS, n)
        g = _rng.block_generator(key, block)
        z = g.standard_normal((stop - start, 2))
        out[start:stop] = 0.5 * (z[:, 0] ** 2 + z[:, 1] ** 2)
    return mean_power * out


def expected_bin_power(field: SidebandField, cfg: HomodyneConfig) -> float:
    v_true = variance_spectrum(field, cfg.lo_phase)
    return effective_efficiency(cfg) * (v_true - 1.0) + 1.0 + cfg.dark_variance


def synthesize_variance_record(field: SidebandField, cfg: HomodyneConfig, *, stream="signal") -> np.ndarray:
    """Per-bin analyser powers (QNL units) for ``cfg.n_samples`` bins."""
    return _exponential_bins(expected_bin_power(field, cfg), cfg.n_samples, cfg.seed, stream)


def dark_samples(cfg: HomodyneConfig) -> np.ndarray:
    """Per-bin powers with the optical path blocked: electronic noise only."""
    return _exponential_bins(cfg.dark_variance, cfg.n_samples, cfg.seed, "dark")


def measure_variance(samples) -> VarianceEstimate:
    """Average a record of bin powers; sigma is the standard error of the mean."""
    x = check_samples(samples)
    n = x.size
    return VarianceEstimate(
        value=float(x.mean()),
        n_samples=n,
        sigma=float(x.std(ddof=1) / math.sqrt(n)),
        dark_subtracted=False,
    )


def dark_record(cfg: HomodyneConfig) -> VarianceEstimate:
    return measure_variance(dark_samples(cfg))


def subtract_dark(measured: VarianceEstimate, dark: VarianceEstimate) -> VarianceEstimate:
    if measured.dark_subtracted or dark.dark_subtracted:
        raise ValueError("subtract_dark expects two unsubtracted estimates")
    return VarianceEstimate(
        value=measured.value - dark.value,
        n_samples=measured.n_samples,
        sigma=math.hypot(measured.sigma, dark.sigma),
        dark_subtracted=True,
    )
