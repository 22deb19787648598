"""Gated InGaAs APD photon counter.

The detector opens for ``gate_width`` every ``gate_interval`` and registers at
most one click per gate. With Poissonian light the click probability per gate
is ``1 - exp(-mu)``; the per-gate draw is a Bernoulli trial rather than an
explicit photon-arrival simulation, which captures multi-photon pile-up
exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _rng
from ._validation import check_non_negative, check_positive, check_probability, floor_count
from .estimation import FluxEstimate, make_estimate


@dataclass(frozen=True)
class SpdmConfig:
    eta_s: float = 0.11
    gate_width: float = 100e-9
    gate_interval: float = 10e-6
    integration_seconds: float = 300.0
    # counts per second of open-gate time; p_dark = 3e-3 per 100 ns gate
    dark_rate: float = 3e4
    background_flux: float = 0.0
    afterpulse_prob: float = 0.0
    bin_seconds: float = 1.0
    seed: int = 0

    def __post_init__(self):
        check_probability(self.eta_s, "eta_s", open_low=True)
        check_positive(self.gate_width, "gate_width")
        check_positive(self.gate_interval, "gate_interval")
        if not self.gate_width < self.gate_interval:
            raise ValueError("gate_width must be shorter than gate_interval")
        check_positive(self.integration_seconds, "integration_seconds")
        check_non_negative(self.dark_rate, "dark_rate")
        check_non_negative(self.background_flux, "background_flux")
        check_probability(self.afterpulse_prob, "afterpulse_prob")
        check_positive(self.bin_seconds, "bin_seconds")
        if self.n_gates < 1:
            raise ValueError("integration_seconds is shorter than one gate interval")

    @property
    def n_gates(self) -> int:
        return floor_count(self.integration_seconds, self.gate_interval)

    @property
    def gates_per_bin(self) -> int:
        return max(1, floor_count(self.bin_seconds, self.gate_interval))

    def with_seed(self, seed):
        return replace(self, seed=seed)


@dataclass(frozen=True)
class CountRecord:
    clicks: int
    gates: int
    binned_clicks: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not 0 <= self.clicks <= self.gates:
            raise ValueError(f"clicks ({self.clicks}) must lie in [0, gates={self.gates}]")

    @property
    def click_fraction(self) -> float:
        return self.clicks / self.gates


def mean_photons_per_gate(flux_at_apd, cfg: SpdmConfig) -> float:
    """Mean detected events per gate including background and dark counts."""
    return (cfg.eta_s * (flux_at_apd + cfg.background_flux) + cfg.dark_rate) * cfg.gate_width


def click_probability(flux_at_apd, cfg: SpdmConfig) -> float:
    if flux_at_apd < 0:
        raise ValueError(f"flux must be non-negative, got {flux_at_apd}")
    return -math.expm1(-mean_photons_per_gate(flux_at_apd, cfg))


def _resolve_afterpulses(base, ap, carry):
    """Solve ``c[i] = base[i] | (c[i-1] & ap[i])`` with ``c[-1] = carry``.

    A gate clicks when some earlier-or-same gate ``j`` had a primary click and
    every gate after ``j`` up to ``i`` drew an afterpulse.
    """
    idx = np.arange(base.size)
    last_click = np.maximum.accumulate(np.where(base, idx, -2))
    if carry:
        last_click = np.where(last_click == -2, -1, last_click)
    last_break = np.maximum.accumulate(np.where(ap, -2, idx))
    return (last_click >= -1) & (last_break <= last_click)


def simulate_counts(flux_at_apd, cfg: SpdmConfig, *, stream="bright", exact_gates=None) -> CountRecord:
    """Simulate ``cfg.n_gates`` gates and bin the clicks in ``cfg.bin_seconds`` bins.

    Each display bin draws from its own counter block. Without afterpulsing
    the gates in a bin are i.i.d. and the bin total is drawn as one binomial;
    ``exact_gates=True`` forces gate-by-gate Bernoulli draws, which is always
    used when ``afterpulse_prob > 0``.
    """
    p = click_probability(flux_at_apd, cfg)
    if exact_gates is None:
        exact_gates = cfg.afterpulse_prob > 0
    key = _rng.stream_key(cfg.seed, "spdm", stream)
    gates, per_bin = cfg.n_gates, cfg.gates_per_bin
    n_bins = -(-gates // per_bin)
    binned = np.empty(n_bins, dtype=np.int64)
    carry = False
    for b in range(n_bins):
        n = min(per_bin, gates - b * per_bin)
        g = _rng.block_generator(key, b)
        if not exact_gates:
            binned[b] = g.binomial(n, p)
            continue
        base = g.random(n) < p
        ap = g.random(n) < cfg.afterpulse_prob
        clicks = _resolve_afterpulses(base, ap, carry)
        binned[b] = int(clicks.sum())
        carry = bool(clicks[-1])
    return CountRecord(clicks=int(binned.sum()), gates=gates, binned_clicks=binned)


def estimate_flux_from_counts(
    bright: CountRecord, dark: CountRecord, cfg: SpdmConfig, mode="log_corrected", point="B2"
) -> FluxEstimate:
    """Dark-subtracted photon flux at the APD input.

    ``linear`` divides the excess click count by the open-gate time and
    efficiency, which under-reads once gates saturate. ``log_corrected``
    inverts ``p = 1 - exp(-mu)`` before subtracting, and is unbiased until the
    bright record saturates completely.
    """
    if bright.gates != dark.gates:
        raise ValueError("bright and dark records cover different gate counts")
    gates = bright.gates
    scale = cfg.gate_width * cfg.eta_s
    if mode == "linear":
        phi = (bright.clicks - dark.clicks) / (gates * scale)
        sigma = math.sqrt(bright.clicks + dark.clicks) / (gates * scale)
        return make_estimate(phi, sigma, "spdm_linear", point)
    if mode == "log_corrected":
        pb, pd = bright.click_fraction, dark.click_fraction
        if pb >= 1.0 or pd >= 1.0:
            raise ValueError("record is saturated (a click in every gate); the flux cannot be inverted")
        phi = (-math.log1p(-pb) + math.log1p(-pd)) / scale
        # delta method: var(-ln(1-p)) = p / ((1-p) * gates)
        var_mu = pb / ((1 - pb) * gates) + pd / ((1 - pd) * gates)
        return make_estimate(phi, math.sqrt(var_mu) / scale, "spdm_log", point)
    raise ValueError(f"unknown mode {mode!r}; expected 'linear' or 'log_corrected'")
