"""Analytic identity checks run by ``homodyne-flux selftest``."""
from __future__ import annotations

import math

import numpy as np

from .quantum_states import (
    QuadratureVariance,
    coherent_variances,
    mean_photon_from_variances,
    squeeze_factor_from_gain,
)
from .sideband_scheme import single_sideband_photon_number

RTOL = 1e-12


def _rel_err(got, want):
    return abs(got - want) / max(abs(want), 1e-300) if want != 0 else abs(got)


def check_coherent(n=1000, seed=2024):
    rng = np.random.default_rng(seed)
    radius = 10 * np.sqrt(rng.random(n))
    phase = rng.uniform(0, 2 * np.pi, n)
    worst = 0.0
    for a in radius * np.exp(1j * phase):
        n_bar = mean_photon_from_variances(coherent_variances(a))
        worst = max(worst, _rel_err(n_bar, abs(a) ** 2))
    return worst < RTOL, f"{n} coherent states, worst relative error {worst:.3e}"


def check_squeezed(n=301):
    worst = 0.0
    for r in np.linspace(0, 3, n):
        v = QuadratureVariance(math.exp(-2 * r), math.exp(2 * r))
        worst = max(worst, _rel_err(mean_photon_from_variances(v), math.sinh(r) ** 2))
    return worst < RTOL, f"{n} squeezed vacua on r in [0, 3], worst relative error {worst:.3e}"


def check_single_sideband(n=1000):
    worst = 0.0
    for v in np.linspace(0.5, 1e4, n):
        lhs = single_sideband_photon_number(v)
        rhs = 2 * mean_photon_from_variances(QuadratureVariance(v, v))
        worst = max(worst, _rel_err(lhs, rhs) if rhs else abs(lhs - rhs))
    return worst < RTOL, f"V - 1 == 2 * nbar(V, V) on {n} points, worst relative error {worst:.3e}"


def check_unit_gain():
    r = squeeze_factor_from_gain(1.0)
    return r == 0.0, f"r(G=1) = {r!r}"


CHECKS = (
    ("coherent_photon_number", check_coherent),
    ("squeezed_vacuum_photon_number", check_squeezed),
    ("single_sideband_consistency", check_single_sideband),
    ("unit_gain_squeeze", check_unit_gain),
)


def run_selftest():
    """Run every identity; returns ``[(name, passed, detail), ...]``."""
    return [(name, *fn()) for name, fn in CHECKS]
