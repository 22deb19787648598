"""Frequency-translation scheme that puts the field of interest in one sideband.

An AOM shifts either the signal or the local oscillator by the drive
frequency, so at the analysis frequency the signal occupies one sideband and
an uncorrelated vacuum mode occupies the mirror sideband. With no
cross-sideband correlations the homodyne variance loses its LO-phase
dependence and the occupied sideband holds ``V - 1`` photons per mode.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_positive, check_probability
from .quantum_states import SidebandField, variance_spectrum


class Direction(str, enum.Enum):
    SIGNAL_UPSHIFTED = "signal_upshifted"
    LO_UPSHIFTED = "lo_upshifted"


@dataclass(frozen=True)
class SchemeConfig:
    omega_aom: float = 80e6
    detection_center: float = 160e6
    direction: Direction = Direction.SIGNAL_UPSHIFTED
    aom_transmission: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "direction", Direction(self.direction))
        check_positive(self.omega_aom, "omega_aom")
        check_positive(self.detection_center, "detection_center")
        check_probability(self.aom_transmission, "aom_transmission")


def apply_scheme(field: SidebandField, cfg: SchemeConfig) -> SidebandField:
    """Translate a single-mode input into the occupied sideband of the scheme.

    The occupied mode is attenuated by ``cfg.aom_transmission`` in power. The
    output always carries the occupied mode in ``alpha_plus`` with a vacuum
    ``-omega`` mode: when the LO is upshifted instead of the signal the roles
    of the two sidebands swap, and relabelling them leaves every observable
    unchanged.
    """
    if field.alpha_plus != 0 and field.alpha_minus != 0:
        raise ValueError("apply_scheme takes a single occupied mode; both sidebands are occupied")
    if field.squeezed and field.r > 0:
        raise ValueError("apply_scheme does not translate squeezed inputs")
    alpha = field.alpha_plus if field.alpha_plus != 0 else field.alpha_minus
    alpha = alpha * math.sqrt(cfg.aom_transmission)
    # LO_UPSHIFTED puts the signal at -omega; relabel so the occupied mode is +omega.
    return SidebandField(alpha_plus=alpha, vacuum_minus=True)


def single_sideband_photon_number(v: float) -> float:
    """Photons per mode in the occupied sideband, ``V - 1`` (unclamped)."""
    return v - 1.0


def phase_sweep(field: SidebandField, n_points: int):
    """Variance at ``n_points`` equally spaced LO phases on ``[0, 2 pi)``."""
    if n_points < 2:
        raise ValueError(f"n_points must be >= 2, got {n_points}")
    thetas = np.linspace(0.0, 2 * np.pi, n_points, endpoint=False)
    return [(float(t), variance_spectrum(field, float(t))) for t in thetas]
