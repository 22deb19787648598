"""Photon-flux estimates from detector measurements.

Homodyne variances are converted to photons per mode, scaled by
``RBW / eta`` to photons per second and, like the counter results, referred
back through the optical path to the common reference point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence, Tuple

from .homodyne_sim import effective_efficiency

METHODS = ("quantum", "semiclassical", "spdm_linear", "spdm_log")


@dataclass(frozen=True)
class FluxEstimate:
    """A flux in photons/s with its one-sigma uncertainty.

    A negative raw flux is reported as ``phi = 0`` with
    ``negative_mean_deleted`` set; ``phi_raw`` keeps the untruncated value so
    averages over repetitions stay unbiased.
    """

    phi: float
    sigma: float
    method: str
    point: str
    negative_mean_deleted: bool = False
    phi_raw: float = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not self.sigma >= 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if self.phi_raw is None:
            object.__setattr__(self, "phi_raw", self.phi)
        if self.negative_mean_deleted and not (self.phi == 0 and self.phi_raw < 0):
            raise ValueError("negative_mean_deleted requires phi == 0 and a negative phi_raw")


def make_estimate(phi, sigma, method, point) -> FluxEstimate:
    phi, sigma = float(phi), float(sigma)
    if phi < 0:
        return FluxEstimate(0.0, sigma, method, point, negative_mean_deleted=True, phi_raw=phi)
    return FluxEstimate(phi, sigma, method, point, phi_raw=phi)


@dataclass(frozen=True)
class OpticalPath:
    """Ordered ``(label, power transmission)`` elements from the reference point to a detector."""

    elements: Tuple[Tuple[str, float], ...] = ()

    def __post_init__(self):
        elements = tuple((str(label), float(t)) for label, t in self.elements)
        for label, t in elements:
            if not 0 < t <= 1:
                raise ValueError(f"transmission of {label!r} must lie in (0, 1], got {t}")
        object.__setattr__(self, "elements", elements)

    @classmethod
    def from_pairs(cls, pairs: Sequence):
        return cls(tuple(tuple(p) for p in pairs))

    @property
    def total(self) -> float:
        return math.prod(t for _, t in self.elements)


def _homodyne_scale(cfg):
    return cfg.rbw_measured / effective_efficiency(cfg)


def homodyne_flux_quantum(v, cfg, point="B1") -> FluxEstimate:
    """Flux from a dark-subtracted variance with the vacuum unit removed."""
    if not v.dark_subtracted:
        raise ValueError("homodyne_flux_quantum needs a dark-subtracted variance")
    scale = _homodyne_scale(cfg)
    n_plus = v.value - 1.0
    return make_estimate(n_plus * scale, v.sigma * scale, "quantum", point)


def homodyne_flux_semiclassical(v, cfg, point="B1") -> FluxEstimate:
    """Flux if vacuum noise were real classical noise: ``n = V`` rather than ``V - 1``."""
    if not v.dark_subtracted:
        raise ValueError("homodyne_flux_semiclassical needs a dark-subtracted variance")
    scale = _homodyne_scale(cfg)
    return make_estimate(v.value * scale, v.sigma * scale, "semiclassical", point)


def refer_to_reference(est: FluxEstimate, path: OpticalPath, point="A") -> FluxEstimate:
    total = path.total
    if not total > 0:
        raise ValueError("optical path has zero transmission")
    return replace(
        est,
        phi=est.phi / total,
        sigma=est.sigma / total,
        phi_raw=est.phi_raw / total,
        point=point,
    )


def statistical_sigma(n_samples, base_sigma_1):
    """Standard error after averaging ``n_samples`` independent points."""
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    return base_sigma_1 / math.sqrt(n_samples)
