"""Closed-form sideband state algebra.

Quadratures follow ``X^theta = a e^{i theta} + a^dagger e^{-i theta}`` so the
vacuum variance is 1 and every variance here is in units of the quantum noise
limit (QNL). A field at analysis frequency ``omega`` is described by the
annihilation operators of its two sidebands, ``a_+`` at ``+omega`` and ``a_-``
at ``-omega``. For such a field

    V(theta) = <a_+^dag a_+> + <a_-^dag a_->
               + 2 Re(e^{2 i theta} <a_- a_+>) + 1

which gives the amplitude quadrature at ``theta = 0`` and the phase quadrature
at ``theta = pi/2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

PLANCK = 6.62607015e-34
SPEED_OF_LIGHT = 299792458.0


@dataclass(frozen=True)
class PhysicalConstants:
    h: float = PLANCK
    c: float = SPEED_OF_LIGHT


CODATA = PhysicalConstants()


@dataclass(frozen=True)
class SidebandField:
    """Gaussian state of the ``+omega``/``-omega`` sideband pair.

    Attributes
    ----------
    alpha_plus, alpha_minus : complex
        Coherent amplitudes of the two sidebands; ``|alpha|^2`` is photons per
        mode per unit analysis bandwidth.
    r : float
        Squeeze factor. Squeezing is along the amplitude quadrature, i.e. the
        sideband pair is two-mode squeezed so that ``Delta X^+ = e^{-r}``.
    squeezed : bool
        Whether ``r`` is applied. When false the field is coherent.
    vacuum_minus : bool
        The ``-omega`` sideband is an uncorrelated vacuum mode.
    """

    alpha_plus: complex = 0j
    alpha_minus: complex = 0j
    r: float = 0.0
    squeezed: bool = False
    vacuum_minus: bool = False

    def __post_init__(self):
        object.__setattr__(self, "alpha_plus", complex(self.alpha_plus))
        object.__setattr__(self, "alpha_minus", complex(self.alpha_minus))
        object.__setattr__(self, "r", float(self.r))
        if not self.r >= 0:
            raise ValueError(f"squeeze factor r must be >= 0, got {self.r}")
        if self.vacuum_minus:
            if self.alpha_minus != 0:
                raise ValueError("vacuum_minus requires alpha_minus == 0")
            if self.squeezed and self.r > 0:
                raise ValueError(
                    "a squeezed field correlates both sidebands; it cannot have a vacuum -omega mode"
                )

    @classmethod
    def vacuum(cls):
        return cls()

    @classmethod
    def coherent(cls, alpha):
        """Carrier-referenced coherent state ``|alpha>`` seen at both sidebands."""
        return cls(alpha_plus=alpha, alpha_minus=alpha)

    @classmethod
    def squeezed_state(cls, alpha, r):
        return cls(alpha_plus=alpha, alpha_minus=alpha, r=r, squeezed=True)

    @classmethod
    def single_sideband(cls, alpha, upper=True):
        """One occupied sideband with vacuum in the other, uncorrelated."""
        if upper:
            return cls(alpha_plus=alpha, vacuum_minus=True)
        return cls(alpha_minus=alpha)

    @property
    def effective_r(self):
        return self.r if self.squeezed else 0.0

    def photon_numbers(self):
        """Mean occupations ``(n_plus, n_minus)`` of the two sidebands."""
        s2 = math.sinh(self.effective_r) ** 2
        n_plus = abs(self.alpha_plus) ** 2 + s2
        n_minus = 0.0 if self.vacuum_minus else abs(self.alpha_minus) ** 2 + s2
        return n_plus, n_minus

    def correlation(self):
        """The cross-sideband moment ``<a_- a_+>``."""
        if self.vacuum_minus:
            return 0j
        r = self.effective_r
        return self.alpha_minus * self.alpha_plus - math.sinh(r) * math.cosh(r)


@dataclass(frozen=True)
class QuadratureVariance:
    v_plus: float
    v_minus: float

    def __post_init__(self):
        if self.v_plus < 0 or self.v_minus < 0:
            raise ValueError(f"variances must be non-negative, got {self.v_plus}, {self.v_minus}")


def variance_spectrum(field: SidebandField, theta: float) -> float:
    """QNL-relative variance of the quadrature at angle ``theta``."""
    n_plus, n_minus = field.photon_numbers()
    corr = field.correlation()
    if corr == 0:
        return n_plus + n_minus + 1.0
    rot = complex(math.cos(2 * theta), math.sin(2 * theta))
    return n_plus + n_minus + 2.0 * (rot * corr).real + 1.0


def quadrature_variances(field: SidebandField) -> QuadratureVariance:
    return QuadratureVariance(variance_spectrum(field, 0.0), variance_spectrum(field, math.pi / 2))


def mean_photon_from_variances(v: QuadratureVariance) -> float:
    """Mean photon number per mode averaged over both sidebands.

    The result is not clamped: noisy measured variances can make it negative.
    """
    return (v.v_plus + v.v_minus - 2.0) / 4.0


def coherent_variances(alpha) -> QuadratureVariance:
    alpha = complex(alpha)
    return QuadratureVariance(4 * alpha.real**2 + 1, 4 * alpha.imag**2 + 1)


def squeezed_photon_number(alpha, r) -> float:
    if r < 0:
        raise ValueError(f"squeeze factor r must be >= 0, got {r}")
    return abs(complex(alpha)) ** 2 + math.sinh(r) ** 2


def squeeze_factor_from_gain(gain) -> float:
    """Squeeze factor ``r = -ln(sqrt(G) - sqrt(G - 1))`` for gain ``G >= 1``."""
    gain = float(gain)
    if not gain >= 1:
        raise ValueError(f"gain must be >= 1, got {gain}")
    # arccosh(sqrt(G)) is the same quantity without cancellation at large G
    return float(np.arccosh(math.sqrt(gain)))


def flux_from_power(power, wavelength, constants: PhysicalConstants = CODATA) -> float:
    """Photon flux in photons/s carried by ``power`` watts at ``wavelength`` metres."""
    if not wavelength > 0:
        raise ValueError(f"wavelength must be positive, got {wavelength}")
    if power < 0:
        raise ValueError(f"power must be non-negative, got {power}")
    return power * wavelength / (constants.h * constants.c)
