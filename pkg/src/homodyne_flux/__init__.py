"""Photon flux from homodyne quadrature variance, with a photon-counter comparison."""
from .estimation import (
    FluxEstimate,
    OpticalPath,
    homodyne_flux_quantum,
    homodyne_flux_semiclassical,
    refer_to_reference,
    statistical_sigma,
)
from .estimators import HomodyneFluxEstimator, SpdmFluxEstimator
from .homodyne_sim import (
    HomodyneConfig,
    VarianceEstimate,
    dark_record,
    effective_efficiency,
    measure_variance,
    subtract_dark,
    synthesize_variance_record,
)
from .quantum_states import (
    QuadratureVariance,
    SidebandField,
    coherent_variances,
    flux_from_power,
    mean_photon_from_variances,
    squeeze_factor_from_gain,
    squeezed_photon_number,
    variance_spectrum,
)
from .sideband_scheme import Direction, SchemeConfig, apply_scheme, phase_sweep, single_sideband_photon_number
from .spdm_sim import CountRecord, SpdmConfig, click_probability, estimate_flux_from_counts, simulate_counts

__version__ = "0.1.0"
