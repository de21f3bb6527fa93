"""Photon statistics and interference contrast of multi-source parametric down-conversion."""

from .fock import FockStateVector, ModeLabel, Polarization, build_pdc_state
from .oracle import ExperimentSetup, ghz_setup, oracle_visibility, outcome_table, two_photon_setup
from .photon_statistics import (AnalyzerSetting, SqueezeParam, asymptotic_visibility,
                                bell_threshold, critical_K, critical_row, emission_probabilities,
                                ghz_visibility, separability_threshold, tilde_p,
                                two_photon_probability, two_photon_visibility)
from .swap import chsh_region, swap_setup_descriptor, swap_visibility
from .temporal import (approx_critical_f, critical_f, filter_visibility, gaussian_overlap,
                       eliminate_overlap)
from .tomography import (CorrelationTensor4, DensityMatrix16, analytic_rho, correlation_tensor,
                         epsilon, fidelity, reconstruct_rho, tensor_from_rho, v_total)

__all__ = [
    "FockStateVector", "ModeLabel", "Polarization", "build_pdc_state",
    "ExperimentSetup", "ghz_setup", "oracle_visibility", "outcome_table", "two_photon_setup",
    "AnalyzerSetting", "SqueezeParam", "asymptotic_visibility", "bell_threshold", "critical_K",
    "critical_row", "emission_probabilities", "ghz_visibility", "separability_threshold",
    "tilde_p", "two_photon_probability", "two_photon_visibility",
    "chsh_region", "swap_setup_descriptor", "swap_visibility",
    "approx_critical_f", "critical_f", "filter_visibility", "gaussian_overlap",
    "eliminate_overlap",
    "CorrelationTensor4", "DensityMatrix16", "analytic_rho", "correlation_tensor", "epsilon",
    "fidelity", "reconstruct_rho", "tensor_from_rho", "v_total",
]
