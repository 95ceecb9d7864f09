"""Chaotic shape-forming-filter waveforms and ACF-based blind channel identification."""

from .acf import AcfEstimate, empirical_acf, empirical_acf_trace, predicted_rx_acf, predicted_rx_acf_trace
from .baselines import LsEstimate, ProbeFrame, chaotic_probe_frame, gaussian_probe_frame, ls_estimate
from .channel import (
    ChannelModel,
    NoiseSpec,
    add_awgn,
    apply_multipath,
    attenuation_from_delay,
    sample_random_channel,
)
from .estimator import (
    EstimationResult,
    IdentificationProblem,
    SolverOptions,
    build_residuals,
    detect_paths,
    mse,
    residual_jacobian,
    solve_channel,
)
from .experiments import derive_seed, identify_blind, resolve_config
from .waveform import (
    CsfParams,
    SymbolStream,
    Waveform,
    authoritative_acf_table,
    base_pulse,
    encode_waveform,
    pulse_acf,
    random_symbols,
    sample_base_pulse,
    theoretical_acf,
)

__all__ = [
    "AcfEstimate",
    "ChannelModel",
    "CsfParams",
    "EstimationResult",
    "IdentificationProblem",
    "LsEstimate",
    "NoiseSpec",
    "ProbeFrame",
    "SolverOptions",
    "SymbolStream",
    "Waveform",
    "add_awgn",
    "apply_multipath",
    "attenuation_from_delay",
    "authoritative_acf_table",
    "base_pulse",
    "build_residuals",
    "chaotic_probe_frame",
    "derive_seed",
    "detect_paths",
    "empirical_acf",
    "empirical_acf_trace",
    "encode_waveform",
    "gaussian_probe_frame",
    "identify_blind",
    "ls_estimate",
    "mse",
    "predicted_rx_acf",
    "predicted_rx_acf_trace",
    "pulse_acf",
    "random_symbols",
    "resolve_config",
    "residual_jacobian",
    "sample_base_pulse",
    "sample_random_channel",
    "solve_channel",
    "theoretical_acf",
]

__version__ = "0.1.0"
