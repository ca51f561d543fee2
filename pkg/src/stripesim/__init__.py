"""Link-level simulator for cell-free massive MIMO uplink on radio stripes.

Receivers: per-AP maximum ratio combining with CPU-side accumulation,
centralized LMMSE, sequential per-AP LMMSE along the stripe, and Gram
recovery from matched-filter stream statistics with quasi-LMMSE
equalization at the CPU.  The harness measures spectral efficiency,
fronthaul loading, and a serial/parallel complexity model.
"""

from ._kernels import backend
from ._version import __version__
from .channel import (complex_noise, covariance_factors, draw_channels,
                      gaussian_symbols, pilot_matrix, qpsk_symbols,
                      received_data, received_pilots)
from .combiners import (apply_combiners, instantaneous_sinr, lmmse_combiners,
                        lmmse_receive_forms, mrc_combine, nlmmse_receive,
                        uc_select)
from .config import (ConfigError, SystemConfig, format_config, parse_config,
                     read_config)
from .costs import (SCHEMES, CostReport, aggregate_costs, chol_cost,
                    complexity_counts, fronthaul_reals)
from .covariance import nominal_angles, spatial_covariances
from .estimation import estimate_channels, estimation_matrices
from .geometry import (Layout, ap_positions_and_frames, large_scale_gain,
                       place_layout)
from .harness import (RunManifest, RunResult, compute_costs, parse_dsnr,
                      parse_ld, run_experiment, sweep_snr_ld,
                      write_cost_table, write_outputs, write_sweep)
from .metrics import (cdf_table, sinr_from_probes, spectral_efficiency,
                      summarize_samples)
from .qlmmse import (GramRecovery, eigenvalue_roundtrip, qlmmse_receive,
                     recover_gram, stream_second_moment)

__all__ = [
    "ConfigError", "CostReport", "GramRecovery", "Layout", "RunManifest",
    "RunResult", "SCHEMES", "SystemConfig", "__version__",
    "aggregate_costs", "ap_positions_and_frames", "apply_combiners",
    "backend", "cdf_table", "chol_cost", "complex_noise",
    "complexity_counts", "compute_costs", "covariance_factors",
    "draw_channels", "eigenvalue_roundtrip", "estimate_channels",
    "estimation_matrices", "format_config", "fronthaul_reals",
    "gaussian_symbols", "instantaneous_sinr", "large_scale_gain",
    "lmmse_combiners", "lmmse_receive_forms", "mrc_combine",
    "nlmmse_receive", "nominal_angles", "parse_config", "parse_dsnr",
    "parse_ld", "pilot_matrix", "place_layout", "qlmmse_receive",
    "qpsk_symbols", "read_config", "received_data", "received_pilots",
    "recover_gram", "run_experiment", "sinr_from_probes",
    "spatial_covariances", "spectral_efficiency", "stream_second_moment",
    "summarize_samples", "sweep_snr_ld", "uc_select", "write_cost_table",
    "write_outputs", "write_sweep",
]
