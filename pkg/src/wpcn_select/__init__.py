"""Outage analysis of device selection in wireless powered communication
networks: exact finite-population formulas, high-SNR floors, extreme-value
asymptotics, and Monte Carlo cross-checks."""

__version__ = "0.1.0"

from .analytic import (
    Method,
    OutageEstimate,
    PairSpec,
    Scheme,
    SchemeSpec,
    outage_ebs,
    outage_ebs_high_snr,
    outage_ibs,
    outage_ibs_high_snr,
    outage_mms,
    outage_mms_high_snr,
    outage_pair,
    outage_pair_high_snr,
    outage_rs,
    outage_rs_high_snr,
    outage_sbs,
    outage_sbs_high_snr,
)
from .evt import (
    NormalizingConstants,
    gumbel_kth_cdf,
    normalizing_constants,
    outage_evt_ebs,
    outage_evt_ibs,
    outage_evt_mms,
    outage_evt_pair,
    outage_evt_sbs,
)
from .experiments import (
    ComparisonConfig,
    OptimalT1,
    SweepResult,
    SweepSpec,
    SweptParameter,
    compare_methods,
    evaluate_point,
    find_optimal_t1,
    read_csv,
    reproduce_figure,
    run_sweep,
    write_csv,
    write_json,
)
from .model import (
    DEFAULT_RECTENNA,
    EhModel,
    RectennaParams,
    SystemParams,
    db_to_linear,
    dbm_to_watts,
    harvested_energy,
    linear_to_db,
    snr,
    threshold_x,
    watts_to_dbm,
)
from .montecarlo import ChannelDraw, TrialConfig, draw_channels, select_device, simulate_outage
from .special import (
    AccuracyError,
    DomainError,
    QuadratureSpec,
    bessel_k1,
    integrate_finite,
    integrate_semi_infinite,
    lower_inc_gamma,
    reg_inc_beta,
)

__all__ = [
    "AccuracyError",
    "ChannelDraw",
    "ComparisonConfig",
    "DEFAULT_RECTENNA",
    "DomainError",
    "EhModel",
    "Method",
    "NormalizingConstants",
    "OptimalT1",
    "OutageEstimate",
    "PairSpec",
    "QuadratureSpec",
    "RectennaParams",
    "Scheme",
    "SchemeSpec",
    "SweepResult",
    "SweepSpec",
    "SweptParameter",
    "SystemParams",
    "TrialConfig",
    "bessel_k1",
    "compare_methods",
    "db_to_linear",
    "dbm_to_watts",
    "draw_channels",
    "evaluate_point",
    "find_optimal_t1",
    "gumbel_kth_cdf",
    "harvested_energy",
    "integrate_finite",
    "integrate_semi_infinite",
    "linear_to_db",
    "lower_inc_gamma",
    "normalizing_constants",
    "outage_ebs",
    "outage_ebs_high_snr",
    "outage_evt_ebs",
    "outage_evt_ibs",
    "outage_evt_mms",
    "outage_evt_pair",
    "outage_evt_sbs",
    "outage_ibs",
    "outage_ibs_high_snr",
    "outage_mms",
    "outage_mms_high_snr",
    "outage_pair",
    "outage_pair_high_snr",
    "outage_rs",
    "outage_rs_high_snr",
    "outage_sbs",
    "outage_sbs_high_snr",
    "read_csv",
    "reg_inc_beta",
    "reproduce_figure",
    "run_sweep",
    "select_device",
    "simulate_outage",
    "snr",
    "threshold_x",
    "watts_to_dbm",
    "write_csv",
    "write_json",
]
