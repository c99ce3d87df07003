"""Link-level simulator for multiplexed memory-assisted entanglement swapping.

Three mutually validating layers: closed-form expressions for retrieval,
cross-correlation, visibility, suppression and concurrence (analytic);
a truncated number-state engine that builds the heralded four-memory state
and measures it (fock); and a seeded event-level Monte-Carlo of the whole
multiplexed protocol (protocol).  The cli module exposes them as commands.
"""

from ._version import __version__
from .params import (
    CONFIG_KEYS,
    ExperimentParams,
    ParamError,
    experiment_defaults,
    load_params,
    parse_config,
    serialize_config,
    with_overrides,
)
from .analytic import (
    ClampedVisibilityWarning,
    ConcurrenceInputs,
    CorrelationPair,
    MultiplexedRate,
    coincidence_probability,
    concurrence,
    correlation_pair,
    cross_correlation,
    multiplexed_eg_probability,
    prob_antistokes,
    prob_stokes,
    retrieval_efficiency,
    single_mode_herald_probability,
    suppression,
    swap_pair_probability,
    threshold_g,
    visibility,
)
from .fock import (
    ClickOutcome,
    DimensionError,
    FockState,
    ModeRegister,
    SwapReport,
    apply_beam_splitter,
    apply_pair_source,
    apply_retrieval,
    counting_joint,
    default_theta_grid,
    heralded_spin_state,
    joint_clicks,
    measure_click,
    partial_trace,
    swap_pipeline,
    swap_stage,
    verification_joint,
    wootters_concurrence,
)
from .protocol import (
    ConditionalTables,
    SwapStatistics,
    TrialOutcome,
    TrialStream,
    apply_cutoff_policy,
    conditional_tables,
    cutoff_tradeoff,
    run_batch,
    run_trial,
    sweep,
    trial_stream,
)
from .series import CurveSeries, read_csv, read_json, write_csv, write_json

__all__ = [
    "__version__",
    "CONFIG_KEYS",
    "ExperimentParams",
    "ParamError",
    "experiment_defaults",
    "load_params",
    "parse_config",
    "serialize_config",
    "with_overrides",
    "ClampedVisibilityWarning",
    "ConcurrenceInputs",
    "CorrelationPair",
    "MultiplexedRate",
    "coincidence_probability",
    "concurrence",
    "correlation_pair",
    "cross_correlation",
    "multiplexed_eg_probability",
    "prob_antistokes",
    "prob_stokes",
    "retrieval_efficiency",
    "single_mode_herald_probability",
    "suppression",
    "swap_pair_probability",
    "threshold_g",
    "visibility",
    "ClickOutcome",
    "DimensionError",
    "FockState",
    "ModeRegister",
    "SwapReport",
    "apply_beam_splitter",
    "apply_pair_source",
    "apply_retrieval",
    "counting_joint",
    "default_theta_grid",
    "heralded_spin_state",
    "joint_clicks",
    "measure_click",
    "partial_trace",
    "swap_pipeline",
    "swap_stage",
    "verification_joint",
    "wootters_concurrence",
    "ConditionalTables",
    "SwapStatistics",
    "TrialOutcome",
    "TrialStream",
    "apply_cutoff_policy",
    "conditional_tables",
    "cutoff_tradeoff",
    "run_batch",
    "run_trial",
    "sweep",
    "trial_stream",
    "CurveSeries",
    "read_csv",
    "read_json",
    "write_csv",
    "write_json",
]
