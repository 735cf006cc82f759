"""Chase-escape with conversion on complete graphs.

Three law-equivalent simulation engines (population chain, per-edge graph
Gillespie, birth/death coupling), an exact finite-n oracle for the
white-survivor distribution, closed-form limits with independent quadrature
cross-checks, and a reproducible Monte Carlo harness.
"""

from .analytics import (
    ExactDistribution,
    LimitRegime,
    classify_regime,
    conversion_growth_limit,
    exact_distribution_W,
    expected_excess_closed,
    expected_excess_quadrature,
    expected_white_limit,
    expected_Z,
    extinction_limit,
    gamma_cdf,
    prob_gamma_less_exp_closed,
    prob_gamma_less_exp_quadrature,
    stats_ks,
    stats_ks_two_sample,
    stats_wilson_ci,
)
from .birth_death import (
    BirthTimes,
    DeathTimes,
    TerminalKind,
    TerminalSample,
    coupled_fixation,
    kortchemski_coupled_fixation,
    run_coupling,
    sample_limit_sum,
    sample_terminal_exp,
    sample_terminal_gamma_direct,
    sample_terminal_gamma_process,
    simulate_birth_times,
    simulate_death_times,
)
from .chain import (
    EventKind,
    FixationResult,
    PopulationState,
    Trajectory,
    initial_state,
    jump_probabilities,
    record_trajectory,
    run_to_fixation,
    step,
    total_rate,
)
from .graph import (
    Graph,
    GraphState,
    VertexColor,
    complete_graph,
    graph_step,
    load_edge_list,
    parse_edge_list,
    run_graph_to_fixation,
)
from .harness import (
    Engine,
    Estimator,
    EstimatorSummary,
    ExperimentConfig,
    run_experiment,
)
from .params import (
    InitMode,
    NoTransitionError,
    ParameterError,
    Params,
    QuadratureError,
    ResourceLimitError,
)
from .rng import make_rng, stream_seed
from .verify import run_verification

__all__ = [
    "BirthTimes",
    "DeathTimes",
    "Engine",
    "Estimator",
    "EstimatorSummary",
    "EventKind",
    "ExactDistribution",
    "ExperimentConfig",
    "FixationResult",
    "Graph",
    "GraphState",
    "InitMode",
    "LimitRegime",
    "NoTransitionError",
    "ParameterError",
    "Params",
    "PopulationState",
    "QuadratureError",
    "ResourceLimitError",
    "TerminalKind",
    "TerminalSample",
    "Trajectory",
    "VertexColor",
    "classify_regime",
    "complete_graph",
    "conversion_growth_limit",
    "coupled_fixation",
    "exact_distribution_W",
    "expected_Z",
    "expected_excess_closed",
    "expected_excess_quadrature",
    "expected_white_limit",
    "extinction_limit",
    "gamma_cdf",
    "graph_step",
    "initial_state",
    "jump_probabilities",
    "kortchemski_coupled_fixation",
    "load_edge_list",
    "make_rng",
    "parse_edge_list",
    "prob_gamma_less_exp_closed",
    "prob_gamma_less_exp_quadrature",
    "record_trajectory",
    "run_coupling",
    "run_experiment",
    "run_graph_to_fixation",
    "run_to_fixation",
    "run_verification",
    "sample_limit_sum",
    "sample_terminal_exp",
    "sample_terminal_gamma_direct",
    "sample_terminal_gamma_process",
    "simulate_birth_times",
    "simulate_death_times",
    "stats_ks",
    "stats_ks_two_sample",
    "stats_wilson_ci",
    "step",
    "stream_seed",
    "total_rate",
]
