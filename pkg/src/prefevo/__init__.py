"""Evolution of other-regarding preferences under complexity costs.

A small research library around a two-player externality game: closed-form
equilibrium quantities, numerical Nash/NSS/ESS verification over behavioral
and rational strategy spaces, an adaptive multi-game learning dynamic with
complexity penalties, and the sweep harness that reproduces the four
numerical experiments. The simulation inner loop has a compiled kernel with
a pure-Python twin; see prefevo.backend.
"""

from .game import (
    ActionPair,
    GameParams,
    SingularEquilibrium,
    best_response,
    efficient_action,
    ess_alpha,
    nash_equilibrium,
    payoff,
    stackelberg_action,
    subjective_utility,
)
from .strategies import (
    Environment,
    Strategy,
    StrategyKind,
    base_fitness,
    resolve_action,
)
from .penalties import (
    PenaltyConfig,
    complexity_cost,
    distinct_action_count,
    penalized_fitness,
)
from .stability import (
    CandidateResult,
    DeviationSearchConfig,
    SearchBudgetExceeded,
    StabilityReport,
    StabilityVerdict,
    StrategySpace,
    classify,
    verify_handshake_exclusion,
    verify_penalized_stability,
    verify_unpenalized_stability,
)
from .learning import (
    AgentParams,
    NoAscentProgress,
    Population,
    RoundSummary,
    SimConfig,
    Trajectory,
    best_response_behavioral,
    best_response_rational,
    init_population,
    mutation_prob,
    run,
    step,
)
from .experiments import (
    CSV_HEADER,
    CheckOutcome,
    DegenerateRangeWarning,
    SweepRecord,
    SweepSpec,
    check_fig1,
    check_fig2,
    check_fig3,
    check_fig4,
    derive_seed,
    export_records,
    normalize_welfare,
    read_records,
    records_to_csv_text,
    run_custom,
    run_fig1,
    run_fig2,
    run_fig3,
    run_fig4,
    TuneResult,
    tune_eps_p,
)
from . import backend

__version__ = "0.1.0"

__all__ = [
    "ActionPair",
    "AgentParams",
    "CandidateResult",
    "CheckOutcome",
    "CSV_HEADER",
    "DegenerateRangeWarning",
    "DeviationSearchConfig",
    "Environment",
    "GameParams",
    "NoAscentProgress",
    "PenaltyConfig",
    "Population",
    "RoundSummary",
    "SearchBudgetExceeded",
    "SimConfig",
    "SingularEquilibrium",
    "StabilityReport",
    "StabilityVerdict",
    "Strategy",
    "StrategyKind",
    "StrategySpace",
    "SweepRecord",
    "SweepSpec",
    "Trajectory",
    "TuneResult",
    "backend",
    "base_fitness",
    "best_response",
    "best_response_behavioral",
    "best_response_rational",
    "check_fig1",
    "check_fig2",
    "check_fig3",
    "check_fig4",
    "classify",
    "complexity_cost",
    "derive_seed",
    "distinct_action_count",
    "efficient_action",
    "ess_alpha",
    "export_records",
    "init_population",
    "mutation_prob",
    "nash_equilibrium",
    "normalize_welfare",
    "payoff",
    "penalized_fitness",
    "read_records",
    "records_to_csv_text",
    "resolve_action",
    "run",
    "run_custom",
    "run_fig1",
    "run_fig2",
    "run_fig3",
    "run_fig4",
    "stackelberg_action",
    "step",
    "subjective_utility",
    "tune_eps_p",
    "verify_handshake_exclusion",
    "verify_penalized_stability",
    "verify_unpenalized_stability",
]
