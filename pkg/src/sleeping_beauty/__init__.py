"""Exact, simulated and betting-based credences for Sleeping Beauty protocols."""

from .engine import (
    AwakeningEvent,
    CredenceReport,
    Measure,
    SumCheck,
    Verdict,
    credence,
    credence_sum_check,
    enumerate_awakenings,
    per_awakening_credence,
    per_experiment_credence,
)
from .io_formats import emit_report, parse_protocol, serialize_protocol
from .montecarlo import CredenceEstimate, SimulationResult, estimate_credence, run_trials
from .protocol import (
    AwakeningSchedule,
    ExperimentProtocol,
    OutcomeSpec,
    Question,
    ValidatedProtocol,
    preset,
    validate_protocol,
)
from .wager import (
    WagerOutcome,
    WagerSpec,
    breakeven_probability,
    brier_minimizer,
    brier_score,
    evaluate_wager,
)

__version__ = "0.1.0"
