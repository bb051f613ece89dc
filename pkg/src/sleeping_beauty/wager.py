"""Credences as bets and quadratic scores.

A wager on proposition ``A`` at implied probability ``q`` pays
``stake * (1 - q) / q`` when ``A`` is true and costs ``stake`` otherwise.
Settling it once per experiment prices it with the per-experiment measure;
settling it at every interview prices it with the per-awakening measure.
Each settlement scheme therefore breaks even exactly at the matching
credence, and the Brier-optimal constant report is that same credence.

Bets name outcomes only, never days: an agent cannot tell interviews
apart, so day-indexed bets are not representable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .engine import Measure, _proposition, _validated, outcome_weights
from .errors import DegenerateProposition, InvalidParam, InvalidWager, NoAwakenings

Settlement = Measure


@dataclass(frozen=True)
class WagerSpec:
    agent: str
    proposition: frozenset[str]
    stake: Fraction
    implied_probability: Fraction
    settlement: Settlement

    def __post_init__(self):
        object.__setattr__(self, "stake", Fraction(self.stake))
        object.__setattr__(self, "implied_probability", Fraction(self.implied_probability))
        object.__setattr__(self, "settlement", Settlement(self.settlement))
        object.__setattr__(self, "proposition", frozenset(
            [self.proposition] if isinstance(self.proposition, str) else self.proposition
        ))
        if self.stake <= 0:
            raise InvalidWager(f"stake must be positive, got {self.stake}")
        if not 0 < self.implied_probability < 1:
            raise InvalidWager(f"implied probability must lie in (0, 1), got {self.implied_probability}")

    def payoff(self, wins: bool) -> Fraction:
        q = self.implied_probability
        return self.stake * (1 - q) / q if wins else -self.stake


@dataclass(frozen=True)
class WagerOutcome:
    protocol: str
    wager: WagerSpec
    expected_value_per_experiment: Fraction
    expected_value_per_settlement: Fraction
    breakeven: bool
    breakeven_probability: Fraction | None = None


@dataclass(frozen=True)
class ScoreReport:
    protocol: str
    agent: str
    proposition: frozenset[str]
    measure: Measure
    report: Fraction
    score: Fraction
    minimizer: Fraction
    minimum: Fraction


def _interviewed(p, agent: str) -> dict[str, Fraction]:
    weights = outcome_weights(p, agent, Measure.PER_AWAKENING)
    if not any(weights.values()):
        raise NoAwakenings(f"agent {agent!r} is never interviewed in {p.name!r}")
    return weights


def _settlement_weights(p, agent: str, settlement: Settlement) -> dict[str, Fraction]:
    """Expected settlements per experiment for each outcome."""
    awake = _interviewed(p, agent)
    if Settlement(settlement) is Settlement.PER_AWAKENING:
        return awake
    return outcome_weights(p, agent, Measure.PER_EXPERIMENT)


def evaluate_wager(p, w: WagerSpec) -> WagerOutcome:
    p = _validated(p)
    prop = _proposition(p, w.proposition)
    weights = _settlement_weights(p, w.agent, w.settlement)
    ev = sum((wt * w.payoff(o in prop) for o, wt in weights.items()), Fraction(0))
    settlements = sum(weights.values(), Fraction(0))
    try:
        q_star = breakeven_probability(p, w.agent, prop, w.settlement)
    except DegenerateProposition:
        q_star = None
    return WagerOutcome(p.name, w, ev, ev / settlements, ev == 0, q_star)


def breakeven_probability(p, agent: str, proposition, settlement: Settlement) -> Fraction:
    """The implied probability at which the wager's expected value is zero.

    Solving ``W_in * (1-q)/q = W_out`` for the settlement weights gives
    ``q = W_in / (W_in + W_out)``, independent of the stake.
    """
    p = _validated(p)
    prop = _proposition(p, proposition)
    weights = _settlement_weights(p, agent, settlement)
    w_in = sum((wt for o, wt in weights.items() if o in prop), Fraction(0))
    w_out = sum((wt for o, wt in weights.items() if o not in prop), Fraction(0))
    if w_in == 0 or w_out == 0:
        raise DegenerateProposition(
            f"proposition {sorted(prop)} has credence {0 if w_in == 0 else 1} for {agent!r}; "
            "no odds in (0, 1) break even"
        )
    return w_in / (w_in + w_out)


def _scoring_weights(p, agent: str, measure: Measure) -> dict[str, Fraction]:
    measure = Measure(measure)
    if measure is Measure.PER_AWAKENING:
        weights = _interviewed(p, agent)
    else:
        weights = outcome_weights(p, agent, measure)
    total = sum(weights.values(), Fraction(0))
    return {o: wt / total for o, wt in weights.items()}


def brier_score(p, agent: str, proposition, report, measure: Measure) -> Fraction:
    """Expected squared error of a constant ``report`` under ``measure``."""
    p = _validated(p)
    prop = _proposition(p, proposition)
    r = Fraction(report)
    if not 0 <= r <= 1:
        raise InvalidParam(f"report must lie in [0, 1], got {r}")
    weights = _scoring_weights(p, agent, measure)
    return sum((wt * ((1 if o in prop else 0) - r) ** 2 for o, wt in weights.items()), Fraction(0))


def brier_minimizer(p, agent: str, proposition, measure: Measure) -> Fraction:
    # d/dr sum w (y - r)^2 = 0  =>  r = sum w y / sum w
    p = _validated(p)
    prop = _proposition(p, proposition)
    weights = _scoring_weights(p, agent, measure)
    return sum((wt for o, wt in weights.items() if o in prop), Fraction(0))


def score_report(p, agent: str, proposition, report, measure: Measure) -> ScoreReport:
    p = _validated(p)
    prop = _proposition(p, proposition)
    best = brier_minimizer(p, agent, prop, measure)
    return ScoreReport(
        p.name, agent, prop, Measure(measure), Fraction(report),
        brier_score(p, agent, prop, report, measure), best,
        brier_score(p, agent, prop, best, measure),
    )


__all__ = [
    "ScoreReport",
    "Settlement",
    "WagerOutcome",
    "WagerSpec",
    "breakeven_probability",
    "brier_minimizer",
    "brier_score",
    "evaluate_wager",
    "score_report",
]
