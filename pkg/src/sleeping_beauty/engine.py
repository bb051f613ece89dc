"""Exact credences over the weighted awakening-event space.

Two probability measures are supported for a single agent:

``per_experiment``
    each outcome keeps its protocol probability; schedules are irrelevant
    (the halfer answer, 1/2 for heads in the original problem).
``per_awakening``
    each outcome is weighted by its probability times the number of
    interviews the agent has under it, then renormalized (the thirder
    answer, 1/3 for heads in the original problem).

Everything is computed in :class:`fractions.Fraction`; floats only appear
in the rendered ``decimal`` string.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import EmptyProposition, NoAwakenings, UnknownOutcomeInProposition
from .protocol import ExperimentProtocol, ValidatedProtocol, as_proposition, validate_protocol

DEFAULT_DIGITS = 6


class Measure(str, enum.Enum):
    PER_EXPERIMENT = "per_experiment"
    PER_AWAKENING = "per_awakening"

    def __str__(self) -> str:
        return self.value


class Verdict(str, enum.Enum):
    SUMS_TO_ONE = "sums_to_one"
    DEVIATES = "deviates"

    def __str__(self) -> str:
        return self.value


def render_decimal(value: Fraction, digits: int = DEFAULT_DIGITS) -> str:
    """Fixed-point rendering of an exact rational, rounding half to even."""
    value = Fraction(value)
    scaled = round(value * 10**digits)  # Fraction.__round__ is half-even
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10**digits)
    if digits == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{frac:0{digits}d}"


def format_proposition(prop: Iterable[str]) -> str:
    return ",".join(sorted(prop))


@dataclass(frozen=True)
class AwakeningEvent:
    outcome: str
    agent: str
    day: str
    weight: Fraction


@dataclass(frozen=True)
class CredenceReport:
    protocol: str
    agent: str
    proposition: frozenset[str]
    measure: Measure
    value: Fraction
    decimal: str = field(default="")

    def __post_init__(self):
        if not self.decimal:
            object.__setattr__(self, "decimal", render_decimal(self.value))


@dataclass(frozen=True)
class SumCheck:
    protocol: str
    measure: Measure
    questions: tuple[tuple[str, frozenset[str]], ...]
    sum: Fraction
    verdict: Verdict


def _validated(p: ExperimentProtocol | ValidatedProtocol) -> ValidatedProtocol:
    return validate_protocol(p, warn=False)


def _proposition(p: ValidatedProtocol, proposition) -> frozenset[str]:
    prop = as_proposition(proposition)
    if not prop:
        raise EmptyProposition("proposition must name at least one outcome")
    unknown = prop - set(p.labels)
    if unknown:
        raise UnknownOutcomeInProposition(
            f"proposition names unknown outcome(s) {format_proposition(unknown)} "
            f"in protocol {p.name!r}"
        )
    return prop


def enumerate_awakenings(p: ExperimentProtocol | ValidatedProtocol, agent: str) -> list[AwakeningEvent]:
    """Every interview of ``agent``, in outcome order then schedule order."""
    p = _validated(p)
    sched = p.schedule(agent)
    return [
        AwakeningEvent(o.label, agent, day, o.prob)
        for o in p.outcomes
        for day in sched.days(o.label)
    ]


def outcome_weights(p, agent: str, measure: Measure) -> dict[str, Fraction]:
    """Unnormalized weight of each outcome under ``measure`` for ``agent``."""
    p = _validated(p)
    measure = Measure(measure)
    if measure is Measure.PER_EXPERIMENT:
        p.schedule(agent)  # unknown agents fail the same way under both measures
        return {o.label: o.prob for o in p.outcomes}
    sched = p.schedule(agent)
    return {o.label: o.prob * len(sched.days(o.label)) for o in p.outcomes}


def per_experiment_credence(p, agent: str, proposition, digits: int = DEFAULT_DIGITS) -> CredenceReport:
    p = _validated(p)
    prop = _proposition(p, proposition)
    p.schedule(agent)
    value = sum((o.prob for o in p.outcomes if o.label in prop), Fraction(0))
    return CredenceReport(p.name, agent, prop, Measure.PER_EXPERIMENT, value, render_decimal(value, digits))


def per_awakening_credence(p, agent: str, proposition, digits: int = DEFAULT_DIGITS) -> CredenceReport:
    p = _validated(p)
    prop = _proposition(p, proposition)
    weights = outcome_weights(p, agent, Measure.PER_AWAKENING)
    total = sum(weights.values(), Fraction(0))
    if total == 0:
        raise NoAwakenings(
            f"agent {agent!r} is never interviewed under a positive-probability outcome "
            f"of {p.name!r}; the per-awakening measure is undefined"
        )
    value = sum((w for o, w in weights.items() if o in prop), Fraction(0)) / total
    return CredenceReport(p.name, agent, prop, Measure.PER_AWAKENING, value, render_decimal(value, digits))


def credence(p, agent: str, proposition, measure: Measure, digits: int = DEFAULT_DIGITS) -> CredenceReport:
    if Measure(measure) is Measure.PER_AWAKENING:
        return per_awakening_credence(p, agent, proposition, digits)
    return per_experiment_credence(p, agent, proposition, digits)


def credence_sum_check(p, questions: Sequence[tuple[str, Iterable[str]]], measure: Measure) -> SumCheck:
    """Add up credences across (agent, proposition) pairs under one measure.

    The verdict only says whether the total is exactly 1; it makes no claim
    about which measure is right.
    """
    if not questions:
        raise ValueError("credence_sum_check needs at least one question")
    p = _validated(p)
    measure = Measure(measure)
    reports = [credence(p, agent, prop, measure) for agent, prop in questions]
    total = sum((r.value for r in reports), Fraction(0))
    verdict = Verdict.SUMS_TO_ONE if total == 1 else Verdict.DEVIATES
    return SumCheck(
        p.name, measure, tuple((r.agent, r.proposition) for r in reports), total, verdict
    )


__all__ = [
    "AwakeningEvent",
    "CredenceReport",
    "Measure",
    "SumCheck",
    "Verdict",
    "credence",
    "credence_sum_check",
    "enumerate_awakenings",
    "format_proposition",
    "outcome_weights",
    "per_awakening_credence",
    "per_experiment_credence",
    "render_decimal",
]
