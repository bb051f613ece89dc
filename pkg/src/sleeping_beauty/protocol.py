"""Experiment protocols: outcomes, agents, awakening schedules and questions.

Only interviews are modeled. An awakening without an interview carries no
credence event and is therefore not represented at all. Amnesia is a
constraint on the consumer side: a credence policy is one constant per
(agent, question), never a function of the day.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import (
    DanglingReference,
    DuplicateLabel,
    EmptyProtocol,
    InvalidParam,
    InvalidProbability,
    ProbabilitySumError,
    ProtocolError,
    UnknownAgent,
    UnknownPreset,
)

PRESETS = {
    "original": "one agent; heads -> [Mon], tails -> [Mon, Tue]",
    "double": "agents SB1, SB2 with mirrored schedules; SB1 asked heads, SB2 asked tails",
    "chain": "one agent; heads -> [day1], tails -> [day1 .. dayK] (requires --k >= 1)",
}


class ZeroProbabilityWarning(UserWarning):
    pass


@dataclass(frozen=True)
class OutcomeSpec:
    label: str
    prob: Fraction

    def __post_init__(self):
        # Fraction is always reduced with a positive denominator.
        object.__setattr__(self, "prob", Fraction(self.prob))


@dataclass(frozen=True)
class AwakeningSchedule:
    agent: str
    per_outcome: Mapping[str, tuple[str, ...]]

    def __post_init__(self):
        object.__setattr__(
            self, "per_outcome", {o: tuple(days) for o, days in self.per_outcome.items()}
        )

    def days(self, outcome: str) -> tuple[str, ...]:
        return self.per_outcome.get(outcome, ())


@dataclass(frozen=True)
class Question:
    agent: str
    proposition: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "proposition", as_proposition(self.proposition))


@dataclass(frozen=True)
class ExperimentProtocol:
    name: str
    outcomes: tuple[OutcomeSpec, ...]
    agents: tuple[str, ...]
    schedules: tuple[AwakeningSchedule, ...]
    questions: tuple[Question, ...] = ()

    def __post_init__(self):
        for name in ("outcomes", "agents", "schedules", "questions"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(o.label for o in self.outcomes)

    def prob(self, label: str) -> Fraction:
        for o in self.outcomes:
            if o.label == label:
                return o.prob
        raise KeyError(label)

    def schedule(self, agent: str) -> AwakeningSchedule:
        for s in self.schedules:
            if s.agent == agent:
                return s
        raise UnknownAgent(f"unknown agent {agent!r} in protocol {self.name!r}")

    def awakening_count(self, outcome: str, agent: str) -> int:
        return len(self.schedule(agent).days(outcome))


@dataclass(frozen=True)
class ValidatedProtocol:
    """A protocol that passed :func:`validate_protocol`.

    Attribute access falls through to the wrapped protocol, so engine code
    can treat both types alike.
    """

    protocol: ExperimentProtocol
    warnings: tuple[str, ...] = field(default=())

    def __getattr__(self, item):
        if item == "protocol":
            raise AttributeError(item)
        return getattr(self.protocol, item)


def as_proposition(labels: str | Iterable[str]) -> frozenset[str]:
    if isinstance(labels, str):
        return frozenset([labels])
    return frozenset(labels)


def _check(p: ExperimentProtocol) -> tuple[list[tuple[type, str]], list[str]]:
    errors: list[tuple[type, str]] = []
    notes: list[str] = []

    if not p.outcomes:
        errors.append((EmptyProtocol, "protocol has no outcomes"))
    if not p.agents:
        errors.append((EmptyProtocol, "protocol has no agents"))

    labels = [o.label for o in p.outcomes]
    for dup in sorted({x for x in labels if labels.count(x) > 1}):
        errors.append((DuplicateLabel, f"outcome label {dup!r} appears more than once"))
    for dup in sorted({a for a in p.agents if p.agents.count(a) > 1}):
        errors.append((DuplicateLabel, f"agent {dup!r} appears more than once"))

    for o in p.outcomes:
        if not isinstance(o.label, str) or not o.label:
            errors.append((InvalidProbability, f"outcome label {o.label!r} must be a non-empty string"))
        if o.prob < 0 or o.prob > 1:
            errors.append((InvalidProbability, f"outcome {o.label!r} has probability {o.prob} outside [0, 1]"))
        elif o.prob == 0:
            notes.append(f"outcome {o.label!r} has probability 0")
    total = sum((o.prob for o in p.outcomes), Fraction(0))
    if p.outcomes and total != 1:
        errors.append((ProbabilitySumError, f"outcome probabilities sum to {total}, not 1"))

    known_outcomes = set(labels)
    known_agents = set(p.agents)
    seen: list[str] = []
    for s in p.schedules:
        if s.agent not in known_agents:
            errors.append((DanglingReference, f"schedule for unknown agent {s.agent!r}"))
        seen.append(s.agent)
        for o, days in s.per_outcome.items():
            if o not in known_outcomes:
                errors.append((DanglingReference, f"schedule of {s.agent!r} names unknown outcome {o!r}"))
            if len(set(days)) != len(days):
                errors.append((DuplicateLabel, f"schedule of {s.agent!r} repeats a day under {o!r}"))
        for o in labels:
            if o not in s.per_outcome:
                errors.append((DanglingReference, f"schedule of {s.agent!r} lacks outcome {o!r}"))
    for a in p.agents:
        n = seen.count(a)
        if n == 0:
            errors.append((DanglingReference, f"agent {a!r} has no schedule"))
        elif n > 1:
            errors.append((DuplicateLabel, f"agent {a!r} has {n} schedules"))

    for i, q in enumerate(p.questions):
        if q.agent not in known_agents:
            errors.append((DanglingReference, f"question {i} references unknown agent {q.agent!r}"))
        if not q.proposition:
            errors.append((DanglingReference, f"question {i} has an empty proposition"))
        for o in sorted(q.proposition - known_outcomes):
            errors.append((DanglingReference, f"question {i} references unknown outcome {o!r}"))
    return errors, notes


def validate_protocol(
    p: ExperimentProtocol | ValidatedProtocol, *, warn: bool = True
) -> ValidatedProtocol:
    """Check every invariant of ``p`` and wrap it.

    All violations are collected; the raised exception carries them in
    ``violations`` and has the class of the first one. Zero-probability
    outcomes only produce a :class:`ZeroProbabilityWarning`.
    """
    if isinstance(p, ValidatedProtocol):
        return p
    errors, notes = _check(p)
    if errors:
        cls, first = errors[0]
        msgs = [m for _, m in errors]
        detail = first if len(msgs) == 1 else f"{first} (and {len(msgs) - 1} more: {'; '.join(msgs[1:])})"
        raise cls(f"invalid protocol {p.name!r}: {detail}", msgs)
    for n in notes if warn else ():
        warnings.warn(n, ZeroProbabilityWarning, stacklevel=2)
    return ValidatedProtocol(p, tuple(notes))


def _coin(heads_prob) -> tuple[OutcomeSpec, OutcomeSpec]:
    try:
        h = Fraction(heads_prob)
    except (TypeError, ValueError) as exc:
        raise InvalidParam(f"heads probability {heads_prob!r} is not a rational") from exc
    if not 0 <= h <= 1:
        raise InvalidParam(f"heads probability {h} outside [0, 1]")
    return OutcomeSpec("heads", h), OutcomeSpec("tails", 1 - h)


def preset(name: str, k: int | None = None, heads_prob=Fraction(1, 2)) -> ExperimentProtocol:
    """Build one of the named protocols: ``original``, ``double`` or ``chain``.

    ``chain`` needs ``k >= 1``: heads wakes the agent on ``day1`` only, tails
    on ``day1`` through ``dayk``. ``chain`` with ``k=2`` is ``original`` with
    the days renamed.
    """
    if name not in PRESETS:
        raise UnknownPreset(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    outcomes = _coin(heads_prob)

    if name == "original":
        return ExperimentProtocol(
            name="original",
            outcomes=outcomes,
            agents=("SB",),
            schedules=(AwakeningSchedule("SB", {"heads": ("Mon",), "tails": ("Mon", "Tue")}),),
            questions=(Question("SB", frozenset({"heads"})),),
        )
    if name == "double":
        return ExperimentProtocol(
            name="double",
            outcomes=outcomes,
            agents=("SB1", "SB2"),
            schedules=(
                AwakeningSchedule("SB1", {"heads": ("Mon",), "tails": ("Mon", "Tue")}),
                AwakeningSchedule("SB2", {"heads": ("Mon", "Tue"), "tails": ("Mon",)}),
            ),
            questions=(
                Question("SB1", frozenset({"heads"})),
                Question("SB2", frozenset({"tails"})),
            ),
        )

    if k is None or isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise InvalidParam(f"chain preset needs an integer k >= 1, got {k!r}")
    return ExperimentProtocol(
        name=f"chain-{k}",
        outcomes=outcomes,
        agents=("SB",),
        schedules=(
            AwakeningSchedule(
                "SB", {"heads": ("day1",), "tails": tuple(f"day{i}" for i in range(1, k + 1))}
            ),
        ),
        questions=(Question("SB", frozenset({"heads"})),),
    )


def build_protocol(
    name: str,
    outcomes: Sequence[tuple[str, Fraction]],
    schedules: Mapping[str, Mapping[str, Sequence[str]]],
    questions: Sequence[tuple[str, Iterable[str]]] = (),
) -> ExperimentProtocol:
    """Convenience constructor from plain Python containers (unvalidated)."""
    return ExperimentProtocol(
        name=name,
        outcomes=tuple(OutcomeSpec(label, Fraction(prob)) for label, prob in outcomes),
        agents=tuple(schedules),
        schedules=tuple(AwakeningSchedule(a, dict(per)) for a, per in schedules.items()),
        questions=tuple(Question(a, as_proposition(prop)) for a, prop in questions),
    )


__all__ = [
    "PRESETS",
    "AwakeningSchedule",
    "ExperimentProtocol",
    "OutcomeSpec",
    "ProtocolError",
    "Question",
    "ValidatedProtocol",
    "ZeroProbabilityWarning",
    "as_proposition",
    "build_protocol",
    "preset",
    "validate_protocol",
]
