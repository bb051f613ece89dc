import warnings
from collections import Counter
from fractions import Fraction

import pytest

from sleeping_beauty.errors import (
    DanglingReference,
    DuplicateLabel,
    EmptyProtocol,
    InvalidParam,
    ProbabilitySumError,
    UnknownPreset,
)
from sleeping_beauty.protocol import (
    ExperimentProtocol,
    Question,
    ValidatedProtocol,
    ZeroProbabilityWarning,
    build_protocol,
    preset,
    validate_protocol,
)


def counts(p, agent):
    return Counter(len(p.schedule(agent).days(o)) for o in p.labels)


def test_original_is_valid():
    v = validate_protocol(preset("original"))
    assert isinstance(v, ValidatedProtocol)
    assert v.warnings == ()
    assert v.schedule("SB").days("heads") == ("Mon",)
    assert v.schedule("SB").days("tails") == ("Mon", "Tue")
    assert v.questions == (Question("SB", frozenset({"heads"})),)


def test_validating_twice_is_identity():
    v = validate_protocol(preset("double"))
    assert validate_protocol(v) is v


def test_probabilities_must_sum_to_one():
    p = build_protocol("bad", [("a", Fraction(1, 2)), ("b", Fraction(1, 3))], {"X": {"a": ["d"], "b": ["d"]}})
    with pytest.raises(ProbabilitySumError, match="5/6"):
        validate_protocol(p)


def test_question_for_unknown_agent_is_dangling():
    p = preset("double")
    bad = ExperimentProtocol(p.name, p.outcomes, p.agents, p.schedules, p.questions + (Question("SB3", {"heads"}),))
    with pytest.raises(DanglingReference, match="SB3"):
        validate_protocol(bad)


def test_schedule_must_cover_every_outcome():
    p = build_protocol("gap", [("a", 1)], {"X": {}})
    with pytest.raises(DanglingReference, match="lacks outcome 'a'"):
        validate_protocol(p)


def test_empty_protocol():
    with pytest.raises(EmptyProtocol):
        validate_protocol(ExperimentProtocol("empty", (), (), ()))


def test_duplicate_outcome_label():
    p = build_protocol("dup", [("a", Fraction(1, 2)), ("a", Fraction(1, 2))], {"X": {"a": ["d"]}})
    with pytest.raises(DuplicateLabel):
        validate_protocol(p)


def test_duplicate_day_in_schedule():
    p = build_protocol("dup", [("a", 1)], {"X": {"a": ["Mon", "Mon"]}})
    with pytest.raises(DuplicateLabel):
        validate_protocol(p)


def test_validation_reports_every_violation():
    p = build_protocol(
        "many",
        [("a", Fraction(1, 2)), ("b", Fraction(1, 3))],
        {"X": {"a": [], "zzz": []}},
        [("nobody", {"a"})],
    )
    with pytest.raises(ProbabilitySumError) as info:
        validate_protocol(p)
    msgs = " | ".join(info.value.violations)
    assert len(info.value.violations) >= 4
    for needle in ("sum to 5/6", "'zzz'", "lacks outcome 'b'", "'nobody'"):
        assert needle in msgs


def test_zero_probability_outcome_warns_but_validates():
    p = build_protocol("edge", [("a", 1), ("b", 0)], {"X": {"a": ["d"], "b": ["d"]}})
    with pytest.warns(ZeroProbabilityWarning):
        v = validate_protocol(p)
    assert v.warnings == ("outcome 'b' has probability 0",)


def test_agent_asleep_everywhere_is_valid():
    p = build_protocol("asleep", [("a", 1)], {"X": {"a": []}})
    validate_protocol(p)


def test_chain_two_matches_original_up_to_renaming():
    chain, orig = preset("chain", k=2), preset("original")
    assert chain.labels == orig.labels
    assert counts(chain, "SB") == counts(orig, "SB") == Counter({1: 1, 2: 1})
    for o in orig.labels:
        assert len(chain.schedule("SB").days(o)) == len(orig.schedule("SB").days(o))
    assert chain.questions == orig.questions


def test_double_is_mirror_image():
    p = preset("double")
    swap = {"heads": "tails", "tails": "heads"}
    sb1, sb2 = p.schedule("SB1"), p.schedule("SB2")
    for o in p.labels:
        assert sb1.days(o) == sb2.days(swap[o])
        assert sorted([len(sb1.days(o)), len(sb2.days(o))]) == [1, 2]
    assert [(q.agent, set(q.proposition)) for q in p.questions] == [("SB1", {"heads"}), ("SB2", {"tails"})]


@pytest.mark.parametrize("k", [1, 3, 10])
def test_chain_schedule(k):
    p = validate_protocol(preset("chain", k=k))
    assert p.schedule("SB").days("heads") == ("day1",)
    assert p.schedule("SB").days("tails") == tuple(f"day{i}" for i in range(1, k + 1))


@pytest.mark.parametrize("k", [0, -1, None, 2.0, True])
def test_chain_rejects_bad_k(k):
    with pytest.raises(InvalidParam):
        preset("chain", k=k)


@pytest.mark.parametrize("h", [Fraction(-1, 2), Fraction(3, 2), "x"])
def test_bad_heads_probability(h):
    with pytest.raises(InvalidParam):
        preset("original", heads_prob=h)


def test_heads_probability_is_reduced():
    p = preset("original", heads_prob=Fraction(2, 4))
    assert p.prob("heads") == Fraction(1, 2)
    assert preset("double", heads_prob=Fraction(1, 5)).prob("tails") == Fraction(4, 5)


def test_unknown_preset():
    with pytest.raises(UnknownPreset):
        preset("triple")


def test_protocols_are_immutable():
    p = preset("original")
    with pytest.raises(AttributeError):
        p.name = "other"
