from fractions import Fraction

import pytest

from sleeping_beauty.engine import Measure, credence
from sleeping_beauty.errors import DegenerateProposition, InvalidParam, InvalidWager, NoAwakenings
from sleeping_beauty.protocol import build_protocol, preset
from sleeping_beauty.wager import (
    WagerSpec,
    breakeven_probability,
    brier_minimizer,
    brier_score,
    evaluate_wager,
    score_report,
)

THIRD, HALF = Fraction(1, 3), Fraction(1, 2)
GRID = [Fraction(i, 1000) for i in range(1001)]
CERTAIN = build_protocol("certain", [("heads", 1), ("tails", 0)], {"SB": {"heads": ["Mon"], "tails": ["Mon", "Tue"]}})


def oracle_score(p, agent, prop, report, measure):
    """Quadratic loss summed event by event, written independently of the module."""
    terms = []
    for o in p.outcomes:
        n = len(p.schedule(agent).days(o.label)) if measure == Measure.PER_AWAKENING else 1
        terms += [(o.prob, (1 if o.label in prop else 0))] * n
    total = sum(w for w, _ in terms)
    return sum(w / total * (y - report) ** 2 for w, y in terms)


def test_thirder_odds_break_even_per_awakening():
    out = evaluate_wager(preset("original"), WagerSpec("SB", {"heads"}, 1, THIRD, "per_awakening"))
    assert out.expected_value_per_experiment == 0 and out.breakeven
    assert out.breakeven_probability == THIRD


def test_even_odds_lose_per_awakening():
    out = evaluate_wager(preset("original"), WagerSpec("SB", {"heads"}, 1, HALF, Measure.PER_AWAKENING))
    # (1/2)(1)(+1) + (1/2)(2)(-1)
    assert out.expected_value_per_experiment == Fraction(-1, 2)
    assert out.expected_value_per_settlement == Fraction(-1, 2) / Fraction(3, 2)
    assert not out.breakeven


def test_even_odds_fair_per_experiment():
    out = evaluate_wager(preset("original"), WagerSpec("SB", {"heads"}, 1, HALF, "per_experiment"))
    assert out.expected_value_per_experiment == 0 and out.breakeven


def test_breakeven_values():
    assert breakeven_probability(preset("original"), "SB", {"heads"}, "per_awakening") == THIRD
    assert breakeven_probability(preset("original"), "SB", {"heads"}, "per_experiment") == HALF
    assert breakeven_probability(preset("double"), "SB1", {"heads"}, "per_experiment") == HALF
    assert breakeven_probability(preset("chain", k=9), "SB", {"heads"}, "per_awakening") == Fraction(1, 10)


def test_breakeven_degenerate():
    with pytest.raises(DegenerateProposition):
        breakeven_probability(preset("original"), "SB", {"heads", "tails"}, "per_awakening")
    with pytest.raises(DegenerateProposition):
        breakeven_probability(CERTAIN, "SB", {"heads"}, "per_experiment")
    assert evaluate_wager(CERTAIN, WagerSpec("SB", {"heads"}, 1, HALF, "per_experiment")).breakeven_probability is None


def test_no_awakenings():
    p = build_protocol("asleep", [("a", HALF), ("b", HALF)], {"X": {"a": [], "b": []}})
    with pytest.raises(NoAwakenings):
        evaluate_wager(p, WagerSpec("X", {"a"}, 1, HALF, "per_awakening"))
    with pytest.raises(NoAwakenings):
        breakeven_probability(p, "X", {"a"}, "per_experiment")
    with pytest.raises(NoAwakenings):
        brier_score(p, "X", {"a"}, HALF, "per_awakening")
    assert brier_score(p, "X", {"a"}, HALF, "per_experiment") == Fraction(1, 4)


@pytest.mark.parametrize("stake,q", [(0, HALF), (-1, HALF), (1, 0), (1, 1), (1, Fraction(3, 2))])
def test_invalid_wager(stake, q):
    with pytest.raises(InvalidWager):
        WagerSpec("SB", {"heads"}, stake, q, "per_awakening")


@pytest.mark.parametrize("settlement", list(Measure))
def test_sign_coherence(settlement):
    for p, agent, prop in [(preset("original"), "SB", {"heads"}), (preset("double"), "SB2", {"tails"}),
                           (preset("chain", k=5, heads_prob=Fraction(3, 4)), "SB", {"tails"})]:
        q_star = breakeven_probability(p, agent, prop, settlement)
        for dq in (Fraction(1, 100), Fraction(1, 10**9)):
            lo = evaluate_wager(p, WagerSpec(agent, prop, 1, q_star - dq, settlement))
            hi = evaluate_wager(p, WagerSpec(agent, prop, 1, q_star + dq, settlement))
            assert lo.expected_value_per_experiment > 0 > hi.expected_value_per_experiment


def test_ev_linear_in_stake():
    p = preset("chain", k=3)
    base = evaluate_wager(p, WagerSpec("SB", {"heads"}, 1, Fraction(2, 7), "per_awakening"))
    for stake in (Fraction(1, 3), 5, Fraction(22, 7)):
        out = evaluate_wager(p, WagerSpec("SB", {"heads"}, stake, Fraction(2, 7), "per_awakening"))
        assert out.expected_value_per_experiment == stake * base.expected_value_per_experiment


def test_brier_values():
    assert brier_score(CERTAIN, "SB", {"heads"}, 1, "per_experiment") == 0
    assert brier_score(CERTAIN, "SB", {"heads"}, 1, "per_awakening") == 0
    flat = build_protocol("flat", [("heads", HALF), ("tails", HALF)], {"SB": {"heads": ["Mon"], "tails": ["Mon"]}})
    for m in Measure:
        assert brier_score(flat, "SB", {"heads"}, HALF, m) == Fraction(1, 4)
    # (1/3)(2/3)^2 + (2/3)(1/3)^2
    assert brier_score(preset("original"), "SB", {"heads"}, THIRD, "per_awakening") == Fraction(2, 9)


def test_brier_rejects_out_of_range_report():
    with pytest.raises(InvalidParam):
        brier_score(preset("original"), "SB", {"heads"}, Fraction(3, 2), "per_awakening")


@pytest.mark.parametrize(
    "p,agent,prop,measure,expected",
    [
        (preset("original"), "SB", {"heads"}, Measure.PER_AWAKENING, THIRD),
        (preset("original"), "SB", {"heads"}, Measure.PER_EXPERIMENT, HALF),
        (CERTAIN, "SB", {"heads"}, Measure.PER_AWAKENING, 1),
        (CERTAIN, "SB", {"heads"}, Measure.PER_EXPERIMENT, 1),
    ],
)
def test_minimizer_against_grid(p, agent, prop, measure, expected):
    best = brier_minimizer(p, agent, prop, measure)
    assert best == expected
    grid_best = min(GRID, key=lambda r: oracle_score(p, agent, prop, r, measure))
    assert abs(grid_best - expected) <= Fraction(1, 2000)
    floor = oracle_score(p, agent, prop, best, measure)
    assert all(oracle_score(p, agent, prop, r, measure) >= floor for r in GRID)


def test_score_matches_oracle():
    p = preset("double", heads_prob=Fraction(2, 5))
    for m in Measure:
        for r in (0, Fraction(1, 7), HALF, 1):
            assert brier_score(p, "SB2", {"tails"}, r, m) == oracle_score(p, "SB2", {"tails"}, r, m)


def test_score_report():
    s = score_report(preset("original"), "SB", {"heads"}, HALF, "per_awakening")
    assert s.minimizer == credence(preset("original"), "SB", {"heads"}, "per_awakening").value
    assert s.minimum == Fraction(2, 9)
    assert s.score == Fraction(1, 3) * Fraction(1, 4) + Fraction(2, 3) * Fraction(1, 4)
