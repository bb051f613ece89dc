"""Seeded frequency simulation of a protocol.

Random stream
-------------
Trial ``i`` of a run with seed ``s`` draws a single 64-bit word::

    key   = splitmix64_mix(s)
    state = key + (i + 1) * 0x9E3779B97F4A7C15   (mod 2**64)
    u     = splitmix64_mix(state)

i.e. element ``i`` of the SplitMix64 sequence started from the mixed seed.
The word depends only on ``(s, i)``, so any partition of the trial range
across workers produces the same tallies. This generator is fixed for the
1.x series of the package.

The outcome is the index ``j`` with ``T[j] <= u < T[j+1]``, where ``T`` are
the cumulative outcome probabilities converted once to 64-bit fixed point
(floor, error below 2**-64 per outcome). Awakenings are deterministic given
the outcome, so only outcomes are tallied; awakening counts follow from the
schedules.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .engine import Measure, _proposition, _validated
from .errors import InvalidParam, NoEvents, ProtocolMismatch

GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_MASK = (1 << 64) - 1
BLOCK = 1 << 18
Z95 = 1.96


def splitmix64_mix(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * _M1) & _MASK
    z = ((z ^ (z >> 27)) * _M2) & _MASK
    return z ^ (z >> 31)


def trial_word(seed: int, i: int) -> int:
    """The 64-bit word drawn by trial ``i`` (scalar reference version)."""
    return splitmix64_mix(splitmix64_mix(seed) + (i + 1) * GAMMA)


def trial_words(seed: int, start: int, stop: int) -> np.ndarray:
    """Vectorized :func:`trial_word` for trials ``start <= i < stop``."""
    key = np.uint64(splitmix64_mix(seed))
    idx = np.arange(start + 1, stop + 1, dtype=np.uint64)
    z = key + idx * np.uint64(GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def outcome_thresholds(probs: Iterable[Fraction]) -> list[int]:
    """Fixed-point cumulative thresholds ``T[1..m-1]`` as Python ints.

    A threshold equal to ``2**64`` can never be reached by a 64-bit word and
    is kept as is; callers skip it.
    """
    probs = list(probs)
    out = []
    cum = Fraction(0)
    for prob in probs[:-1]:
        cum += prob
        out.append(math.floor(cum * (1 << 64)))
    return out


def outcome_index(word: int, thresholds: list[int]) -> int:
    return sum(1 for t in thresholds if word >= t)


def _count_range(seed: int, thresholds: list[int], m: int, start: int, stop: int) -> list[int]:
    reachable = [np.uint64(t) for t in thresholds if t <= _MASK]
    counts = np.zeros(m, dtype=np.int64)
    for lo in range(start, stop, BLOCK):
        words = trial_words(seed, lo, min(lo + BLOCK, stop))
        idx = np.zeros(words.shape, dtype=np.int64)
        for t in reachable:
            idx += words >= t
        counts += np.bincount(idx, minlength=m)
    return [int(c) for c in counts]


def _split(trials: int, workers: int) -> list[tuple[int, int]]:
    step, extra = divmod(trials, workers)
    ranges, lo = [], 0
    for w in range(workers):
        hi = lo + step + (1 if w < extra else 0)
        ranges.append((lo, hi))
        lo = hi
    return ranges


@dataclass(frozen=True)
class SimulationResult:
    protocol: str
    trials: int
    seed: int
    tallies: dict[str, int]
    awakening_tallies: dict[tuple[str, str, str], int]


@dataclass(frozen=True)
class CredenceEstimate:
    protocol: str
    agent: str
    proposition: frozenset[str]
    measure: Measure
    point: float
    stderr: float
    ci95: tuple[float, float]
    n_effective: int
    hits: int
    trials: int
    seed: int

    @property
    def frequency(self) -> Fraction:
        """The exact observed ratio ``hits / n_effective``."""
        return Fraction(self.hits, self.n_effective)


def check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed <= _MASK:
        raise InvalidParam(f"seed must be an integer in [0, 2**64), got {seed!r}")
    return seed


def awakening_tallies(p, tallies: dict[str, int]) -> dict[tuple[str, str, str], int]:
    return {
        (o.label, s.agent, day): tallies[o.label]
        for o in p.outcomes
        for s in p.schedules
        for day in s.days(o.label)
    }


def run_trials(p, trials: int, seed: int, workers: int = 1) -> SimulationResult:
    """Simulate ``trials`` experiments.

    The result depends only on ``(p, trials, seed)``; ``workers`` splits the
    trial range over threads and never changes the tallies.
    """
    p = _validated(p)
    if isinstance(trials, bool) or not isinstance(trials, int) or trials < 0:
        raise InvalidParam(f"trials must be a non-negative integer, got {trials!r}")
    if isinstance(workers, bool) or not isinstance(workers, int) or workers < 1:
        raise InvalidParam(f"workers must be an integer >= 1, got {workers!r}")
    seed = check_seed(seed)

    thresholds = outcome_thresholds(o.prob for o in p.outcomes)
    m = len(p.outcomes)
    ranges = [r for r in _split(trials, workers) if r[0] < r[1]]
    if len(ranges) <= 1:
        parts = [_count_range(seed, thresholds, m, lo, hi) for lo, hi in ranges]
    else:
        with ThreadPoolExecutor(max_workers=len(ranges)) as pool:
            parts = list(pool.map(lambda r: _count_range(seed, thresholds, m, *r), ranges))

    counts = [sum(col) for col in zip(*parts)] if parts else [0] * m
    tallies = {o.label: c for o, c in zip(p.outcomes, counts)}
    return SimulationResult(p.name, trials, seed, tallies, awakening_tallies(p, tallies))


def _check_match(r: SimulationResult, p) -> None:
    expected = {(o.label, s.agent, d) for o in p.outcomes for s in p.schedules for d in s.days(o.label)}
    if r.protocol != p.name or list(r.tallies) != list(p.labels) or set(r.awakening_tallies) != expected:
        raise ProtocolMismatch(f"simulation result for {r.protocol!r} does not match protocol {p.name!r}")


def estimate_credence(r: SimulationResult, p, agent: str, proposition, measure: Measure) -> CredenceEstimate:
    """Frequency estimate of a credence with a normal-approximation 95% interval."""
    p = _validated(p)
    _check_match(r, p)
    prop = _proposition(p, proposition)
    p.schedule(agent)
    measure = Measure(measure)

    if measure is Measure.PER_EXPERIMENT:
        n = r.trials
        hits = sum(c for o, c in r.tallies.items() if o in prop)
    else:
        mine = [(o, c) for (o, a, _), c in r.awakening_tallies.items() if a == agent]
        n = sum(c for _, c in mine)
        hits = sum(c for o, c in mine if o in prop)
    if n == 0:
        raise NoEvents(f"no {measure.value} events for agent {agent!r} in {r.trials} trials")

    point = hits / n
    stderr = math.sqrt(point * (1 - point) / n)
    ci = (max(0.0, point - Z95 * stderr), min(1.0, point + Z95 * stderr))
    return CredenceEstimate(p.name, agent, prop, measure, point, stderr, ci, n, hits, r.trials, r.seed)


__all__ = [
    "CredenceEstimate",
    "SimulationResult",
    "estimate_credence",
    "outcome_index",
    "outcome_thresholds",
    "run_trials",
    "splitmix64_mix",
    "trial_word",
    "trial_words",
]
