"""Trust-factor scores and their normalization into weight tables.

Per scenario and result bit, each version is judged correct or faulty.
Reward/punishment splits +1 among the correct versions and -1 among the
faulty ones; punishment-only splits just the -1.  Scores are summed over
scenarios, divided by the scenario count, and normalized with statistics
pooled over every (version, bit) entry:

* MINMAX: ``(m - min) / (max - min)``
* ABSMIN_SHIFT: ``m + |min|``
* STANDARD: logistic of the z-score, ``1 / (1 + exp(-(m - mean) / std))``
* STANDARD_RECTIFIED: ``max(z, 0) + 0.01``

Population std.  When every mean is equal (up to 1e-12 relative round-off)
MINMAX and both STANDARD forms give uniform 0.5 weights.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .diversify import Transform, execute_version
from .errors import ConfigurationError, UsageError
from .faults import Scenario
from .voting import WeightTable
from .word import golden

STANDARD_FLOOR = 0.01
SPREAD_EPS = 1e-12


class ScoringScheme(enum.Enum):
    PUNISHMENT = 1
    REWARD_PUNISHMENT = 2

    @classmethod
    def parse(cls, name) -> ScoringScheme:
        if isinstance(name, ScoringScheme):
            return name
        s = str(name).strip().upper().replace("-", "_").replace("/", "_")
        aliases = {"1": "PUNISHMENT", "PUNISH": "PUNISHMENT", "PUNISHMENT_ONLY": "PUNISHMENT",
                   "2": "REWARD_PUNISHMENT", "RP": "REWARD_PUNISHMENT", "REWARD": "REWARD_PUNISHMENT"}
        try:
            return cls[aliases.get(s, s)]
        except KeyError:
            raise ConfigurationError(f"unknown scoring scheme {name!r}") from None


class NormalizationKind(enum.Enum):
    MINMAX = 1
    ABSMIN_SHIFT = 2
    STANDARD = 3
    STANDARD_RECTIFIED = 4

    @classmethod
    def parse(cls, name) -> NormalizationKind:
        if isinstance(name, NormalizationKind):
            return name
        s = str(name).strip().upper().replace("-", "_")
        aliases = {"1": "MINMAX", "LINEAR": "MINMAX", "2": "ABSMIN_SHIFT", "ABSMIN": "ABSMIN_SHIFT",
                   "3": "STANDARD", "ZSCORE": "STANDARD",
                   "RECTIFIED": "STANDARD_RECTIFIED"}
        try:
            return cls[aliases.get(s, s)]
        except KeyError:
            raise ConfigurationError(f"unknown normalization {name!r}") from None


def score_reward_punishment(correct_flags: Sequence[bool]) -> tuple[float, ...]:
    n_ok = sum(bool(f) for f in correct_flags)
    n_bad = len(correct_flags) - n_ok
    return tuple(1.0 / n_ok if f else -1.0 / n_bad for f in correct_flags)


def score_punishment_only(correct_flags: Sequence[bool]) -> tuple[float, ...]:
    if not correct_flags:
        raise ConfigurationError("need at least one flag")
    n_bad = sum(not f for f in correct_flags)
    return tuple(0.0 if f else -1.0 / n_bad for f in correct_flags)


def score_flags(flags: Sequence[bool], scheme: ScoringScheme) -> tuple[float, ...]:
    if scheme is ScoringScheme.REWARD_PUNISHMENT:
        return score_reward_punishment(flags)
    return score_punishment_only(flags)


def score_batch(ok: np.ndarray, scheme: ScoringScheme) -> np.ndarray:
    """Scores for an ``(n, versions)`` boolean correctness array at one bit."""
    n_versions = ok.shape[1]
    n_ok = ok.sum(axis=1, keepdims=True).astype(np.float64)
    n_bad = n_versions - n_ok
    with np.errstate(divide="ignore"):
        penalty = np.where(n_bad > 0, -1.0 / n_bad, 0.0)
        if scheme is ScoringScheme.PUNISHMENT:
            return np.where(ok, 0.0, penalty)
        reward = np.where(n_ok > 0, 1.0 / n_ok, 0.0)
    return np.where(ok, reward, penalty)


def judge_bits(scenario: Scenario, combo: Sequence[Transform]) -> np.ndarray:
    """``flags[j, i]``: version ``j`` produced the golden value at result bit ``i``."""
    ref = golden(scenario.op, scenario.a, scenario.b)
    flags = np.zeros((len(combo), ref.width), dtype=bool)
    for j, t in enumerate(combo):
        got = execute_version(scenario.op, scenario.a, scenario.b, t, scenario.faults, j).decoded
        flags[j] = [g == r for g, r in zip(got.bits, ref.bits)]
    return flags


@dataclass(frozen=True)
class ScoreAccumulator:
    versions: tuple[str, ...]
    sums: np.ndarray
    n_scenarios: int = 0

    @classmethod
    def empty(cls, versions: Sequence[str], width: int) -> ScoreAccumulator:
        return cls(tuple(versions), np.zeros((len(versions), width)), 0)

    @property
    def width(self) -> int:
        return self.sums.shape[1]

    def __add__(self, other: ScoreAccumulator) -> ScoreAccumulator:
        if other.versions != self.versions or other.sums.shape != self.sums.shape:
            raise ConfigurationError("cannot merge accumulators of different shape")
        return ScoreAccumulator(self.versions, self.sums + other.sums,
                                self.n_scenarios + other.n_scenarios)

    def means(self) -> np.ndarray:
        if self.n_scenarios <= 0:
            raise UsageError("no scenarios accumulated")
        return self.sums / self.n_scenarios


def accumulate(acc: ScoreAccumulator, scores, n_scenarios: int = 1) -> ScoreAccumulator:
    """Add one scenario's ``(versions, width)`` scores (or a pre-summed block of them)."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.shape != acc.sums.shape:
        raise ConfigurationError(f"scores shape {scores.shape} != {acc.sums.shape}")
    return ScoreAccumulator(acc.versions, acc.sums + scores, acc.n_scenarios + n_scenarios)


def normalize_means(means: np.ndarray, kind: NormalizationKind | str) -> np.ndarray:
    kind = NormalizationKind.parse(kind)
    m = np.asarray(means, dtype=np.float64)
    lo, hi = m.min(), m.max()
    # equal means that went through different float summations still count as equal
    flat = hi - lo <= SPREAD_EPS * max(1.0, abs(lo), abs(hi))
    if kind is NormalizationKind.MINMAX:
        if flat:
            return np.full_like(m, 0.5)
        return (m - lo) / (hi - lo)
    if kind is NormalizationKind.ABSMIN_SHIFT:
        return m + abs(lo)
    if kind in (NormalizationKind.STANDARD, NormalizationKind.STANDARD_RECTIFIED):
        sigma = m.std()
        if flat or sigma == 0:
            return np.full_like(m, 0.5)
        z = (m - m.mean()) / sigma
        if kind is NormalizationKind.STANDARD_RECTIFIED:
            return np.maximum(z, 0.0) + STANDARD_FLOOR
        # logistic keeps every weight in (0, 1) without silencing below-average entries
        return 1.0 / (1.0 + np.exp(-z))
    raise ConfigurationError(f"unsupported normalization {kind!r}")


def normalize(acc: ScoreAccumulator, kind: NormalizationKind) -> WeightTable:
    weights = normalize_means(acc.means(), kind)
    return WeightTable(acc.width, acc.versions, weights)
