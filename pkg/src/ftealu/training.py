"""Design-time weight learning over fault-injection datasets.

A dataset is executed once per combo (:func:`evaluate`); scoring, voting and
cross-validation then work on the cached decoded results.  Fold assignment
shuffles scenario indices with :func:`ftealu.rng.permutation` seeded by the
config seed and cuts the shuffled order into ``folds`` contiguous blocks, the
first ``n % folds`` blocks one element longer.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import faults as fm
from .diversify import Transform, execute_batch
from .errors import ConfigurationError, UsageError
from .rng import permutation
from .scoring import NormalizationKind, ScoreAccumulator, ScoringScheme, normalize, score_batch
from .voting import MAJORITY, WeightTable, combo_label, majority_batch, make_combo, weighted_batch
from .word import ALL_OPS, AluOp, check_width, golden_batch

EXHAUSTIVE = None
DEFAULT_CAP = 10 ** 8
CHUNK = 1 << 18
FAULT_CLASSES = ("none", "single", "double", "vulnerable", "transient")


def worker_count() -> int:
    env = os.environ.get("FTEALU_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigurationError(f"FTEALU_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


@dataclass(frozen=True)
class TrainingConfig:
    width: int = 4
    samples: int | None = EXHAUSTIVE
    seed: int = 1
    fault_classes: tuple[str, ...] = ("single", "double")
    ops: tuple[AluOp, ...] = ALL_OPS
    combo: object = 6
    scheme: ScoringScheme = ScoringScheme.REWARD_PUNISHMENT
    normalization: NormalizationKind = NormalizationKind.STANDARD
    folds: int = 10
    cap: int = DEFAULT_CAP
    effective_only: bool = False

    def __post_init__(self):
        check_width(self.width)
        object.__setattr__(self, "ops", tuple(AluOp.parse(o) for o in self.ops))
        object.__setattr__(self, "scheme", ScoringScheme.parse(self.scheme))
        object.__setattr__(self, "normalization", NormalizationKind.parse(self.normalization))
        bad = set(self.fault_classes) - set(FAULT_CLASSES)
        if bad or not self.fault_classes:
            raise ConfigurationError(f"fault classes must be drawn from {FAULT_CLASSES}, got {self.fault_classes}")
        if self.folds < 2:
            raise ConfigurationError("folds must be >= 2")
        if self.samples is not EXHAUSTIVE and self.samples < self.folds:
            raise ConfigurationError(f"samples ({self.samples}) must be >= folds ({self.folds})")
        if not self.ops:
            raise ConfigurationError("no operations selected")

    @property
    def transforms(self) -> tuple[Transform, ...]:
        return make_combo(self.combo, self.width)

    @property
    def n_pairs(self) -> int:
        return 4 ** self.width if self.samples is EXHAUSTIVE else self.samples

    def with_(self, **kw) -> TrainingConfig:
        return replace(self, **kw)


def fault_list(cfg: TrainingConfig) -> list[fm.FaultSet]:
    out: list[fm.FaultSet] = []
    for cls in cfg.fault_classes:
        if cls == "none":
            out.append(fm.FaultSet())
        elif cls == "single":
            out += fm.enumerate_single_faults(cfg.width)
        elif cls == "double":
            out += fm.enumerate_double_faults(cfg.width)
        elif cls == "vulnerable":
            out += fm.vulnerable_bit_faults(cfg.transforms, cfg.width)
        elif cls == "transient":
            out += fm.enumerate_transient_faults(cfg.width, len(cfg.transforms))
    return out


def dataset_size(cfg: TrainingConfig) -> int:
    return cfg.n_pairs * len(fault_list(cfg)) * len(cfg.ops)


def build_dataset(cfg: TrainingConfig) -> fm.ScenarioSet:
    """Operand pairs x fault sets x ops, op-major; deterministic under ``cfg.seed``."""
    faults = fault_list(cfg)
    n = cfg.n_pairs * len(faults) * len(cfg.ops)
    judged = n * cfg.width
    if judged > cfg.cap:
        raise UsageError(f"dataset would hold {n} scenarios ({judged} judged bits), above the "
                         f"cap of {cfg.cap}; lower --samples or raise --cap")
    a, b = fm.sample_operands(cfg.width, cfg.samples or 0, cfg.seed, cfg.samples is EXHAUSTIVE)
    return fm.ScenarioSet.product(cfg.width, cfg.ops, a, b, faults)


def _execute_chunk(scen: fm.ScenarioSet, transforms, lo: int, hi: int) -> tuple[np.ndarray, np.ndarray]:
    part = scen.take(slice(lo, hi))
    decoded = np.empty((len(part), len(transforms)), dtype=np.int64)
    ref = np.empty(len(part), dtype=np.int64)
    for code in np.unique(part.op):
        op = AluOp(int(code))
        idx = np.flatnonzero(part.op == code)
        a, b = part.a[idx], part.b[idx]
        masks = part.masks.take(idx)
        ref[idx] = golden_batch(op, a, b, scen.width)
        for j, t in enumerate(transforms):
            decoded[idx, j] = execute_batch(op, a, b, t, masks, version_id=j)[0]
    return decoded, ref


@dataclass
class Evaluation:
    """Decoded version results and golden outputs for every scenario of a dataset."""

    scenarios: fm.ScenarioSet
    transforms: tuple[Transform, ...]
    decoded: np.ndarray     # (n, versions)
    golden: np.ndarray      # (n,)

    @property
    def width(self) -> int:
        return self.scenarios.width

    @property
    def versions(self) -> tuple[str, ...]:
        return tuple(t.name for t in self.transforms)

    def __len__(self) -> int:
        return len(self.golden)

    def take(self, idx) -> Evaluation:
        return Evaluation(self.scenarios.take(idx), self.transforms, self.decoded[idx], self.golden[idx])

    @property
    def effective(self) -> np.ndarray:
        """Scenarios where at least one version's decoded result differs from golden."""
        return np.any(self.decoded != self.golden[:, None], axis=1)

    @property
    def executed_ops(self) -> int:
        """ALU operations executed: one per version per scenario."""
        return len(self) * len(self.transforms)


def evaluate(scen: fm.ScenarioSet, transforms: Sequence[Transform]) -> Evaluation:
    transforms = tuple(transforms)
    if any(t.width != scen.width for t in transforms):
        raise ConfigurationError("combo width differs from dataset width")
    bounds = [(lo, min(lo + CHUNK, len(scen))) for lo in range(0, len(scen), CHUNK)]
    workers = min(worker_count(), len(bounds)) or 1
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda lh: _execute_chunk(scen, transforms, *lh), bounds))
    else:
        parts = [_execute_chunk(scen, transforms, lo, hi) for lo, hi in bounds]
    if not parts:
        return Evaluation(scen, transforms, np.empty((0, len(transforms)), np.int64), np.empty(0, np.int64))
    return Evaluation(scen, transforms, np.concatenate([p[0] for p in parts]),
                      np.concatenate([p[1] for p in parts]))


def fold_assignment(n: int, folds: int, seed: int) -> np.ndarray:
    if n < folds:
        raise UsageError(f"{n} scenarios cannot be split into {folds} folds")
    order = permutation(seed, n)
    fold = np.empty(n, dtype=np.int64)
    for f, block in enumerate(np.array_split(order, folds)):
        fold[block] = f
    return fold


def fold_scores(ev: Evaluation, scheme: ScoringScheme, fold: np.ndarray | None = None,
                folds: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Score sums per fold, shape ``(folds, versions, width)``, and scenario counts per fold."""
    n_versions, width = len(ev.transforms), ev.width
    if fold is None:
        fold = np.zeros(len(ev), dtype=np.int64)
    sums = np.zeros((folds, n_versions, width))
    err = ev.decoded ^ ev.golden[:, None]
    for lo in range(0, len(ev), CHUNK):
        sl = slice(lo, lo + CHUNK)
        f = fold[sl]
        for i in range(width):
            s = score_batch(((err[sl] >> i) & 1) == 0, scheme)
            for j in range(n_versions):
                sums[:, j, i] += np.bincount(f, weights=s[:, j], minlength=folds)
    return sums, np.bincount(fold, minlength=folds)


def accumulator(ev: Evaluation, scheme: ScoringScheme) -> ScoreAccumulator:
    sums, counts = fold_scores(ev, scheme)
    return ScoreAccumulator(ev.versions, sums[0], int(counts[0]))


def train_weights(dataset, cfg: TrainingConfig) -> WeightTable:
    """Judge, score, accumulate and normalize in one pass over ``dataset``."""
    ev = dataset if isinstance(dataset, Evaluation) else evaluate(_as_set(dataset, cfg), cfg.transforms)
    if len(ev) == 0:
        raise UsageError("empty dataset")
    return normalize(accumulator(ev, cfg.scheme), cfg.normalization)


def vote(ev: Evaluation, table: WeightTable | str = MAJORITY) -> np.ndarray:
    if isinstance(table, str):
        if table != MAJORITY:
            raise ConfigurationError(f"unknown voter {table!r}")
        return majority_batch(ev.decoded, ev.width)
    if table.versions != ev.versions or table.width != ev.width:
        raise ConfigurationError("weight table does not match the evaluated combo")
    return weighted_batch(ev.decoded, table)


@dataclass
class CoverageReport:
    """Corrected/total counts per group (``all``, ``op=ADD``, ``class=single``, ...)."""

    counts: dict[str, tuple[int, int]] = field(default_factory=dict)

    def value(self, group: str = "all") -> float:
        ok, total = self.counts[group]
        return ok / total if total else float("nan")

    @property
    def overall(self) -> float:
        return self.value("all")

    def rows(self, prefix: str = "") -> list[tuple[str, str, object]]:
        out = []
        for group, (ok, total) in self.counts.items():
            g = f"{prefix}{group}"
            out += [(g, "coverage", self.value(group)), (g, "corrected", ok), (g, "scenarios", total)]
        return out


def coverage_of(ev: Evaluation, correct: np.ndarray, effective_only: bool = False) -> CoverageReport:
    keep = ev.effective if effective_only else np.ones(len(ev), dtype=bool)
    rep = CoverageReport()
    groups = [("all", keep)]
    for code in np.unique(ev.scenarios.op):
        groups.append((f"op={AluOp(int(code)).name}", keep & (ev.scenarios.op == code)))
    for code in np.unique(ev.scenarios.fault_class):
        groups.append((f"class={fm.CLASS_NAMES[int(code)]}", keep & (ev.scenarios.fault_class == code)))
    for name, sel in groups:
        rep.counts[name] = (int(np.count_nonzero(correct & sel)), int(np.count_nonzero(sel)))
    return rep


def coverage(dataset, combo, voter_cfg: TrainingConfig | None = None,
             table: WeightTable | str = MAJORITY) -> CoverageReport:
    """Fraction of scenarios whose voted output equals golden, overall / per op / per fault class."""
    if isinstance(dataset, Evaluation):
        ev = dataset
    else:
        scen = _as_set(dataset, voter_cfg)
        if isinstance(combo, (list, tuple)) and combo and isinstance(combo[0], Transform):
            transforms = tuple(combo)
        else:
            transforms = make_combo(combo, scen.width)
        ev = evaluate(scen, transforms)
    effective_only = voter_cfg.effective_only if voter_cfg is not None else False
    return coverage_of(ev, vote(ev, table) == ev.golden, effective_only)


@dataclass
class CvReport:
    folds: list[dict[str, float]]
    mean_test: dict[str, float]
    in_sample: dict[str, float]

    @property
    def gap(self) -> float:
        return abs(self.in_sample["all"] - self.mean_test["all"])

    def rows(self, prefix: str = "") -> list[tuple[str, str, object]]:
        out = []
        for f, d in enumerate(self.folds):
            for k, v in d.items():
                out.append((f"{prefix}fold={f}", k, v))
        for k, v in self.mean_test.items():
            out.append((f"{prefix}mean", f"test_{k}", v))
        for k, v in self.in_sample.items():
            out.append((f"{prefix}in_sample", k, v))
        out.append((f"{prefix}summary", "generalization_gap", self.gap))
        return out


def _group_coverages(ev: Evaluation, correct: np.ndarray, sel: np.ndarray, effective_only: bool) -> dict[str, float]:
    rep = coverage_of(ev.take(sel), correct[sel], effective_only)
    return {g: rep.value(g) for g in rep.counts if g == "all" or g.startswith("class=")}


def cross_validate(dataset, cfg: TrainingConfig) -> CvReport:
    """k-fold CV: train on k-1 folds, measure coverage on the held-out one."""
    ev = dataset if isinstance(dataset, Evaluation) else evaluate(_as_set(dataset, cfg), cfg.transforms)
    fold = fold_assignment(len(ev), cfg.folds, cfg.seed)
    sums, counts = fold_scores(ev, cfg.scheme, fold, cfg.folds)
    total, n_total = sums.sum(axis=0), int(counts.sum())

    per_fold, test_parts = [], []
    for f in range(cfg.folds):
        acc = ScoreAccumulator(ev.versions, total - sums[f], n_total - int(counts[f]))
        correct = vote(ev, normalize(acc, cfg.normalization)) == ev.golden
        test = _group_coverages(ev, correct, fold == f, cfg.effective_only)
        train = _group_coverages(ev, correct, fold != f, cfg.effective_only)
        row = {f"test_{k}": v for k, v in test.items()}
        row.update({f"train_{k}": v for k, v in train.items()})
        per_fold.append(row)
        test_parts.append(test)

    keys = sorted({k for t in test_parts for k in t})
    mean_test = {k: float(np.nanmean([t.get(k, np.nan) for t in test_parts])) for k in keys}
    full = normalize(ScoreAccumulator(ev.versions, total, n_total), cfg.normalization)
    in_sample = _group_coverages(ev, vote(ev, full) == ev.golden, np.ones(len(ev), bool), cfg.effective_only)
    return CvReport(per_fold, mean_test, in_sample)


def _as_set(dataset, cfg: TrainingConfig | None) -> fm.ScenarioSet:
    if isinstance(dataset, fm.ScenarioSet):
        return dataset
    width = cfg.width if cfg is not None else None
    return fm.ScenarioSet.from_scenarios(list(dataset), width)


__all__ = [
    "EXHAUSTIVE", "TrainingConfig", "build_dataset", "dataset_size", "evaluate", "Evaluation",
    "fold_assignment", "fold_scores", "train_weights", "vote", "coverage", "coverage_of",
    "CoverageReport", "cross_validate", "CvReport", "worker_count", "combo_label",
]
