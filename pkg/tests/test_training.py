import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ftealu import ConfigurationError, UsageError
from ftealu.diversify import execute_version
from ftealu.faults import FaultSet, Scenario, ScenarioSet
from ftealu.scoring import NormalizationKind, ScoringScheme, judge_bits, score_flags
from ftealu.training import (EXHAUSTIVE, TrainingConfig, build_dataset, coverage, cross_validate,
                             dataset_size, evaluate, fold_assignment, train_weights, vote)
from ftealu.voting import MAJORITY, WeightTable, majority_vote, make_combo
from ftealu.word import AluOp, Word, golden

ADD = (AluOp.ADD,)


def test_dataset_counts():
    cfg = TrainingConfig(width=4, samples=EXHAUSTIVE, fault_classes=("single",), ops=ADD)
    assert len(build_dataset(cfg)) == 256 * 16 == 4096
    big = TrainingConfig(width=16, samples=400)
    assert dataset_size(big) == 400 * (64 + 1984) * 6


def test_dataset_deterministic():
    cfg = TrainingConfig(width=8, samples=20, seed=5, ops=ADD)
    a, b = build_dataset(cfg), build_dataset(cfg)
    assert list(a) == list(b)
    c = build_dataset(cfg.with_(seed=6))
    assert not np.array_equal(a.a, c.a)


def test_cap_is_enforced():
    cfg = TrainingConfig(width=16, samples=400, cap=10_000)
    with pytest.raises(UsageError):
        build_dataset(cfg)


def test_config_validation():
    with pytest.raises(ConfigurationError):
        TrainingConfig(folds=1)
    with pytest.raises(ConfigurationError):
        TrainingConfig(width=16, samples=5, folds=10)
    with pytest.raises(ConfigurationError):
        TrainingConfig(fault_classes=("triple",))
    with pytest.raises(ConfigurationError):
        TrainingConfig(width=5)


def test_fault_free_training_gives_uniform_half():
    cfg = TrainingConfig(width=4, fault_classes=("none",), ops=ADD)
    table = train_weights(build_dataset(cfg), cfg)
    assert np.array_equal(table.weights, np.full((3, 4), 0.5))


def test_training_reproducible_bit_exact():
    cfg = TrainingConfig(width=4, fault_classes=("single",), ops=ADD)
    assert train_weights(build_dataset(cfg), cfg).dumps() == train_weights(build_dataset(cfg), cfg).dumps()


def test_training_matches_scalar_accumulation():
    # oracle: judge every scenario one at a time with the scalar pipeline and average by hand
    cfg = TrainingConfig(width=4, samples=12, seed=3, fault_classes=("single", "double"),
                         ops=(AluOp.SUB, AluOp.XOR), normalization=NormalizationKind.MINMAX, folds=2)
    ds = build_dataset(cfg)
    combo = cfg.transforms
    sums = np.zeros((3, 4))
    for sc in ds:
        flags = judge_bits(sc, combo)
        for i in range(4):
            sums[:, i] += score_flags(tuple(flags[:, i]), cfg.scheme)
    m = sums / len(ds)
    expect = (m - m.min()) / (m.max() - m.min())
    assert np.allclose(train_weights(ds, cfg).weights, expect)


def test_e_reswo_fill_adjacent_bits_rank_low():
    cfg = TrainingConfig(width=4, fault_classes=("single",), ops=ADD)
    table = train_weights(build_dataset(cfg), cfg)
    er = table.weights[table.versions.index("E_RESWO")]
    h = cfg.width // 2
    adjacent = {0, h}   # logical bits sitting right above the fill lanes 2 and 0
    others = set(range(cfg.width)) - adjacent
    assert max(er[i] for i in adjacent) < min(er[i] for i in others)


def test_batch_evaluation_matches_scalar():
    cfg = TrainingConfig(width=4, samples=10, seed=2, fault_classes=("single", "double", "transient"))
    ds = build_dataset(cfg)
    ev = evaluate(ds, cfg.transforms)
    for k in range(0, len(ds), 97):
        sc = ds[k]
        outs = [execute_version(sc.op, sc.a, sc.b, t, sc.faults, j).decoded.value
                for j, t in enumerate(cfg.transforms)]
        assert ev.decoded[k].tolist() == outs
        assert ev.golden[k] == golden(sc.op, sc.a, sc.b).value
    assert ev.executed_ops == 3 * len(ds)


def test_fold_partition():
    fold = fold_assignment(100, 10, 1)
    assert np.bincount(fold).tolist() == [10] * 10
    assert np.array_equal(fold, fold_assignment(100, 10, 1))
    assert not np.array_equal(fold, fold_assignment(100, 10, 2))
    with pytest.raises(UsageError):
        fold_assignment(5, 10, 1)


@given(st.integers(10, 500), st.integers(2, 10), st.integers(0, 2 ** 32))
@settings(max_examples=50)
def test_folds_disjoint_and_balanced(n, k, seed):
    counts = np.bincount(fold_assignment(n, k, seed), minlength=k)
    assert counts.sum() == n and counts.max() - counts.min() <= 1


def test_fault_free_and_transient_coverage_is_one():
    for classes in (("none",), ("transient",)):
        cfg = TrainingConfig(width=4, fault_classes=classes)
        rep = coverage(build_dataset(cfg), 6, cfg)
        assert rep.overall == 1.0


def test_coverage_matches_scalar_majority():
    cfg = TrainingConfig(width=4, samples=10, seed=4, ops=(AluOp.ADD, AluOp.AND))
    ds = build_dataset(cfg)
    combo = make_combo(6, 4)
    ok = 0
    for sc in ds:
        outs = [execute_version(sc.op, sc.a, sc.b, t, sc.faults, j).decoded for j, t in enumerate(combo)]
        ok += majority_vote(outs) == golden(sc.op, sc.a, sc.b)
    assert coverage(ds, combo, cfg).counts["all"] == (ok, len(ds))


def test_coverage_accepts_scenario_lists_and_tables():
    sc = [Scenario(AluOp.ADD, Word(4, 3), Word(4, 1), FaultSet.parse("A0@1")),
          Scenario(AluOp.ADD, Word(4, 1), Word(4, 1), FaultSet.parse("A1@1"))]
    rep = coverage(sc, 6, TrainingConfig(width=4))
    assert rep.counts["all"][1] == 2
    table = WeightTable.uniform(4, ("IDENTITY", "RESO", "E_RESWO"))
    assert coverage(ScenarioSet.from_scenarios(sc), 6, None, table).overall == rep.overall


def test_more_versions_agreeing_never_hurts_weighted_vote():
    # scaling all weights leaves coverage unchanged
    cfg = TrainingConfig(width=4, samples=20, ops=ADD)
    ev = evaluate(build_dataset(cfg), cfg.transforms)
    t = train_weights(ev, cfg)
    t2 = WeightTable(t.width, t.versions, t.weights * 3.0)
    assert np.array_equal(vote(ev, t), vote(ev, t2))


def test_effective_only_drops_masked_scenarios():
    cfg = TrainingConfig(width=4, samples=20, ops=ADD)
    ev = evaluate(build_dataset(cfg), cfg.transforms)
    full = coverage(ev, None, cfg)
    eff = coverage(ev, None, cfg.with_(effective_only=True))
    assert eff.counts["all"][1] == int(ev.effective.sum()) < full.counts["all"][1]
    assert full.counts["all"][0] - eff.counts["all"][0] == full.counts["all"][1] - eff.counts["all"][1]


def test_cross_validation_small():
    cfg = TrainingConfig(width=8, samples=40, seed=1, folds=4)
    rep = cross_validate(build_dataset(cfg), cfg)
    assert len(rep.folds) == 4
    assert 0 <= rep.mean_test["all"] <= 1
    assert rep.gap <= 0.05
    assert rep.in_sample["class=single"] > rep.in_sample["class=double"]


def test_punishment_scheme_trains():
    cfg = TrainingConfig(width=4, samples=16, scheme=ScoringScheme.PUNISHMENT, ops=ADD)
    t = train_weights(build_dataset(cfg), cfg)
    assert (t.weights > 0).all()
    with pytest.raises(ConfigurationError):
        vote(evaluate(build_dataset(cfg), cfg.transforms), "PLURALITY")
    assert MAJORITY == "MAJORITY"
