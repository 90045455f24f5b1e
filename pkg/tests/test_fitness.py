import threading

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from molggp.chem.featurize import FeatureStore
from molggp.datasets import synth_dataset
from molggp.fitness import (
    ConfusionCounts,
    FitnessCache,
    FitnessRecord,
    confusion,
    evaluate_pipeline,
    make_foldset,
    mcc,
    stratified_kfold,
    stratified_split,
)

pairs = st.integers(2, 60).flatmap(
    lambda n: st.tuples(*[st.lists(st.integers(0, 1), min_size=n, max_size=n)] * 2)
)


def test_mcc_known_values():
    assert mcc(ConfusionCounts(TP=5, TN=5, FP=0, FN=0)) == 1.0
    assert mcc(ConfusionCounts(TP=0, TN=0, FP=5, FN=5)) == -1.0
    assert mcc(ConfusionCounts(TP=3, TN=0, FP=2, FN=0)) == 0.0
    assert mcc(ConfusionCounts(TP=6, TN=3, FP=1, FN=2)) == pytest.approx(16 / np.sqrt(7 * 8 * 4 * 5))


@given(pairs)
def test_mcc_equals_pearson_correlation(pair):
    t, p = map(np.array, pair)
    c = confusion(t, p)
    assert c.total == len(t)
    if t.std() == 0 or p.std() == 0:
        assert mcc(c) == 0.0
    else:
        assert mcc(c) == pytest.approx(np.corrcoef(t, p)[0, 1], abs=1e-12)


@given(pairs)
def test_mcc_symmetries(pair):
    t, p = map(np.array, pair)
    m = mcc(confusion(t, p))
    assert -1.0 <= m <= 1.0
    assert mcc(confusion(p, t)) == pytest.approx(m, abs=1e-12)
    assert mcc(confusion(1 - t, 1 - p)) == pytest.approx(m, abs=1e-12)
    assert mcc(confusion(t, 1 - p)) == pytest.approx(-m, abs=1e-12)


def test_confusion_errors():
    with pytest.raises(ValueError, match="length-mismatch"):
        confusion([0, 1], [0, 1, 1])
    with pytest.raises(ValueError, match="non-binary"):
        confusion([0, 2], [0, 1])


@given(st.lists(st.integers(0, 1), min_size=4, max_size=200), st.floats(0.05, 0.95), st.integers(0, 2**31))
def test_stratified_split_properties(labels, fraction, seed):
    y = np.array(labels)
    if min(np.sum(y == 0), np.sum(y == 1)) < 2:
        with pytest.raises(ValueError):
            stratified_split(y, fraction, seed)
        return
    train, blind = stratified_split(y, fraction, seed)
    assert np.intersect1d(train, blind).size == 0
    assert np.array_equal(np.sort(np.concatenate([train, blind])), np.arange(len(y)))
    for c in (0, 1):
        size = int(np.sum(y == c))
        assert int(np.sum(y[train] == c)) == int(np.floor(fraction * size + 0.5))
    again = stratified_split(y, fraction, seed)
    assert np.array_equal(again[0], train)


@given(st.lists(st.integers(0, 1), min_size=10, max_size=200), st.integers(2, 10), st.integers(0, 2**31))
def test_stratified_kfold_properties(labels, k, seed):
    y = np.array(labels)
    if min(np.sum(y == 0), np.sum(y == 1)) < k:
        kind = "single-class" if len(set(labels)) == 1 else "class-smaller-than-K"
        with pytest.raises(ValueError, match=kind):
            stratified_kfold(y, k, seed)
        return
    folds = stratified_kfold(y, k, seed)
    assert len(folds) == k
    assert np.array_equal(np.sort(np.concatenate(folds)), np.arange(len(y)))
    sizes = [len(f) for f in folds]
    assert max(sizes) - min(sizes) <= 1
    for c in (0, 1):
        per = [int(np.sum(y[f] == c)) for f in folds]
        assert max(per) - min(per) <= 1


def test_foldset_ids_give_different_folds():
    y = np.array([0, 1] * 30)
    a, b = make_foldset(y, 5, 0, 0), make_foldset(y, 5, 0, 1)
    assert a.seed != b.seed
    assert any(not np.array_equal(x, z) for x, z in zip(a.folds, b.folds))
    assert all(np.array_equal(x, z) for x, z in zip(a.folds, make_foldset(y, 5, 0, 0).folds))


def test_cache_counts_and_invalidation():
    cache = FitnessCache()
    calls = []

    def compute():
        calls.append(1)
        return FitnessRecord(0.5, (0.5,), "ok")

    cache.get_or_compute(("a", 0), compute)
    cache.get_or_compute(("a", 0), compute)
    cache.get_or_compute(("a", 1), compute)
    assert (cache.hits, cache.misses, len(calls), len(cache)) == (1, 2, 2, 2)
    cache.invalidate(keep_foldset=1)
    assert ("a", 0) not in cache and ("a", 1) in cache
    cache.invalidate()
    assert len(cache) == 0


def test_cache_concurrent_duplicates_compute_once():
    cache = FitnessCache()
    gate = threading.Event()
    calls = []

    def compute():
        calls.append(1)
        gate.wait(5)
        return FitnessRecord(1.0, (1.0,), "ok")

    threads = [threading.Thread(target=cache.get_or_compute, args=(("s", 0), compute)) for _ in range(4)]
    for t in threads:
        t.start()
    gate.set()
    for t in threads:
        t.join()
    assert len(calls) == 1 and cache.hits == 3 and cache.misses == 1


@pytest.fixture(scope="module")
def nitro():
    ds = synth_dataset("nitro-rule", 100, 0.0, 11)
    y = np.array(ds.labels)
    return FeatureStore(ds.molecules()), y, make_foldset(y, 5, 0, 0)


def test_rule_dataset_is_solved_exactly(nitro):
    store, y, fs = nitro
    rec = evaluate_pipeline("Toxicophores DecisionTree None 2".split(), store, y, fs, 60)
    assert rec.status == "ok" and rec.mean_mcc == 1.0 and len(rec.per_fold_mcc) == 5


def test_evaluation_is_deterministic(nitro):
    store, y, fs = nitro
    tokens = "General_Descriptors Fragments MinMaxScaler RandomForest 10 5 2".split()
    a = evaluate_pipeline(tokens, store, y, fs, 60)
    b = evaluate_pipeline(tokens, store, y, fs, 60)
    assert a == b and a.status == "ok"


def test_failures_score_zero(nitro):
    store, y, fs = nitro
    assert evaluate_pipeline("Toxicophores DecisionTree None 2".split(), store, y, fs, 0) == FitnessRecord.failed("timeout")
    rec = evaluate_pipeline("Toxicophores VarianceThreshold 1.0 DecisionTree None 2".split(), store, y, fs, 60)
    assert (rec.status, rec.mean_mcc) == ("empty-feature-set", 0.0)
    rec = evaluate_pipeline("Toxicophores ExtraTrees 500 None 2".split(), store, y, fs, 1e-4)
    assert (rec.status, rec.mean_mcc) == ("timeout", 0.0)
    rec = evaluate_pipeline(["nonsense"], store, y, fs, 60)
    assert (rec.status, rec.mean_mcc) == ("train-failure", 0.0)
