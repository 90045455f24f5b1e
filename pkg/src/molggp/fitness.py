"""Stratified splitting, MCC, and budgeted K-fold evaluation of a pipeline."""
from __future__ import annotations

import math
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Hashable, Sequence

import numpy as np

from .chem.featurize import FeatureStore
from .ml.classifiers import DeadlineExceeded
from .ml.fitted import EmptyFeatureSet, fit_pipeline
from .ml.pipeline_spec import spec_from_sentence
from .seeding import derive_rng, derive_seed

STATUSES = ("ok", "timeout", "empty-feature-set", "train-failure")


@dataclass(frozen=True)
class ConfusionCounts:
    TP: int
    TN: int
    FP: int
    FN: int

    @property
    def total(self) -> int:
        return self.TP + self.TN + self.FP + self.FN


def _binary(v, name: str) -> np.ndarray:
    a = np.asarray(v)
    if a.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if not np.isin(a, (0, 1)).all():
        raise ValueError(f"non-binary value in {name}")
    return a.astype(np.int64)


def confusion(y_true, y_pred) -> ConfusionCounts:
    t = _binary(y_true, "y_true")
    p = _binary(y_pred, "y_pred")
    if t.shape != p.shape:
        raise ValueError(f"length-mismatch: {t.size} vs {p.size}")
    return ConfusionCounts(
        TP=int(np.sum((t == 1) & (p == 1))),
        TN=int(np.sum((t == 0) & (p == 0))),
        FP=int(np.sum((t == 0) & (p == 1))),
        FN=int(np.sum((t == 1) & (p == 0))),
    )


def mcc(c: ConfusionCounts) -> float:
    """Matthews correlation; 0.0 when any marginal is empty."""
    den = (c.TP + c.FP) * (c.TP + c.FN) * (c.TN + c.FP) * (c.TN + c.FN)
    if den == 0:
        return 0.0
    v = (c.TP * c.TN - c.FP * c.FN) / math.sqrt(den)
    return min(1.0, max(-1.0, v))


@dataclass(frozen=True)
class FitnessRecord:
    mean_mcc: float
    per_fold_mcc: tuple[float, ...]
    status: str
    # wall time is measurement, not outcome: excluded from equality
    fold_times: tuple[float, ...] = field(default=(), compare=False)

    @classmethod
    def failed(cls, status: str, per_fold=(), times=()) -> "FitnessRecord":
        return cls(0.0, tuple(per_fold), status, tuple(times))


def _class_indices(labels) -> list[np.ndarray]:
    y = _binary(labels, "labels")
    idx = [np.flatnonzero(y == c) for c in (0, 1)]
    if any(i.size == 0 for i in idx):
        raise ValueError("single-class input: both classes are required")
    return idx


def stratified_split(labels, train_fraction: float = 0.9, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Per class, round-half-up(fraction x size) shuffled members go to train."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    train, blind = [], []
    for members in _class_indices(labels):
        if members.size < 2:
            raise ValueError("each class needs at least 2 samples")
        k = int(math.floor(train_fraction * members.size + 0.5))
        perm = rng.permutation(members)
        train.append(perm[:k])
        blind.append(perm[k:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(blind))


def stratified_kfold(labels, k: int = 5, seed: int = 0) -> list[np.ndarray]:
    """K disjoint validation folds; each class is dealt round-robin after a
    seeded shuffle, continuing where the previous class stopped."""
    if k < 2:
        raise ValueError("k must be at least 2")
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    start = 0
    for members in _class_indices(labels):
        if members.size < k:
            raise ValueError(f"class-smaller-than-K: {members.size} < {k}")
        for j, i in enumerate(rng.permutation(members)):
            folds[(start + j) % k].append(int(i))
        start = (start + members.size) % k
    return [np.sort(np.asarray(f, dtype=np.int64)) for f in folds]


@dataclass(frozen=True)
class FoldSet:
    id: int
    seed: int
    folds: tuple[np.ndarray, ...]

    @property
    def k(self) -> int:
        return len(self.folds)


def make_foldset(labels, k: int, master_seed: int, foldset_id: int) -> FoldSet:
    seed = derive_seed(master_seed, "folds", foldset_id)
    return FoldSet(foldset_id, seed, tuple(stratified_kfold(labels, k, seed)))


class FitnessCache:
    """Memo of (sentence, fold-set id) -> FitnessRecord.

    Concurrent callers asking for a key that is being computed wait for that
    computation instead of repeating it.
    """

    def __init__(self):
        self._store: dict[Hashable, FitnessRecord] = {}
        self._pending: dict[Hashable, threading.Event] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def __len__(self) -> int:
        return len(self._store)

    def __contains__(self, key) -> bool:
        return key in self._store

    def get(self, key) -> FitnessRecord | None:
        return self._store.get(key)

    def get_or_compute(self, key, compute: Callable[[], FitnessRecord]) -> FitnessRecord:
        while True:
            with self._lock:
                if key in self._store:
                    self.hits += 1
                    return self._store[key]
                event = self._pending.get(key)
                if event is None:
                    event = self._pending[key] = threading.Event()
                    self.misses += 1
                    break
            event.wait()
        try:
            rec = compute()
            with self._lock:
                self._store[key] = rec
            return rec
        finally:
            with self._lock:
                del self._pending[key]
            event.set()

    def invalidate(self, keep_foldset: int | None = None) -> None:
        """Drop records whose fold-set id differs from ``keep_foldset``."""
        with self._lock:
            self._store = {k: v for k, v in self._store.items() if keep_foldset is not None and k[1] == keep_foldset}


def evaluate_pipeline(
    sentence: Sequence[str],
    store: FeatureStore,
    labels,
    foldset: FoldSet,
    budget: float,
) -> FitnessRecord:
    """Mean validation MCC over the fold set; failures score 0.0.

    ``store`` holds the search molecules only.  The whole K-fold loop shares
    one wall-clock budget (seconds); learners poll it between trees.
    """
    start = time.monotonic()
    if budget <= 0:
        return FitnessRecord.failed("timeout")
    deadline = start + budget
    y = np.asarray(labels, dtype=np.int64)
    per_fold: list[float] = []
    times: list[float] = []
    try:
        spec = spec_from_sentence(sentence)
        X = store.matrix(spec.feature_groups)
        n = len(y)
        for j, val in enumerate(foldset.folds):
            t0 = time.monotonic()
            if t0 > deadline:
                raise DeadlineExceeded("budget spent")
            train = np.setdiff1d(np.arange(n), val, assume_unique=True)
            Xtr = type(X)(X.columns, X.values[train], X.groups)
            Xva = type(X)(X.columns, X.values[val], X.groups)
            rng = derive_rng(foldset.seed, "classifier", j)
            fitted = fit_pipeline(sentence, Xtr, y[train], rng, deadline)
            per_fold.append(mcc(confusion(y[val], fitted.predict(Xva))))
            times.append(time.monotonic() - t0)
        if time.monotonic() > deadline:
            raise DeadlineExceeded("budget spent")
    except DeadlineExceeded:
        return FitnessRecord.failed("timeout", per_fold, times)
    except EmptyFeatureSet:
        return FitnessRecord.failed("empty-feature-set", per_fold, times)
    except Exception:  # any bad pipeline must score 0.0, never crash the search
        return FitnessRecord.failed("train-failure", per_fold, times)
    return FitnessRecord(float(np.mean(per_fold)), tuple(per_fold), "ok", tuple(times))
