"""The six tree classifiers.

Every model exposes ``predict_proba`` (probability of class 1) and
``predict`` (label 1 when that probability is at least 0.5).  Randomness
comes only from the generator handed to :func:`fit_classifier`; per-tree
seeds are drawn up front so member order never changes the result.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import trees as K

XGB_LAMBDA = 1.0
PROBA_FLOOR = 1e-12
CLASSIFIER_KINDS = ("AdaBoost", "DecisionTree", "ExtraTree", "RandomForest", "ExtraTrees", "XGBoost")


class DeadlineExceeded(RuntimeError):
    pass


def sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(z, dtype=float)))


def logistic_grad_hess(margin: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    s = sigmoid(margin)
    return s - y, s * (1.0 - s)


def logistic_loss(margin: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.logaddexp(0.0, margin) - y * margin


@dataclass
class Tree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    def predict(self, X: np.ndarray) -> np.ndarray:
        return K.predict_tree(self.feature, self.threshold, self.left, self.right, self.value, X)

    def to_dict(self) -> dict:
        return {k: getattr(self, k).tolist() for k in ("feature", "threshold", "left", "right", "value")}

    @classmethod
    def from_dict(cls, d: dict) -> "Tree":
        ints = ("feature", "left", "right")
        return cls(**{k: np.asarray(v, dtype=np.int64 if k in ints else float) for k, v in d.items()})


@dataclass
class Model:
    kind: str
    n_features: int
    constant: float | None = None  # single-class training data
    trees: list[Tree] = field(default_factory=list)
    weights: list[float] = field(default_factory=list)  # AdaBoost alphas
    algorithm: str = ""

    def _check(self, X) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ValueError(f"column-mismatch: model expects {self.n_features} columns, got {X.shape}")
        return X

    def predict_proba(self, X) -> np.ndarray:
        X = self._check(X)
        n = X.shape[0]
        if self.constant is not None:
            return np.full(n, self.constant)
        if self.kind in ("DecisionTree", "ExtraTree"):
            return self.trees[0].predict(X)
        if self.kind in ("RandomForest", "ExtraTrees"):
            votes = np.zeros(n)
            for t in self.trees:
                votes += t.predict(X) >= 0.5
            return votes / len(self.trees)
        if self.kind == "XGBoost":
            margin = np.zeros(n)
            for t in self.trees:
                margin += t.predict(X)
            return sigmoid(margin)
        if self.kind == "AdaBoost":
            if self.algorithm == "SAMME.R":
                h = np.zeros(n)
                for t in self.trees:
                    h += _real_score(t.predict(X))
                return sigmoid(2.0 * h / len(self.trees))
            d = np.zeros(n)
            for t, a in zip(self.trees, self.weights):
                d += a * np.where(t.predict(X) >= 0.5, 1.0, -1.0)
            return sigmoid(d / sum(self.weights))
        raise ValueError(f"unknown classifier {self.kind!r}")

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(np.int64)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n_features": self.n_features,
            "constant": self.constant,
            "trees": [t.to_dict() for t in self.trees],
            "weights": list(self.weights),
            "algorithm": self.algorithm,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Model":
        return cls(
            d["kind"], d["n_features"], d["constant"],
            [Tree.from_dict(t) for t in d["trees"]], list(d["weights"]), d["algorithm"],
        )


def predict(model: Model, X) -> np.ndarray:
    return model.predict(X)


def predict_proba(model: Model, X) -> np.ndarray:
    return model.predict_proba(X)


def _real_score(p1: np.ndarray) -> np.ndarray:
    p1 = np.asarray(p1, dtype=float)
    return 0.5 * (np.log(np.maximum(p1, PROBA_FLOOR)) - np.log(np.maximum(1.0 - p1, PROBA_FLOOR)))


def _depth(params: dict) -> int:
    d = params.get("max_depth")
    return -1 if d is None else int(d)


def _tick(deadline: float | None) -> None:
    if deadline is not None and time.monotonic() > deadline:
        raise DeadlineExceeded("training deadline exceeded")


def _stump_tree(f: int, t: float, vl: float, vr: float, root: float) -> Tree:
    if f < 0:
        return Tree(np.array([-1]), np.zeros(1), np.array([-1]), np.array([-1]), np.array([root]))
    return Tree(
        np.array([f, -1, -1]), np.array([t, 0.0, 0.0]), np.array([1, -1, -1]),
        np.array([2, -1, -1]), np.array([root, vl, vr]),
    )


def _fit_cart(XT, y, w, params, n_candidates, random_split, seed) -> Tree:
    return Tree(*K.grow_cart(
        XT, y, w, _depth(params), float(params.get("min_samples_split", 2)),
        n_candidates, random_split, seed,
    ))


def _fit_adaboost(X, y, params, deadline) -> Model:
    n, p = X.shape
    algorithm = params["algorithm"]
    lr = float(params["learning_rate"])
    XT = np.ascontiguousarray(X.T)
    order = K.presort(XT)
    w = np.full(n, 1.0 / n)
    model = Model("AdaBoost", p, algorithm=algorithm)
    for _ in range(int(params["n_estimators"])):
        _tick(deadline)
        root = float(np.dot(w, y) / w.sum())
        stump = _stump_tree(*K.fit_stump(XT, order, y, w), root)
        p1 = stump.predict(X)
        miss = (p1 >= 0.5) != (y == 1)
        err = float(w[miss].sum() / w.sum())
        if algorithm == "SAMME.R":
            model.trees.append(stump)
            model.weights.append(1.0)
            if err <= 0.0:
                break
            p_true = np.where(y == 1, p1, 1.0 - p1)
            log_true = np.log(np.maximum(p_true, PROBA_FLOOR))
            log_other = np.log(np.maximum(1.0 - p_true, PROBA_FLOOR))
            w = w * np.exp(-lr * 0.5 * (log_true - log_other))
        else:
            if err <= 0.0:
                model.trees.append(stump)
                model.weights.append(1.0)
                break
            if err >= 0.5:
                break
            alpha = lr * math.log((1.0 - err) / err)
            model.trees.append(stump)
            model.weights.append(alpha)
            # same weights after normalization as exp(alpha * miss), without overflow
            w = w * np.exp(alpha * (miss - 1.0))
        total = w.sum()
        if not np.isfinite(total) or total <= 0:
            break
        w = w / total
    if not model.trees:
        # no stump better than chance: fall back to the weighted majority
        model.constant = 1.0 if float(np.dot(w, y)) >= 0.5 * w.sum() else 0.0
    return model


def _fit_xgboost(X, y, params, deadline) -> Model:
    n, p = X.shape
    lr = float(params["learning_rate"])
    if int(params["max_leaves"]) < 1:
        raise ValueError("max_leaves must be at least 1")
    XT = np.ascontiguousarray(X.T)
    order = K.presort(XT)
    margin = np.zeros(n)
    model = Model("XGBoost", p)
    for _ in range(int(params["n_estimators"])):
        _tick(deadline)
        g, h = logistic_grad_hess(margin, y)
        tree = Tree(*K.grow_gradient_tree(XT, order, g, h, _depth(params), int(params["max_leaves"]), XGB_LAMBDA, lr))
        model.trees.append(tree)
        margin += tree.predict(X)
    return model


def fit_classifier(kind: str, params: dict, X, y, rng: np.random.Generator, deadline: float | None = None) -> Model:
    """Train one classifier; ``deadline`` is a ``time.monotonic()`` instant."""
    X = np.ascontiguousarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ValueError("X and y are not aligned")
    if not np.all(np.isfinite(X)):
        raise ValueError("X contains non-finite values")
    if kind not in CLASSIFIER_KINDS:
        raise ValueError(f"unknown classifier {kind!r}")
    n, p = X.shape
    if n == 0:
        raise ValueError("no training rows")
    _tick(deadline)
    classes = np.unique(y)
    if classes.size == 1:
        return Model(kind, p, constant=float(classes[0]))
    if not set(classes.tolist()) <= {0.0, 1.0}:
        raise ValueError("labels must be 0/1")

    sqrt_p = max(1, int(math.sqrt(p)))
    XT = np.ascontiguousarray(X.T)
    if kind == "DecisionTree":
        seed = int(rng.integers(2**31))
        return Model(kind, p, trees=[_fit_cart(XT, y, np.ones(n), params, p, False, seed)])
    if kind == "ExtraTree":
        seed = int(rng.integers(2**31))
        return Model(kind, p, trees=[_fit_cart(XT, y, np.ones(n), params, sqrt_p, True, seed)])
    if kind in ("RandomForest", "ExtraTrees"):
        m = int(params["n_estimators"])
        seeds = rng.integers(2**31, size=m)
        model = Model(kind, p)
        for s in seeds:
            _tick(deadline)
            if kind == "RandomForest":
                sub = np.random.default_rng(int(s))
                w = np.bincount(sub.integers(n, size=n), minlength=n).astype(float)
                model.trees.append(_fit_cart(XT, y, w, params, sqrt_p, False, int(s)))
            else:
                model.trees.append(_fit_cart(XT, y, np.ones(n), params, sqrt_p, True, int(s)))
        return model
    if kind == "AdaBoost":
        return _fit_adaboost(X, y, params, deadline)
    return _fit_xgboost(X, y, params, deadline)
