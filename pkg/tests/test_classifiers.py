import math
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from molggp.ml.classifiers import (
    CLASSIFIER_KINDS,
    DeadlineExceeded,
    Model,
    fit_classifier,
    logistic_grad_hess,
    logistic_loss,
)

PARAMS = {
    "AdaBoost": {"algorithm": "SAMME", "n_estimators": 20, "learning_rate": 1.0},
    "DecisionTree": {"max_depth": None, "min_samples_split": 2},
    "ExtraTree": {"max_depth": None, "min_samples_split": 2},
    "RandomForest": {"n_estimators": 10, "max_depth": None, "min_samples_split": 2},
    "ExtraTrees": {"n_estimators": 10, "max_depth": None, "min_samples_split": 2},
    "XGBoost": {"n_estimators": 20, "max_depth": 3, "max_leaves": 8, "learning_rate": 0.3},
}


def toy(n=60, p=4, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, p))
    y = (X[:, 0] + 0.5 * X[:, 1] > 0).astype(int)
    return X, y


@given(st.lists(st.floats(-30, 30), min_size=1, max_size=20), st.data())
def test_gradient_and_hessian_match_finite_differences(margins, data):
    m = np.array(margins)
    y = np.array(data.draw(st.lists(st.integers(0, 1), min_size=len(m), max_size=len(m))), dtype=float)
    g, h = logistic_grad_hess(m, y)
    eps = 1e-5
    g_fd = (logistic_loss(m + eps, y) - logistic_loss(m - eps, y)) / (2 * eps)
    h_fd = (logistic_grad_hess(m + eps, y)[0] - logistic_grad_hess(m - eps, y)[0]) / (2 * eps)
    assert np.allclose(g, g_fd, atol=1e-6)
    assert np.allclose(h, h_fd, atol=1e-6)


@pytest.mark.parametrize("kind", CLASSIFIER_KINDS)
def test_proba_bounds_and_label_rule(kind):
    X, y = toy()
    model = fit_classifier(kind, PARAMS[kind], X, y, np.random.default_rng(1))
    p = model.predict_proba(X)
    assert p.shape == (len(y),) and ((p >= 0) & (p <= 1)).all()
    assert np.array_equal(model.predict(X), (p >= 0.5).astype(int))
    assert (model.predict(X) == y).mean() > 0.8


@pytest.mark.parametrize("kind", CLASSIFIER_KINDS)
def test_same_seed_same_model(kind):
    X, y = toy(seed=3)
    a = fit_classifier(kind, PARAMS[kind], X, y, np.random.default_rng(5))
    b = fit_classifier(kind, PARAMS[kind], X, y, np.random.default_rng(5))
    assert np.array_equal(a.predict_proba(X), b.predict_proba(X))


@pytest.mark.parametrize("kind", CLASSIFIER_KINDS)
def test_single_class_gives_constant_model(kind):
    X, _ = toy()
    model = fit_classifier(kind, PARAMS[kind], X, np.ones(len(X), dtype=int), np.random.default_rng(0))
    assert np.array_equal(model.predict(X[:5]), np.ones(5))


@pytest.mark.parametrize("kind", CLASSIFIER_KINDS)
def test_serialization_round_trip(kind):
    X, y = toy()
    model = fit_classifier(kind, PARAMS[kind], X, y, np.random.default_rng(2))
    again = Model.from_dict(model.to_dict())
    assert np.array_equal(model.predict_proba(X), again.predict_proba(X))


def test_column_mismatch():
    X, y = toy()
    model = fit_classifier("DecisionTree", PARAMS["DecisionTree"], X, y, np.random.default_rng(0))
    with pytest.raises(ValueError, match="column-mismatch"):
        model.predict(X[:, :3])


def test_decision_tree_learns_xor():
    g = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    X = np.repeat(g, 5, axis=0)
    y = np.repeat([0, 1, 1, 0], 5)
    model = fit_classifier("DecisionTree", PARAMS["DecisionTree"], X, y, np.random.default_rng(0))
    assert np.array_equal(model.predict(g), [0, 1, 1, 0])


@settings(max_examples=25)
@given(st.integers(0, 10_000))
def test_tree_models_invariant_under_monotone_feature_maps(seed):
    X, y = toy(40, 3, seed)
    Z = np.column_stack([np.exp(X[:, 0]), X[:, 1] ** 3, 2 * X[:, 2] - 7])
    for kind in ("DecisionTree", "AdaBoost", "XGBoost"):
        a = fit_classifier(kind, PARAMS[kind], X, y, np.random.default_rng(seed))
        b = fit_classifier(kind, PARAMS[kind], Z, y, np.random.default_rng(seed))
        assert np.allclose(a.predict_proba(X), b.predict_proba(Z), atol=1e-12), kind


def test_forest_is_a_hard_vote_of_its_trees():
    X, y = toy()
    params = dict(PARAMS["RandomForest"], n_estimators=3, max_depth=1)
    model = fit_classifier("RandomForest", params, X, y, np.random.default_rng(4))
    votes = np.mean([t.predict(X) >= 0.5 for t in model.trees], axis=0)
    assert np.array_equal(model.predict_proba(X), votes)
    assert set(np.round(votes * 3).tolist()) <= {0.0, 1.0, 2.0, 3.0}


def test_zero_round_boosting_is_half():
    X, y = toy()
    model = fit_classifier("XGBoost", dict(PARAMS["XGBoost"], n_estimators=0), X, y, np.random.default_rng(0))
    assert np.array_equal(model.predict_proba(X), np.full(len(X), 0.5))


def test_samme_weight_on_six_points():
    X = np.arange(1.0, 7.0).reshape(-1, 1)
    y = np.array([0, 0, 1, 0, 1, 1])
    params = {"algorithm": "SAMME", "n_estimators": 1, "learning_rate": 1.0}
    model = fit_classifier("AdaBoost", params, X, y, np.random.default_rng(0))
    # weighted error 1/6; thresholds 2.5 and 4.5 tie and the lower one wins
    assert model.weights[0] == pytest.approx(math.log(5))
    assert model.trees[0].threshold[0] == 2.5


def test_samme_r_runs_and_bounds():
    X, y = toy()
    params = {"algorithm": "SAMME.R", "n_estimators": 10, "learning_rate": 0.5}
    p = fit_classifier("AdaBoost", params, X, y, np.random.default_rng(0)).predict_proba(X)
    assert ((p > 0) & (p < 1)).all()


def test_expired_deadline_raises():
    X, y = toy()
    with pytest.raises(DeadlineExceeded):
        fit_classifier("RandomForest", PARAMS["RandomForest"], X, y, np.random.default_rng(0), time.monotonic() - 1)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        fit_classifier("XGBoost", dict(PARAMS["XGBoost"], max_leaves=0), *toy(), np.random.default_rng(0))
    X, y = toy()
    with pytest.raises(ValueError):
        fit_classifier("DecisionTree", PARAMS["DecisionTree"], X[:10], y, np.random.default_rng(0))
    bad = X.copy()
    bad[0, 0] = np.nan
    with pytest.raises(ValueError):
        fit_classifier("DecisionTree", PARAMS["DecisionTree"], bad, y, np.random.default_rng(0))
    with pytest.raises(ValueError):
        fit_classifier("SVM", {}, X, y, np.random.default_rng(0))
