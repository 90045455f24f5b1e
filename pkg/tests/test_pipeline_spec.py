import numpy as np
import pytest

from molggp.chem.featurize import GROUPS
from molggp.grammar import random_derivation, sentence
from molggp.ml.pipeline_spec import (
    CLASSIFIERS,
    SCALERS,
    SELECTORS,
    SpecError,
    format_param,
    parse_param,
    sentence_from_spec,
    spec_from_sentence,
)


def test_round_trip_10000_random_sentences(grammar):
    rng = np.random.default_rng(99)
    seen = set()
    for _ in range(10_000):
        tokens = sentence(random_derivation(grammar, rng))
        spec = spec_from_sentence(tokens)
        assert sentence_from_spec(spec) == tokens
        assert set(spec.feature_groups) <= set(GROUPS)
        seen.add(spec.classifier.kind)
        if spec.scaler:
            seen.add(spec.scaler.kind)
        if spec.selector:
            seen.add(spec.selector.kind)
    assert seen == set(CLASSIFIERS) | set(SCALERS) | set(SELECTORS)


def test_grammar_tokens_map_to_kinds():
    spec = spec_from_sentence(
        ["Toxicophores", "StddScaler", "True", "False", "SelectFDR", "0.05", "XGBoost", "100", "None", "4", "0.1"]
    )
    assert spec.scaler.kind == "StandardScaler"
    assert spec.scaler.params == {"with_mean": True, "with_std": False}
    assert spec.classifier.params == {"n_estimators": 100, "max_depth": None, "max_leaves": 4, "learning_rate": 0.1}


def test_float_formatting():
    assert format_param("alpha", 1.0) == "1.0"
    assert format_param("alpha", 0.05) == "0.05"
    assert format_param("max_depth", None) == "None"


@pytest.mark.parametrize(
    "tokens",
    [
        [],
        ["DecisionTree", "None", "2"],
        ["Fragments"],
        ["Fragments", "DecisionTree", "None"],
        ["Fragments", "DecisionTree", "None", "2", "extra"],
        ["Fragments", "Normalizer", "l2", "SVM"],
    ],
)
def test_malformed_sentences(tokens):
    with pytest.raises(SpecError):
        spec_from_sentence(tokens)


def test_bad_parameter_values():
    with pytest.raises(SpecError):
        parse_param("with_mean", "yes")
    with pytest.raises(SpecError):
        parse_param("n_estimators", "many")
    with pytest.raises(SpecError):
        parse_param("colour", "red")
