"""Structured view of a pipeline sentence and the mapping back to tokens."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

from ..chem.featurize import GROUPS

# kind -> (grammar token, parameter names in sentence order)
SCALERS = {
    "Normalizer": ("Normalizer", ("norm",)),
    "MinMaxScaler": ("MinMaxScaler", ()),
    "MaxAbsScaler": ("MaxAbsScaler", ()),
    "RobustScaler": ("RobustScaler", ("with_centering", "with_scaling")),
    "StandardScaler": ("StddScaler", ("with_mean", "with_std")),
}
SELECTORS = {
    "VarianceThreshold": ("VarianceThreshold", ("threshold",)),
    "SelectPercentile": ("SelectPercentile", ("percentile",)),
    "SelectFPR": ("SelectFPR", ("alpha",)),
    "SelectFWE": ("SelectFWE", ("alpha",)),
    "SelectFDR": ("SelectFDR", ("alpha",)),
}
CLASSIFIERS = {
    "AdaBoost": ("AdaBoost", ("algorithm", "n_estimators", "learning_rate")),
    "DecisionTree": ("DecisionTree", ("max_depth", "min_samples_split")),
    "ExtraTree": ("ExtraTree", ("max_depth", "min_samples_split")),
    "RandomForest": ("RandomForest", ("n_estimators", "max_depth", "min_samples_split")),
    "ExtraTrees": ("ExtraTrees", ("n_estimators", "max_depth", "min_samples_split")),
    "XGBoost": ("XGBoost", ("n_estimators", "max_depth", "max_leaves", "learning_rate")),
}

_BOOL = {"with_centering", "with_scaling", "with_mean", "with_std"}
_FLOAT = {"threshold", "alpha", "learning_rate"}
_INT = {"percentile", "n_estimators", "max_leaves", "min_samples_split"}
_STR = {"norm", "algorithm"}


class SpecError(ValueError):
    pass


def parse_param(name: str, token: str) -> Any:
    if name in _BOOL:
        if token not in ("True", "False"):
            raise SpecError(f"{name}: expected True/False, got {token!r}")
        return token == "True"
    try:
        if name in _FLOAT:
            return float(token)
        if name in _INT:
            return int(token)
        if name == "max_depth":
            return None if token == "None" else int(token)
    except ValueError:
        raise SpecError(f"{name}: bad value {token!r}") from None
    if name in _STR:
        return token
    raise SpecError(f"unknown parameter {name!r}")


def format_param(name: str, value: Any) -> str:
    if name in _FLOAT:
        v = float(value)
        return f"{v:.1f}" if v == int(v) else f"{v:.2f}"
    if value is None:
        return "None"
    return str(value)


@dataclass(frozen=True)
class Component:
    kind: str
    params: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class PipelineSpec:
    feature_groups: tuple[str, ...]
    scaler: Component | None
    selector: Component | None
    classifier: Component


def _take(tokens: Sequence[str], pos: int, table: dict, what: str) -> tuple[Component, int]:
    head = tokens[pos]
    for kind, (token, names) in table.items():
        if token == head:
            values = tokens[pos + 1 : pos + 1 + len(names)]
            if len(values) < len(names):
                raise SpecError(f"{what} {kind}: missing parameters")
            params = {n: parse_param(n, v) for n, v in zip(names, values)}
            return Component(kind, params), pos + 1 + len(names)
    raise SpecError(f"expected {what} at token {pos}, got {head!r}")


def spec_from_sentence(tokens: Sequence[str]) -> PipelineSpec:
    """Read a terminal sequence of the shipped grammar into a PipelineSpec."""
    tokens = list(tokens)
    pos = 0
    groups = []
    while pos < len(tokens) and tokens[pos] in GROUPS:
        groups.append(tokens[pos])
        pos += 1
    if not groups:
        raise SpecError("sentence has no feature groups")
    scaler = selector = None
    scaler_heads = {t for t, _ in SCALERS.values()}
    selector_heads = {t for t, _ in SELECTORS.values()}
    if pos < len(tokens) and tokens[pos] in scaler_heads:
        scaler, pos = _take(tokens, pos, SCALERS, "scaler")
    if pos < len(tokens) and tokens[pos] in selector_heads:
        selector, pos = _take(tokens, pos, SELECTORS, "selector")
    if pos >= len(tokens):
        raise SpecError("sentence has no classifier")
    classifier, pos = _take(tokens, pos, CLASSIFIERS, "classifier")
    if pos != len(tokens):
        raise SpecError(f"trailing tokens from position {pos}")
    return PipelineSpec(tuple(groups), scaler, selector, classifier)


def _emit(c: Component, table: dict) -> list[str]:
    token, names = table[c.kind]
    return [token] + [format_param(n, c.params[n]) for n in names]


def sentence_from_spec(spec: PipelineSpec) -> list[str]:
    out = list(spec.feature_groups)
    if spec.scaler is not None:
        out += _emit(spec.scaler, SCALERS)
    if spec.selector is not None:
        out += _emit(spec.selector, SELECTORS)
    return out + _emit(spec.classifier, CLASSIFIERS)
