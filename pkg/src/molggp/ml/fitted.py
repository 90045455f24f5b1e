"""A trained pipeline: scaler state, selector mask and classifier."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from ..chem.featurize import FeatureMatrix
from ..grammar import Grammar, load_grammar, parse_sentence
from .classifiers import Model, fit_classifier
from .pipeline_spec import PipelineSpec, spec_from_sentence
from .preprocess import ScalerState, apply_scaler, apply_selector, fit_scaler, fit_selector

DUMP_FORMAT = "molggp-fitted-pipeline"
DUMP_VERSION = 1


class EmptyFeatureSet(ValueError):
    """The selector kept no columns."""


@dataclass
class FittedPipeline:
    sentence: list[str]
    columns: list[str]  # training-time input columns, in order
    scaler: ScalerState | None
    mask: np.ndarray  # kept-column indices after scaling
    model: Model

    @property
    def spec(self) -> PipelineSpec:
        return spec_from_sentence(self.sentence)

    def transform(self, X: FeatureMatrix) -> np.ndarray:
        if list(X.columns) != self.columns:
            raise ValueError("column-mismatch: feature columns differ from training")
        A = X.values
        if self.scaler is not None:
            A = apply_scaler(self.scaler, A)
        return A[:, self.mask]

    def predict_proba(self, X: FeatureMatrix) -> np.ndarray:
        return self.model.predict_proba(self.transform(X))

    def predict(self, X: FeatureMatrix) -> np.ndarray:
        return self.model.predict(self.transform(X))

    def to_dict(self) -> dict:
        return {
            "format": DUMP_FORMAT,
            "version": DUMP_VERSION,
            "sentence": " ".join(self.sentence),
            "columns": self.columns,
            "scaler": None if self.scaler is None else self.scaler.to_dict(),
            "mask": self.mask.tolist(),
            "model": self.model.to_dict(),
        }

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path, grammar: Grammar | None = None) -> "FittedPipeline":
        d = json.loads(Path(path).read_text(encoding="utf-8"))
        if d.get("format") != DUMP_FORMAT or d.get("version") != DUMP_VERSION:
            raise ValueError(f"unsupported dump format {d.get('format')!r} v{d.get('version')!r}")
        tokens = d["sentence"].split()
        parse_sentence(grammar or load_grammar(), tokens)  # raises SentenceError
        scaler = None if d["scaler"] is None else ScalerState.from_dict(d["scaler"])
        return cls(tokens, list(d["columns"]), scaler, np.asarray(d["mask"], dtype=np.int64), Model.from_dict(d["model"]))


def fit_pipeline(
    sentence: Sequence[str],
    X: FeatureMatrix,
    y,
    rng: np.random.Generator,
    deadline: float | None = None,
) -> FittedPipeline:
    """Fit scaler, selector and classifier of ``sentence`` on ``X``.

    ``X`` must already hold exactly the sentence's feature groups.
    """
    spec = spec_from_sentence(sentence)
    A = X.values
    scaler = None
    if spec.scaler is not None:
        scaler = fit_scaler(spec.scaler.kind, spec.scaler.params, A)
        A = apply_scaler(scaler, A)
    if spec.selector is not None:
        keep = np.flatnonzero(fit_selector(spec.selector.kind, spec.selector.params, A, y))
    else:
        keep = np.arange(A.shape[1])
    if keep.size == 0:
        raise EmptyFeatureSet("selector removed every column")
    A = apply_selector(np.isin(np.arange(A.shape[1]), keep), A)
    model = fit_classifier(spec.classifier.kind, spec.classifier.params, A, y, rng, deadline)
    return FittedPipeline(list(sentence), list(X.columns), scaler, keep, model)
