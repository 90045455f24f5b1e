"""Selection-frequency tables over chosen pipelines."""
from __future__ import annotations

from collections import Counter
from typing import Sequence

from .ml.pipeline_spec import spec_from_sentence

TABLES = ("feature_groups", "scaler", "selector", "classifier")


def component_counts(sentences: Sequence[Sequence[str]]) -> dict[str, Counter]:
    """Per table, how many pipelines chose each option ("none" when absent)."""
    out = {t: Counter() for t in TABLES}
    for tokens in sentences:
        spec = spec_from_sentence(tokens)
        out["feature_groups"]["+".join(spec.feature_groups)] += 1
        out["scaler"][spec.scaler.kind if spec.scaler else "none"] += 1
        out["selector"][spec.selector.kind if spec.selector else "none"] += 1
        out["classifier"][spec.classifier.kind] += 1
    return out


def selection_frequencies(sentences: Sequence[Sequence[str]]) -> dict[str, dict[str, float]]:
    n = len(sentences)
    if n == 0:
        raise ValueError("no pipelines to analyze")
    return {
        t: {k: c / n for k, c in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))}
        for t, counts in component_counts(sentences).items()
    }


def frequencies_markdown(freqs: dict[str, dict[str, float]]) -> str:
    lines = []
    for table, rows in freqs.items():
        lines += [f"## {table}", "", "| option | frequency |", "|---|---|"]
        lines += [f"| {k} | {v:.3f} |" for k, v in rows.items()]
        lines.append("")
    return "\n".join(lines)
