"""Regenerate src/molggp/data/grammar.bnf.

The numeric domains are long enumerations, so the file is produced from the
ranges below instead of being edited by hand.  Run from the repo root:

    python scripts/make_grammar.py
"""
from __future__ import annotations

import itertools
from pathlib import Path

GROUPS = [
    "General_Descriptors",
    "Advanced_Descriptors",
    "Graph-based_Signatures",
    "Toxicophores",
    "Fragments",
]


def num(value: float) -> str:
    # whole numbers keep one decimal ("0.0", "1.0", "2.0"), the rest two
    if abs(value - round(value)) < 1e-9:
        return f"{round(value)}.0"
    return f"{value:.2f}"


def alts(tokens) -> str:
    return " | ".join(str(t) for t in tokens)


def build() -> str:
    combos = [
        " ".join(c)
        for size in range(1, len(GROUPS) + 1)
        for c in itertools.combinations(GROUPS, size)
    ]
    n_estimators = (
        list(range(5, 301, 5)) + list(range(500, 1001, 50)) + [1500, 2000, 2500, 3000]
    )
    learning_rate = [num(i / 100) for i in range(1, 201)]
    threshold = [num(i * 0.05) for i in range(0, 21)]

    lines = [
        "# Pipeline search space: featurization, optional scaling, optional",
        "# feature selection, and a tree-ensemble classifier.",
        "# Generated by scripts/make_grammar.py; edit the script, not this file.",
        "",
        "<Start> ::= <feature_definition> [<feature_scaling>] [<feature_selection>] <ML_algorithms>",
        "",
        "<feature_definition> ::= " + combos[0],
    ]
    lines += [f"    | {c}" for c in combos[1:]]
    lines += [
        "",
        "<feature_scaling> ::= <Normalizer> | <MinMaxScaler> | <MaxAbsScaler> | <RobustScaler> | <StandardScaler>",
        "<Normalizer> ::= Normalizer <norm>",
        "<norm> ::= l1 | l2 | max",
        "<MinMaxScaler> ::= MinMaxScaler",
        "<MaxAbsScaler> ::= MaxAbsScaler",
        "<RobustScaler> ::= RobustScaler <with_centering> <with_scaling>",
        "<with_centering> ::= True | False",
        "<with_scaling> ::= True | False",
        "<StandardScaler> ::= StddScaler <with_mean> <with_std>",
        "<with_mean> ::= True | False",
        "<with_std> ::= True | False",
        "",
        "<feature_selection> ::= <Variance_Threshold> | <Select_Percentile> | <SelectFPR> | <SelectFWE> | <SelectFDR>",
        "<Variance_Threshold> ::= VarianceThreshold <threshold>",
        "<threshold> ::= " + alts(threshold),
        "<Select_Percentile> ::= SelectPercentile <percentile>",
        "<percentile> ::= " + alts(range(10, 91, 10)),
        "<SelectFPR> ::= SelectFPR <alpha>",
        "<SelectFWE> ::= SelectFWE <alpha>",
        "<SelectFDR> ::= SelectFDR <alpha>",
        "<alpha> ::= 0.01 | 0.05 | 0.10",
        "",
        "<ML_algorithms> ::= <AdaBoost> | <DecisionTree> | <ExtraTree> | <RandomForest> | <ExtraTrees> | <XGBoost>",
        "<AdaBoost> ::= AdaBoost <algorithm> <n_estimators> <learning_rate>",
        "<algorithm> ::= SAMME.R | SAMME",
        "<DecisionTree> ::= DecisionTree <max_depth> <min_samples_split>",
        "<ExtraTree> ::= ExtraTree <max_depth> <min_samples_split>",
        "<RandomForest> ::= RandomForest <n_estimators> <max_depth> <min_samples_split>",
        "<ExtraTrees> ::= ExtraTrees <n_estimators> <max_depth> <min_samples_split>",
        "<XGBoost> ::= XGBoost <n_estimators> <max_depth> <max_leaves> <learning_rate>",
        "<n_estimators> ::= " + alts(n_estimators),
        "<learning_rate> ::= " + alts(learning_rate),
        "<max_depth> ::= " + alts(list(range(1, 11)) + ["None"]),
        "<max_leaves> ::= " + alts(range(1, 11)),
        "<min_samples_split> ::= " + alts(range(2, 11)),
        "",
    ]
    return "\n".join(lines)


if __name__ == "__main__":
    out = Path(__file__).resolve().parents[1] / "src" / "molggp" / "data" / "grammar.bnf"
    out.write_text(build(), encoding="utf-8")
    print(f"wrote {out}")
