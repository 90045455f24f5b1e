"""Rank-based comparison of several methods over several datasets.

Average ranks, the Friedman test with the Iman-Davenport F correction, and
the Nemenyi critical difference (Demsar, JMLR 7, 2006).
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .special import f_sf

# Critical values q_alpha for the two-tailed Nemenyi test: studentized range
# statistic divided by sqrt(2), k = 2..10 (Demsar 2006, Table 5a).
NEMENYI_Q = {
    0.05: (1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164),
    0.10: (1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920),
}


@dataclass
class ScoreTable:
    methods: list[str]
    datasets: list[str]
    scores: np.ndarray  # (N datasets, k methods), higher is better

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=float)
        n, k = self.scores.shape
        if k != len(self.methods) or n != len(self.datasets):
            raise ValueError("score matrix does not match method/dataset names")
        if k < 2 or n < 2:
            raise ValueError("need at least 2 methods and 2 datasets")
        if not np.all(np.isfinite(self.scores)):
            raise ValueError("score table has missing or non-finite entries")

    @classmethod
    def from_csv(cls, path: str | Path) -> "ScoreTable":
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        if len(rows) < 2:
            raise ValueError(f"{path}: empty score table")
        header = rows[0]
        body = [r for r in rows[1:] if r]
        try:
            scores = [[float(v) for v in r[1:]] for r in body]
        except ValueError as exc:
            raise ValueError(f"{path}: non-numeric score ({exc})") from None
        if any(len(r) != len(header) - 1 for r in scores):
            raise ValueError(f"{path}: ragged rows")
        return cls(header[1:], [r[0] for r in body], np.array(scores))


def _midranks(row: np.ndarray) -> np.ndarray:
    # rank 1 = highest score; ties share the mean of the ranks they span
    order = np.argsort(-row, kind="stable")
    ranks = np.empty(len(row))
    i = 0
    while i < len(row):
        j = i
        while j + 1 < len(row) and row[order[j + 1]] == row[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def rank_matrix(t: ScoreTable) -> np.ndarray:
    return np.vstack([_midranks(row) for row in t.scores])


def average_ranks(t: ScoreTable) -> np.ndarray:
    return rank_matrix(t).mean(axis=0)


@dataclass
class FriedmanResult:
    chi2: float
    f_stat: float
    p_value: float
    degenerate: bool = False


def friedman_iman_davenport(ranks: Sequence[float], n: int, k: int) -> FriedmanResult:
    """Friedman chi-square, its Iman-Davenport F form, and the F p-value."""
    if n < 2 or k < 2:
        raise ValueError("need N >= 2 and k >= 2")
    r = np.asarray(ranks, dtype=float)
    if len(r) != k:
        raise ValueError("expected one average rank per method")
    chi2 = 12.0 * n / (k * (k + 1)) * (float(np.sum(r**2)) - k * (k + 1) ** 2 / 4.0)
    chi2 = max(chi2, 0.0)
    denom = n * (k - 1) - chi2
    if denom <= 0:
        return FriedmanResult(chi2, math.inf, 0.0, degenerate=True)
    f_stat = (n - 1) * chi2 / denom
    p = f_sf(f_stat, k - 1, (k - 1) * (n - 1))
    return FriedmanResult(chi2, f_stat, p)


def nemenyi_cd(k: int, n: int, alpha: float = 0.05) -> float:
    if alpha not in NEMENYI_Q:
        raise ValueError(f"alpha must be one of {sorted(NEMENYI_Q)}")
    if not 2 <= k <= 10:
        raise ValueError("Nemenyi q table covers k = 2..10 only")
    if n < 2:
        raise ValueError("need N >= 2")
    q = NEMENYI_Q[alpha][k - 2]
    return q * math.sqrt(k * (k + 1) / (6.0 * n))


def significance_matrix(ranks: Sequence[float], cd: float) -> np.ndarray:
    r = np.asarray(ranks, dtype=float)
    diff = np.abs(r[:, None] - r[None, :])
    return diff >= cd


@dataclass
class Comparison:
    table: ScoreTable
    ranks: np.ndarray
    friedman: FriedmanResult
    cd: float
    alpha: float
    significant: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["statistic", "value"])
        for m, r in zip(self.table.methods, self.ranks):
            w.writerow([f"rank:{m}", f"{r:.6f}"])
        w.writerow(["chi2_F", f"{self.friedman.chi2:.6f}"])
        w.writerow(["F_F", f"{self.friedman.f_stat:.6f}"])
        w.writerow(["p_value", f"{self.friedman.p_value:.6g}"])
        w.writerow(["critical_difference", f"{self.cd:.6f}"])
        w.writerow([])
        w.writerow(["method"] + self.table.methods)
        for m, row in zip(self.table.methods, self.significant):
            w.writerow([m] + [str(bool(v)).lower() for v in row])
        return buf.getvalue()

    def to_markdown(self) -> str:
        methods = self.table.methods
        lines = [
            f"# Comparison of {len(methods)} methods over {len(self.table.datasets)} datasets",
            "",
            "| Method | Average rank |",
            "|---|---|",
        ]
        lines += [f"| {m} | {r:.3f} |" for m, r in zip(methods, self.ranks)]
        fr = self.friedman
        lines += [
            "",
            f"- Friedman chi2_F = {fr.chi2:.4f}",
            f"- Iman-Davenport F_F = {fr.f_stat:.4f}",
            f"- p-value = {fr.p_value:.6g}" + (" (degenerate statistic)" if fr.degenerate else ""),
            f"- Nemenyi critical difference (alpha={self.alpha}) = {self.cd:.4f}",
            "",
            "Pairwise |rank difference| >= CD:",
            "",
            "| | " + " | ".join(methods) + " |",
            "|---" * (len(methods) + 1) + "|",
        ]
        for i, (m, row) in enumerate(zip(methods, self.significant)):
            cells = ["-" if i == j else ("yes" if v else "no") for j, v in enumerate(row)]
            lines.append(f"| {m} | " + " | ".join(cells) + " |")
        return "\n".join(lines) + "\n"


def compare(t: ScoreTable, alpha: float = 0.05) -> Comparison:
    n, k = t.scores.shape
    ranks = average_ranks(t)
    fr = friedman_iman_davenport(ranks, n, k)
    cd = nemenyi_cd(k, n, alpha)
    return Comparison(t, ranks, fr, cd, alpha, significance_matrix(ranks, cd))
