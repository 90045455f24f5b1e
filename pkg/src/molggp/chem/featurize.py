"""Assemble descriptor groups into a feature matrix."""
from __future__ import annotations

import csv
import hashlib
import itertools
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .descriptors import (
    ADVANCED_NAMES,
    DEFAULT_MAX_DISTANCE,
    GENERAL_NAMES,
    advanced_descriptors,
    general_descriptors,
    graph_signatures,
    signature_names,
)
from .graph import shortest_paths
from .patterns import FRAGMENTS, TOXICOPHORES
from .smiles import Molecule, SmilesError, parse_smiles

# canonical order; the names double as grammar terminals
GROUPS = (
    "General_Descriptors",
    "Advanced_Descriptors",
    "Graph-based_Signatures",
    "Toxicophores",
    "Fragments",
)
PREFIX = {
    "General_Descriptors": "general",
    "Advanced_Descriptors": "advanced",
    "Graph-based_Signatures": "signatures",
    "Toxicophores": "toxicophores",
    "Fragments": "fragments",
}


class FeaturizeError(ValueError):
    def __init__(self, row: int, cause: Exception):
        self.row = row
        self.cause = cause
        super().__init__(f"molecule {row}: {cause}")


def group_combinations() -> list[tuple[str, ...]]:
    """Every nonempty subset of the groups, in canonical order."""
    return [c for r in range(1, len(GROUPS) + 1) for c in itertools.combinations(GROUPS, r)]


def canonical_groups(groups: Sequence[str]) -> tuple[str, ...]:
    unknown = set(groups) - set(GROUPS)
    if unknown:
        raise ValueError(f"unknown feature group(s): {sorted(unknown)}")
    if not groups:
        raise ValueError("at least one feature group is required")
    return tuple(g for g in GROUPS if g in set(groups))


def group_names(group: str, max_distance: int = DEFAULT_MAX_DISTANCE) -> list[str]:
    if group == "General_Descriptors":
        names = GENERAL_NAMES
    elif group == "Advanced_Descriptors":
        names = ADVANCED_NAMES
    elif group == "Graph-based_Signatures":
        names = signature_names(max_distance)
    elif group == "Toxicophores":
        names = TOXICOPHORES.names
    elif group == "Fragments":
        names = FRAGMENTS.names
    else:
        raise ValueError(f"unknown feature group {group!r}")
    return [f"{PREFIX[group]}:{n}" for n in names]


def group_vector(m: Molecule, group: str, max_distance: int = DEFAULT_MAX_DISTANCE, dist=None) -> np.ndarray:
    if group == "General_Descriptors":
        v = general_descriptors(m)
    elif group == "Advanced_Descriptors":
        v = advanced_descriptors(m, dist)
    elif group == "Graph-based_Signatures":
        v = graph_signatures(m, max_distance, dist)
    elif group == "Toxicophores":
        v = TOXICOPHORES.counts(m)
    elif group == "Fragments":
        v = FRAGMENTS.counts(m)
    else:
        raise ValueError(f"unknown feature group {group!r}")
    return np.where(np.isfinite(v), v, 0.0)


@dataclass
class FeatureMatrix:
    columns: list[str]
    values: np.ndarray  # (molecules, columns)
    groups: list[str]  # provenance tag per column

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.columns)
            for row in self.values:
                w.writerow([repr(float(v)) for v in row])

    @classmethod
    def from_csv(cls, path: str | Path) -> "FeatureMatrix":
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        columns = rows[0]
        values = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float).reshape(-1, len(columns))
        inverse = {v: k for k, v in PREFIX.items()}
        return cls(columns, values, [inverse[c.split(":", 1)[0]] for c in columns])


def _as_molecules(molecules: Sequence[Molecule | str]) -> list[Molecule]:
    out = []
    for row, m in enumerate(molecules):
        if isinstance(m, Molecule):
            out.append(m)
            continue
        try:
            out.append(parse_smiles(m))
        except SmilesError as exc:
            raise FeaturizeError(row, exc) from exc
    return out


def cache_key(smiles: Sequence[str], groups: Sequence[str], max_distance: int) -> str:
    h = hashlib.sha256()
    for s in smiles:
        h.update(s.encode("utf-8") + b"\n")
    h.update(("|".join(groups) + f"|D={max_distance}").encode("utf-8"))
    return h.hexdigest()


def featurize(
    molecules: Sequence[Molecule | str],
    groups: Sequence[str],
    max_distance: int = DEFAULT_MAX_DISTANCE,
    cache_dir: str | Path | None = None,
) -> FeatureMatrix:
    """Concatenate the selected groups' vectors for every molecule."""
    groups = canonical_groups(groups)
    mols = _as_molecules(molecules)
    path = None
    if cache_dir is not None:
        key = cache_key([m.smiles for m in mols], groups, max_distance)
        path = Path(cache_dir) / f"features-{key[:24]}.csv"
        if path.is_file():
            return FeatureMatrix.from_csv(path)
    columns: list[str] = []
    tags: list[str] = []
    for g in groups:
        names = group_names(g, max_distance)
        columns += names
        tags += [g] * len(names)
    rows = []
    for m in mols:
        dist = shortest_paths(m)
        rows.append(np.concatenate([group_vector(m, g, max_distance, dist) for g in groups]))
    values = np.vstack(rows) if rows else np.zeros((0, len(columns)))
    fm = FeatureMatrix(columns, values, tags)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        fm.to_csv(path)
    return fm


class FeatureStore:
    """Per-group feature blocks for a fixed molecule list, computed once.

    Safe to share between evaluator threads: each block is built under a
    lock and never mutated afterwards.
    """

    def __init__(self, molecules: Sequence[Molecule], max_distance: int = DEFAULT_MAX_DISTANCE):
        self.molecules = list(molecules)
        self.max_distance = max_distance
        self._blocks: dict[str, np.ndarray] = {}
        self._dist: list[np.ndarray] | None = None
        self._lock = threading.Lock()

    def _distances(self) -> list[np.ndarray]:
        if self._dist is None:
            self._dist = [shortest_paths(m) for m in self.molecules]
        return self._dist

    def block(self, group: str) -> np.ndarray:
        with self._lock:
            if group not in self._blocks:
                dist = self._distances()
                rows = [group_vector(m, group, self.max_distance, d) for m, d in zip(self.molecules, dist)]
                width = len(group_names(group, self.max_distance))
                self._blocks[group] = np.vstack(rows) if rows else np.zeros((0, width))
            return self._blocks[group]

    def matrix(self, groups: Sequence[str]) -> FeatureMatrix:
        groups = canonical_groups(groups)
        columns: list[str] = []
        tags: list[str] = []
        blocks = []
        for g in groups:
            names = group_names(g, self.max_distance)
            columns += names
            tags += [g] * len(names)
            blocks.append(self.block(g))
        return FeatureMatrix(columns, np.hstack(blocks), tags)


Featurizer = Callable[[Sequence[Molecule], Sequence[str]], FeatureMatrix]
