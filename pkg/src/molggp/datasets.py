"""Labelled SMILES datasets: CSV ingestion and a synthetic generator."""
from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .chem.descriptors import general_descriptors
from .chem.patterns import TOXICOPHORES
from .chem.smiles import Molecule, SmilesError, parse_smiles


class DatasetError(ValueError):
    def __init__(self, kind: str, detail: str = ""):
        self.kind = kind
        super().__init__(f"{kind}: {detail}" if detail else kind)


@dataclass(frozen=True)
class Record:
    id: str
    smiles: str
    label: int


@dataclass
class Dataset:
    name: str
    records: list[Record]
    quarantine: list[tuple[int, str, str]] = field(default_factory=list)  # (row, id, reason)

    def __post_init__(self):
        ids = [r.id for r in self.records]
        if len(set(ids)) != len(ids):
            raise DatasetError("duplicate-id")

    def __len__(self) -> int:
        return len(self.records)

    @property
    def smiles(self) -> list[str]:
        return [r.smiles for r in self.records]

    @property
    def labels(self) -> np.ndarray:
        return np.array([r.label for r in self.records], dtype=np.int64)

    def molecules(self) -> list[Molecule]:
        return [parse_smiles(s) for s in self.smiles]

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["id", "smiles", "label"])
            for r in self.records:
                w.writerow([r.id, r.smiles, r.label])

    def digest(self) -> str:
        h = hashlib.sha256()
        for r in self.records:
            h.update(f"{r.id},{r.smiles},{r.label}\n".encode("utf-8"))
        return h.hexdigest()


def ingest_csv(path: str | Path, name: str | None = None) -> Dataset:
    """Read ``smiles`` and ``label`` (and optional ``id``) columns.

    Rows whose SMILES does not parse are quarantined with the parser's
    reason; a label other than 0/1 is an error.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DatasetError("empty-file", str(path))
        missing = [c for c in ("smiles", "label") if c not in reader.fieldnames]
        if missing:
            raise DatasetError("missing-column", ", ".join(missing))
        has_id = "id" in reader.fieldnames
        records, quarantine = [], []
        for row, rec in enumerate(reader):
            rid = rec["id"] if has_id else str(row)
            raw = (rec["label"] or "").strip()
            if raw not in ("0", "1"):
                raise DatasetError("non-binary-label", f"row {row}: {raw!r}")
            smi = (rec["smiles"] or "").strip()
            try:
                parse_smiles(smi)
            except SmilesError as exc:
                quarantine.append((row, rid, exc.kind))
                continue
            records.append(Record(rid, smi, int(raw)))
    if not records and not quarantine:
        raise DatasetError("empty-file", str(path))
    return Dataset(name or path.stem, records, quarantine)


# synthetic molecules: a core with two substituent slots
CORES = (
    "c1ccc({a})cc1{b}",
    "c1cc({a})ncc1{b}",
    "C1CCC({a})CC1{b}",
    "C({a})CCC{b}",
    "C({a})C(C)C{b}",
    "c1cc({a})sc1{b}",
    "C1CC({a})OC1{b}",
    "c1ccc2cc({a})ccc2c1{b}",
)
SUBSTITUENTS = (
    "C", "CC", "CCC", "C(C)C", "O", "OC", "OCC", "N", "NC", "N(C)C",
    "F", "Cl", "Br", "C(F)(F)F", "C(=O)O", "C(=O)OC", "C(=O)N", "C#N",
    "S", "SC", "CCO", "C(=O)C", "c2ccccc2", "C2CC2", "NC(=O)C", "OC(=O)C",
)
NITRO = "[N+](=O)[O-]"
HALOGENS = ("F", "Cl", "Br", "C(F)(F)F")
SYNTH_KINDS = ("nitro-rule", "mw-threshold", "noisy-xor-groups")


def _assemble(rng: np.random.Generator, nitro: bool) -> str:
    core = CORES[int(rng.integers(len(CORES)))]
    subs = [SUBSTITUENTS[int(rng.integers(len(SUBSTITUENTS)))] for _ in range(2)]
    if nitro:
        subs[int(rng.integers(2))] = NITRO
    return core.format(a=subs[0], b=subs[1])


def _has_nitro(m: Molecule) -> bool:
    counts = dict(zip(TOXICOPHORES.names, TOXICOPHORES.counts(m)))
    return counts["nitro"] + counts["aromatic_nitro"] > 0


def synth_dataset(kind: str, n: int, noise_rate: float = 0.0, seed: int = 0) -> Dataset:
    """Random small molecules labelled by a known rule, then label noise.

    nitro-rule: 1 iff a nitro group is present (half the molecules get one).
    mw-threshold: 1 iff molecular weight exceeds the sample median.
    noisy-xor-groups: 1 iff exactly one of {halogen, aromatic ring} occurs.
    """
    if kind not in SYNTH_KINDS:
        raise DatasetError("unknown-kind", kind)
    if n < 20:
        raise DatasetError("too-small", "n must be at least 20")
    if not 0.0 <= noise_rate <= 1.0:
        raise DatasetError("bad-noise", str(noise_rate))
    rng = np.random.default_rng(seed)
    smiles = [_assemble(rng, kind == "nitro-rule" and i % 2 == 1) for i in range(n)]
    mols = [parse_smiles(s) for s in smiles]
    if kind == "nitro-rule":
        labels = np.array([_has_nitro(m) for m in mols], dtype=np.int64)
    elif kind == "mw-threshold":
        mw = np.array([general_descriptors(m)[0] for m in mols])
        labels = (mw > np.median(mw)).astype(np.int64)
    else:
        halogen = np.array([any(a.element in ("F", "Cl", "Br", "I") for a in m.atoms) for m in mols])
        aromatic = np.array([any(a.aromatic for a in m.atoms) for m in mols])
        labels = (halogen ^ aromatic).astype(np.int64)
    flip = rng.random(n) < noise_rate
    labels = np.where(flip, 1 - labels, labels)
    order = rng.permutation(n)
    records = [Record(f"mol{i:05d}", smiles[j], int(labels[j])) for i, j in enumerate(order)]
    name = f"synth-{kind}-n{n}-noise{noise_rate:g}-seed{seed}"
    return Dataset(name, records)
