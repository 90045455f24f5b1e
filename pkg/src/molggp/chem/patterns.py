"""Substructure counting and the toxicophore / functional-group libraries."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .smiles import AROMATIC, Molecule

MAX_PATTERN_ATOMS = 8
HALOGENS = frozenset({"F", "Cl", "Br", "I"})


class PatternError(ValueError):
    pass


@dataclass(frozen=True)
class PatternAtom:
    elements: frozenset[str]
    aromatic: bool | None = None
    charges: frozenset[int] | None = None
    hcount: int | None = None
    min_h: int | None = None
    degree: int | None = None  # heavy-atom degree

    def accepts(self, m: Molecule, idx: int, heavy_degree: int) -> bool:
        a = m.atoms[idx]
        if a.element not in self.elements:
            return False
        if self.aromatic is not None and a.aromatic != self.aromatic:
            return False
        if self.charges is not None and a.charge not in self.charges:
            return False
        if self.hcount is not None and a.hcount != self.hcount:
            return False
        if self.min_h is not None and a.hcount < self.min_h:
            return False
        if self.degree is not None and heavy_degree != self.degree:
            return False
        return True


@dataclass(frozen=True)
class PatternBond:
    i: int
    j: int
    orders: frozenset[float] | None = None


@dataclass(frozen=True)
class Pattern:
    name: str
    atoms: tuple[PatternAtom, ...]
    bonds: tuple[PatternBond, ...] = ()
    _plan: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if len(self.atoms) > MAX_PATTERN_ATOMS:
            raise PatternError(f"pattern-too-large: {self.name} has {len(self.atoms)} atoms")
        object.__setattr__(self, "_plan", _plan(self))


def atom(elements, aromatic=None, charges=None, hcount=None, min_h=None, degree=None) -> PatternAtom:
    if isinstance(elements, str):
        elements = {elements}
    return PatternAtom(
        frozenset(elements),
        aromatic,
        frozenset(charges) if charges is not None else None,
        hcount,
        min_h,
        degree,
    )


def bond(i: int, j: int, *orders: float) -> PatternBond:
    return PatternBond(i, j, frozenset(orders) if orders else None)


def _plan(p: Pattern) -> tuple:
    """Visit order plus, per step, the anchor atom and bonds back to earlier atoms."""
    n = len(p.atoms)
    adj: dict[int, list[tuple[int, PatternBond]]] = {i: [] for i in range(n)}
    for b in p.bonds:
        adj[b.i].append((b.j, b))
        adj[b.j].append((b.i, b))
    order: list[int] = []
    seen: set[int] = set()
    for root in range(n):
        if root in seen:
            continue
        seen.add(root)
        queue = [root]
        while queue:
            u = queue.pop(0)
            order.append(u)
            for v, _ in adj[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
    pos = {u: k for k, u in enumerate(order)}
    steps = []
    for k, u in enumerate(order):
        back = [(v, b) for v, b in adj[u] if pos[v] < k]
        anchor = back[0][0] if back else None
        steps.append((u, anchor, tuple(back)))
    return tuple(steps)


def _heavy_degrees(m: Molecule) -> list[int]:
    return [sum(1 for v, _ in nbrs if m.atoms[v].element != "H") for nbrs in m.neighbors]


def _embeddings(m: Molecule, p: Pattern, heavy: list[int]) -> Iterator[dict[int, int]]:
    steps = p._plan
    mapping: dict[int, int] = {}
    used: set[int] = set()

    def extend(k: int) -> Iterator[dict[int, int]]:
        if k == len(steps):
            yield dict(mapping)
            return
        u, anchor, back = steps[k]
        pa = p.atoms[u]
        cands: Iterable[int] = (
            (v for v, _ in m.neighbors[mapping[anchor]]) if anchor is not None else range(len(m))
        )
        for c in cands:
            if c in used or not pa.accepts(m, c, heavy[c]):
                continue
            ok = True
            for v, b in back:
                k_bond = m.bond_index.get((c, mapping[v]))
                if k_bond is None:
                    ok = False
                    break
                if b.orders is not None and m.bonds[k_bond].order not in b.orders:
                    ok = False
                    break
            if not ok:
                continue
            mapping[u] = c
            used.add(c)
            yield from extend(k + 1)
            del mapping[u]
            used.discard(c)

    yield from extend(0)


def find_matches(m: Molecule, p: Pattern) -> set[tuple[frozenset[int], frozenset[int]]]:
    """Distinct matched substructures as (atom set, bond set) images."""
    heavy = _heavy_degrees(m)
    out = set()
    for emb in _embeddings(m, p, heavy):
        atoms = frozenset(emb.values())
        bonds = frozenset(m.bond_index[(emb[b.i], emb[b.j])] for b in p.bonds)
        out.add((atoms, bonds))
    return out


def match_pattern(m: Molecule, p: Pattern) -> int:
    """Number of distinct occurrences of ``p`` in ``m``.

    Embeddings that cover the same atoms and bonds (for instance the two
    orientations of a symmetric pattern) are counted once.
    """
    return len(find_matches(m, p))


@dataclass(frozen=True)
class PatternLibrary:
    name: str
    patterns: tuple[Pattern, ...]
    # smaller pattern -> larger patterns whose matches claim its atoms first
    suppressed_by: dict[str, tuple[str, ...]] = field(default_factory=dict, hash=False)

    @property
    def names(self) -> list[str]:
        return [p.name for p in self.patterns]

    def counts(self, m: Molecule) -> np.ndarray:
        matches = {p.name: find_matches(m, p) for p in self.patterns}
        out = []
        for p in self.patterns:
            found = matches[p.name]
            claimed: set[int] = set()
            for big in self.suppressed_by.get(p.name, ()):
                for atoms, _ in matches[big]:
                    claimed |= atoms
            out.append(sum(1 for atoms, _ in found if not atoms & claimed))
        return np.array(out, dtype=float)


SINGLE, DOUBLE, TRIPLE = 1.0, 2.0, 3.0
_ALIPHATIC_C = atom("C", aromatic=False)

TOXICOPHORES = PatternLibrary(
    "toxicophores",
    (
        Pattern(
            "nitro",
            (atom("N"), atom("O", degree=1), atom("O", charges={-1, 0}, degree=1)),
            (bond(0, 1, DOUBLE), bond(0, 2, SINGLE, DOUBLE)),
        ),
        Pattern(
            "aromatic_nitro",
            (atom("N"), atom("O", degree=1), atom("O", charges={-1, 0}, degree=1), atom("C", aromatic=True)),
            (bond(0, 1, DOUBLE), bond(0, 2, SINGLE, DOUBLE), bond(0, 3, SINGLE)),
        ),
        Pattern(
            "aromatic_amine",
            (atom("N", aromatic=False, charges={0}, min_h=1), atom("C", aromatic=True)),
            (bond(0, 1, SINGLE),),
        ),
        Pattern(
            "aldehyde",
            (atom("C", aromatic=False, min_h=1), atom("O", degree=1)),
            (bond(0, 1, DOUBLE),),
        ),
        Pattern(
            "epoxide",
            (_ALIPHATIC_C, _ALIPHATIC_C, atom("O", aromatic=False)),
            (bond(0, 1, SINGLE), bond(1, 2, SINGLE), bond(2, 0, SINGLE)),
        ),
        Pattern(
            "quinone",
            (
                atom("O"), _ALIPHATIC_C, _ALIPHATIC_C, _ALIPHATIC_C,
                _ALIPHATIC_C, atom("O"), _ALIPHATIC_C, _ALIPHATIC_C,
            ),
            (
                bond(0, 1, DOUBLE), bond(1, 2, SINGLE), bond(2, 3, DOUBLE), bond(3, 4, SINGLE),
                bond(4, 5, DOUBLE), bond(4, 6, SINGLE), bond(6, 7, DOUBLE), bond(7, 1, SINGLE),
            ),
        ),
        Pattern(
            "acyl_halide",
            (_ALIPHATIC_C, atom("O"), atom(HALOGENS)),
            (bond(0, 1, DOUBLE), bond(0, 2, SINGLE)),
        ),
        Pattern("azo", (atom("N", aromatic=False), atom("N", aromatic=False)), (bond(0, 1, DOUBLE),)),
        Pattern("hydrazine", (atom("N", aromatic=False), atom("N", aromatic=False)), (bond(0, 1, SINGLE),)),
        Pattern("thiol", (atom("S", aromatic=False, min_h=1),)),
        Pattern(
            "michael_acceptor",
            (_ALIPHATIC_C, _ALIPHATIC_C, _ALIPHATIC_C, atom("O")),
            (bond(0, 1, DOUBLE), bond(1, 2, SINGLE), bond(2, 3, DOUBLE)),
        ),
        Pattern("alkyl_halide", (_ALIPHATIC_C, atom(HALOGENS)), (bond(0, 1, SINGLE),)),
    ),
    {
        "nitro": ("aromatic_nitro",),
        "michael_acceptor": ("quinone",),
        "alkyl_halide": ("acyl_halide",),
    },
)

_AMINE_N = dict(aromatic=False, charges={0})

FRAGMENTS = PatternLibrary(
    "fragments",
    (
        Pattern("hydroxyl", (atom("O", min_h=1, degree=1), atom("C")), (bond(0, 1, SINGLE),)),
        Pattern(
            "carboxylic_acid",
            (atom("C"), atom("O", degree=1), atom("O", min_h=1, degree=1)),
            (bond(0, 1, DOUBLE), bond(0, 2, SINGLE)),
        ),
        Pattern(
            "ester",
            (atom("C"), atom("O", degree=1), atom("O", hcount=0, degree=2), atom("C")),
            (bond(0, 1, DOUBLE), bond(0, 2, SINGLE), bond(2, 3, SINGLE)),
        ),
        Pattern(
            "ether",
            (atom("C"), atom("O", aromatic=False, hcount=0, degree=2), atom("C")),
            (bond(0, 1, SINGLE), bond(1, 2, SINGLE)),
        ),
        Pattern(
            "amide",
            (atom("C"), atom("O", degree=1), atom("N", aromatic=False)),
            (bond(0, 1, DOUBLE), bond(0, 2, SINGLE)),
        ),
        Pattern(
            "primary_amine",
            (atom("N", hcount=2, degree=1, **_AMINE_N), atom("C")),
            (bond(0, 1, SINGLE),),
        ),
        Pattern(
            "secondary_amine",
            (atom("N", hcount=1, degree=2, **_AMINE_N), atom("C"), atom("C")),
            (bond(0, 1, SINGLE), bond(0, 2, SINGLE)),
        ),
        Pattern(
            "tertiary_amine",
            (atom("N", hcount=0, degree=3, **_AMINE_N), atom("C"), atom("C"), atom("C")),
            (bond(0, 1, SINGLE), bond(0, 2, SINGLE), bond(0, 3, SINGLE)),
        ),
        Pattern(
            "ketone",
            (atom("C", aromatic=False), atom("O", degree=1), atom("C"), atom("C")),
            (bond(0, 1, DOUBLE), bond(0, 2, SINGLE), bond(0, 3, SINGLE)),
        ),
        Pattern(
            "aldehyde",
            (atom("C", aromatic=False, min_h=1), atom("O", degree=1)),
            (bond(0, 1, DOUBLE),),
        ),
        Pattern("nitrile", (atom("C"), atom("N", degree=1)), (bond(0, 1, TRIPLE),)),
        Pattern(
            "sulfonamide",
            (atom("S"), atom("O", degree=1), atom("O", degree=1), atom("N")),
            (bond(0, 1, DOUBLE), bond(0, 2, DOUBLE), bond(0, 3, SINGLE)),
        ),
        Pattern("fluorine", (atom("F"),)),
        Pattern("chlorine", (atom("Cl"),)),
        Pattern("bromine", (atom("Br"),)),
        Pattern("iodine", (atom("I"),)),
    ),
    {
        "hydroxyl": ("carboxylic_acid",),
        "ether": ("ester",),
        "primary_amine": ("amide",),
        "secondary_amine": ("amide",),
        "tertiary_amine": ("amide",),
    },
)


def toxicophores(m: Molecule) -> np.ndarray:
    return TOXICOPHORES.counts(m)


def fragments(m: Molecule) -> np.ndarray:
    return FRAGMENTS.counts(m)


__all__ = [
    "AROMATIC",
    "FRAGMENTS",
    "TOXICOPHORES",
    "Pattern",
    "PatternAtom",
    "PatternBond",
    "PatternError",
    "PatternLibrary",
    "atom",
    "bond",
    "find_matches",
    "fragments",
    "match_pattern",
    "toxicophores",
]
