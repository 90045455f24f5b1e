"""General descriptors, topological indices and graph-based signatures."""
from __future__ import annotations

import itertools
import math

import numpy as np

from .graph import UNREACHABLE, shortest_paths
from .smiles import MASSES, Molecule

H_MASS = MASSES["H"]
COUNTED_ELEMENTS = ("B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I")

GENERAL_NAMES = (
    ["mol_weight", "heavy_atoms"]
    + [f"n_{el}" for el in COUNTED_ELEMENTS]
    + ["aromatic_atoms", "rings", "hbond_donors", "hbond_acceptors", "rotatable_bonds", "net_charge"]
)
ADVANCED_NAMES = ["wiener", "randic", "zagreb1", "zagreb2", "radius", "diameter"]

PHARMACOPHORES = ("hydrophobic", "donor", "acceptor", "positive", "negative", "aromatic")
PHARMACOPHORE_PAIRS = tuple(itertools.combinations_with_replacement(range(len(PHARMACOPHORES)), 2))
DEFAULT_MAX_DISTANCE = 6


def signature_names(max_distance: int = DEFAULT_MAX_DISTANCE) -> list[str]:
    return [
        f"{PHARMACOPHORES[p]}-{PHARMACOPHORES[q]}@{d}"
        for p, q in PHARMACOPHORE_PAIRS
        for d in range(1, max_distance + 1)
    ]


def _heavy_degrees(m: Molecule) -> list[int]:
    return [sum(1 for v, _ in nbrs if m.atoms[v].element != "H") for nbrs in m.neighbors]


def general_descriptors(m: Molecule) -> np.ndarray:
    atoms = m.atoms
    # fsum keeps the value independent of atom order
    mw = math.fsum(MASSES[a.element] + a.hcount * H_MASS for a in atoms)
    heavy = sum(1 for a in atoms if a.element != "H")
    counts = [sum(1 for a in atoms if a.element == el) for el in COUNTED_ELEMENTS]
    aromatic = sum(1 for a in atoms if a.aromatic)
    rings = len(m.bonds) - len(atoms) + len(m.components)
    donors = sum(1 for a in atoms if a.element in ("N", "O") and a.hcount > 0)
    acceptors = sum(1 for a in atoms if a.element in ("N", "O"))
    deg = _heavy_degrees(m)
    ring = m.ring_bonds
    rotatable = sum(
        1
        for k, b in enumerate(m.bonds)
        if b.order == 1.0
        and k not in ring
        and atoms[b.i].element != "H"
        and atoms[b.j].element != "H"
        and deg[b.i] >= 2
        and deg[b.j] >= 2
    )
    charge = sum(a.charge for a in atoms)
    return np.array(
        [mw, heavy, *counts, aromatic, rings, donors, acceptors, rotatable, charge], dtype=float
    )


def advanced_descriptors(m: Molecule, dist: np.ndarray | None = None) -> np.ndarray:
    if dist is None:
        dist = shortest_paths(m)
    deg = m.degrees
    iu = np.triu_indices(len(m), k=1)
    pair_d = dist[iu]
    wiener = float(pair_d[pair_d != UNREACHABLE].sum())
    randic = math.fsum(1.0 / math.sqrt(deg[b.i] * deg[b.j]) for b in m.bonds)
    zagreb1 = float(sum(d * d for d in deg))
    zagreb2 = float(sum(deg[b.i] * deg[b.j] for b in m.bonds))
    radius = diameter = 0.0
    for comp in m.components:
        sub = dist[np.ix_(comp, comp)]
        ecc = sub.max(axis=1)
        radius += float(ecc.min())
        diameter += float(ecc.max())
    return np.array([wiener, randic, zagreb1, zagreb2, radius, diameter], dtype=float)


def pharmacophore_classes(m: Molecule) -> np.ndarray:
    """Boolean (atoms x 6) class membership; an atom may hold several classes."""
    out = np.zeros((len(m), len(PHARMACOPHORES)), dtype=bool)
    for i, a in enumerate(m.atoms):
        polar_neighbor = any(m.atoms[v].element in ("N", "O") for v, _ in m.neighbors[i])
        out[i, 0] = a.element in ("C", "S") and not polar_neighbor
        out[i, 1] = a.element in ("N", "O") and a.hcount > 0
        out[i, 2] = a.element in ("N", "O")
        out[i, 3] = a.charge > 0
        out[i, 4] = a.charge < 0
        out[i, 5] = a.aromatic
    return out


def graph_signatures(
    m: Molecule, max_distance: int = DEFAULT_MAX_DISTANCE, dist: np.ndarray | None = None
) -> np.ndarray:
    """Cumulative pharmacophore-pair counts within distance 1..max_distance.

    Entry (p, q, d) counts unordered atom pairs u < v carrying classes p and
    q (either way round) whose shortest path is at most d bonds.
    """
    if max_distance < 1:
        raise ValueError("max_distance must be >= 1")
    if dist is None:
        dist = shortest_paths(m)
    cls = pharmacophore_classes(m)
    n = len(m)
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    out = np.zeros((len(PHARMACOPHORE_PAIRS), max_distance))
    for row, (p, q) in enumerate(PHARMACOPHORE_PAIRS):
        hit = np.outer(cls[:, p], cls[:, q])
        hit |= hit.T
        d = dist[hit & upper]
        d = d[d <= max_distance]
        if d.size:
            out[row] = np.cumsum(np.bincount(d, minlength=max_distance + 1)[1:])
    return out.ravel()
