"""Distances and descriptors against brute-force oracles."""
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from molggp.chem.descriptors import (
    GENERAL_NAMES,
    PHARMACOPHORE_PAIRS,
    PHARMACOPHORES,
    advanced_descriptors,
    general_descriptors,
    graph_signatures,
    pharmacophore_classes,
    signature_names,
)
from molggp.chem.graph import UNREACHABLE, shortest_paths
from molggp.chem.smiles import Molecule, parse_smiles
from oracles import floyd_warshall, random_graph

INF = math.inf


def test_propane_distances():
    d = shortest_paths(parse_smiles("CCC"))
    assert d[0, 2] == 2 and d[0, 1] == 1 and (d == d.T).all() and (np.diag(d) == 0).all()


def test_benzene_diameter():
    d = shortest_paths(parse_smiles("c1ccccc1"))
    assert d.max() == 3 == floyd_warshall(parse_smiles("c1ccccc1")).max()


def test_salt_components_unreachable():
    d = shortest_paths(parse_smiles("[Na+].[Cl-]"))
    assert d[0, 1] == UNREACHABLE


def test_bfs_matches_floyd_warshall_on_random_graphs():
    rng = np.random.default_rng(0)
    for _ in range(300):
        m = random_graph(rng)
        fw = floyd_warshall(m)
        bfs = shortest_paths(m).astype(float)
        bfs[bfs == UNREACHABLE] = INF
        assert np.array_equal(fw, bfs)


def test_wiener_matches_floyd_warshall_on_500_graphs():
    rng = np.random.default_rng(1)
    for _ in range(500):
        m = random_graph(rng)
        fw = floyd_warshall(m)
        expected = sum(fw[i, j] for i, j in itertools.combinations(range(len(m)), 2) if fw[i, j] < INF)
        assert advanced_descriptors(m)[0] == expected


def test_water():
    v = dict(zip(GENERAL_NAMES, general_descriptors(parse_smiles("O"))))
    assert v["mol_weight"] == pytest.approx(18.015, abs=1e-9)
    assert (v["heavy_atoms"], v["hbond_donors"], v["hbond_acceptors"]) == (1, 1, 1)


def test_methane_and_benzene_general():
    v = dict(zip(GENERAL_NAMES, general_descriptors(parse_smiles("C"))))
    assert (v["heavy_atoms"], v["rings"], v["rotatable_bonds"]) == (1, 0, 0)
    v = dict(zip(GENERAL_NAMES, general_descriptors(parse_smiles("c1ccccc1"))))
    assert (v["rings"], v["aromatic_atoms"], v["hbond_donors"]) == (1, 6, 0)


def test_rotatable_bonds():
    v = dict(zip(GENERAL_NAMES, general_descriptors(parse_smiles("CCCC"))))
    assert v["rotatable_bonds"] == 1  # only the central bond joins two degree-2 atoms
    v = dict(zip(GENERAL_NAMES, general_descriptors(parse_smiles("C1CCCCC1CC"))))
    assert v["rotatable_bonds"] == 1


def test_advanced_indices():
    assert advanced_descriptors(parse_smiles("C")).tolist() == [0, 0, 0, 0, 0, 0]
    w, randic, z1, z2, radius, diameter = advanced_descriptors(parse_smiles("CCC"))
    assert (w, z1, z2, radius, diameter) == (4, 6, 4, 1, 2)
    assert randic == pytest.approx(2 / math.sqrt(2))


def brute_signature(m: Molecule, D: int) -> np.ndarray:
    fw = floyd_warshall(m)
    cls = pharmacophore_classes(m)
    out = []
    for p, q in PHARMACOPHORE_PAIRS:
        for d in range(1, D + 1):
            c = 0
            for u, v in itertools.combinations(range(len(m)), 2):
                if fw[u, v] <= d and ((cls[u, p] and cls[v, q]) or (cls[u, q] and cls[v, p])):
                    c += 1
            out.append(c)
    return np.array(out, dtype=float)


def test_ethanol_signature():
    sig = dict(zip(signature_names(6), graph_signatures(parse_smiles("CCO"))))
    assert sig["donor-acceptor@1"] == 0
    assert sig["hydrophobic-acceptor@1"] == 0
    assert sig["hydrophobic-acceptor@2"] == 1
    assert not graph_signatures(parse_smiles("C")).any()


def test_signatures_match_pair_enumeration():
    rng = np.random.default_rng(3)
    smiles = ["CCO", "c1ccccc1O", "CC(=O)[O-]", "C[NH3+]", "NCCS", "c1ccncc1CCN", "OC(=O)CCC(=O)O"]
    mols = [parse_smiles(s) for s in smiles] + [random_graph(rng) for _ in range(60)]
    for m in mols:
        assert np.array_equal(graph_signatures(m, 6), brute_signature(m, 6))


@given(st.integers(0, 10**9))
def test_signatures_are_cumulative(seed):
    m = random_graph(np.random.default_rng(seed))
    sig = graph_signatures(m, 6).reshape(len(PHARMACOPHORE_PAIRS), 6)
    assert (np.diff(sig, axis=1) >= 0).all()
    assert len(PHARMACOPHORES) == 6
