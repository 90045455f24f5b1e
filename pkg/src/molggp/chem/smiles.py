"""A SMILES reader covering the subset found in small-molecule PK datasets.

Supported: organic-subset atoms, lowercase aromatic atoms, bracket atoms
(isotope, element, chirality, H count, charge, atom class), bonds ``- = # :``,
branches, ring closures (digits and ``%nn``) and dot-disconnected components.
Stereo marks (``/ \\ @``) and isotopes are read and dropped.  Aromaticity is
taken as written: no Hueckel perception is attempted.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

AROMATIC = 1.5

# standard atomic weights (IUPAC, abridged conventional values)
MASSES = {
    "H": 1.008, "Li": 6.94, "B": 10.81, "C": 12.011, "N": 14.007, "O": 15.999,
    "F": 18.998, "Na": 22.990, "Mg": 24.305, "Al": 26.982, "Si": 28.085,
    "P": 30.974, "S": 32.06, "Cl": 35.45, "K": 39.098, "Ca": 40.078,
    "Fe": 55.845, "Co": 58.933, "Cu": 63.546, "Zn": 65.38, "As": 74.922,
    "Se": 78.971, "Br": 79.904, "Ag": 107.868, "Sn": 118.710, "I": 126.904,
    "Pt": 195.084, "Au": 196.967, "Hg": 200.592, "Gd": 157.25, "Bi": 208.980,
}

VALENCES = {
    "H": (1,), "B": (3,), "C": (4,), "N": (3, 5), "O": (2,), "P": (3, 5),
    "S": (2, 4, 6), "F": (1,), "Cl": (1,), "Br": (1,), "I": (1,),
}

ORGANIC = ("Cl", "Br", "B", "C", "N", "O", "P", "S", "F", "I")
AROMATIC_ORGANIC = ("b", "c", "n", "o", "p", "s")
AROMATIC_BRACKET = ("se", "as", "b", "c", "n", "o", "p", "s")
_PI_DONORS = {"B", "C", "N", "P"}

_BOND_CHARS = {"-": 1.0, "=": 2.0, "#": 3.0, ":": AROMATIC, "/": 1.0, "\\": 1.0}


class SmilesError(ValueError):
    def __init__(self, kind: str, offset: int, smiles: str):
        self.kind = kind
        self.offset = offset
        super().__init__(f"{kind} at offset {offset} in {smiles!r}")


class Atom(NamedTuple):
    element: str
    charge: int = 0
    aromatic: bool = False
    hcount: int = 0


class Bond(NamedTuple):
    i: int
    j: int
    order: float  # 1, 2, 3, or AROMATIC


@dataclass(frozen=True, eq=False)
class Molecule:
    atoms: tuple[Atom, ...]
    bonds: tuple[Bond, ...]
    smiles: str = ""

    def __len__(self) -> int:
        return len(self.atoms)

    @cached_property
    def neighbors(self) -> tuple[tuple[tuple[int, float], ...], ...]:
        adj: list[list[tuple[int, float]]] = [[] for _ in self.atoms]
        for b in self.bonds:
            adj[b.i].append((b.j, b.order))
            adj[b.j].append((b.i, b.order))
        return tuple(tuple(a) for a in adj)

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(n) for n in self.neighbors)

    @cached_property
    def bond_index(self) -> dict[tuple[int, int], int]:
        out = {}
        for k, b in enumerate(self.bonds):
            out[(b.i, b.j)] = k
            out[(b.j, b.i)] = k
        return out

    @cached_property
    def ring_bonds(self) -> frozenset[int]:
        """Indices of bonds lying on a cycle."""
        out = set()
        for k, b in enumerate(self.bonds):
            if _connected_without(self.neighbors, b.i, b.j):
                out.add(k)
        return frozenset(out)

    @cached_property
    def ring_atoms(self) -> frozenset[int]:
        out = set()
        for k in self.ring_bonds:
            out.add(self.bonds[k].i)
            out.add(self.bonds[k].j)
        return frozenset(out)

    @cached_property
    def components(self) -> tuple[tuple[int, ...], ...]:
        seen = [False] * len(self.atoms)
        comps = []
        for s in range(len(self.atoms)):
            if seen[s]:
                continue
            seen[s] = True
            stack, comp = [s], []
            while stack:
                u = stack.pop()
                comp.append(u)
                for v, _ in self.neighbors[u]:
                    if not seen[v]:
                        seen[v] = True
                        stack.append(v)
            comps.append(tuple(sorted(comp)))
        return tuple(comps)


def _connected_without(adj, a: int, b: int) -> bool:
    # is b reachable from a once the direct a-b bond is ignored
    seen = {a}
    stack = [a]
    while stack:
        u = stack.pop()
        for v, _ in adj[u]:
            if u == a and v == b:
                continue
            if v == b:
                return True
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return False


def _charge_adjusted(element: str, valence: int, charge: int) -> int:
    if element in ("N", "O", "P", "S"):
        return valence + charge
    if element == "B":
        return valence - charge
    return valence - abs(charge)


class _Reader:
    def __init__(self, text: str):
        self.s = text
        self.atoms: list[dict] = []
        self.bonds: list[Bond] = []
        self.pairs: set[tuple[int, int]] = set()

    def fail(self, kind: str, offset: int):
        raise SmilesError(kind, offset, self.s)

    def add_bond(self, i: int, j: int, order: float | None, offset: int):
        if i == j or (min(i, j), max(i, j)) in self.pairs:
            self.fail("invalid-bond", offset)
        if order is None:
            both = self.atoms[i]["aromatic"] and self.atoms[j]["aromatic"]
            order = AROMATIC if both else 1.0
        self.pairs.add((min(i, j), max(i, j)))
        self.bonds.append(Bond(i, j, order))

    def read(self) -> Molecule:
        s = self.s
        if not s:
            self.fail("empty-smiles", 0)
        prev: int | None = None
        pending: float | None = None
        pending_at = 0
        branches: list[tuple[int | None, int]] = []
        rings: dict[int, tuple[int, float | None, int]] = {}
        i = 0
        while i < len(s):
            c = s[i]
            if c == "(":
                if prev is None:
                    self.fail("unmatched-parenthesis", i)
                branches.append((prev, i))
                i += 1
            elif c == ")":
                if not branches:
                    self.fail("unmatched-parenthesis", i)
                if pending is not None:
                    self.fail("dangling-bond", pending_at)
                prev = branches.pop()[0]
                i += 1
            elif c == ".":
                if pending is not None:
                    self.fail("dangling-bond", pending_at)
                prev = None
                i += 1
            elif c in _BOND_CHARS:
                if prev is None:
                    self.fail("dangling-bond", i)
                pending, pending_at = _BOND_CHARS[c], i
                i += 1
            elif c.isdigit() or c == "%":
                if prev is None:
                    self.fail("unmatched-ring-closure", i)
                if c == "%":
                    digits = s[i + 1 : i + 3]
                    if len(digits) != 2 or not digits.isdigit():
                        self.fail("unmatched-ring-closure", i)
                    num, width = int(digits), 3
                else:
                    num, width = int(c), 1
                if num in rings:
                    other, order, _ = rings.pop(num)
                    if pending is not None:
                        order = pending
                    self.add_bond(other, prev, order, i)
                else:
                    rings[num] = (prev, pending, i)
                pending = None
                i += width
            else:
                start = i
                if c == "[":
                    atom, i = self._bracket(i)
                else:
                    atom, i = self._organic(i)
                atom["offset"] = start
                self.atoms.append(atom)
                idx = len(self.atoms) - 1
                if prev is not None:
                    self.add_bond(prev, idx, pending, start)
                prev, pending = idx, None
        if pending is not None:
            self.fail("dangling-bond", pending_at)
        if branches:
            self.fail("unmatched-parenthesis", branches[-1][1])
        if rings:
            self.fail("unmatched-ring-closure", min(off for _, _, off in rings.values()))
        return self._finish()

    def _organic(self, i: int) -> tuple[dict, int]:
        s = self.s
        for sym in ORGANIC:
            if s.startswith(sym, i):
                return {"element": sym, "aromatic": False, "charge": 0, "h": None}, i + len(sym)
        if s[i] in AROMATIC_ORGANIC:
            return {"element": s[i].upper(), "aromatic": True, "charge": 0, "h": None}, i + 1
        self.fail("unknown-atom-symbol", i)

    def _bracket(self, i: int) -> tuple[dict, int]:
        s = self.s
        end = s.find("]", i)
        if end < 0:
            self.fail("unknown-atom-symbol", i)
        body = s[i + 1 : end]
        k = 0
        while k < len(body) and body[k].isdigit():  # isotope
            k += 1
        element = None
        aromatic = False
        for sym in AROMATIC_BRACKET:
            if body.startswith(sym, k):
                element, aromatic = sym.capitalize(), True
                k += len(sym)
                break
        else:
            if k < len(body) and body[k].isupper():
                two = body[k : k + 2]
                if len(two) == 2 and two[1].islower() and two in MASSES:
                    element = two
                elif body[k] in MASSES:
                    element = body[k]
                if element is not None:
                    k += len(element)
        if element is None:
            self.fail("unknown-atom-symbol", i + 1 + k)
        while k < len(body) and body[k] == "@":
            k += 1
        while k < len(body) and body[k].isupper() and body[k] != "H":  # @TH1 style tags
            k += 1
            while k < len(body) and body[k].isdigit():
                k += 1
        h = 0
        if k < len(body) and body[k] == "H":
            k += 1
            h = 1
            if k < len(body) and body[k].isdigit():
                h = int(body[k])
                k += 1
        charge = 0
        if k < len(body) and body[k] in "+-":
            sign_char = body[k]
            n = 0
            while k < len(body) and body[k] == sign_char:
                n += 1
                k += 1
            if n == 1 and k < len(body) and body[k].isdigit():
                n = 0
                while k < len(body) and body[k].isdigit():
                    n = n * 10 + int(body[k])
                    k += 1
            charge = n if sign_char == "+" else -n
        if k < len(body) and body[k] == ":":  # atom class
            k += 1
            while k < len(body) and body[k].isdigit():
                k += 1
        if k != len(body):
            self.fail("unknown-atom-symbol", i + 1 + k)
        return {"element": element, "aromatic": aromatic, "charge": charge, "h": h}, end + 1

    def _finish(self) -> Molecule:
        sums = [0.0] * len(self.atoms)
        arom_bonds = [0] * len(self.atoms)
        for b in self.bonds:
            for a in (b.i, b.j):
                if b.order == AROMATIC:
                    arom_bonds[a] += 1
                    sums[a] += 1.0
                else:
                    sums[a] += b.order
        atoms = []
        for idx, a in enumerate(self.atoms):
            el = a["element"]
            valences = VALENCES.get(el)
            sigma = int(round(sums[idx]))
            if a["h"] is None:
                # organic subset: implicit hydrogens from the default valences
                used = sigma
                if a["aromatic"] and el in _PI_DONORS and arom_bonds[idx] and used + 1 <= max(valences):
                    used += 1
                if used > max(valences):
                    self.fail("valence-exceeded", a["offset"])
                h = min(v for v in valences if v >= used) - used
            else:
                h = a["h"]
                if valences is not None:
                    allowed = max(_charge_adjusted(el, v, a["charge"]) for v in valences)
                    if sigma + h > allowed:
                        self.fail("valence-exceeded", a["offset"])
            atoms.append(Atom(el, a["charge"], a["aromatic"], h))
        mol = Molecule(tuple(atoms), tuple(self.bonds), self.s)
        for idx, a in enumerate(atoms):
            if a.aromatic and idx not in mol.ring_atoms:
                self.fail("aromatic-outside-ring", self.atoms[idx]["offset"])
        return mol


def parse_smiles(text: str) -> Molecule:
    return _Reader(text.strip()).read()
