"""BNF grammars and derivation trees.

A grammar file holds rules of the form ``<NT> ::= alt | alt``.  Tokens are
whitespace separated; ``<X>`` is a nonterminal, ``[<X>]`` an optional
nonterminal, anything else a terminal.  A rule may continue on following
lines as long as each continuation line starts with ``|`` (or the previous
line ends with one).  Lines starting with ``#`` are comments.  The first rule
defines the start symbol.
"""
from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Iterator, NamedTuple, Sequence

import numpy as np

GRAMMAR_ENV = "MOLGGP_GRAMMAR"
DEFAULT_DEPTH_LIMIT = 20

_NT = re.compile(r"<[^<>\s\[\]|]+>")
_OPT = re.compile(r"\[(<[^<>\s\[\]|]+>)\]")


class GrammarError(ValueError):
    """Raised for malformed BNF input; ``kind`` names the failure."""

    def __init__(self, kind: str, line: int, detail: str = ""):
        self.kind = kind
        self.line = line
        msg = f"line {line}: {kind}"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class SentenceError(ValueError):
    def __init__(self, kind: str, position: int, detail: str = ""):
        self.kind = kind
        self.position = position
        msg = f"{kind} at token {position}"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class DerivationError(ValueError):
    def __init__(self, kind: str, detail: str = ""):
        self.kind = kind
        super().__init__(f"{kind}: {detail}" if detail else kind)


class Symbol(NamedTuple):
    name: str
    kind: str  # "t", "nt" or "opt"


@dataclass(frozen=True)
class Grammar:
    nonterminals: frozenset[str]
    terminals: frozenset[str]
    rules: dict[str, tuple[tuple[Symbol, ...], ...]] = field(hash=False)
    start: str

    @cached_property
    def min_depths(self) -> dict[str, float]:
        """Smallest subtree depth each nonterminal can derive (inf if none)."""
        depth = {nt: math.inf for nt in self.rules}
        changed = True
        while changed:
            changed = False
            for nt, alts in self.rules.items():
                best = min(1 + self._alt_depth(alt, depth) for alt in alts)
                if best < depth[nt]:
                    depth[nt] = best
                    changed = True
        return depth

    def _alt_depth(self, alt: Sequence[Symbol], depth: dict[str, float]) -> float:
        d = 0.0
        for s in alt:
            if s.kind == "nt":
                d = max(d, depth[s.name])
        return d

    @cached_property
    def alt_depths(self) -> dict[str, tuple[float, ...]]:
        depth = self.min_depths
        return {
            nt: tuple(1 + self._alt_depth(alt, depth) for alt in alts)
            for nt, alts in self.rules.items()
        }

    @cached_property
    def _first(self) -> tuple[dict[str, frozenset[str]], dict[str, bool]]:
        first: dict[str, set[str]] = {nt: set() for nt in self.rules}
        nullable = {nt: False for nt in self.rules}
        changed = True
        while changed:
            changed = False
            for nt, alts in self.rules.items():
                for alt in alts:
                    f, null = _seq_first(alt, first, nullable)
                    if not f <= first[nt]:
                        first[nt] |= f
                        changed = True
                    if null and not nullable[nt]:
                        nullable[nt] = True
                        changed = True
        return {k: frozenset(v) for k, v in first.items()}, nullable

    @cached_property
    def alt_first(self) -> dict[str, tuple[tuple[frozenset[str], bool], ...]]:
        first, nullable = self._first
        out = {}
        for nt, alts in self.rules.items():
            out[nt] = tuple(
                (frozenset(f), null)
                for f, null in (_seq_first(alt, first, nullable) for alt in alts)
            )
        return out


def _seq_first(alt, first, nullable) -> tuple[set[str], bool]:
    out: set[str] = set()
    for s in alt:
        if s.kind == "t":
            out.add(s.name)
            return out, False
        out |= first[s.name]
        if s.kind == "nt" and not nullable[s.name]:
            return out, False
    return out, True


# --------------------------------------------------------------------------
# parsing and serialisation


def parse_bnf(text: str) -> Grammar:
    rules: dict[str, list[tuple[str, int]]] = {}
    rule_line: dict[str, int] = {}
    current: str | None = None
    last_segment = ""
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "::=" in line:
            lhs, rhs = (part.strip() for part in line.split("::=", 1))
            if not _NT.fullmatch(lhs):
                raise GrammarError("malformed-rule", lineno, f"bad left-hand side {lhs!r}")
            if lhs in rules:
                raise GrammarError(
                    "duplicate-rule", lineno, f"{lhs} already defined on line {rule_line[lhs]}"
                )
            rules[lhs] = [(rhs, lineno)]
            rule_line[lhs] = lineno
            current, last_segment = lhs, rhs
        elif current is not None and (line.startswith("|") or last_segment.endswith("|")):
            rules[current].append((line, lineno))
            last_segment = line
        else:
            raise GrammarError("malformed-rule", lineno, "missing '::='")
    if not rules:
        raise GrammarError("malformed-rule", 0, "no rules")

    parsed: dict[str, tuple[tuple[Symbol, ...], ...]] = {}
    terminals: set[str] = set()
    referenced: dict[str, int] = {}
    for lhs, segments in rules.items():
        alternatives: list[tuple[Symbol, ...]] = []
        alt: list[Symbol] = []
        alt_line = segments[0][1]
        for segment, lineno in segments:
            for tok in segment.replace("|", " | ").split():
                if tok == "|":
                    if not alt:
                        raise GrammarError("empty-alternative", lineno, lhs)
                    alternatives.append(tuple(alt))
                    alt = []
                    continue
                sym = _symbol(tok, lineno)
                if sym.kind == "t":
                    terminals.add(sym.name)
                else:
                    referenced.setdefault(sym.name, lineno)
                alt.append(sym)
                alt_line = lineno
        if not alt:
            raise GrammarError("empty-alternative", alt_line, lhs)
        alternatives.append(tuple(alt))
        parsed[lhs] = tuple(alternatives)

    for nt, lineno in referenced.items():
        if nt not in parsed:
            raise GrammarError("undefined-nonterminal", lineno, nt)
    return Grammar(
        nonterminals=frozenset(parsed),
        terminals=frozenset(terminals),
        rules=parsed,
        start=next(iter(parsed)),
    )


def _symbol(tok: str, lineno: int) -> Symbol:
    if tok == "..." or "..." in tok:
        raise GrammarError("malformed-rule", lineno, "ellipsis is not grammar syntax")
    if _NT.fullmatch(tok):
        return Symbol(tok, "nt")
    m = _OPT.fullmatch(tok)
    if m:
        return Symbol(m.group(1), "opt")
    if tok.startswith(("<", "[")) or tok.endswith((">", "]")):
        raise GrammarError("malformed-rule", lineno, f"bad symbol {tok!r}")
    return Symbol(tok, "t")


def to_bnf(g: Grammar) -> str:
    def fmt(s: Symbol) -> str:
        return f"[{s.name}]" if s.kind == "opt" else s.name

    lines = [
        f"{nt} ::= " + " | ".join(" ".join(fmt(s) for s in alt) for alt in alts)
        for nt, alts in g.rules.items()
    ]
    return "\n".join(lines) + "\n"


def default_grammar_path() -> Path:
    env = os.environ.get(GRAMMAR_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("molggp") / "data" / "grammar.bnf"))


def load_grammar(path: str | os.PathLike | None = None) -> Grammar:
    p = Path(path) if path is not None else default_grammar_path()
    if not p.is_file():
        raise FileNotFoundError(f"grammar file not found: {p}")
    return parse_bnf(p.read_text(encoding="utf-8"))


def grammar_stats(g: Grammar) -> tuple[int, int, int]:
    return len(g.rules), len(g.nonterminals), len(g.terminals)


@dataclass
class ValidationReport:
    unreachable: list[str]
    nonproductive: list[str]

    @property
    def ok(self) -> bool:
        return not self.unreachable and not self.nonproductive

    def __str__(self) -> str:
        if self.ok:
            return "grammar ok"
        parts = []
        if self.unreachable:
            parts.append("unreachable: " + ", ".join(self.unreachable))
        if self.nonproductive:
            parts.append("non-productive: " + ", ".join(self.nonproductive))
        return "; ".join(parts)


def validate(g: Grammar) -> ValidationReport:
    seen = {g.start}
    stack = [g.start]
    while stack:
        nt = stack.pop()
        for alt in g.rules[nt]:
            for s in alt:
                if s.kind != "t" and s.name not in seen:
                    seen.add(s.name)
                    stack.append(s.name)
    depths = g.min_depths
    return ValidationReport(
        unreachable=[nt for nt in g.rules if nt not in seen],
        nonproductive=[nt for nt in g.rules if math.isinf(depths[nt])],
    )


# --------------------------------------------------------------------------
# derivation trees


@dataclass(frozen=True, slots=True)
class Node:
    """One node of a derivation tree.

    Terminal leaves have ``terminal=True``.  A node standing in an optional
    slot has ``optional=True``; if the optional nonterminal was not expanded
    it has ``alt=None`` and no children.
    """

    symbol: str
    alt: int | None = None
    children: tuple["Node", ...] = ()
    terminal: bool = False
    optional: bool = False

    @property
    def omitted(self) -> bool:
        return self.optional and self.alt is None

    def __repr__(self) -> str:
        if self.terminal:
            return self.symbol
        if self.omitted:
            return f"[{self.symbol}]"
        return f"{self.symbol}{list(self.children)!r}"


DerivationTree = Node


def leaf(token: str) -> Node:
    return Node(token, terminal=True)


def sentence(t: Node) -> list[str]:
    out: list[str] = []
    stack = [t]
    while stack:
        n = stack.pop()
        if n.terminal:
            out.append(n.symbol)
        else:
            stack.extend(reversed(n.children))
    return out


def depth(t: Node) -> int:
    if t.terminal or t.alt is None:
        return 0
    return 1 + max((depth(c) for c in t.children), default=0)


def node_count(t: Node) -> int:
    return 1 + sum(node_count(c) for c in t.children)


def iter_nonterminals(t: Node, path: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], Node]]:
    """Yield ``(path, node)`` for every nonterminal node, omitted optionals included."""
    if t.terminal:
        return
    yield path, t
    for i, c in enumerate(t.children):
        yield from iter_nonterminals(c, path + (i,))


def subtree(t: Node, path: Sequence[int]) -> Node:
    for i in path:
        t = t.children[i]
    return t


def replace(t: Node, path: Sequence[int], new: Node) -> Node:
    if not path:
        return new
    i = path[0]
    kids = list(t.children)
    kids[i] = replace(kids[i], path[1:], new)
    return Node(t.symbol, t.alt, tuple(kids), t.terminal, t.optional)


def check_tree(g: Grammar, t: Node, depth_limit: int | None = None) -> None:
    """Raise DerivationError unless ``t`` is a well-formed derivation of ``g``."""
    if t.symbol != g.start or t.optional:
        raise DerivationError("invalid-tree", f"root {t.symbol} is not {g.start}")
    _check_node(g, t)
    if depth_limit is not None and depth(t) > depth_limit:
        raise DerivationError("invalid-tree", f"depth {depth(t)} > {depth_limit}")


def _check_node(g: Grammar, n: Node) -> None:
    if n.alt is None:
        return
    alts = g.rules.get(n.symbol)
    if alts is None or not 0 <= n.alt < len(alts):
        raise DerivationError("invalid-tree", f"{n.symbol} alt {n.alt}")
    alt = alts[n.alt]
    if len(alt) != len(n.children):
        raise DerivationError("invalid-tree", f"{n.symbol} arity")
    for s, c in zip(alt, n.children):
        if s.kind == "t":
            if not c.terminal or c.symbol != s.name:
                raise DerivationError("invalid-tree", f"expected terminal {s.name}")
            continue
        if c.terminal or c.symbol != s.name or c.optional != (s.kind == "opt"):
            raise DerivationError("invalid-tree", f"expected {s.name}")
        _check_node(g, c)


def random_derivation(
    g: Grammar,
    rng: np.random.Generator,
    depth_limit: int = DEFAULT_DEPTH_LIMIT,
    symbol: str | None = None,
    optional: bool = False,
) -> Node:
    """Grow a random tree from ``symbol`` (default: the start symbol).

    Alternatives are drawn uniformly among those that fit the remaining depth
    budget; optional nonterminals are expanded with probability 0.5.
    """
    symbol = symbol or g.start
    if g.min_depths[symbol] > depth_limit:
        raise DerivationError(
            "depth-infeasible",
            f"{symbol} needs depth {g.min_depths[symbol]}, limit is {depth_limit}",
        )
    return _grow(g, rng, symbol, depth_limit, optional)


def _grow(g: Grammar, rng: np.random.Generator, symbol: str, budget: int, optional: bool) -> Node:
    alt_depths = g.alt_depths[symbol]
    feasible = [i for i, d in enumerate(alt_depths) if d <= budget]
    choice = feasible[int(rng.integers(len(feasible)))]
    kids = []
    for s in g.rules[symbol][choice]:
        if s.kind == "t":
            kids.append(leaf(s.name))
        elif s.kind == "nt":
            kids.append(_grow(g, rng, s.name, budget - 1, False))
        else:
            coin = rng.random() < 0.5
            if coin and g.min_depths[s.name] <= budget - 1:
                kids.append(_grow(g, rng, s.name, budget - 1, True))
            else:
                kids.append(Node(s.name, optional=True))
    return Node(symbol, choice, tuple(kids), optional=optional)


class _SentenceParser:
    def __init__(self, g: Grammar, tokens: Sequence[str]):
        self.g = g
        self.tokens = list(tokens)
        self.furthest = 0

    def symbol(self, s: Symbol, pos: int) -> Iterator[tuple[Node, int]]:
        if s.kind == "t":
            if pos < len(self.tokens) and self.tokens[pos] == s.name:
                yield leaf(s.name), pos + 1
            else:
                self.furthest = max(self.furthest, pos)
            return
        yield from self.nonterminal(s.name, pos, s.kind == "opt")
        if s.kind == "opt":
            yield Node(s.name, optional=True), pos

    def nonterminal(self, name: str, pos: int, optional: bool) -> Iterator[tuple[Node, int]]:
        tok = self.tokens[pos] if pos < len(self.tokens) else None
        for i, (alt, (first, nullable)) in enumerate(
            zip(self.g.rules[name], self.g.alt_first[name])
        ):
            if not nullable and tok not in first:
                self.furthest = max(self.furthest, pos)
                continue
            for kids, end in self.seq(alt, 0, pos):
                yield Node(name, i, kids, optional=optional), end

    def seq(self, alt: tuple[Symbol, ...], k: int, pos: int) -> Iterator[tuple[tuple[Node, ...], int]]:
        if k == len(alt):
            yield (), pos
            return
        for node, mid in self.symbol(alt[k], pos):
            for rest, end in self.seq(alt, k + 1, mid):
                yield (node,) + rest, end


def parse_sentence(g: Grammar, tokens: Sequence[str]) -> Node:
    """Recover the derivation tree of ``tokens``.

    Alternatives are tried in declaration order with backtracking, so the
    first-declared alternative wins any tie.
    """
    p = _SentenceParser(g, tokens)
    trailing = -1
    for node, end in p.nonterminal(g.start, 0, False):
        if end == len(p.tokens):
            return node
        trailing = max(trailing, end)
    if trailing >= 0 and p.furthest <= trailing:
        raise SentenceError("trailing-tokens", trailing, " ".join(p.tokens[trailing:]))
    bad = p.tokens[p.furthest] if p.furthest < len(p.tokens) else "<end>"
    raise SentenceError("unparseable-sentence", p.furthest, f"unexpected {bad!r}")
