"""Variation and selection operators over derivation-tree genomes."""
from __future__ import annotations

from dataclasses import dataclass, replace as dc_replace
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .grammar import (
    DEFAULT_DEPTH_LIMIT,
    Grammar,
    Node,
    iter_nonterminals,
    random_derivation,
    replace,
    subtree,
)

if TYPE_CHECKING:
    from .fitness import FitnessRecord


@dataclass(frozen=True)
class Individual:
    tree: Node
    fitness: "FitnessRecord | None" = None
    birth_generation: int = 0

    @property
    def score(self) -> float:
        if self.fitness is None:
            raise ValueError("individual has not been evaluated")
        return self.fitness.mean_mcc


def _compatible(a: Node, b: Node) -> bool:
    # an omitted optional node may only land in an optional slot
    return (not a.omitted or b.optional) and (not b.omitted or a.optional)


def crossover_points(a: Node, b: Node, rng: np.random.Generator) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Paths of the two subtrees to exchange.

    A label is drawn uniformly from the nonterminals present in both trees,
    then one node carrying it is drawn uniformly from each parent.
    """
    nodes_a = list(iter_nonterminals(a))
    by_label_b: dict[str, list[tuple[tuple[int, ...], Node]]] = {}
    for p, n in iter_nonterminals(b):
        by_label_b.setdefault(n.symbol, []).append((p, n))

    options: dict[str, list[tuple[tuple[int, ...], Node]]] = {}
    for p, n in nodes_a:
        partners = by_label_b.get(n.symbol, ())
        if any(_compatible(n, m) for _, m in partners):
            options.setdefault(n.symbol, []).append((p, n))
    labels = list(options)
    label = labels[int(rng.integers(len(labels)))]
    cands_a = options[label]
    path_a, node_a = cands_a[int(rng.integers(len(cands_a)))]
    cands_b = [p for p, m in by_label_b[label] if _compatible(node_a, m)]
    return path_a, cands_b[int(rng.integers(len(cands_b)))]


def crossover_trees(a: Node, b: Node, rng: np.random.Generator) -> tuple[Node, Node]:
    """Swap two same-label subtrees between ``a`` and ``b``."""
    path_a, path_b = crossover_points(a, b, rng)
    node_a, node_b = subtree(a, path_a), subtree(b, path_b)
    # the optional flag belongs to the slot, not to the subtree moving into it
    into_a = dc_replace(node_b, optional=node_a.optional)
    into_b = dc_replace(node_a, optional=node_b.optional)
    return replace(a, path_a, into_a), replace(b, path_b, into_b)


def mutate_tree(
    t: Node,
    g: Grammar,
    rng: np.random.Generator,
    depth_limit: int = DEFAULT_DEPTH_LIMIT,
) -> Node:
    """Regrow the subtree under one uniformly chosen nonterminal node."""
    nodes = list(iter_nonterminals(t))
    path, node = nodes[int(rng.integers(len(nodes)))]
    budget = depth_limit - len(path)
    if node.optional:
        if rng.random() < 0.5 and g.min_depths[node.symbol] <= budget:
            new = random_derivation(g, rng, budget, node.symbol, optional=True)
        else:
            new = Node(node.symbol, optional=True)
    else:
        new = random_derivation(g, rng, budget, node.symbol)
    return replace(t, path, new)


def whigham_crossover(
    a: Individual, b: Individual, rng: np.random.Generator, generation: int | None = None
) -> tuple[Individual, Individual]:
    gen = a.birth_generation if generation is None else generation
    ta, tb = crossover_trees(a.tree, b.tree, rng)
    return Individual(ta, None, gen), Individual(tb, None, gen)


def mutate(
    a: Individual,
    g: Grammar,
    rng: np.random.Generator,
    depth_limit: int = DEFAULT_DEPTH_LIMIT,
    generation: int | None = None,
) -> Individual:
    gen = a.birth_generation if generation is None else generation
    return Individual(mutate_tree(a.tree, g, rng, depth_limit), None, gen)


def tournament_index(scores: Sequence[float], tournament_size: int, rng: np.random.Generator) -> int:
    """Index of the tournament winner; ties go to the lower index."""
    if tournament_size < 1:
        raise ValueError("tournament_size must be >= 1")
    picks = rng.integers(len(scores), size=tournament_size)
    best = int(picks[0])
    for i in picks[1:]:
        i = int(i)
        if scores[i] > scores[best] or (scores[i] == scores[best] and i < best):
            best = i
    return best


def tournament_select(
    population: Sequence[Individual], tournament_size: int, rng: np.random.Generator
) -> Individual:
    scores = [ind.score for ind in population]
    return population[tournament_index(scores, tournament_size, rng)]
