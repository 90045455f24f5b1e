"""The evolutionary loop: initialize, evaluate, select, vary, keep elites,
resample folds, stop."""
from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Callable, Protocol, Sequence

import numpy as np

from .chem.featurize import FeatureStore
from .chem.smiles import Molecule
from .fitness import FitnessCache, FitnessRecord, FoldSet, confusion, evaluate_pipeline, make_foldset, mcc
from .genome import Individual, mutate, tournament_index, whigham_crossover
from .grammar import DEFAULT_DEPTH_LIMIT, Grammar, parse_sentence, random_derivation, sentence
from .ml.fitted import FittedPipeline, fit_pipeline
from .ml.pipeline_spec import spec_from_sentence
from .seeding import derive_rng

LOG_HEADER = (
    "generation", "best_mcc", "mean_mcc", "std_mcc", "best_sentence",
    "foldset_id", "evals", "cache_hits", "elapsed_s",
)


@dataclass
class SearchConfig:
    population_size: int = 100
    max_generations: int = 50
    wall_clock_budget: float = 3600.0  # seconds
    crossover_probability: float = 0.90
    mutation_probability: float = 0.10
    elitism_size: int = 1
    resample_period: int = 5
    individual_budget: float = 300.0  # seconds, whole K-fold evaluation
    tournament_size: int = 2
    k_folds: int = 5
    master_seed: int = 0
    depth_limit: int = DEFAULT_DEPTH_LIMIT
    jobs: int = 1

    def __post_init__(self):
        if self.population_size < 1:
            raise ValueError("population_size must be >= 1")
        if self.max_generations < 0:
            raise ValueError("max_generations must be >= 0")
        for name in ("crossover_probability", "mutation_probability"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if not 0 <= self.elitism_size < self.population_size:
            raise ValueError("elitism_size must be in [0, population_size)")
        if self.resample_period < 1:
            raise ValueError("resample_period must be >= 1")
        if self.tournament_size < 1 or self.k_folds < 2 or self.jobs < 1:
            raise ValueError("tournament_size >= 1, k_folds >= 2 and jobs >= 1 are required")

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]


def desk_config(**overrides) -> SearchConfig:
    """Small-scale settings for a laptop run; wall clock capped at 4 minutes."""
    base = dict(population_size=20, max_generations=10, individual_budget=30.0, wall_clock_budget=240.0)
    base.update(overrides)
    return SearchConfig(**base)


@dataclass(frozen=True)
class GenerationLog:
    generation: int
    best_mcc: float
    mean_mcc: float
    std_mcc: float
    best_sentence: str
    foldset_id: int
    evals: int
    cache_hits: int
    elapsed_s: float

    def row(self) -> list[str]:
        return [
            str(self.generation), repr(self.best_mcc), repr(self.mean_mcc), repr(self.std_mcc),
            self.best_sentence, str(self.foldset_id), str(self.evals), str(self.cache_hits),
            f"{self.elapsed_s:.3f}",
        ]


def log_to_csv(log: Sequence[GenerationLog]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(LOG_HEADER)
    for entry in log:
        w.writerow(entry.row())
    return buf.getvalue()


class Evaluator(Protocol):
    def __call__(self, sentence: tuple[str, ...], foldset_id: int) -> FitnessRecord: ...


@dataclass
class SearchResult:
    best: Individual
    log: list[GenerationLog]
    population: list[Individual]
    foldset_id: int
    # distinct pipelines that scored with status "ok" in any generation,
    # best first (ties to the later generation); a fallback for the refit
    archive: list[Individual] = field(default_factory=list)


class PipelineEvaluator:
    """Scores sentences on the search split only.

    ``molecules`` and ``labels`` are the training part of the dataset; the
    blind part is never handed to this object.
    """

    def __init__(self, molecules: Sequence[Molecule], labels, cfg: SearchConfig, store: FeatureStore | None = None):
        self.labels = np.asarray(labels, dtype=np.int64)
        self.store = store or FeatureStore(molecules)
        if len(self.store.molecules) != len(self.labels):
            raise ValueError("molecules and labels are not aligned")
        self.cfg = cfg
        self._foldsets: dict[int, FoldSet] = {}

    def foldset(self, foldset_id: int) -> FoldSet:
        if foldset_id not in self._foldsets:
            fs = make_foldset(self.labels, self.cfg.k_folds, self.cfg.master_seed, foldset_id)
            n = len(self.labels)
            assert all(f.max(initial=-1) < n for f in fs.folds), "fold index outside the search split"
            self._foldsets = {foldset_id: fs}
        return self._foldsets[foldset_id]

    def __call__(self, sentence: tuple[str, ...], foldset_id: int) -> FitnessRecord:
        return evaluate_pipeline(sentence, self.store, self.labels, self.foldset(foldset_id), self.cfg.individual_budget)


def _best_index(scores: Sequence[float]) -> int:
    # first maximum: ties go to the lower index
    return int(np.argmax(np.asarray(scores)))


def run_search(
    cfg: SearchConfig,
    grammar: Grammar,
    evaluate: Evaluator,
    clock: Callable[[], float] = time.monotonic,
    on_generation: Callable[[GenerationLog], None] | None = None,
) -> SearchResult:
    seed = cfg.master_seed
    start = clock()
    cache = FitnessCache()
    population = [
        Individual(random_derivation(grammar, derive_rng(seed, "init", 0, i), cfg.depth_limit), None, 0)
        for i in range(cfg.population_size)
    ]
    log: list[GenerationLog] = []
    archive: dict[tuple[str, ...], tuple[float, int, Individual]] = {}
    current_fs = None
    pool = ThreadPoolExecutor(cfg.jobs) if cfg.jobs > 1 else None
    try:
        gen = 0
        while True:
            fs_id = gen // cfg.resample_period
            if fs_id != current_fs:
                # new folds: every fitness, elites included, is recomputed
                cache.invalidate(fs_id)
                current_fs = fs_id
            hits0, misses0 = cache.hits, cache.misses

            def score(ind: Individual) -> FitnessRecord:
                key = (tuple(sentence(ind.tree)), fs_id)
                return cache.get_or_compute(key, lambda: evaluate(key[0], fs_id))

            records = list(pool.map(score, population)) if pool else [score(ind) for ind in population]
            population = [Individual(ind.tree, r, ind.birth_generation) for ind, r in zip(population, records)]
            for ind in population:
                if ind.fitness.status == "ok":
                    archive[tuple(sentence(ind.tree))] = (ind.fitness.mean_mcc, gen, ind)
            scores = np.array([r.mean_mcc for r in records])
            b = _best_index(scores)
            entry = GenerationLog(
                gen, float(scores[b]), float(scores.mean()), float(scores.std()),
                " ".join(sentence(population[b].tree)), fs_id,
                cache.misses - misses0, cache.hits - hits0, clock() - start,
            )
            log.append(entry)
            if on_generation is not None:
                on_generation(entry)
            if gen >= cfg.max_generations or clock() - start >= cfg.wall_clock_budget:
                ranked = sorted(archive.values(), key=lambda v: (-v[0], -v[1]))
                return SearchResult(population[b], log, population, fs_id, [v[2] for v in ranked])
            population = _next_generation(cfg, grammar, population, scores, gen + 1)
            gen += 1
    finally:
        if pool is not None:
            pool.shutdown()


def _next_generation(
    cfg: SearchConfig, grammar: Grammar, population: list[Individual], scores: np.ndarray, gen: int
) -> list[Individual]:
    rng = derive_rng(cfg.master_seed, "vary", gen)
    order = sorted(range(len(population)), key=lambda i: (-scores[i], i))
    nxt = [population[i] for i in order[: cfg.elitism_size]]
    while len(nxt) < cfg.population_size:
        a = population[tournament_index(scores, cfg.tournament_size, rng)]
        b = population[tournament_index(scores, cfg.tournament_size, rng)]
        if rng.random() < cfg.crossover_probability:
            kids = list(whigham_crossover(a, b, rng, gen))
        else:
            kids = [Individual(a.tree, None, gen), Individual(b.tree, None, gen)]
        for j, kid in enumerate(kids):
            if rng.random() < cfg.mutation_probability:
                kids[j] = mutate(kid, grammar, rng, cfg.depth_limit, gen)
        # an odd last slot keeps only the first child
        nxt.extend(kids[: cfg.population_size - len(nxt)])
    return nxt


# --------------------------------------------------------------------------
# final refit and blind scoring


@dataclass
class FinalReport:
    dataset: str
    sentence: list[str]
    cv_per_fold: tuple[float, ...]
    blind_mcc: float
    fitted: FittedPipeline = field(repr=False)

    @property
    def cv_mean(self) -> float:
        return float(np.mean(self.cv_per_fold)) if self.cv_per_fold else 0.0

    @property
    def cv_std(self) -> float:
        return float(np.std(self.cv_per_fold)) if self.cv_per_fold else 0.0

    def to_markdown(self) -> str:
        return "\n".join([
            "# Final report",
            "",
            "| Dataset | 5-fold CV | Blind Test |",
            "|---|---|---|",
            f"| {self.dataset} | {format_mean_std(self.cv_per_fold)} | {self.blind_mcc:.3f} |",
            "",
            "Selected pipeline:",
            "",
            "    " + " ".join(self.sentence),
            "",
        ])


def format_mean_std(values: Sequence[float]) -> str:
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return "0.000 (0.000)"
    return f"{v.mean():.3f} ({v.std():.3f})"


class FinalizeError(RuntimeError):
    pass


def finalize(
    best_sentence: Sequence[str],
    cv_per_fold: Sequence[float],
    train_store: FeatureStore,
    train_labels,
    blind_molecules: Sequence[Molecule],
    blind_labels,
    master_seed: int,
    dataset: str = "dataset",
    grammar: Grammar | None = None,
) -> FinalReport:
    """Refit on the whole search split, then score the untouched blind split."""
    tokens = list(best_sentence)
    if grammar is not None:
        parse_sentence(grammar, tokens)
    spec = spec_from_sentence(tokens)
    try:
        fitted = fit_pipeline(
            tokens, train_store.matrix(spec.feature_groups), np.asarray(train_labels),
            derive_rng(master_seed, "final", 0),
        )
    except Exception as exc:
        raise FinalizeError(f"train-failure: {exc}") from exc
    blind = FeatureStore(blind_molecules, train_store.max_distance).matrix(spec.feature_groups)
    pred = fitted.predict(blind)
    return FinalReport(dataset, tokens, tuple(cv_per_fold), mcc(confusion(np.asarray(blind_labels), pred)), fitted)


def finalize_population(
    population: Sequence[Individual],
    train_store: FeatureStore,
    train_labels,
    blind_molecules: Sequence[Molecule],
    blind_labels,
    master_seed: int,
    dataset: str = "dataset",
    grammar: Grammar | None = None,
    fallback: Sequence[Individual] = (),
) -> tuple[FinalReport, list[tuple[str, str]]]:
    """Refit the best individual that can be refit on the whole search split.

    The population is tried by score (ties to the lower index), then
    ``fallback`` in the order given.  A top pipeline may fail here even after
    scoring in CV, e.g. a selector that keeps no column on the full split, or
    a failed pipeline that tied at 0.0.  Returns the report and the
    (sentence, cause) pairs skipped on the way.
    """
    order = sorted(range(len(population)), key=lambda i: (-population[i].score, i))
    skipped: list[tuple[str, str]] = []
    tried = set()
    for ind in [population[i] for i in order] + list(fallback):
        tokens = sentence(ind.tree)
        if tuple(tokens) in tried:
            continue
        tried.add(tuple(tokens))
        try:
            report = finalize(
                tokens, ind.fitness.per_fold_mcc, train_store, train_labels,
                blind_molecules, blind_labels, master_seed, dataset, grammar,
            )
        except FinalizeError as exc:
            skipped.append((" ".join(tokens), str(exc)))
            continue
        return report, skipped
    raise FinalizeError("no pipeline of the search could be refit")

