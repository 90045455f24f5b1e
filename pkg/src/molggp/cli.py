"""Command-line entry point: ``molggp <subcommand> ...``."""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import frequencies_markdown, selection_frequencies
from .chem.featurize import GROUPS, FeatureStore, featurize
from .config import load_config
from .datasets import SYNTH_KINDS, ingest_csv, synth_dataset
from .fitness import evaluate_pipeline, make_foldset, stratified_split
from .grammar import (
    default_grammar_path,
    grammar_stats,
    load_grammar,
    parse_bnf,
    parse_sentence,
    validate,
)
from .search import PipelineEvaluator, finalize, finalize_population, format_mean_std, log_to_csv, run_search
from .seeding import derive_seed
from .stats import ScoreTable, compare


class CliError(RuntimeError):
    pass


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _read_sentence(path: str) -> list[str]:
    return Path(path).read_text(encoding="utf-8").split()


def _split(dataset, fraction: float, seed: int):
    train, blind = stratified_split(dataset.labels, fraction, derive_seed(seed, "split"))
    if np.intersect1d(train, blind).size:
        raise CliError("blind split overlaps the search split")
    mols = dataset.molecules()
    return train, blind, mols


def cmd_search(args) -> int:
    cfg = load_config(
        args.config, desk=args.desk, master_seed=args.seed, jobs=args.jobs,
        dataset=args.dataset, grammar=args.grammar, out_dir=args.out,
    )
    if cfg.dataset is None or cfg.out_dir is None:
        raise CliError("a dataset and an output directory are required")
    grammar_path = Path(cfg.grammar) if cfg.grammar else default_grammar_path()
    grammar = load_grammar(grammar_path)
    dataset = ingest_csv(cfg.dataset)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    s = cfg.search
    manifest = {
        "tool": "molggp",
        "version": __version__,
        "config": asdict(s),
        "train_fraction": cfg.train_fraction,
        "dataset": str(cfg.dataset),
        "dataset_sha256": dataset.digest(),
        "grammar": str(grammar_path),
        "grammar_sha256": _sha256(grammar_path),
        "master_seed": s.master_seed,
        "started": _now(),
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")

    train, blind, mols = _split(dataset, cfg.train_fraction, s.master_seed)
    labels = dataset.labels
    # the evaluator only ever sees the search split
    evaluator = PipelineEvaluator([mols[i] for i in train], labels[train], s)

    def progress(entry):
        if not args.quiet:
            print(f"gen {entry.generation:3d}  best {entry.best_mcc:.3f}  mean {entry.mean_mcc:.3f}  "
                  f"evals {entry.evals}  {entry.elapsed_s:.1f}s", file=sys.stderr)

    result = run_search(s, grammar, evaluator, on_generation=progress)
    (out / "generation_log.csv").write_text(log_to_csv(result.log), encoding="utf-8")

    report, skipped = finalize_population(
        result.population, evaluator.store, labels[train],
        [mols[i] for i in blind], labels[blind], s.master_seed, dataset.name, grammar,
        fallback=result.archive,
    )
    for text, cause in skipped:
        print(f"warning: skipped {text!r} at refit ({cause})", file=sys.stderr)
    (out / "best_pipeline.txt").write_text("\n".join(report.sentence) + "\n", encoding="utf-8")
    report.fitted.dump(out / "fitted_pipeline.json")
    (out / "final_report.md").write_text(report.to_markdown(), encoding="utf-8")
    manifest["finished"] = _now()
    manifest["final_foldset_id"] = result.foldset_id
    manifest["refit_skipped"] = [{"sentence": t, "cause": c} for t, c in skipped]
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    print(f"5-fold CV {format_mean_std(report.cv_per_fold)}  Blind Test {report.blind_mcc:.3f}")
    return 0


def cmd_evaluate(args) -> int:
    grammar = load_grammar(args.grammar)
    tokens = _read_sentence(args.sentence)
    parse_sentence(grammar, tokens)
    dataset = ingest_csv(args.dataset)
    cfg = load_config(None, master_seed=args.seed, k_folds=args.folds, individual_budget=args.budget)
    train, blind, mols = _split(dataset, args.train_fraction, args.seed)
    labels = dataset.labels
    store = FeatureStore([mols[i] for i in train])
    fs = make_foldset(labels[train], cfg.search.k_folds, args.seed, args.foldset_id)
    rec = evaluate_pipeline(tokens, store, labels[train], fs, cfg.search.individual_budget)
    print(f"status {rec.status}")
    print(f"{cfg.search.k_folds}-fold CV MCC {format_mean_std(rec.per_fold_mcc if rec.status == 'ok' else [0.0])}")
    if args.blind:
        report = finalize(tokens, rec.per_fold_mcc, store, labels[train], [mols[i] for i in blind],
                          labels[blind], args.seed, dataset.name, grammar)
        print(f"Blind Test MCC {report.blind_mcc:.3f}")
    return 0


def cmd_featurize(args) -> int:
    dataset = ingest_csv(args.dataset)
    groups = args.groups or list(GROUPS)
    fm = featurize(dataset.smiles, groups, args.max_distance, args.cache_dir)
    fm.to_csv(args.out)
    print(f"{fm.shape[0]} molecules x {fm.shape[1]} features -> {args.out}")
    return 0


def cmd_synth(args) -> int:
    d = synth_dataset(args.kind, args.n, args.noise, args.seed)
    d.to_csv(args.out)
    print(f"{len(d)} molecules, {int(d.labels.sum())} positive -> {args.out}")
    return 0


def cmd_analyze(args) -> int:
    sentences = []
    for run in args.runs:
        path = Path(run) / "best_pipeline.txt"
        if not path.is_file():
            raise CliError(f"{path} not found")
        sentences.append(_read_sentence(str(path)))
    text = frequencies_markdown(selection_frequencies(sentences))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    print(text)
    return 0


def cmd_compare(args) -> int:
    result = compare(ScoreTable.from_csv(args.scores), args.alpha)
    if args.out_prefix:
        Path(args.out_prefix + ".csv").write_text(result.to_csv(), encoding="utf-8")
        Path(args.out_prefix + ".md").write_text(result.to_markdown(), encoding="utf-8")
    print(result.to_markdown())
    return 0


def cmd_validate_grammar(args) -> int:
    path = Path(args.path) if args.path else default_grammar_path()
    if not path.is_file():
        raise CliError(f"grammar file not found: {path}")
    g = parse_bnf(path.read_text(encoding="utf-8"))
    report = validate(g)
    rules, nts, terms = grammar_stats(g)
    print(f"{path}: {rules} rules, {nts} nonterminals, {terms} terminals")
    print(report)
    return 0 if report.ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="molggp", description="Grammar-guided pipeline search for molecular classification.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("search", help="evolve a pipeline for a dataset")
    s.add_argument("--config", help="key = value run configuration")
    s.add_argument("--dataset", help="CSV with smiles,label columns")
    s.add_argument("--out", help="output directory")
    s.add_argument("--grammar", help="BNF grammar file")
    s.add_argument("--seed", type=int, help="master seed")
    s.add_argument("--jobs", type=int, help="parallel evaluations")
    s.add_argument("--desk", action="store_true", help="population 20, 10 generations, 30 s per individual")
    s.add_argument("--quiet", action="store_true")
    s.set_defaults(func=cmd_search)

    e = sub.add_parser("evaluate", help="cross-validate one pipeline sentence")
    e.add_argument("--sentence", required=True, help="file holding the sentence tokens")
    e.add_argument("--dataset", required=True)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--foldset-id", type=int, default=0)
    e.add_argument("--folds", type=int, default=5)
    e.add_argument("--budget", type=float, default=300.0, help="seconds for the whole K-fold evaluation")
    e.add_argument("--train-fraction", type=float, default=0.9)
    e.add_argument("--blind", action="store_true", help="also refit and score the blind split")
    e.add_argument("--grammar")
    e.set_defaults(func=cmd_evaluate)

    f = sub.add_parser("featurize", help="write the feature matrix of a dataset")
    f.add_argument("--dataset", required=True)
    f.add_argument("--out", required=True)
    f.add_argument("--groups", nargs="+", choices=GROUPS)
    f.add_argument("--max-distance", type=int, default=6)
    f.add_argument("--cache-dir")
    f.set_defaults(func=cmd_featurize)

    y = sub.add_parser("synth", help="generate a synthetic labelled dataset")
    y.add_argument("--kind", required=True, choices=SYNTH_KINDS)
    y.add_argument("--n", type=int, default=300)
    y.add_argument("--noise", type=float, default=0.0)
    y.add_argument("--seed", type=int, default=0)
    y.add_argument("--out", required=True)
    y.set_defaults(func=cmd_synth)

    a = sub.add_parser("analyze", help="selection frequencies over finished runs")
    a.add_argument("runs", nargs="+")
    a.add_argument("--out")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("compare", help="Friedman / Iman-Davenport / Nemenyi on a score table")
    c.add_argument("scores")
    c.add_argument("--alpha", type=float, default=0.05)
    c.add_argument("--out-prefix")
    c.set_defaults(func=cmd_compare)

    v = sub.add_parser("validate-grammar", help="parse and check a BNF grammar")
    v.add_argument("path", nargs="?")
    v.set_defaults(func=cmd_validate_grammar)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
