import json

import pytest

from molggp.cli import main
from molggp.datasets import synth_dataset


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "nitro.csv"
    synth_dataset("nitro-rule", 60, 0.0, 1).to_csv(path)
    return path


def test_synth_and_featurize(tmp_path, capsys):
    out = tmp_path / "s.csv"
    assert main(["synth", "--kind", "mw-threshold", "--n", "30", "--out", str(out)]) == 0
    feats = tmp_path / "f.csv"
    assert main(["featurize", "--dataset", str(out), "--out", str(feats), "--groups", "Toxicophores"]) == 0
    header = feats.read_text().splitlines()[0].split(",")
    assert len(header) == 12 and "30 molecules x 12 features" in capsys.readouterr().out


def test_search_writes_artifacts(tmp_path, dataset):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("population_size = 4\nmax_generations = 1\nindividual_budget = 20\n")
    out = tmp_path / "run"
    assert main(["search", "--config", str(cfg), "--dataset", str(dataset), "--out", str(out), "--seed", "2", "--quiet"]) == 0
    for name in ("manifest.json", "generation_log.csv", "best_pipeline.txt", "fitted_pipeline.json", "final_report.md"):
        assert (out / name).is_file(), name
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["master_seed"] == 2 and "finished" in manifest
    assert len((out / "generation_log.csv").read_text().splitlines()) == 3
    assert "| Dataset | 5-fold CV | Blind Test |" in (out / "final_report.md").read_text()

    assert main(["analyze", str(out)]) == 0
    assert main(["evaluate", "--sentence", str(out / "best_pipeline.txt"), "--dataset", str(dataset), "--seed", "2", "--blind"]) == 0


def test_evaluate_known_pipeline(tmp_path, dataset, capsys):
    s = tmp_path / "p.txt"
    s.write_text("Toxicophores\nDecisionTree\nNone\n2\n")
    assert main(["evaluate", "--sentence", str(s), "--dataset", str(dataset), "--blind"]) == 0
    out = capsys.readouterr().out
    assert "status ok" in out and "5-fold CV MCC 1.000 (0.000)" in out and "Blind Test MCC 1.000" in out


def test_compare(tmp_path, capsys):
    scores = tmp_path / "scores.csv"
    scores.write_text("dataset,a,b,c\nd1,0.9,0.5,0.1\nd2,0.8,0.6,0.2\nd3,0.7,0.6,0.4\n")
    assert main(["compare", str(scores), "--out-prefix", str(tmp_path / "cmp")]) == 0
    assert (tmp_path / "cmp.csv").is_file() and (tmp_path / "cmp.md").is_file()


def test_validate_grammar(tmp_path, capsys):
    assert main(["validate-grammar"]) == 0
    bad = tmp_path / "bad.bnf"
    bad.write_text("<start> ::= <missing>\n")
    assert main(["validate-grammar", str(bad)]) == 1


def test_errors_return_one(tmp_path, capsys):
    assert main(["evaluate", "--sentence", str(tmp_path / "none.txt"), "--dataset", str(tmp_path / "none.csv")]) == 1
    assert "error:" in capsys.readouterr().err
    bad = tmp_path / "bad.txt"
    bad.write_text("DecisionTree None 2\n")
    ds = tmp_path / "d.csv"
    synth_dataset("nitro-rule", 30, 0.0, 0).to_csv(ds)
    assert main(["evaluate", "--sentence", str(bad), "--dataset", str(ds)]) == 1


def test_evaluate_reproduces_search_cv(tmp_path, dataset, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("population_size = 4\nmax_generations = 6\nindividual_budget = 20\n")
    out = tmp_path / "run"
    assert main(["search", "--config", str(cfg), "--dataset", str(dataset), "--out", str(out), "--seed", "5", "--quiet"]) == 0
    fs_id = json.loads((out / "manifest.json").read_text())["final_foldset_id"]
    cv = [ln for ln in (out / "final_report.md").read_text().splitlines() if ln.startswith("| nitro")][0].split("|")[2].strip()
    capsys.readouterr()
    args = ["evaluate", "--sentence", str(out / "best_pipeline.txt"), "--dataset", str(dataset), "--seed", "5", "--foldset-id", str(fs_id)]
    assert main(args) == 0
    assert f"5-fold CV MCC {cv}" in capsys.readouterr().out


def test_missing_grammar_is_named(tmp_path, dataset, capsys):
    missing = tmp_path / "nowhere.bnf"
    code = main(["search", "--desk", "--dataset", str(dataset), "--out", str(tmp_path / "o"), "--grammar", str(missing), "--quiet"])
    assert code == 1 and "nowhere.bnf" in capsys.readouterr().err


def test_analyze_single_classifier_runs(tmp_path, capsys):
    runs = []
    for i in range(20):
        d = tmp_path / f"r{i}"
        d.mkdir()
        (d / "best_pipeline.txt").write_text("Fragments\nDecisionTree\nNone\n2\n")
        runs.append(str(d))
    assert main(["analyze", *runs]) == 0
    assert "| DecisionTree | 1.000 |" in capsys.readouterr().out
