import pytest

from molggp.chem.patterns import TOXICOPHORES
from molggp.datasets import SYNTH_KINDS, DatasetError, ingest_csv, synth_dataset


def write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_ingest_with_quarantine(tmp_path):
    ds = ingest_csv(write(tmp_path, "smiles,label\nCCO,1\nC1CC,0\nc1ccccc1,0\n"))
    assert ds.smiles == ["CCO", "c1ccccc1"] and ds.labels.tolist() == [1, 0]
    assert len(ds.quarantine) == 1 and ds.quarantine[0][0] == 1
    assert ds.name == "d"


@pytest.mark.parametrize(
    "text, kind",
    [
        ("", "empty-file"),
        ("smiles,label\n", "empty-file"),
        ("smi,label\nCCO,1\n", "missing-column"),
        ("smiles,label\nCCO,2\n", "non-binary-label"),
        ("id,smiles,label\na,CCO,1\na,CCN,0\n", "duplicate-id"),
    ],
)
def test_ingest_errors(tmp_path, text, kind):
    with pytest.raises(DatasetError) as err:
        ingest_csv(write(tmp_path, text))
    assert err.value.kind == kind


def test_csv_round_trip_and_digest(tmp_path):
    ds = synth_dataset("mw-threshold", 40, 0.0, 1)
    path = tmp_path / "s.csv"
    ds.to_csv(path)
    again = ingest_csv(path)
    assert again.digest() == ds.digest() and not again.quarantine


@pytest.mark.parametrize("kind", SYNTH_KINDS)
def test_synth_is_deterministic_and_balanced_enough(kind):
    a = synth_dataset(kind, 100, 0.1, 7)
    b = synth_dataset(kind, 100, 0.1, 7)
    assert a.digest() == b.digest() and len(a) == 100
    assert 10 <= a.labels.sum() <= 90
    assert synth_dataset(kind, 100, 0.1, 8).digest() != a.digest()


def test_nitro_rule_labels_follow_the_rule():
    ds = synth_dataset("nitro-rule", 60, 0.0, 2)
    names = TOXICOPHORES.names
    for m, y in zip(ds.molecules(), ds.labels):
        c = dict(zip(names, TOXICOPHORES.counts(m)))
        assert y == int(c["nitro"] + c["aromatic_nitro"] > 0)


def test_noise_flips_the_stated_fraction():
    clean = synth_dataset("nitro-rule", 200, 0.0, 4)
    noisy = synth_dataset("nitro-rule", 200, 0.25, 4)
    by_id = {r.id: r for r in clean.records}
    flipped = sum(by_id[r.id].label != r.label for r in noisy.records if r.id in by_id and by_id[r.id].smiles == r.smiles)
    assert 20 <= flipped <= 80


def test_synth_argument_errors():
    for kwargs, kind in [({"kind": "other"}, "unknown-kind"), ({"n": 5}, "too-small"), ({"noise_rate": 1.5}, "bad-noise")]:
        args = dict(kind="nitro-rule", n=50, noise_rate=0.0, seed=0) | kwargs
        with pytest.raises(DatasetError) as err:
            synth_dataset(**args)
        assert err.value.kind == kind
