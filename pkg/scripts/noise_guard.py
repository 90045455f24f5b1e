"""Overfitting guard: desk searches on labels flipped with probability 0.5.

    python scripts/noise_guard.py --seeds 20 --out runs/noise

With pure-noise labels the blind MCC of any predictor is centred on zero
with spread about 1/sqrt(blind size).  The script prints each seed's blind
MCC, the share inside the band, and that share expected under the null.
"""
from __future__ import annotations

import argparse
import math
from pathlib import Path

from molggp.cli import main as cli_main
from molggp.datasets import synth_dataset


def blind_mcc(report: Path) -> float:
    rows = [ln for ln in report.read_text().splitlines() if ln.startswith("| ") and "Dataset" not in ln]
    return float(rows[0].strip("|").split("|")[-1])


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=500)
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--band", type=float, default=0.15)
    ap.add_argument("--out", default="runs/noise")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    data = out / "dataset.csv"
    synth_dataset("nitro-rule", args.n, 0.5, 0).to_csv(data)
    scores = []
    for seed in range(args.seeds):
        run = out / f"seed{seed:02d}"
        if cli_main(["search", "--desk", "--dataset", str(data), "--out", str(run), "--seed", str(seed), "--quiet"]):
            raise SystemExit(1)
        scores.append(blind_mcc(run / "final_report.md"))
        print(f"seed {seed:2d}  blind MCC {scores[-1]: .3f}", flush=True)

    inside = sum(abs(s) < args.band for s in scores)
    n_blind = args.n - round(0.9 * args.n)
    null = math.erf(args.band * math.sqrt(n_blind) / math.sqrt(2))
    print(f"|MCC| < {args.band}: {inside}/{len(scores)}; null expectation {null:.2f} per seed (blind size ~{n_blind})")


if __name__ == "__main__":
    main()
