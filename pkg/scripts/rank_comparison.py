"""Friedman / Iman-Davenport / Nemenyi comparison of a method-by-dataset score table.

    python scripts/rank_comparison.py [scores.csv] [--cd 1.4072]

Defaults to the 12-dataset blind-test MCC table shipped with the tests.
``--cd`` adds the significance pattern under an externally quoted critical
difference next to the one computed from the q table.
"""
from __future__ import annotations

import argparse
from pathlib import Path

from molggp.stats import ScoreTable, compare, significance_matrix

DEFAULT = Path(__file__).resolve().parents[1] / "tests" / "data" / "pk_blind_mcc.csv"


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("scores", nargs="?", default=str(DEFAULT))
    ap.add_argument("--alpha", type=float, default=0.05)
    ap.add_argument("--cd", type=float, help="extra critical difference to test")
    args = ap.parse_args()

    res = compare(ScoreTable.from_csv(args.scores), args.alpha)
    print(res.to_markdown())
    if args.cd is not None:
        sig = significance_matrix(res.ranks, args.cd)
        methods = res.table.methods
        print(f"\nsignificant pairs at CD = {args.cd}:")
        for i in range(len(methods)):
            for j in range(i + 1, len(methods)):
                if sig[i, j]:
                    print(f"  {methods[i]} vs {methods[j]}")


if __name__ == "__main__":
    main()
