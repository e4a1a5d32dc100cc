"""Grid data behind the figures: V and the mean-variance objective over b,
the credibility/profitability regions over (b, alpha), and the break-even
barrier beta(t).  Writes CSV files; plotting is left to the reader.

    python3 scripts/figure_data.py --out results/figures
"""

import argparse
import csv
from pathlib import Path

import numpy as np

from mixpension.continuous_withdrawal import (
    credibility_prob,
    expected_retained,
    mean_variance_objective,
    profitability_check,
)
from mixpension.fund_model import FundParams
from mixpension.strategy_compare import beta_curve

FUND = FundParams(0.04, 0.2)


def write(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    print("wrote", path)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", type=Path, default=Path("results/figures"))
    ap.add_argument("--lam", type=float, default=0.85)
    ap.add_argument("--p", type=float, default=0.5)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    bs = np.round(np.linspace(-0.9, 1.0, 96), 6)
    write(args.out / "retained_value.csv", ["b", "V", "mean_variance"],
          [(b, expected_retained(b, FUND), mean_variance_objective(b, args.lam, FUND)) for b in bs])

    alphas = np.round(np.linspace(1.0, 12.0, 45), 4)
    region = []
    for b in np.round(np.linspace(-0.5, 0.3, 41), 4):
        for a in alphas:
            region.append((b, a, credibility_prob(FUND, b, a) >= args.p, profitability_check(b, a, FUND)))
    write(args.out / "regions.csv", ["b", "alpha", "credible", "profitable"], region)

    ts = np.round(np.linspace(0.25, 20.0, 80), 4)
    write(args.out / "beta_curve.csv", ["t", "beta"], [(t, beta_curve(t, 10, FUND)) for t in ts])


if __name__ == "__main__":
    main()
