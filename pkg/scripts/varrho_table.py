#!/usr/bin/env python3
"""Print the closed-form vs Monte Carlo accuracy metric over a range of M."""

import argparse
import sys

from blindgain import LargeScaleProfile, substream, varrho_closed_form, varrho_monte_carlo


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--K", type=int, default=20)
    parser.add_argument("--beta", type=float, default=1.0)
    parser.add_argument("--trials", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--M-grid", type=int, nargs="+", default=[25, 50, 100, 200, 400]
    )
    args = parser.parse_args()

    profile = LargeScaleProfile.uniform(args.K, args.beta)
    print(f"{'M':>6} {'model':>9} {'closed-form':>13} {'monte-carlo':>13} {'stderr':>10}")
    for M in args.M_grid:
        for model in ("rayleigh", "keyhole"):
            closed = varrho_closed_form(model, M, args.K, profile, 0)
            rng = substream(args.seed, "varrho-table", model, M)
            mc, se = varrho_monte_carlo(
                model, M, args.K, profile, 0, args.trials, rng
            )
            print(f"{M:>6} {model:>9} {closed:13.5e} {mc:13.5e} {se:10.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
