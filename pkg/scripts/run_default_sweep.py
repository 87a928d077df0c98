#!/usr/bin/env python3
"""Run the default MSE-vs-SNR sweep and write results/sweep.csv.

Workers default to MIMO_THREADS (or 1); pass --workers to override.
"""

import argparse
import pathlib
import sys

from blindgain.cli import cli_main

ROOT = pathlib.Path(__file__).resolve().parent.parent


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workers", type=int)
    parser.add_argument("--out", default=str(ROOT / "results" / "sweep.csv"))
    parser.add_argument("--seed", type=int)
    args = parser.parse_args()

    pathlib.Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    argv = [
        "sweep",
        "--config",
        str(ROOT / "configs" / "default.json"),
        "--out",
        args.out,
    ]
    if args.workers:
        argv += ["--workers", str(args.workers)]
    if args.seed is not None:
        argv += ["--seed", str(args.seed)]
    return cli_main(argv)


if __name__ == "__main__":
    sys.exit(main())
