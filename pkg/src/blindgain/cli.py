"""Command-line entry point: sweep, varrho, moments, validate."""

import argparse
import sys

import numpy as np

from . import analysis
from .channel import KEYHOLE, RAYLEIGH, gen_channel_batch
from .errors import ConfigurationError
from .harness import (
    SystemConfig,
    export_csv,
    export_json,
    export_per_user_csv,
    run_experiment,
)
from .profile import LargeScaleProfile
from .rng import substream

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blindgain",
        description="Monte Carlo downlink effective-gain estimation experiments",
    )
    sub = parser.add_subparsers(dest="command")

    sweep = sub.add_parser("sweep", help="run an SNR sweep from a config file")
    sweep.add_argument("--config", required=True, help="JSON config path")
    sweep.add_argument("--out", required=True, help="output CSV path")
    sweep.add_argument("--json", dest="json_out", help="optional JSON output path")
    sweep.add_argument("--seed", type=int, help="override the config seed")
    sweep.add_argument("--workers", type=int, help="worker processes")
    sweep.add_argument("--per-user", dest="per_user", help="per-user CSV path")

    varrho = sub.add_parser(
        "varrho", help="closed-form vs Monte Carlo accuracy metric"
    )
    varrho.add_argument("--M", type=int, required=True)
    varrho.add_argument("--K", type=int, required=True)
    varrho.add_argument("--beta", type=float, default=1.0)
    varrho.add_argument("--k", type=int, default=0, help="user index")
    varrho.add_argument("--trials", type=int, default=0, help="0 skips Monte Carlo")
    varrho.add_argument("--seed", type=int, default=0)

    mom = sub.add_parser("moments", help="closed-form effective-gain moments")
    mom.add_argument("--M", type=int, required=True)
    mom.add_argument("--beta", type=float, default=1.0)

    val = sub.add_parser("validate", help="quick invariant self-checks")
    val.add_argument("--trials", type=int, default=20000)
    val.add_argument("--seed", type=int, default=0)
    return parser


def _cmd_sweep(args) -> int:
    config = SystemConfig.from_json(args.config, seed_override=args.seed)
    if args.per_user:
        table, user_rows = run_experiment(
            config, workers=args.workers, per_user=True
        )
        export_per_user_csv(user_rows, config, args.per_user)
    else:
        table = run_experiment(config, workers=args.workers)
    export_csv(table, args.out)
    if args.json_out:
        export_json(table, args.json_out)
    print(f"wrote {len(table.rows)} rows to {args.out}")
    return EXIT_OK


def _cmd_varrho(args) -> int:
    profile = LargeScaleProfile.uniform(args.K, args.beta)
    print(f"M={args.M} K={args.K} beta={args.beta} user={args.k}")
    for model in (RAYLEIGH, KEYHOLE):
        closed = analysis.varrho_closed_form(model, args.M, args.K, profile, args.k)
        line = f"{model:9s} closed-form {closed:.6e}"
        if args.trials > 0:
            rng = substream(args.seed, "varrho", model)
            mc, se = analysis.varrho_monte_carlo(
                model, args.M, args.K, profile, args.k, args.trials, rng
            )
            line += f"  monte-carlo {mc:.6e} (stderr {se:.2e})"
        print(line)
    return EXIT_OK


def _cmd_moments(args) -> int:
    print(f"M={args.M} beta={args.beta}")
    for model in (RAYLEIGH, KEYHOLE):
        m = analysis.moments(model, args.M, args.beta)
        print(
            f"{model:9s} mean {m.mean:.6g}  fourth {m.fourth:.6g}"
            f"  variance {m.variance:.6g}"
        )
    return EXIT_OK


def _cmd_validate(args) -> int:
    """Fast Monte Carlo spot-checks of the core identities."""
    M, K, beta = 50, 10, 1.0
    profile = LargeScaleProfile.uniform(K, beta)
    trials = args.trials
    checks = []

    for model in (RAYLEIGH, KEYHOLE):
        rng = substream(args.seed, "validate", model)
        G = gen_channel_batch(model, M, profile, rng, trials)
        gains = np.sum(np.abs(G[:, :, 0]) ** 2, axis=1)
        mom = analysis.moments(model, M, beta)
        for name, samples, target in (
            ("mean gain", gains, mom.mean),
            ("fourth moment", gains**2, mom.fourth),
        ):
            mean = np.mean(samples)
            se = np.std(samples, ddof=1) / np.sqrt(trials)
            ok = abs(mean - target) <= 3 * se
            checks.append((f"{model} {name}", ok, f"{mean:.4g} vs {target:.4g}"))
        # power constraint: E||x||^2 = rho
        rho = 10.0
        alpha = rho / (M * profile.sum_all())
        s = np.exp(2j * np.pi * rng.random((trials, K)))  # unit-power symbols
        x = np.sqrt(alpha) * np.einsum("nmk,nk->nm", G, s)
        powers = np.sum(np.abs(x) ** 2, axis=1)
        mean = np.mean(powers)
        se = np.std(powers, ddof=1) / np.sqrt(trials)
        ok = abs(mean - rho) <= max(3 * se, 0.01 * rho)
        checks.append((f"{model} transmit power", ok, f"{mean:.4g} vs {rho}"))

    failures = 0
    for name, ok, detail in checks:
        status = "PASS" if ok else "FAIL"
        if not ok:
            failures += 1
        print(f"{status}  {name}: {detail}")
    return EXIT_OK if failures == 0 else EXIT_CONFIG


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse usage errors exit 2; normalize to 1
        return EXIT_CONFIG if exc.code else EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "varrho":
            return _cmd_varrho(args)
        if args.command == "moments":
            return _cmd_moments(args)
        return _cmd_validate(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


def main() -> None:
    raise SystemExit(cli_main())


if __name__ == "__main__":
    main()
