import argparse
import sys

from .render import PlotSpec, SchemaError, render


def cli_main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="gainplots", description="render MSE-vs-SNR figures from sweep CSVs"
    )
    sub = parser.add_subparsers(dest="command")
    rend = sub.add_parser("render", help="render one model's figure")
    rend.add_argument("--csv", required=True, help="sweep CSV path")
    rend.add_argument(
        "--model", required=True, choices=["rayleigh", "keyhole"]
    )
    rend.add_argument("--out", required=True, help="output image path")
    rend.add_argument("--png", action="store_true", help="write PNG instead of SVG")
    rend.add_argument(
        "--linear-y", action="store_true", help="disable the default log y-axis"
    )

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    spec = PlotSpec(
        input_csv=args.csv,
        model=args.model,
        output_path=args.out,
        log_y=not args.linear_y,
        png=args.png,
    )
    try:
        render(spec)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    raise SystemExit(cli_main())


if __name__ == "__main__":
    main()
