"""Read a sweep CSV and draw one MSE-vs-SNR figure per channel model.

This module never recomputes statistics: plotted arrays are exactly the CSV
values (the simulator is the single source of numerical truth).
"""

import csv
import warnings
from dataclasses import dataclass
from typing import Dict, List, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

REQUIRED_COLUMNS = (
    "model",
    "estimator",
    "snr_db",
    "M",
    "K",
    "T",
    "trials",
    "mse",
    "mse_stderr",
    "clamp_rate",
    "seed",
)

_LABELS = {
    "statistical": "without channel estimation, use E||g_k||^2",
    "pilot_lmmse": "DL pilots",
}


class SchemaError(ValueError):
    """The CSV does not match the sweep schema."""


@dataclass(frozen=True)
class PlotSpec:
    input_csv: str
    model: str
    output_path: str
    log_y: bool = True
    png: bool = False


def series_label(estimator: str, T: str) -> str:
    if estimator in _LABELS:
        return _LABELS[estimator]
    tee = "∞" if T == "inf" else T
    return f"proposed scheme, T={tee}"


def load_series(
    csv_path: str, model: str
) -> Dict[Tuple[str, str], Dict[str, List[float]]]:
    """Series keyed by (estimator, T): sorted SNR points with MSE and stderr."""
    with open(csv_path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in REQUIRED_COLUMNS:
            if col not in header:
                raise SchemaError(f"CSV is missing required column {col!r}")
        rows = [row for row in reader if row["model"] == model]

    series: Dict[Tuple[str, str], List[Tuple[float, float, float]]] = {}
    for row in rows:
        key = (row["estimator"], row["T"])
        series.setdefault(key, []).append(
            (float(row["snr_db"]), float(row["mse"]), float(row["mse_stderr"]))
        )
    out = {}
    for key, points in series.items():
        points.sort(key=lambda p: p[0])
        out[key] = {
            "snr_db": [p[0] for p in points],
            "mse": [p[1] for p in points],
            "mse_stderr": [p[2] for p in points],
        }
    return out


def render(spec: PlotSpec):
    """Draw the figure and write it; returns (figure, series) for inspection."""
    series = load_series(spec.input_csv, spec.model)
    if not series:
        warnings.warn(
            f"no rows for model {spec.model!r} in {spec.input_csv}; "
            "rendering empty axes"
        )

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for (estimator, T), data in sorted(series.items()):
        ax.errorbar(
            data["snr_db"],
            data["mse"],
            yerr=data["mse_stderr"],
            marker="o",
            capsize=2,
            label=series_label(estimator, T),
        )
    if spec.log_y:
        ax.set_yscale("log")
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("Normalized MSE")
    ax.set_title(f"{spec.model} channel")
    ax.grid(True, which="both", alpha=0.3)
    if series:
        ax.legend()
    fig.tight_layout()
    fig.savefig(spec.output_path, format="png" if spec.png else "svg")
    return fig, series
