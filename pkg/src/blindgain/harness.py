"""Experiment configuration, seeded SNR sweeps, and result persistence.

A sweep cell is one (model, estimator, snr_db, T) tuple. Channel, data-block,
and pilot draws are keyed by (seed, model, T, trial) only, so all estimators
and SNR points in a cell group share realizations (common random numbers) and
deleting a cell never changes another cell's values. Trials are processed in
fixed-size chunks and reduced in index order, so results are bit-identical for
any worker count.
"""

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from . import estimators as est
from .channel import KEYHOLE, MODELS, RAYLEIGH
from .errors import ConfigurationError
from .linksim import draw_symbols
from .analysis import moments
from .channel import cn_matrix, gen_channel
from .profile import LargeScaleProfile
from .rng import substream

INFINITE = math.inf
_CHUNK = 512  # fixed chunk size keeps the reduction layout worker-independent

SWEEP_ESTIMATORS = (est.BLIND, est.STATISTICAL, est.PILOT_LMMSE)
CSV_COLUMNS = (
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


@dataclass(frozen=True)
class SystemConfig:
    M: int
    K: int
    rho_db_grid: Tuple[float, ...]
    T_grid: Tuple[Union[int, float], ...]  # ints, or math.inf for exact power
    betas: Tuple[float, ...]
    models: Tuple[str, ...]
    estimators: Tuple[str, ...]
    trials: int
    seed: int

    def __post_init__(self):
        if self.M < 1 or self.K < 1:
            raise ConfigurationError("M and K must be >= 1")
        if len(self.betas) != self.K:
            raise ConfigurationError(
                f"betas has length {len(self.betas)}, expected K={self.K}"
            )
        if not self.rho_db_grid:
            raise ConfigurationError("rho_db_grid must be nonempty")
        if not self.T_grid:
            raise ConfigurationError("T_grid must be nonempty")
        for T in self.T_grid:
            if T is not INFINITE and (not float(T).is_integer() or T < 1):
                raise ConfigurationError(f"invalid block length T={T!r}")
        if not self.models or any(m not in MODELS for m in self.models):
            raise ConfigurationError(f"models must be a nonempty subset of {MODELS}")
        if not self.estimators or any(
            e not in SWEEP_ESTIMATORS for e in self.estimators
        ):
            raise ConfigurationError(
                f"estimators must be a nonempty subset of {SWEEP_ESTIMATORS}"
            )
        if self.trials < 1:
            raise ConfigurationError("trials must be >= 1")

    @property
    def profile(self) -> LargeScaleProfile:
        return LargeScaleProfile(betas=self.betas)

    @classmethod
    def from_dict(cls, raw: dict, seed_override: Optional[int] = None):
        try:
            betas_spec = raw["betas"]
            if isinstance(betas_spec, str):
                if not betas_spec.startswith("uniform:"):
                    raise ConfigurationError(
                        f"betas spec {betas_spec!r} not understood"
                    )
                betas = (float(betas_spec.split(":", 1)[1]),) * int(raw["K"])
            else:
                betas = tuple(float(b) for b in betas_spec)
            T_grid = tuple(_parse_T(t) for t in raw["T_grid"])
            return cls(
                M=int(raw["M"]),
                K=int(raw["K"]),
                rho_db_grid=tuple(float(x) for x in raw["rho_db_grid"]),
                T_grid=T_grid,
                betas=betas,
                models=tuple(raw["models"]),
                estimators=tuple(raw["estimators"]),
                trials=int(raw["trials"]),
                seed=int(seed_override if seed_override is not None else raw["seed"]),
            )
        except KeyError as exc:
            raise ConfigurationError(f"config missing field {exc.args[0]!r}") from exc

    @classmethod
    def from_json(cls, path: str, seed_override: Optional[int] = None):
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise OSError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(raw, seed_override=seed_override)


def _parse_T(t) -> Union[int, float]:
    if isinstance(t, str):
        if t.lower() in ("inf", "infinite"):
            return INFINITE
        raise ConfigurationError(f"invalid T entry {t!r}")
    if t == INFINITE:
        return INFINITE
    return int(t)


def _format_T(T) -> str:
    return "inf" if T == INFINITE else str(int(T))


@dataclass(frozen=True)
class ResultRow:
    model: str
    estimator: str
    snr_db: float
    M: int
    K: int
    T: Union[int, float]
    trials: int
    mse: float
    mse_stderr: float
    clamp_rate: float
    seed: int


@dataclass
class ResultsTable:
    rows: List[ResultRow] = field(default_factory=list)

    def select(self, **where) -> List[ResultRow]:
        out = []
        for row in self.rows:
            if all(getattr(row, key) == val for key, val in where.items()):
                out.append(row)
        return out


def _resolve_workers(workers: Optional[int]) -> int:
    if workers is None:
        env = os.environ.get("MIMO_THREADS")
        workers = int(env) if env else 1
    return max(1, workers)


def _simulate_chunk(args) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-trial user-mean squared errors, clamp fractions, and per-user error
    sums for one chunk of trials of a (model, T) group.

    Returns (err[E, S, n], clamp[E, S, n], per_user_sq[E, S, K]).
    """
    (model, T, start, count, M, K, betas, rhos, methods, seed) = args
    profile = LargeScaleProfile(betas=betas)
    betas_arr = profile.as_array()
    mean_gains = M * betas_arr
    sum_beta = float(np.sum(betas_arr))
    sum_beta_others = sum_beta - betas_arr
    tkey = _format_T(T)
    n_est, n_snr = len(methods), len(rhos)
    err = np.zeros((n_est, n_snr, count))
    clamp = np.zeros((n_est, n_snr, count))
    per_user = np.zeros((n_est, n_snr, K))
    # T arrives through pickling in worker processes, so compare by value
    is_inf = T == INFINITE
    need_blind = est.BLIND in methods
    need_block = need_blind and not is_inf
    need_pilot = est.PILOT_LMMSE in methods
    finite_T = 0 if is_inf else int(T)

    if need_pilot:
        prior_var = np.array([moments(model, M, b).variance for b in betas_arr])

    for i in range(count):
        trial = start + i
        rng_ch = substream(seed, model, tkey, trial, "channel")
        ch = gen_channel(model, M, profile, rng_ch)
        gains = np.sum(np.abs(ch.G) ** 2, axis=0)
        if need_blind:
            C = ch.G.conj().T @ ch.G
            mags = np.abs(C) ** 2
            inter = np.sum(mags, axis=1) - gains**2

        if need_block:
            rng_blk = substream(seed, model, tkey, trial, "block")
            symbols = draw_symbols(K, finite_T, rng_blk)
            noise = cn_matrix(rng_blk, (K, finite_T))
            base = C @ symbols  # y = sqrt(alpha) * base + noise
        if need_pilot:
            rng_p = substream(seed, model, tkey, trial, "pilot")
            pilot_noise = cn_matrix(rng_p, (K, K))
            phi = est.pilot_matrix(K)
            corr_noise = np.sum(phi.conj() * pilot_noise, axis=1)  # CN(0, K)

        for s, rho in enumerate(rhos):
            alpha = rho / (M * sum_beta)
            sa = math.sqrt(alpha)
            for e, method in enumerate(methods):
                if method == est.STATISTICAL:
                    a = mean_gains
                    clamped = np.zeros(K, dtype=bool)
                elif method == est.BLIND:
                    if is_inf:
                        xi = alpha * (gains**2 + inter) + 1.0
                    else:
                        y = sa * base + noise
                        xi = np.mean(np.abs(y) ** 2, axis=1)
                    clamped = xi < 1.0
                    b = alpha * sum_beta_others
                    excess = np.maximum(xi - 1.0, 0.0)
                    denom = b + np.sqrt(b**2 + 4.0 * alpha * excess)
                    a = np.where(denom > 0.0, 2.0 * excess / np.maximum(denom, 1e-300), 0.0)
                else:  # pilot LMMSE
                    r = sa * K * gains + corr_noise
                    denom = alpha * K**2 * prior_var + K
                    c = sa * K * prior_var / denom
                    raw = mean_gains + c * (r - sa * K * mean_gains)
                    clamped = raw.real < 0.0
                    a = np.maximum(raw.real, 0.0)
                sq = ((a - gains) / mean_gains) ** 2
                err[e, s, i] = np.mean(sq)
                clamp[e, s, i] = np.mean(clamped)
                per_user[e, s] += sq
    return err, clamp, per_user


def run_experiment(
    config: SystemConfig,
    workers: Optional[int] = None,
    per_user: bool = False,
):
    """Run the full sweep; returns a ResultsTable (and a per-user table if
    requested). Deterministic for a given (config, seed) at any worker count."""
    workers = _resolve_workers(workers)
    methods = tuple(config.estimators)
    rhos = tuple(10.0 ** (db / 10.0) for db in config.rho_db_grid)

    # cell groups share realizations across estimators and SNR points
    group_stats = {}
    for model in config.models:
        for T in config.T_grid:
            chunks = []
            start = 0
            while start < config.trials:
                count = min(_CHUNK, config.trials - start)
                chunks.append(
                    (
                        model,
                        T,
                        start,
                        count,
                        config.M,
                        config.K,
                        config.betas,
                        rhos,
                        methods,
                        config.seed,
                    )
                )
                start += count
            if workers > 1 and len(chunks) > 1:
                with ProcessPoolExecutor(max_workers=workers) as pool:
                    parts = list(pool.map(_simulate_chunk, chunks))
            else:
                parts = [_simulate_chunk(c) for c in chunks]
            err = np.concatenate([p[0] for p in parts], axis=2)
            clamp = np.concatenate([p[1] for p in parts], axis=2)
            per_user_sq = np.sum([p[2] for p in parts], axis=0)
            group_stats[(model, _format_T(T))] = (err, clamp, per_user_sq)

    table = ResultsTable()
    user_rows = [] if per_user else None
    for model in config.models:
        for estimator in config.estimators:
            e = methods.index(estimator)
            for s, snr_db in enumerate(config.rho_db_grid):
                for T in config.T_grid:
                    err, clamp, per_user_sq = group_stats[(model, _format_T(T))]
                    vals = err[e, s]
                    mse = float(np.mean(vals))
                    stderr = (
                        float(np.std(vals, ddof=1) / math.sqrt(len(vals)))
                        if len(vals) > 1
                        else 0.0
                    )
                    table.rows.append(
                        ResultRow(
                            model=model,
                            estimator=estimator,
                            snr_db=snr_db,
                            M=config.M,
                            K=config.K,
                            T=T,
                            trials=config.trials,
                            mse=mse,
                            mse_stderr=stderr,
                            clamp_rate=float(np.mean(clamp[e, s])),
                            seed=config.seed,
                        )
                    )
                    if per_user:
                        for k in range(config.K):
                            user_rows.append(
                                (
                                    model,
                                    estimator,
                                    snr_db,
                                    _format_T(T),
                                    k,
                                    per_user_sq[e, s, k] / config.trials,
                                )
                            )
    if per_user:
        return table, user_rows
    return table


def _fmt(x: float) -> str:
    return format(float(x), ".9g")


def export_csv(table: ResultsTable, path: str) -> None:
    """Write the results in the fixed column order; floats use 9 significant
    digits and T prints as `inf` for the exact-power case."""
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for row in table.rows:
                writer.writerow(
                    [
                        row.model,
                        row.estimator,
                        _fmt(row.snr_db),
                        row.M,
                        row.K,
                        _format_T(row.T),
                        row.trials,
                        _fmt(row.mse),
                        _fmt(row.mse_stderr),
                        _fmt(row.clamp_rate),
                        row.seed,
                    ]
                )
    except OSError as exc:
        raise OSError(f"cannot write CSV {path}: {exc}") from exc


def export_json(table: ResultsTable, path: str) -> None:
    records = []
    for row in table.rows:
        rec = {col: getattr(row, col) for col in CSV_COLUMNS}
        rec["T"] = _format_T(row.T)
        records.append(rec)
    try:
        with open(path, "w") as fh:
            json.dump(records, fh, indent=1)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write JSON {path}: {exc}") from exc


def export_per_user_csv(user_rows: Sequence[tuple], config: SystemConfig, path: str):
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["model", "estimator", "snr_db", "T", "user", "mse", "seed"]
            )
            for model, estimator, snr_db, tkey, k, mse in user_rows:
                writer.writerow(
                    [model, estimator, _fmt(snr_db), tkey, k, _fmt(mse), config.seed]
                )
    except OSError as exc:
        raise OSError(f"cannot write CSV {path}: {exc}") from exc
