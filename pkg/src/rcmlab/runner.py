"""Reproducible Monte Carlo orchestration.

A run expands its config into independent tasks ``(index, d, trial)``.  Each
task derives its own stream from ``(master seed, d, trial)``, so results do
not depend on scheduling or on the number of worker processes; records are
sorted by task index before anything is written.

Bundle layout::

    config.json    echo of the validated config
    trials.csv     one row per task (no timing columns)
    summary.json   aggregates per d
    timing.json    wall times (the only non-deterministic file)
    plots/*.svg    spectrum plots (esd runs)
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import circular, distance, graph, oracle, spectral, vectors
from .config import ConfigError, ExperimentConfig
from .model import ModelParams, normalize, sample_bernoulli, sample_combinatorial, sample_rows
from .plot import plot_spectrum
from .rng import derive_seed, make_rng
from .threshold import EX2_upper, formula_EX, paley_zygmund_bound, poisson_zero_column_estimate, zero_columns

log = logging.getLogger(__name__)

FRAME_STREAM = 0x46524D  # fixed index naming the shared subspace stream


@dataclass
class TrialRecord:
    index: int
    d: int
    trial: int
    seed: int
    payload: dict
    wall_time: float = 0.0
    extra: object = field(default=None, repr=False)


def _params(cfg: ExperimentConfig, d: int, seed: int) -> ModelParams:
    return ModelParams(n=cfg.n, d=d, m=cfg.m, seed=seed)


@lru_cache(maxsize=8)
def _frame(n: int, k: int, seed: int) -> np.ndarray:
    return distance.random_frame(n, k, make_rng(derive_seed(seed, FRAME_STREAM)))


def _trial_esd(cfg, d, seed):
    M = sample_combinatorial(_params(cfg, d, seed))
    eigs = spectral.eigenvalues(normalize(M))
    payload = {
        "ks_radial": circular.ks_radial(eigs),
        "ks_angular": circular.angular_ks(eigs),
        "coverage_0": circular.disk_coverage(eigs, 0.0),
        "coverage_0.1": circular.disk_coverage(eigs, 0.1),
        "max_modulus": float(np.abs(eigs).max()),
    }
    return payload, eigs


def _trial_ssv(cfg, d, seed):
    M = sample_combinatorial(_params(cfg, d, seed))
    s = spectral.singular_values(M.to_dense() - cfg.z * np.eye(cfg.n))
    lp = math.inf if spectral.is_numerically_singular(s) else float(-np.log(s).sum() / s.size)
    return {"s_min": float(s[-1]), "s_max": float(s[0]), "log_potential": lp}, None


def _trial_norm(cfg, d, seed):
    M = sample_combinatorial(_params(cfg, d, seed))
    rn = graph.restricted_norm(M)
    ok, top = graph.column_sum_event(M, cfg.tau)
    return {
        "restricted_norm": rn,
        "ratio_sqrt_d": rn / math.sqrt(d),
        "lower_bound": graph.restricted_norm_lower(cfg.n, d),
        "max_col_sum": top,
        "col_event": int(ok),
    }, None


def _trial_expansion(cfg, d, seed):
    M = sample_combinatorial(_params(cfg, d, seed))
    k = cfg.k or 1
    eps = cfg.eps if cfg.eps is not None else 0.5
    rep = graph.expansion_check(M, k, eps, mode="auto", samples=2000, rng=make_rng(derive_seed(seed, 1)))
    return {"holds_in": int(rep.holds_in), "holds_out": int(rep.holds_out), "worst_value": rep.worst_value,
            "sets_checked": rep.sets_checked}, None


def _trial_distance(cfg, d, seed):
    k = cfg.k if cfg.k is not None else cfg.n // 2
    p = cfg.p if cfg.p is not None else d / cfg.n
    exp = distance.DistanceExperiment(n=cfg.n, p=p, V=_frame(cfg.n, k, cfg.seed), trials=1)
    r = distance.distance_trial(exp, make_rng(seed), cfg.model, d=d)
    return {"r": r, "r_squared": r * r}, None


def _trial_threshold(cfg, d, seed):
    sup = sample_rows(cfg.n, d, cfg.n, make_rng(seed))
    X = zero_columns(sup, cfg.n)
    dense = np.zeros((cfg.n, cfg.n))
    dense[np.arange(cfg.n)[:, None], sup] = 1.0
    s = float(spectral.singular_values(dense)[-1])
    return {"X": X, "s_min": s}, None


def _trial_replacement(cfg, d, seed):
    rng = make_rng(seed)
    M = sample_combinatorial(_params(cfg, d, seed), rng)
    B = sample_bernoulli(cfg.n, d / cfg.n, rng)
    return {"gap": circular.replacement_gap(M, B, cfg.z)}, None


TRIAL_FUNCS = {
    "esd": _trial_esd,
    "ssv_sweep": _trial_ssv,
    "norm_sweep": _trial_norm,
    "expansion": _trial_expansion,
    "distance": _trial_distance,
    "threshold": _trial_threshold,
    "replacement": _trial_replacement,
}


def tasks(cfg: ExperimentConfig) -> list[tuple[int, int, int, int]]:
    """(index, d, trial, derived seed) for every trial of the run."""
    out = []
    for d in cfg.degrees:
        for t in range(cfg.trials):
            out.append((len(out), d, t, derive_seed(cfg.seed, d, t)))
    return out


def _run_task(cfg: ExperimentConfig, task) -> TrialRecord:
    index, d, t, seed = task
    start = time.perf_counter()
    payload, extra = TRIAL_FUNCS[cfg.kind](cfg, d, seed)
    keep = extra if t == 0 else None
    return TrialRecord(index=index, d=d, trial=t, seed=seed, payload=payload,
                       wall_time=time.perf_counter() - start, extra=keep)


def worker_count(n_tasks: int) -> int:
    cap = os.environ.get("RCMLAB_THREADS")
    workers = int(cap) if cap else (os.cpu_count() or 1)
    return max(1, min(workers, n_tasks))


def run_trials(cfg: ExperimentConfig, workers: int | None = None) -> list[TrialRecord]:
    todo = tasks(cfg)
    workers = worker_count(len(todo)) if workers is None else max(1, workers)
    if workers == 1:
        records = [_run_task(cfg, t) for t in todo]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_task, [cfg] * len(todo), todo, chunksize=max(1, len(todo) // (4 * workers))))
    return sorted(records, key=lambda r: r.index)


def fmt(v) -> str:
    """Shortest round-trip text for numbers."""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_trials_csv(records: list[TrialRecord], path) -> None:
    keys = list(records[0].payload) if records else []
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["trial", "d", "seed", *keys])
        for r in records:
            w.writerow([r.trial, r.d, r.seed, *(fmt(r.payload[k]) for k in keys)])


def _stats(x) -> dict:
    x = np.asarray(x, dtype=np.float64)
    return {"min": float(x.min()), "median": float(np.median(x)), "max": float(x.max()),
            "mean": float(x.mean()), "count": int(x.size)}


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    return obj


def summarize(cfg: ExperimentConfig, records: list[TrialRecord]) -> dict:
    by_d: dict[int, list[TrialRecord]] = {}
    for r in records:
        by_d.setdefault(r.d, []).append(r)
    col = lambda rs, key: [r.payload[key] for r in rs]  # noqa: E731
    entries = []
    for d, rs in by_d.items():
        e = {"d": d, "trials": len(rs)}
        if cfg.kind == "esd":
            for key in ("ks_radial", "ks_angular", "coverage_0", "coverage_0.1"):
                e[key] = _stats(col(rs, key))
        elif cfg.kind == "ssv_sweep":
            e["s_min"] = _stats(col(rs, "s_min"))
            try:
                e["rates"] = vectors.rate_functions(cfg.n, d, None, C2=cfg.C2, c1=cfg.c1)
            except ValueError as exc:
                e["rates"] = {"error": str(exc)}
        elif cfg.kind == "norm_sweep":
            e["restricted_norm"] = _stats(col(rs, "restricted_norm"))
            e["ratio_sqrt_d"] = _stats(col(rs, "ratio_sqrt_d"))
            e["lower_bound"] = graph.restricted_norm_lower(cfg.n, d)
            e["lower_bound_violations"] = int(sum(v < e["lower_bound"] * (1 - 1e-12) for v in col(rs, "restricted_norm")))
            e["col_event_freq"] = float(np.mean(col(rs, "col_event")))
            m = cfg.m or cfg.n
            e["col_failure_bound"] = graph.column_sum_failure_bound(cfg.n, m, d, cfg.tau)
        elif cfg.kind == "expansion":
            e["holds_in_freq"] = float(np.mean(col(rs, "holds_in")))
            e["holds_out_freq"] = float(np.mean(col(rs, "holds_out")))
        elif cfg.kind == "distance":
            r = np.array(col(rs, "r"))
            k = cfg.k if cfg.k is not None else cfg.n // 2
            p = cfg.p if cfg.p is not None else d / cfg.n
            D = distance.DistanceExperiment(n=cfg.n, p=p, V=_frame(cfg.n, k, cfg.seed)).D()
            e.update({"mean_r": float(r.mean()), "mean_r2": float((r * r).mean()), "D": D,
                      "in_bracket": bool(D / 2 <= r.mean() <= D)})
        elif cfg.kind == "threshold":
            X = np.array(col(rs, "X"), dtype=np.float64)
            smin = np.array(col(rs, "s_min"))
            thr = cfg.s_threshold if cfg.s_threshold is not None else cfg.n ** -9.0
            q = formula_EX(cfg.n, d)
            e.update({"freq_zero_col": float(np.mean(X >= 1)), "mean_X": float(X.mean()), "formula_EX": q,
                      "freq_singular": float(np.mean(smin <= thr)), "threshold": thr,
                      "pz_lower": paley_zygmund_bound(q, EX2_upper(cfg.n, d), 0) if q > 0 else 0.0,
                      "poisson_estimate": poisson_zero_column_estimate(float(X.mean()))})
        elif cfg.kind == "replacement":
            g = np.abs(np.array(col(rs, "gap"), dtype=np.float64))
            e["abs_gap"] = _stats(g[np.isfinite(g)]) if np.isfinite(g).any() else {}
            e["singular_markers"] = int(np.sum(~np.isfinite(g)))
        entries.append(e)
    return {"kind": cfg.kind, "n": cfg.n, "seed": cfg.seed, "z": [cfg.z_re, cfg.z_im], "by_d": entries}


def _oracle_summary(cfg: ExperimentConfig) -> dict:
    n, d = cfg.n, cfg.d
    ev = oracle.exact_event_probabilities(n, d)
    ex, ex2 = oracle.exact_zero_column_moments(n, d)
    return json.loads(oracle.fraction_json({
        "kind": "oracle", "n": n, "d": d,
        "P_singular": ev.P_singular, "P_zero_col": ev.P_zero_col, "P_dup_rows": ev.P_dup_rows,
        "P_dup_cols": ev.P_dup_cols, "containment_ok": ev.containment_ok,
        "EX": ex, "EX2": ex2, "EX_formula": oracle.zero_column_mean(n, d),
        "EX2_upper": oracle.zero_column_second_moment_upper(n, d),
    }))


def _write_threshold_csv(summary: dict, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["d", "trials", "freq_zero_col", "mean_X", "formula_EX", "freq_singular"])
        for e in summary["by_d"]:
            w.writerow([e["d"], e["trials"], fmt(e["freq_zero_col"]), fmt(e["mean_X"]),
                        fmt(e["formula_EX"]), fmt(e["freq_singular"])])


def run(cfg: ExperimentConfig, out_dir=None, workers: int | None = None) -> dict:
    """Execute an experiment and write its bundle; returns the summary."""
    cfg.validate()
    out = Path(out_dir if out_dir is not None else cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(cfg.to_json() + "\n")
    start = time.perf_counter()
    if cfg.kind == "oracle":
        summary = _oracle_summary(cfg)
        records = []
    else:
        records = run_trials(cfg, workers)
        write_trials_csv(records, out / "trials.csv")
        summary = summarize(cfg, records)
        if cfg.kind == "threshold":
            _write_threshold_csv(summary, out / "sweep.csv")
        if cfg.kind == "esd":
            firsts = [r for r in records if r.trial == 0]
            for i, r in enumerate(firsts):
                title = f"normalized M_(n,d) spectrum, n={cfg.n}, d={r.d}"
                if i == 0:
                    plot_spectrum(r.extra, out / "plots" / "esd.svg", title)
                if len(firsts) > 1:
                    plot_spectrum(r.extra, out / "plots" / f"esd_d{r.d}.svg", title)
    (out / "summary.json").write_text(json.dumps(_json_safe(summary), indent=2, sort_keys=True) + "\n")
    (out / "timing.json").write_text(json.dumps({
        "total_seconds": time.perf_counter() - start,
        "trials": [{"trial": r.trial, "d": r.d, "seconds": r.wall_time} for r in records],
    }, indent=2) + "\n")
    log.info("wrote %s", out)
    return summary


__all__ = ["ConfigError", "TrialRecord", "run", "run_trials", "summarize", "tasks"]
