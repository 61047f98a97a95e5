"""Experiment harness: time-to-target series, rank-sum significance tests
and batch comparison tables over repeated solver runs."""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from itertools import combinations

import numpy as np

from .driver import RunRecord, SolverConfig, vfhlb
from .instance import Instance


@dataclass
class TttSeries:
    target: float
    times: np.ndarray  # sorted ascending
    probs: np.ndarray  # (i - 0.5) / N
    rows: list[dict]  # per run: run, seed, time_s, hit


def ttt_probabilities(n_runs: int) -> np.ndarray:
    return (np.arange(1, n_runs + 1) - 0.5) / n_runs


def run_ttt(
    inst: Instance,
    cfg_template: SolverConfig,
    target: float,
    n_runs: int = 100,
    *,
    optimum: float | None = None,
) -> TttSeries:
    """Independent seeded runs recording when each first reaches the target.

    Runs that never reach it are censored at the time limit and flagged in
    the rows, but still appear in the sorted series.
    """
    if optimum is not None and target < optimum:
        raise ValueError(f"target {target} is below the optimum {optimum}")
    rows: list[dict] = []
    for run in range(n_runs):
        cfg = replace(cfg_template, seed=cfg_template.seed + run)
        _, rec = vfhlb(inst, cfg)
        hit_time = None
        for cost, elapsed in rec.trajectory:
            if cost <= target + 1e-9:
                hit_time = elapsed
                break
        hit = hit_time is not None
        if not hit:
            hit_time = cfg.time_limit if cfg.time_limit is not None else rec.wall_time_s
        rows.append({"run": run, "seed": cfg.seed, "time_s": float(hit_time), "hit": hit})
    times = np.sort(np.array([r["time_s"] for r in rows]))
    return TttSeries(float(target), times, ttt_probabilities(n_runs), rows)


def write_ttt_csv(series: TttSeries, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["target", "run", "seed", "time_s", "hit"])
        for row in series.rows:
            writer.writerow(
                [series.target, row["run"], row["seed"], row["time_s"], int(row["hit"])]
            )


@dataclass
class WilcoxonResult:
    statistic: float  # rank sum of the first sample, midranks for ties
    p_value: float
    reject: bool


def _midranks(pooled: np.ndarray) -> np.ndarray:
    order = np.argsort(pooled, kind="stable")
    ranks = np.empty(len(pooled))
    i = 0
    pos = 1
    sorted_vals = pooled[order]
    while i < len(pooled):
        j = i
        while j + 1 < len(pooled) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        avg = (pos + pos + (j - i)) / 2.0
        ranks[order[i : j + 1]] = avg
        pos += j - i + 1
        i = j + 1
    return ranks


def wilcoxon_rank_sum(a, b, theta: float = 0.01) -> WilcoxonResult:
    """Two-sided rank-sum test, midrank ties, tie-corrected normal
    approximation with continuity correction; rejects when p < theta."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n, m = len(a), len(b)
    if n < 2 or m < 2:
        raise ValueError("need at least two observations per sample")
    pooled = np.concatenate([a, b])
    ranks = _midranks(pooled)
    w = float(ranks[:n].sum())
    big_n = n + m
    mu = n * (big_n + 1) / 2.0
    _, counts = np.unique(pooled, return_counts=True)
    tie_term = float(((counts**3) - counts).sum()) / (big_n * (big_n - 1))
    var = n * m / 12.0 * ((big_n + 1) - tie_term)
    if var <= 0:
        return WilcoxonResult(w, 1.0, False)
    # continuity correction at half the statistic's lattice spacing:
    # integer ranks step by 1, midranks by 0.5
    cc = 0.5 if len(counts) == big_n else 0.25
    z = max((abs(w - mu) - cc) / math.sqrt(var), 0.0)
    p = min(1.0, 2.0 * _norm_sf(z))
    return WilcoxonResult(w, p, p < theta)


def _norm_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def wilcoxon_exact_pvalue(a, b) -> float:
    """Exact two-sided permutation p-value of the rank-sum statistic,
    enumerating every assignment of pooled midranks to the first sample."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n, m = len(a), len(b)
    total = math.comb(n + m, n)
    if total > 2_000_000:
        raise ValueError(f"{total} assignments is too many to enumerate")
    ranks = _midranks(np.concatenate([a, b]))
    w_obs = float(ranks[:n].sum())
    mu = n * (n + m + 1) / 2.0
    threshold = abs(w_obs - mu) - 1e-9
    count = 0
    for picks in combinations(range(n + m), n):
        w = float(ranks[list(picks)].sum())
        if abs(w - mu) >= threshold:
            count += 1
    return count / total


@dataclass
class ComparisonRow:
    instance: str
    method: str
    avg_sol: float
    avg_time: float
    dev_time: float
    best_sol: float
    best_time: float
    avg_gap: float
    gap: float


def _run_one(args) -> dict:
    inst, name, cfg, rep = args
    cfg = replace(cfg, seed=cfg.seed + rep)
    sol, rec = vfhlb(inst, cfg)
    out = rec.to_dict()
    out.update(
        {
            "instance": inst.name or "unnamed",
            "method": name,
            "repetition": rep,
            "ok": True,
        }
    )
    return out


def batch(
    instances: list[Instance],
    methods: list[tuple[str, SolverConfig]],
    repetitions: int,
    *,
    optima: dict[str, float] | None = None,
    jobs: int = 1,
) -> tuple[list[ComparisonRow], list[dict]]:
    """Per instance x method aggregates over seeded repetitions.

    Seeds follow base + repetition index. Gap columns need the optimum in
    ``optima`` (keyed by instance name) and are NaN otherwise. Failed runs
    are recorded and skipped in the aggregates.
    """
    if not instances or not methods or repetitions < 1:
        raise ValueError("need instances, methods and at least one repetition")
    tasks = [
        (inst, name, cfg, rep)
        for inst in instances
        for name, cfg in methods
        for rep in range(repetitions)
    ]
    records: list[dict] = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_one, tasks))
    else:
        for task in tasks:
            try:
                records.append(_run_one(task))
            except Exception as exc:  # per-run failures recorded, not fatal
                inst, name, _, rep = task
                records.append(
                    {
                        "instance": inst.name or "unnamed",
                        "method": name,
                        "repetition": rep,
                        "ok": False,
                        "error": str(exc),
                    }
                )
    records.sort(key=lambda r: (r["instance"], r["method"], r["repetition"]))
    rows: list[ComparisonRow] = []
    for inst in instances:
        iname = inst.name or "unnamed"
        opt = (optima or {}).get(iname)
        for name, _ in methods:
            runs = [
                r
                for r in records
                if r["instance"] == iname and r["method"] == name and r.get("ok")
            ]
            if not runs:
                continue
            costs = np.array([r["cost"] for r in runs])
            times = np.array([r["wall_time_s"] for r in runs])
            best_sol = float(costs.min())
            best_time = float(times[costs == costs.min()].min())
            avg_sol = float(costs.mean())
            gap = (best_sol - opt) / opt if opt else math.nan
            avg_gap = (avg_sol - opt) / opt if opt else math.nan
            rows.append(
                ComparisonRow(
                    instance=iname,
                    method=name,
                    avg_sol=avg_sol,
                    avg_time=float(times.mean()),
                    dev_time=float(times.std()),
                    best_sol=best_sol,
                    best_time=best_time,
                    avg_gap=avg_gap,
                    gap=gap,
                )
            )
    return rows, records


def write_compare_csv(rows: list[ComparisonRow], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "instance",
                "method",
                "avg_sol",
                "avg_time",
                "dev_time",
                "best_sol",
                "best_time",
                "avg_gap",
                "gap",
            ]
        )
        for r in rows:
            writer.writerow(
                [
                    r.instance,
                    r.method,
                    r.avg_sol,
                    r.avg_time,
                    r.dev_time,
                    r.best_sol,
                    r.best_time,
                    r.avg_gap,
                    r.gap,
                ]
            )


def write_records_ndjson(records: list[dict], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
