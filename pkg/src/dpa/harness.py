"""Experiment harness: repeated generation, aggregation, and
theory-versus-simulation reports.

Runs are independent trajectories with per-run random streams spawned
deterministically from a master seed, so a report body is reproducible
bit-for-bit (timing metadata aside) regardless of worker count.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .core import ModelParams, SeedGraph, validate_params
from .generator import generate
from .stats import x_count
from .theory import (
    DegenerateRegimeError,
    DEFAULT_QUAD,
    QuadratureSpec,
    TheoryParams,
    derive_theory,
    f_in,
    f_out,
    fbar,
    g_edge_density,
)
from .oracle import dp_E_in, dp_EX


def _package_version() -> str:
    try:
        from importlib.metadata import version

        return version("artifact")
    except Exception:
        return "unknown"


@dataclass(frozen=True)
class RunConfig:
    """Configuration of one Monte Carlo experiment.

    ``t`` is the total number of edges each run grows to; ``x_pairs``
    lists the (d1, d2) edge classes whose counts X(t, d1, d2) are
    collected.  All check tolerances are explicit here and echoed into
    the report.
    """

    params: ModelParams
    t: int
    runs: int = 1
    master_seed: int = 0
    seed_graph: SeedGraph | None = None
    d_max: int = 512
    report_d_max: int = 20
    x_pairs: tuple[tuple[int, int], ...] = ()
    sides: tuple[str, ...] = ("in",)
    jobs: int = 1
    out_dir: str | None = None
    check_theorem2: bool = True
    theorem2_eps: float = 0.1
    theorem2_min_mass: float = 1.0
    check_theorem4: bool = True

    def to_dict(self) -> dict:
        return {
            "params": self.params.as_dict(),
            "t": self.t,
            "runs": self.runs,
            "master_seed": self.master_seed,
            "seed_graph": None
            if self.seed_graph is None
            else {"n0": self.seed_graph.n0,
                  "edges": [list(e) for e in self.seed_graph.edges]},
            "d_max": self.d_max,
            "report_d_max": self.report_d_max,
            "x_pairs": [list(p) for p in self.x_pairs],
            "sides": list(self.sides),
            "jobs": self.jobs,
            "out_dir": self.out_dir,
            "check_theorem2": self.check_theorem2,
            "theorem2_eps": self.theorem2_eps,
            "theorem2_min_mass": self.theorem2_min_mass,
            "check_theorem4": self.check_theorem4,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        doc = dict(doc)
        params = ModelParams.from_dict(doc.pop("params"))
        sg = doc.pop("seed_graph", None)
        seed_graph = None
        if sg is not None:
            seed_graph = SeedGraph(
                n0=sg["n0"], edges=tuple(tuple(e) for e in sg["edges"])
            )
        if "x_pairs" in doc:
            doc["x_pairs"] = tuple(tuple(p) for p in doc["x_pairs"])
        if "sides" in doc:
            doc["sides"] = tuple(doc["sides"])
        return cls(params=params, seed_graph=seed_graph, **doc)


@dataclass
class ExperimentData:
    """Raw per-run aggregates from a batch of generations."""

    config: RunConfig
    in_counts: np.ndarray   # (runs, d_max + 1)
    out_counts: np.ndarray  # (runs, d_max + 1)
    x_counts: np.ndarray    # (runs, len(x_pairs))
    run_seconds: list[float] = field(default_factory=list)


@dataclass
class ComparisonReport:
    """Simulation aggregates against their theory targets.

    ``degree_rows``: per (side, d) the empirical mean and std of
    n(t, d) over runs, the limit prediction f(d)*t, and the z-score of
    the mean.  ``pair_rows``: same for X(t, d1, d2) against
    g(alpha+gamma, d1, d2)*t.  ``theorem2``/``theorem4`` carry the
    concentration-check summaries.  ``timing`` is the only
    non-deterministic part.
    """

    config: dict
    metadata: dict
    degree_rows: list[dict]
    pair_rows: list[dict]
    theorem2: dict | None
    theorem4: list[dict]
    timing: dict

    def body_dict(self) -> dict:
        """Deterministic report content (excludes timing)."""
        return {
            "config": self.config,
            "metadata": self.metadata,
            "degree_rows": self.degree_rows,
            "pair_rows": self.pair_rows,
            "theorem2": self.theorem2,
            "theorem4": self.theorem4,
        }

    def to_json(self, include_timing: bool = True) -> str:
        doc = self.body_dict()
        if include_timing:
            doc["timing"] = self.timing
        return json.dumps(doc, sort_keys=True, indent=2)

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())
            fh.write("\n")


def _run_one(task):
    params, seed_graph, t, master_seed, index, d_max, x_pairs = task
    started = time.perf_counter()
    ss = np.random.SeedSequence((master_seed, index))
    graph = generate(params, seed_graph, t, ss)
    in_c = np.bincount(graph.in_deg, minlength=d_max + 1)[: d_max + 1]
    out_c = np.bincount(graph.out_deg, minlength=d_max + 1)[: d_max + 1]
    xs = np.array([x_count(graph, d1, d2) for d1, d2 in x_pairs], dtype=np.int64)
    return index, in_c.astype(np.int64), out_c.astype(np.int64), xs, time.perf_counter() - started


def run_trajectories(cfg: RunConfig) -> ExperimentData:
    """Execute cfg.runs generations and collect count aggregates.

    Results are identical for any ``jobs`` value: the per-run stream
    is a function of (master_seed, run index) alone and aggregation
    assigns by run index.
    """
    params, seed_graph = validate_params(cfg.params, cfg.seed_graph)
    if cfg.runs < 1:
        raise ValueError(f"runs must be >= 1, got {cfg.runs}")
    if cfg.t < seed_graph.t0:
        raise ValueError(f"t={cfg.t} below seed edge count {seed_graph.t0}")
    tasks = [
        (params, seed_graph, cfg.t, cfg.master_seed, i, cfg.d_max, cfg.x_pairs)
        for i in range(cfg.runs)
    ]
    in_counts = np.zeros((cfg.runs, cfg.d_max + 1), dtype=np.int64)
    out_counts = np.zeros_like(in_counts)
    x_counts = np.zeros((cfg.runs, len(cfg.x_pairs)), dtype=np.int64)
    seconds = [0.0] * cfg.runs
    if cfg.jobs > 1 and cfg.runs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = pool.map(_run_one, tasks)
            for index, in_c, out_c, xs, sec in results:
                in_counts[index] = in_c
                out_counts[index] = out_c
                x_counts[index] = xs
                seconds[index] = sec
    else:
        for task in tasks:
            index, in_c, out_c, xs, sec = _run_one(task)
            in_counts[index] = in_c
            out_counts[index] = out_c
            x_counts[index] = xs
            seconds[index] = sec
    return ExperimentData(
        config=replace(cfg, params=params, seed_graph=seed_graph),
        in_counts=in_counts,
        out_counts=out_counts,
        x_counts=x_counts,
        run_seconds=seconds,
    )


def check_theorem2(counts: np.ndarray, th: TheoryParams, t: int,
                   eps: float = 0.1, min_mass: float = 1.0) -> dict:
    """Fraction of (run, degree) cells obeying the concentration bound.

    The bound tested per cell is
    ``|n(t, d) - fbar(d) t| <= (sqrt(fbar(d) t) + (d+1)^(-1/2+eps)) ln t``
    over every degree with ``fbar(d) t >= min_mass``.
    """
    counts = np.asarray(counts, dtype=np.float64)
    if counts.ndim == 1:
        counts = counts[None, :]
    d = np.arange(counts.shape[1])
    fb = fbar(d, th)
    mask = fb * t >= min_mass
    n_deg = int(mask.sum())
    if n_deg == 0:
        return {"fraction": 1.0, "cells": 0, "degrees": 0,
                "eps": eps, "min_mass": min_mass}
    bound = (np.sqrt(fb[mask] * t) + (d[mask] + 1.0) ** (-0.5 + eps)) * math.log(t)
    dev = np.abs(counts[:, mask] - fb[mask] * t)
    ok = dev <= bound
    return {
        "fraction": float(ok.mean()),
        "cells": int(ok.size),
        "degrees": n_deg,
        "eps": eps,
        "min_mass": min_mass,
    }


def check_theorem4(x_values, t: int, d1: int, d2: int) -> dict:
    """Fluctuation check for X(t, d1, d2) over repeated runs.

    Tests every run's deviation from the sample mean against the
    sqrt(t) ln t envelope; also reports the sample std against a third
    of the envelope.
    """
    xs = np.asarray(x_values, dtype=np.float64)
    if xs.size < 10:
        raise ValueError(f"need at least 10 runs, got {xs.size}")
    mean = float(xs.mean())
    std = float(xs.std(ddof=1))
    max_dev = float(np.abs(xs - mean).max())
    bound = math.sqrt(t) * math.log(t)
    return {
        "d1": d1,
        "d2": d2,
        "runs": int(xs.size),
        "mean": mean,
        "std": std,
        "max_dev": max_dev,
        "bound": bound,
        "max_dev_ok": bool(max_dev < bound),
        "std_ok": bool(std < bound / 3.0),
    }


def _degree_rows(data: ExperimentData) -> list[dict]:
    cfg = data.config
    t = cfg.t
    rows: list[dict] = []
    for side in cfg.sides:
        counts = data.in_counts if side == "in" else data.out_counts
        density = f_in if side == "in" else f_out
        x = cfg.params.alpha + cfg.params.gamma
        for d in range(min(cfg.report_d_max, cfg.d_max) + 1):
            col = counts[:, d].astype(np.float64)
            mean = float(col.mean())
            std = float(col.std(ddof=1)) if col.size > 1 else 0.0
            theory = density(d, x, cfg.params) * t
            if std > 0.0 and col.size > 1:
                z = (mean - theory) / (std / math.sqrt(col.size))
            else:
                z = None
            rows.append(
                {"side": side, "d": d, "mean": mean, "std": std,
                 "theory": theory, "z": z}
            )
    return rows


def _pair_rows(data: ExperimentData, quad: QuadratureSpec) -> list[dict]:
    cfg = data.config
    t = cfg.t
    x = cfg.params.alpha + cfg.params.gamma
    rows: list[dict] = []
    for j, (d1, d2) in enumerate(cfg.x_pairs):
        col = data.x_counts[:, j].astype(np.float64)
        mean = float(col.mean())
        std = float(col.std(ddof=1)) if col.size > 1 else 0.0
        try:
            theory = g_edge_density(x, d1, d2, cfg.params, quad) * t
        except DegenerateRegimeError:
            theory = None
        if theory is not None and std > 0.0 and col.size > 1:
            z = (mean - theory) / (std / math.sqrt(col.size))
        else:
            z = None
        rows.append(
            {"d1": d1, "d2": d2, "mean": mean, "std": std,
             "theory": theory, "z": z}
        )
    return rows


def run_experiment(cfg: RunConfig, quad: QuadratureSpec = DEFAULT_QUAD) -> ComparisonReport:
    """Run the configured trajectories and build the comparison report.

    Writes ``report.json`` into ``cfg.out_dir`` when set.
    """
    started = time.perf_counter()
    data = run_trajectories(cfg)
    cfg = data.config
    th = None
    th_error = None
    try:
        th = derive_theory(cfg.params)
    except Exception as exc:  # degenerate parameter corners
        th_error = str(exc)

    degree_rows = _degree_rows(data) if th is not None else []
    pair_rows = _pair_rows(data, quad)

    theorem2 = None
    if cfg.check_theorem2:
        if th is None:
            theorem2 = {"skipped": th_error}
        else:
            try:
                theorem2 = check_theorem2(
                    data.in_counts, th, cfg.t,
                    eps=cfg.theorem2_eps, min_mass=cfg.theorem2_min_mass,
                )
            except DegenerateRegimeError as exc:
                theorem2 = {"skipped": str(exc)}

    theorem4 = []
    if cfg.check_theorem4 and cfg.runs >= 10:
        for j, (d1, d2) in enumerate(cfg.x_pairs):
            theorem4.append(check_theorem4(data.x_counts[:, j], cfg.t, d1, d2))

    seed_graph = cfg.seed_graph
    report = ComparisonReport(
        config=cfg.to_dict(),
        metadata={
            "n0": seed_graph.n0,
            "t0": seed_graph.t0,
            "version": _package_version(),
            "x": cfg.params.alpha + cfg.params.gamma,
        },
        degree_rows=degree_rows,
        pair_rows=pair_rows,
        theorem2=theorem2,
        theorem4=theorem4,
        timing={
            "total_seconds": time.perf_counter() - started,
            "run_seconds": data.run_seconds,
        },
    )
    if cfg.out_dir:
        os.makedirs(cfg.out_dir, exist_ok=True)
        report.save(os.path.join(cfg.out_dir, "report.json"))
    return report


def compare_theory_vs_oracle(
    params: ModelParams,
    seed_graph: SeedGraph | None = None,
    T_grid: tuple[int, ...] = (250, 500, 1000),
    d_grid: tuple[int, ...] = (0, 1, 2, 3),
    pairs: tuple[tuple[int, int], ...] = (),
    quad: QuadratureSpec = DEFAULT_QUAD,
) -> dict:
    """Convergence table: conditional expectation tables against their
    limit shapes.

    For each T in the grid and N = round((alpha+gamma) T), compares
    E_d(T, N)/T with f_in(d, N/T), and (for requested pairs)
    E_X(T, N, d1, d2)/T with g(N/T, d1, d2).
    """
    p, seed = validate_params(params, seed_graph)
    x_nom = p.alpha + p.gamma
    T_max = max(T_grid)
    tab = dp_E_in(p, seed, T_max, max(d_grid))
    degree_rows = []
    for T in sorted(T_grid):
        N = round(x_nom * T)
        xr = N / T
        plane = tab.plane(T)
        for d in d_grid:
            dp_val = float(plane[d, N]) / T
            target = f_in(d, xr, p)
            degree_rows.append(
                {"T": T, "N": N, "d": d, "dp_over_T": dp_val,
                 "theory": target, "abs_gap": abs(dp_val - target)}
            )
    pair_rows = []
    if pairs:
        ex = dp_EX(p, seed, T_max, max(d1 for d1, _ in pairs),
                   max(d2 for _, d2 in pairs))
        for T in sorted(T_grid):
            N = round(x_nom * T)
            xr = N / T
            plane = ex.plane(T)
            for d1, d2 in pairs:
                dp_val = float(plane[d1, d2, N]) / T
                try:
                    target = g_edge_density(xr, d1, d2, p, quad)
                except DegenerateRegimeError:
                    target = None
                row = {"T": T, "N": N, "d1": d1, "d2": d2, "dp_over_T": dp_val,
                       "theory": target}
                row["abs_gap"] = None if target is None else abs(dp_val - target)
                pair_rows.append(row)
    return {"degree_rows": degree_rows, "pair_rows": pair_rows}
