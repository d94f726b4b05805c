"""Comparison harness: evidence optimization vs PMMH baselines.

Every method gets the same number of evidence evaluations per run and the
same per-run seeds. Results are flat per-evaluation rows (cumulative best
evidence and distance to the generating parameters where defined), written as
CSV, with ground truth echoed as JSON next to the results when known.
"""

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..driver import OptConfig, _jsonable, optimize
from ..errors import ContractError
from ..infer import pmmh
from .registry import build_model

METHODS = ("bo", "pmmh-lmh", "pmmh-rmh")

CSV_COLUMNS = ("model", "method", "run", "seed", "eval_index", "theta_json",
               "log_z", "best_log_z", "dist_to_truth", "wall_ms")


@dataclass
class ExperimentSpec:
    """One comparison: model, methods, matched budgets and seeds."""

    model_id: str
    methods: tuple = METHODS
    budget: int = 50
    n_particles: int = 200
    runs: int = 10
    seed: int = 0
    seeds: Optional[tuple] = None
    n_init: int = 5
    rmh_scale: float = 0.2
    output_path: Optional[str] = None
    model_config: dict = field(default_factory=dict)
    n_jobs: int = 1

    def __post_init__(self):
        if isinstance(self.methods, str):
            self.methods = tuple(self.methods.split(","))
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ContractError(f"unknown methods {sorted(unknown)}; "
                                f"available: {METHODS}")
        if self.budget < 0:
            raise ContractError("budget must be >= 0")
        if self.seeds is not None and len(self.seeds) != self.runs:
            raise ContractError("seeds must have one entry per run")

    def run_seed(self, run_idx):
        if self.seeds is not None:
            return int(self.seeds[run_idx])
        return int(np.random.SeedSequence([self.seed, run_idx]).generate_state(1)[0])


@dataclass
class ResultsTable:
    rows: list

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(",".join(CSV_COLUMNS) + "\n")
            for row in self.rows:
                fh.write(",".join(_csv_cell(row[c]) for c in CSV_COLUMNS) + "\n")

    def column(self, name, method=None, run=None):
        out = []
        for row in self.rows:
            if method is not None and row["method"] != method:
                continue
            if run is not None and row["run"] != run:
                continue
            out.append(row[name])
        return out

    def curve_matrix(self, method, column="best_log_z"):
        """(runs x budget) matrix of a per-evaluation column for one method."""
        runs = sorted({row["run"] for row in self.rows if row["method"] == method})
        series = []
        for r in runs:
            vals = [row[column] for row in self.rows
                    if row["method"] == method and row["run"] == r]
            series.append(vals)
        return np.asarray(series, dtype=float)

    def median_curve(self, method, column="best_log_z"):
        matrix = self.curve_matrix(method, column)
        return np.median(matrix, axis=0)

    def quantile_band(self, method, column="best_log_z", q=(0.25, 0.75)):
        matrix = self.curve_matrix(method, column)
        return np.quantile(matrix, q[0], axis=0), np.quantile(matrix, q[1], axis=0)


def _csv_cell(value):
    if isinstance(value, str):
        if "," in value or '"' in value:
            return '"' + value.replace('"', '""') + '"'
        return value
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _theta_json(theta):
    return json.dumps(_jsonable(theta), separators=(",", ":"), sort_keys=True)


def _rows_for_run(spec, built, method, run_idx, seed):
    """Per-evaluation records for one (method, run)."""
    model = built.model
    distance = built.distance_fn
    rows = []
    best = -math.inf

    def add_row(idx, theta, log_z, rep_theta, wall_ms):
        nonlocal best
        best = max(best, log_z)
        d = float("nan")
        if distance is not None and rep_theta is not None:
            d = float(distance(rep_theta))
        rows.append({"model": spec.model_id, "method": method, "run": run_idx,
                     "seed": seed, "eval_index": idx,
                     "theta_json": _theta_json(theta), "log_z": float(log_z),
                     "best_log_z": float(best), "dist_to_truth": d,
                     "wall_ms": wall_ms})

    t_start = time.perf_counter()

    def elapsed_ms():
        return int(round(1000.0 * (time.perf_counter() - t_start)))

    if method == "bo":
        n_init = spec.n_init
        if spec.budget <= n_init:
            raise ContractError("budget must exceed n_init for the bo method")
        iters = spec.budget - n_init
        cfg = OptConfig(n_init=n_init, n_particles=spec.n_particles,
                        max_iterations=iters, seed=seed)
        idx = 0
        best_so_far = None
        best_z = -math.inf
        for step in optimize(model, cfg):
            if idx == 0:
                for theta, log_z in step.diagnostics.get("init_evaluations", []):
                    idx += 1
                    if log_z > best_z:
                        best_z = log_z
                        best_so_far = theta
                    add_row(idx, theta, log_z, best_so_far, elapsed_ms())
            idx += 1
            add_row(idx, step.theta_next, step.log_z_next, step.theta_star,
                    elapsed_ms())
            if idx >= spec.budget:
                break
    else:
        kernel = "lmh" if method == "pmmh-lmh" else "rmh"
        rng = np.random.default_rng(seed)
        chain = pmmh(model, n_iters=spec.budget, n_particles=spec.n_particles,
                     kernel=kernel, rw_scale=spec.rmh_scale, rng=rng,
                     half_widths=built.half_widths)
        for idx, (theta, log_z) in enumerate(chain, start=1):
            add_row(idx, theta, log_z, theta, elapsed_ms())
    return rows


def _run_task(args):
    spec_dict, method, run_idx = args
    spec = ExperimentSpec(**spec_dict)
    built = build_model(spec.model_id, spec.model_config)
    return _rows_for_run(spec, built, method, run_idx, spec.run_seed(run_idx))


def run_experiment(spec):
    """Run every (method, run) cell of the spec and collect the table.

    Runs execute independently (optionally across processes); rows keep a
    deterministic order regardless of scheduling. Partial results are flushed
    to the output path as soon as each cell finishes.
    """
    tasks = [(spec.__dict__.copy(), method, run_idx)
             for method in spec.methods for run_idx in range(spec.runs)]
    if spec.budget == 0:
        table = ResultsTable(rows=[])
        if spec.output_path:
            table.to_csv(spec.output_path)
        return table

    results = {}
    if spec.n_jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=spec.n_jobs) as pool:
            for task, rows in zip(tasks, pool.map(_run_task, tasks)):
                results[(task[1], task[2])] = rows
                _flush_partial(spec, tasks, results)
    else:
        for task in tasks:
            results[(task[1], task[2])] = _run_task(task)
            _flush_partial(spec, tasks, results)

    rows = []
    for method in spec.methods:
        for run_idx in range(spec.runs):
            rows.extend(results[(method, run_idx)])
    table = ResultsTable(rows=rows)
    if spec.output_path:
        table.to_csv(spec.output_path)
        _write_truth(spec)
    return table


def _flush_partial(spec, tasks, results):
    if not spec.output_path:
        return
    rows = []
    for task in tasks:
        key = (task[1], task[2])
        if key in results:
            rows.extend(results[key])
    ResultsTable(rows=rows).to_csv(spec.output_path)


def _write_truth(spec):
    built = build_model(spec.model_id, spec.model_config)
    if built.truth is None:
        return
    path = os.path.splitext(spec.output_path)[0] + "_truth.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(built.truth), fh, indent=2, sort_keys=True)
        fh.write("\n")
