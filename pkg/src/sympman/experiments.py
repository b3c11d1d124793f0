"""Numerical experiments: feasibility along curves, nearest symplectic matrix, subspace fit.

Each ``run_*`` function returns an :class:`ExperimentResult` holding a
deterministic data table, a deterministic summary table and a separate
wall-clock table. Independent runs may be evaluated on a thread pool; the
tables are always assembled in run order.
"""

import math
import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import optim
from . import sp_stiefel as st
from .errors import ConvergenceError, DimensionError, DomainError, SingularityError
from .matfun import feasibility, make_rng, rand_stiefel_point, rand_stiefel_tangent

COMMANDS = ("feasibility", "nearest", "subspace")

#: curves compared in the feasibility experiment
FEASIBILITY_CURVES = {
    "riem_geodesic": st.exp_g_st_reduced,
    "cayley": st.cayley_retract,
    "pseudo_geodesic": st.exp_h_st_reduced,
    "quasi_geodesic": st.quasi_geodesic_retract,
}

METRIC_MODES = {"stiefel": "stiefel_g", "grassmann": "grassmann_g"}

DEFAULT_RETRACTIONS = {
    "feasibility": tuple(FEASIBILITY_CURVES),
    "nearest": ("geodesic", "cayley"),
    "subspace": ("geodesic", "cayley"),
}
DEFAULT_METRICS = {
    "feasibility": (),
    "nearest": ("stiefel",),
    "subspace": ("grassmann", "stiefel"),
}


@dataclass
class ExperimentConfig:
    command: str
    n: int = 100
    k: int = 10
    seed: int = 0
    runs: int = 10
    retractions: tuple = None
    metrics: tuple = None
    t_max: float = 1e3
    t_samples: int = 500
    max_iters: int = 100
    scale_a: float = 1.0
    noise: float = 1.0
    output_path: str = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.retractions is None:
            self.retractions = DEFAULT_RETRACTIONS[self.command]
        if self.metrics is None:
            self.metrics = DEFAULT_METRICS[self.command]
        self.retractions = tuple(self.retractions)
        self.metrics = tuple(self.metrics)
        self.validate()

    def validate(self):
        if not self.n >= self.k >= 1:
            raise DimensionError(f"need n >= k >= 1, got n={self.n}, k={self.k}")
        if self.runs < 1:
            raise ValueError("runs must be at least 1")
        if self.t_samples < 2:
            raise ValueError("t_samples must be at least 2")
        if not self.t_max > 0:
            raise ValueError("t_max must be positive")
        if self.max_iters < 0:
            raise ValueError("max_iters must be non-negative")
        if self.command == "feasibility":
            bad = set(self.retractions) - set(FEASIBILITY_CURVES)
        else:
            bad = set(self.retractions) - {"geodesic", "cayley", "quasi_geodesic"}
        if bad:
            raise ValueError(f"unknown retraction(s) for {self.command}: {sorted(bad)}")
        bad = set(self.metrics) - set(METRIC_MODES)
        if bad:
            raise ValueError(f"unknown metric(s): {sorted(bad)}")
        if self.command == "nearest" and "grassmann" in self.metrics:
            raise ValueError("the nearest-matrix objective is not subspace-invariant")
        if "grassmann" in self.metrics and "quasi_geodesic" in self.retractions:
            raise ValueError("the quasi-geodesic is only defined on SpSt")
        if self.command != "feasibility" and not (self.metrics and self.retractions):
            raise ValueError("need at least one metric and one retraction")


@dataclass
class ExperimentResult:
    header: list
    rows: list
    summary_header: list
    summary_rows: list
    timing_header: list = field(default_factory=lambda: ["method", "run", "seconds"])
    timing_rows: list = field(default_factory=list)


def thread_count():
    """Worker count from ``SYMPMAN_THREADS`` (default 1)."""
    raw = os.environ.get("SYMPMAN_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map_runs(fn, count):
    workers = min(thread_count(), count)
    if workers == 1:
        return [fn(r) for r in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(count)))


def _run_seed(cfg, r):
    return cfg.seed + r


def feasibility_times(t_max, t_samples):
    """Logarithmic grid from ``t_max * 1e-6`` to ``t_max``."""
    return np.logspace(math.log10(t_max) - 6.0, math.log10(t_max), t_samples)


_CURVE_ERRORS = (SingularityError, DomainError, ConvergenceError, np.linalg.LinAlgError)


def run_feasibility(cfg):
    """Feasibility ``||U(t)^+ U(t) - I||_F`` along each curve, averaged over runs."""
    ts = feasibility_times(cfg.t_max, cfg.t_samples)
    names = list(cfg.retractions)

    def one(r):
        rng = make_rng(_run_seed(cfg, r))
        u = rand_stiefel_point(rng, cfg.n, cfg.k, scale="cay_one")
        d = rand_stiefel_tangent(rng, u)
        table = np.full((len(ts), len(names)), np.nan)
        timing = []
        for j, name in enumerate(names):
            curve = FEASIBILITY_CURVES[name]
            start = time.perf_counter()
            for i, t in enumerate(ts):
                with np.errstate(all="ignore"), warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    try:
                        table[i, j] = feasibility(curve(u, d, t))
                    except _CURVE_ERRORS:
                        pass
            timing.append([name, r, time.perf_counter() - start])
        return table, timing

    results = _map_runs(one, cfg.runs)
    stack = np.stack([tab for tab, _ in results])
    with np.errstate(all="ignore"), warnings.catch_warnings():
        warnings.simplefilter("ignore")
        mean = np.nanmean(stack, axis=0)
    rows = [[t, *mean[i]] for i, t in enumerate(ts)]
    big = ts >= 1e2
    summary = []
    for j, name in enumerate(names):
        col = mean[:, j]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            tail = np.nanmax(col[big]) if big.any() else math.nan
            summary.append([name, col[0], np.nanmax(col), tail])
    return ExperimentResult(
        header=["t", *names],
        rows=rows,
        summary_header=["method", "feas_min_t", "feas_max", "feas_max_t_ge_1e2"],
        summary_rows=summary,
        timing_rows=[row for _, timing in results for row in timing],
    )


def _methods(cfg):
    return [(m, r) for m in cfg.metrics for r in cfg.retractions]


def _method_name(metric, retraction):
    return f"{metric}_{retraction}"


def _run_descent(cfg, build):
    """Shared driver for the two optimization experiments.

    ``build(rng)`` returns ``(problem, u0)`` for one run.
    """
    methods = _methods(cfg)
    dcfg = optim.DescentConfig(max_iters=cfg.max_iters)

    def one(r):
        rng = make_rng(_run_seed(cfg, r))
        problem, u0 = build(rng)
        out = []
        for metric, retraction in methods:
            prob = problem.with_method(METRIC_MODES[metric], retraction)
            start = time.perf_counter()
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                state = optim.descend(prob, u0, dcfg)
            out.append((state, time.perf_counter() - start))
        return out

    results = _map_runs(one, cfg.runs)
    rows, timing = [], []
    per_method = {m: [] for m in methods}
    for r, run in enumerate(results):
        finals = [state.fval for state, _ in run]
        fmin = min(finals)
        for (metric, retraction), (state, secs) in zip(methods, run):
            name = _method_name(metric, retraction)
            for row in state.trace:
                rows.append([r, name, row.iter, row.fval, row.grad_norm, row.step_t])
            timing.append([name, r, secs])
            dev = (state.fval - fmin) / max(1.0, abs(fmin))
            per_method[(metric, retraction)].append(
                (state.iter + 1, state.converged, state.fval, dev,
                 bool(np.all(np.diff(state.fvals) <= 0))))
    summary = []
    for (metric, retraction), stats in per_method.items():
        iters, conv, fvals, devs, mono = zip(*stats)
        summary.append([
            _method_name(metric, retraction), float(np.mean(iters)), int(max(iters)),
            int(sum(conv)), float(np.mean(fvals)), float(max(devs)), int(all(mono)),
        ])
    return ExperimentResult(
        header=["run", "method", "iter", "fval", "grad_norm", "step_t"],
        rows=rows,
        summary_header=["method", "mean_iters", "max_iters", "converged_runs",
                        "mean_final_f", "max_rel_dev", "monotone"],
        summary_rows=summary,
        timing_rows=timing,
    )


def run_nearest(cfg):
    """Nearest symplectic matrix to a Gaussian target of spectral norm ``scale_a``."""

    def build(rng):
        a = optim.nearest_target(rng, cfg.n, cfg.k, cfg.scale_a)
        u0 = rand_stiefel_point(rng, cfg.n, cfg.k, scale="cay_half")
        return optim.nearest_symplectic_problem(a), u0

    return _run_descent(cfg, build)


def run_subspace(cfg):
    """Best symplectic subspace for ``S = A A^+ + noise * E / ||E||_2``."""

    def build(rng):
        s, _ = optim.subspace_data(rng, cfg.n, cfg.k, cfg.noise)
        u0 = rand_stiefel_point(rng, cfg.n, cfg.k, scale="cay_half")
        return optim.subspace_fit_problem(s), u0

    return _run_descent(cfg, build)


RUNNERS = {"feasibility": run_feasibility, "nearest": run_nearest, "subspace": run_subspace}


def run(cfg):
    return RUNNERS[cfg.command](cfg)


def format_cell(x):
    """Locale-free, round-trip exact cell text (``nan``/``inf`` spelled out)."""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def to_csv(header, rows):
    lines = [",".join(header)]
    lines.extend(",".join(format_cell(c) for c in row) for row in rows)
    return "\n".join(lines) + "\n"


def write_result(result, out):
    """Write ``out``, ``out.summary.csv`` and ``out.timing.csv``; return the paths."""
    paths = (out, f"{out}.summary.csv", f"{out}.timing.csv")
    tables = ((result.header, result.rows),
              (result.summary_header, result.summary_rows),
              (result.timing_header, result.timing_rows))
    for path, (header, rows) in zip(paths, tables):
        with open(path, "w", newline="") as fh:
            fh.write(to_csv(header, rows))
    return paths


def format_summary(result):
    """Aligned text table of the summary rows."""
    cells = [result.summary_header]
    for row in result.summary_rows:
        cells.append([c if isinstance(c, str) else
                      (f"{c:.4g}" if isinstance(c, float) else str(c)) for c in row])
    widths = [max(len(r[i]) for r in cells) for i in range(len(cells[0]))]
    lines = ["  ".join(c.rjust(w) if i else c.ljust(w)
                       for i, (c, w) in enumerate(zip(r, widths))) for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)
