"""End-to-end experiment: fuzzify, rank, simulate, evaluate, average over seeds.

Layout of the output directory::

    seed_<s>/graph.edges            fuzzified instance
    seed_<s>/spread.csv             SIR spreading capability per node
    seed_<s>/ranking_<M>.csv        one per method
    seed_<s>/robustness_<M>.csv
    seed_<s>/imprecision_<M>.csv
    seed_<s>/bench.csv              wall-clock timings (not reproducible)
    averaged/robustness_<M>.csv     step-wise mean over seeds
    averaged/imprecision_<M>.csv    per-p mean over seeds
    averaged/bench.csv
    summary.csv                     method, R, mean imprecision
    plots/fig1_robustness.csv|svg, fig2_imprecision.csv|svg, fig3_runtime.csv|svg

Only the timing files (``bench.csv`` and ``fig3_runtime.*``) vary between
reruns of the same configuration.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import shutil
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from . import plotting
from .centrality import Method, rank, ranking_to_csv
from .diffusion import SirParams, cached_spread_table, default_beta, spread_table_to_csv
from .evaluation import (
    BenchRecord,
    ImprecisionPoint,
    bench_to_csv,
    curve_to_csv,
    default_p_grid,
    imprecision_grid,
    imprecision_to_csv,
    robustness,
    runtime_bench,
)
from .graphcore import FuzzyGraph, fuzzify, read_edge_list, serialize_edge_list

log = logging.getLogger(__name__)

ALL_METHODS = tuple(Method)


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        super().__init__(f"experiment failed during {stage}: {cause}")


@dataclass
class ExperimentConfig:
    network: Path
    out_dir: Path
    seeds: tuple[int, ...] = (1, 2, 3)
    methods: tuple[Method, ...] = ALL_METHODS
    beta: float | None = None
    runs: int = 1000
    master_seed: int = 0
    p_grid: tuple[float, ...] = field(default_factory=lambda: tuple(default_p_grid()))
    bench_reps: int = 3
    threads: int = 1
    cache_dir: Path | None = None
    svg: bool = False

    def __post_init__(self):
        self.network = Path(self.network)
        self.out_dir = Path(self.out_dir)
        self.methods = tuple(Method.parse(m) for m in self.methods)
        self.seeds = tuple(int(s) for s in self.seeds)
        self.p_grid = tuple(float(p) for p in self.p_grid)
        if not self.seeds:
            raise ValueError("need at least one fuzzification seed")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError("fuzzification seeds must be distinct")
        if not self.methods:
            raise ValueError("need at least one method")
        if any(not 0 < p <= 1 for p in self.p_grid):
            raise ValueError("p-grid values must lie in (0, 1]")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.beta is not None and self.beta < 0:
            raise ValueError("beta must be >= 0")
        if self.bench_reps < 3:
            raise ValueError("benchmark repetitions must be >= 3")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


@dataclass
class SeedResult:
    seed: int
    r_values: dict[Method, float]
    curves: dict[Method, list[float]]
    imprecision: dict[Method, list[ImprecisionPoint]]
    bench: list[BenchRecord]
    cache_hit: bool


def _mean(values) -> float:
    values = list(values)
    return math.fsum(values) / len(values)


def _run_seed(graph: FuzzyGraph, seed: int, cfg: ExperimentConfig, folder: Path) -> SeedResult:
    stage = f"fuzzify (seed {seed})"
    try:
        fz = fuzzify(graph, seed)
        folder.mkdir(parents=True)
        (folder / "graph.edges").write_text(serialize_edge_list(fz))

        stage = f"spread simulation (seed {seed})"
        beta = cfg.beta if cfg.beta is not None else default_beta(fz)
        params = SirParams(beta=beta, runs=cfg.runs, master_seed=cfg.master_seed)
        spreads, hit = cached_spread_table(fz, params, cfg.cache_dir, threads=cfg.threads)
        log.info("seed %d: spread table %s (beta=%.6g)", seed, "from cache" if hit else "simulated", beta)
        (folder / "spread.csv").write_text(spread_table_to_csv(spreads))

        r_values, curves, impr = {}, {}, {}
        for method in cfg.methods:
            stage = f"ranking {method.value} (seed {seed})"
            result = rank(fz, method)
            (folder / f"ranking_{method.value}.csv").write_text(ranking_to_csv(result, fz.labels))
            stage = f"robustness {method.value} (seed {seed})"
            curve = robustness(fz, result)
            (folder / f"robustness_{method.value}.csv").write_text(curve_to_csv(curve))
            stage = f"imprecision {method.value} (seed {seed})"
            points = imprecision_grid(result, spreads, cfg.p_grid)
            (folder / f"imprecision_{method.value}.csv").write_text(imprecision_to_csv(points))
            r_values[method] = curve.r_value
            curves[method] = curve.lcc_fractions.tolist()
            impr[method] = points

        stage = f"runtime benchmark (seed {seed})"
        bench = runtime_bench(fz, cfg.methods, cfg.bench_reps, network=f"{cfg.network.stem}W-s{seed}")
        (folder / "bench.csv").write_text(bench_to_csv(bench))
    except StageError:
        raise
    except Exception as exc:
        raise StageError(stage, exc) from exc
    return SeedResult(seed, r_values, curves, impr, bench, hit)


def _table(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _g(x: float) -> str:
    return f"{x:.17g}"


def _write_averages(results: list[SeedResult], cfg: ExperimentConfig, out: Path) -> dict:
    avg = out / "averaged"
    avg.mkdir()
    summary = {}
    avg_curves, avg_e = {}, {}
    for method in cfg.methods:
        steps = zip(*(r.curves[method] for r in results))
        curve = [_mean(step) for step in steps]
        (avg / f"robustness_{method.value}.csv").write_text(
            _table(["step", "lcc_fraction"], ([i, _g(x)] for i, x in enumerate(curve, start=1)))
        )
        rows, e_values = [], []
        for j, p in enumerate(cfg.p_grid):
            pts = [r.imprecision[method][j] for r in results]
            fm, fe, ev = (_mean(getattr(q, a) for q in pts) for a in ("f_method", "f_eff", "e_value"))
            rows.append([_g(p), _g(fm), _g(fe), _g(ev)])
            e_values.append(ev)
        (avg / f"imprecision_{method.value}.csv").write_text(
            _table(["p", "f_method", "f_eff", "e_value"], rows)
        )
        seconds = _mean(rec.median_seconds for r in results for rec in r.bench if rec.method is method)
        summary[method] = {
            "r_value": _mean(r.r_values[method] for r in results),
            "mean_imprecision": _mean(e_values),
            "seconds": seconds,
        }
        avg_curves[method] = curve
        avg_e[method] = e_values

    (avg / "bench.csv").write_text(_table(
        ["method", "network", "median_seconds", "reps"],
        ([m.value, cfg.network.stem + "W", _g(summary[m]["seconds"]), cfg.bench_reps] for m in cfg.methods),
    ))
    (out / "summary.csv").write_text(_table(
        ["method", "r_value", "mean_imprecision", "reconstructed"],
        ([m.value, _g(s["r_value"]), _g(s["mean_imprecision"]), int(m.reconstructed)]
         for m, s in summary.items()),
    ))

    plots = out / "plots"
    plots.mkdir()
    names = [m.display_name for m in cfg.methods]
    n_steps = len(next(iter(avg_curves.values())))
    (plots / "fig1_robustness.csv").write_text(_table(
        ["step", *names],
        ([i + 1, *(_g(avg_curves[m][i]) for m in cfg.methods)] for i in range(n_steps)),
    ))
    (plots / "fig2_imprecision.csv").write_text(_table(
        ["p", *names],
        ([_g(p), *(_g(avg_e[m][j]) for m in cfg.methods)] for j, p in enumerate(cfg.p_grid)),
    ))
    (plots / "fig3_runtime.csv").write_text(_table(
        ["method", "median_seconds"],
        ([m.display_name, _g(summary[m]["seconds"])] for m in cfg.methods),
    ))
    if cfg.svg:
        title = cfg.network.stem + "W"
        plotting.robustness_svg({m.display_name: avg_curves[m] for m in cfg.methods},
                                plots / "fig1_robustness.svg", title)
        plotting.imprecision_svg({m.display_name: avg_e[m] for m in cfg.methods}, cfg.p_grid,
                                 plots / "fig2_imprecision.svg", title)
        plotting.runtime_svg({m.display_name: summary[m]["seconds"] for m in cfg.methods},
                             plots / "fig3_runtime.svg", title)
    return summary


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Run the whole pipeline; returns ``{method: {"r_value", "mean_imprecision", "seconds"}}``.

    Everything is written to a scratch directory next to ``cfg.out_dir`` and
    moved into place only on success, so a failure leaves no partial output.
    """
    try:
        graph = read_edge_list(cfg.network)
    except Exception as exc:
        raise StageError("loading network", exc) from exc

    out = cfg.out_dir
    if out.exists() and any(out.iterdir()) and not (out / "summary.csv").exists():
        raise StageError("preparing output", FileExistsError(f"{out} exists and is not an experiment output"))
    out.parent.mkdir(parents=True, exist_ok=True)
    scratch = Path(tempfile.mkdtemp(prefix=f".{out.name}-", dir=out.parent))
    try:
        results = []
        for seed in cfg.seeds:
            log.info("seed %d: running %d methods", seed, len(cfg.methods))
            results.append(_run_seed(graph, seed, cfg, scratch / f"seed_{seed}"))
        try:
            summary = _write_averages(results, cfg, scratch)
        except Exception as exc:
            raise StageError("averaging", exc) from exc
        if out.exists():
            shutil.rmtree(out)
        scratch.rename(out)
    except BaseException:
        shutil.rmtree(scratch, ignore_errors=True)
        raise
    return summary
