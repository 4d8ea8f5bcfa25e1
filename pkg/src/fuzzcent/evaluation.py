"""Ranking quality metrics and the runtime benchmark harness."""

from __future__ import annotations

import csv
import io
import math
import statistics
import time
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .centrality import Method, RankingResult, rank
from .diffusion import SpreadEstimate
from .graphcore import FuzzyGraph

__all__ = [
    "RobustnessCurve",
    "ImprecisionPoint",
    "BenchRecord",
    "robustness",
    "robustness_value",
    "imprecision",
    "imprecision_grid",
    "default_p_grid",
    "top_k",
    "runtime_bench",
    "random_graph",
    "size_ladder",
    "growth_exponent",
    "curve_to_csv",
    "curve_from_csv",
    "imprecision_to_csv",
    "bench_to_csv",
]


@dataclass(frozen=True)
class RobustnessCurve:
    removal_order: np.ndarray
    lcc_fractions: np.ndarray
    r_value: float


@dataclass(frozen=True)
class ImprecisionPoint:
    p: float
    f_method: float
    f_eff: float
    e_value: float


@dataclass(frozen=True)
class BenchRecord:
    method: Method
    network: str
    median_seconds: float
    reps: int


# ---------------------------------------------------------------------------
# Robustness
# ---------------------------------------------------------------------------

def robustness_value(fractions: Sequence[float]) -> float:
    """Aggregate R: the mean of the post-removal LCC fractions."""
    return math.fsum(fractions) / len(fractions)


def robustness(graph: FuzzyGraph, ranking: RankingResult) -> RobustnessCurve:
    """Remove nodes in ``ranking.order`` (static order) and track the LCC.

    ``lcc_fractions[i-1] = S_i / (N - 1)`` where ``S_i`` is the largest
    component after the first ``i`` removals. Computed in reverse by adding
    nodes back with union-find, O(m alpha(n)) overall.
    """
    n = graph.n
    if n < 2:
        raise ValueError("robustness needs at least two nodes")
    order = np.asarray(ranking.order, dtype=np.int64)
    if sorted(order.tolist()) != list(range(n)):
        raise ValueError("ranking order must be a permutation of all nodes")

    parent = list(range(n))
    size = [1] * n
    alive = [False] * n

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    sizes = [0] * n  # sizes[i] = LCC after removing order[:i+1]
    best = 0
    indptr, indices = graph.indptr, graph.indices
    for i in range(n - 1, 0, -1):
        v = int(order[i])
        alive[v] = True
        root = v
        for u in indices[indptr[v]:indptr[v + 1]].tolist():
            if not alive[u]:
                continue
            ru, rv = find(u), find(root)
            if ru == rv:
                continue
            if size[ru] > size[rv]:
                ru, rv = rv, ru
            parent[ru] = rv
            size[rv] += size[ru]
            root = rv
        best = max(best, size[find(v)])
        sizes[i - 1] = best
    fractions = np.array(sizes, dtype=np.float64) / (n - 1)
    return RobustnessCurve(order, fractions, robustness_value(fractions.tolist()))


# ---------------------------------------------------------------------------
# Imprecision
# ---------------------------------------------------------------------------

def _top_count(p: float, n: int) -> int:
    if not 0 < p <= 1:
        raise ValueError(f"top fraction p={p} must lie in (0, 1]")
    # round first so that e.g. 0.07 * 100 gives 7, not 8
    return max(1, math.ceil(round(p * n, 9)))


def top_k(spreads: Sequence[SpreadEstimate], k: int) -> list[int]:
    """Indices of the k largest spreads, ties by ascending node index."""
    ordered = sorted(range(len(spreads)), key=lambda v: (-spreads[v].mean_fraction, v))
    return ordered[:k]


def imprecision(ranking: RankingResult, spreads: Sequence[SpreadEstimate], p: float) -> ImprecisionPoint:
    """``E(p) = 1 - F_M / F_eff`` over the top ``ceil(p * n)`` nodes."""
    if not spreads:
        raise ValueError("empty spread table")
    n = len(spreads)
    if ranking.n != n:
        raise ValueError("ranking and spread table cover different node counts")
    k = _top_count(p, n)
    frac = [s.mean_fraction for s in spreads]
    f_method = math.fsum(frac[v] for v in ranking.order[:k].tolist()) / k
    f_eff = math.fsum(frac[v] for v in top_k(spreads, k)) / k
    return ImprecisionPoint(p, f_method, f_eff, 1.0 - f_method / f_eff)


def default_p_grid() -> list[float]:
    return [round(0.02 * i, 2) for i in range(1, 11)]


def imprecision_grid(
    ranking: RankingResult,
    spreads: Sequence[SpreadEstimate],
    grid: Iterable[float] | None = None,
) -> list[ImprecisionPoint]:
    grid = default_p_grid() if grid is None else grid
    return [imprecision(ranking, spreads, p) for p in grid]


# ---------------------------------------------------------------------------
# Runtime benchmark
# ---------------------------------------------------------------------------

def runtime_bench(
    graph: FuzzyGraph,
    methods: Iterable[Method | str],
    repetitions: int = 5,
    network: str = "graph",
) -> list[BenchRecord]:
    """Median wall time of a full ranking per method, after one untimed warm-up.

    Runs in the calling thread only; graph loading is not timed.
    """
    if repetitions < 3:
        raise ValueError("repetitions must be >= 3")
    records = []
    for method in methods:
        method = Method.parse(method)
        rank(graph, method)
        times = []
        for _ in range(repetitions):
            t0 = time.perf_counter()
            rank(graph, method)
            times.append(time.perf_counter() - t0)
        records.append(BenchRecord(method, network, statistics.median(times), repetitions))
    return records


def random_graph(n: int, mean_degree: float, seed: int = 0) -> FuzzyGraph:
    """Uniform random graph with ``round(n * mean_degree / 2)`` edges and Uniform(0,1) weights."""
    m = int(round(n * mean_degree / 2))
    if m > n * (n - 1) // 2:
        raise ValueError("too many edges requested")
    rng = np.random.default_rng(seed)
    chosen: set[tuple[int, int]] = set()
    while len(chosen) < m:
        need = m - len(chosen)
        a = rng.integers(0, n, size=2 * need)
        b = rng.integers(0, n, size=2 * need)
        for u, v in zip(a.tolist(), b.tolist()):
            if u == v:
                continue
            key = (u, v) if u < v else (v, u)
            if key not in chosen:
                chosen.add(key)
                if len(chosen) == m:
                    break
    keys = sorted(chosen)
    weights = 1.0 - rng.random(m)  # (0, 1]
    return FuzzyGraph(n, [(u, v, w) for (u, v), w in zip(keys, weights.tolist())])


def size_ladder(
    sizes: Sequence[int],
    methods: Iterable[Method | str],
    mean_degree: float = 6.0,
    repetitions: int = 3,
    seed: int = 0,
) -> tuple[list[int], list[BenchRecord]]:
    """Bench every method on random graphs of increasing size; returns edge counts and records."""
    methods = [Method.parse(m) for m in methods]
    edge_counts, records = [], []
    for n in sizes:
        g = random_graph(n, mean_degree, seed=seed + n)
        edge_counts.append(g.m)
        records.extend(runtime_bench(g, methods, repetitions, network=f"random-n{n}"))
    return edge_counts, records


def growth_exponent(sizes: Sequence[float], seconds: Sequence[float]) -> float:
    """Slope of the least-squares line through ``(log size, log seconds)``."""
    slope, _ = np.polyfit(np.log(sizes), np.log(seconds), 1)
    return float(slope)


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

def _write(header: list[str], rows: Iterable[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def curve_to_csv(curve: RobustnessCurve) -> str:
    return _write(
        ["step", "lcc_fraction"],
        ([i, f"{x:.17g}"] for i, x in enumerate(curve.lcc_fractions.tolist(), start=1)),
    )


def curve_from_csv(text: str) -> np.ndarray:
    rows = list(csv.DictReader(io.StringIO(text)))
    return np.array([float(r["lcc_fraction"]) for r in rows])


def imprecision_to_csv(points: Iterable[ImprecisionPoint]) -> str:
    return _write(
        ["p", "f_method", "f_eff", "e_value"],
        ([f"{q.p:.17g}", f"{q.f_method:.17g}", f"{q.f_eff:.17g}", f"{q.e_value:.17g}"] for q in points),
    )


def bench_to_csv(records: Iterable[BenchRecord]) -> str:
    return _write(
        ["method", "network", "median_seconds", "reps"],
        ([r.method.value, r.network, f"{r.median_seconds:.17g}", r.reps] for r in records),
    )
