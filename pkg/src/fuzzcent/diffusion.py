"""Discrete-time weighted SIR Monte Carlo.

Each infectious node tries once per step to infect every susceptible
neighbour with probability ``min(1, beta * mu)``, then recovers with
probability ``gamma``. All randomness comes from a counter-based generator:
a uniform draw is a hash of ``(master_seed, seed_node, run_index)`` and of the
directed edge slot (or node) plus the attempt number. Results therefore do not
depend on worker scheduling, and two simulations with different ``beta`` share
the same draws, which makes the final outbreak monotone in ``beta``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numba
import numpy as np

from .graphcore import FuzzyGraph

__all__ = [
    "SirParams",
    "SpreadEstimate",
    "simulate_sir",
    "sir_outcome",
    "estimate_spread",
    "spread_table",
    "default_beta",
    "spread_table_to_csv",
    "spread_table_from_csv",
    "cached_spread_table",
    "cache_dir",
]

log = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1
CACHE_ENV = "FUZZCENT_CACHE_DIR"


@dataclass(frozen=True)
class SirParams:
    beta: float
    gamma: float = 1.0
    runs: int = 1000
    master_seed: int = 0

    def __post_init__(self):
        if not self.beta >= 0:
            raise ValueError("beta must be >= 0")
        if not 0 < self.gamma <= 1:
            raise ValueError("gamma must lie in (0, 1]")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")


@dataclass(frozen=True)
class SpreadEstimate:
    node: int
    mean_fraction: float
    std_error: float
    params: SirParams


# ---------------------------------------------------------------------------
# numba kernels
# ---------------------------------------------------------------------------

@numba.njit(cache=True, nogil=True)
def _mix(x):
    # splitmix64 finaliser; all operands uint64 so arithmetic wraps
    x = x + np.uint64(0x9E3779B97F4A7C15)
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


@numba.njit(cache=True, nogil=True)
def _uniform(key, a, b):
    h = _mix(key ^ _mix(np.uint64(a) ^ _mix(np.uint64(b))))
    return np.float64(h >> np.uint64(11)) * (1.0 / 9007199254740992.0)


@numba.njit(cache=True, nogil=True)
def _run_key(master_seed, seed_node, run_index):
    k = _mix(master_seed)
    k = _mix(k ^ np.uint64(seed_node))
    return _mix(k ^ np.uint64(run_index))


@numba.njit(cache=True, nogil=True)
def _simulate(indptr, indices, prob, seed_node, key, gamma, state):
    """One run; fills ``state`` (0=S, 1=I, 2=R) and returns the recovered count."""
    n = state.shape[0]
    n_slots = indices.shape[0]
    state[:] = 0
    age = np.zeros(n, dtype=np.int64)
    current = np.empty(n, dtype=np.int64)
    upcoming = np.empty(n, dtype=np.int64)
    current[0] = seed_node
    n_cur = 1
    state[seed_node] = 1
    recovered = 0
    while n_cur > 0:
        n_up = 0
        for i in range(n_cur):
            v = current[i]
            attempt = age[v]
            for slot in range(indptr[v], indptr[v + 1]):
                u = indices[slot]
                if state[u] != 0:
                    continue
                p = prob[slot]
                if p >= 1.0 or (p > 0.0 and _uniform(key, slot, 2 * attempt) < p):
                    state[u] = 1
                    upcoming[n_up] = u
                    n_up += 1
        for i in range(n_cur):
            v = current[i]
            if gamma >= 1.0 or _uniform(key, n_slots + v, 2 * age[v] + 1) < gamma:
                state[v] = 2
                recovered += 1
            else:
                age[v] += 1
                upcoming[n_up] = v
                n_up += 1
        current, upcoming = upcoming, current
        n_cur = n_up
    return recovered


@numba.njit(cache=True, nogil=True)
def _batch(indptr, indices, prob, seed_node, master_seed, gamma, first_run, runs, n):
    counts = np.empty(runs, dtype=np.int64)
    state = np.zeros(n, dtype=np.int8)
    for r in range(runs):
        key = _run_key(master_seed, seed_node, first_run + r)
        counts[r] = _simulate(indptr, indices, prob, seed_node, key, gamma, state)
    return counts


# ---------------------------------------------------------------------------
# Python surface
# ---------------------------------------------------------------------------

def _slot_probs(graph: FuzzyGraph, beta: float) -> np.ndarray:
    return np.minimum(1.0, beta * graph.nbr_weight)


def _seed64(master_seed: int) -> np.uint64:
    return np.uint64(master_seed & _MASK64)


def _check_node(graph: FuzzyGraph, v: int) -> None:
    if not 0 <= v < graph.n:
        raise IndexError(f"node index {v} out of range for n={graph.n}")


def sir_outcome(graph: FuzzyGraph, seed_node: int, params: SirParams, run_index: int) -> np.ndarray:
    """Final state vector of one run (0 susceptible, 2 recovered)."""
    _check_node(graph, seed_node)
    state = np.zeros(graph.n, dtype=np.int8)
    # jitted functions return a Python int; keep it unsigned on the way back in
    key = np.uint64(_run_key(_seed64(params.master_seed), np.uint64(seed_node), np.uint64(run_index)))
    _simulate(graph.indptr, graph.indices, _slot_probs(graph, params.beta),
              seed_node, key, float(params.gamma), state)
    return state


def simulate_sir(graph: FuzzyGraph, seed_node: int, params: SirParams, run_index: int) -> int:
    """Final recovered count of one SIR run seeded at ``seed_node``."""
    _check_node(graph, seed_node)
    counts = _batch(graph.indptr, graph.indices, _slot_probs(graph, params.beta), seed_node,
                    _seed64(params.master_seed), float(params.gamma), run_index, 1, graph.n)
    return int(counts[0])


def _estimate(graph: FuzzyGraph, node: int, params: SirParams, prob: np.ndarray) -> SpreadEstimate:
    counts = _batch(graph.indptr, graph.indices, prob, node, _seed64(params.master_seed),
                    float(params.gamma), 0, params.runs, graph.n)
    # integer sums keep the degenerate regimes exact (mean 1/n, std 0)
    total = int(counts.sum())
    mean = total / (params.runs * graph.n)
    std = 0.0
    if params.runs > 1:
        dev = counts.astype(np.float64) * params.runs - total
        std = math.sqrt(math.fsum(dev * dev) / (params.runs - 1)) / (params.runs * graph.n)
    return SpreadEstimate(node, mean, std / math.sqrt(params.runs), params)


def estimate_spread(graph: FuzzyGraph, node: int, params: SirParams) -> SpreadEstimate:
    """Average of ``simulate_sir`` over run indices ``0..runs-1``."""
    _check_node(graph, node)
    return _estimate(graph, node, params, _slot_probs(graph, params.beta))


def spread_table(graph: FuzzyGraph, params: SirParams, threads: int = 1) -> list[SpreadEstimate]:
    """Spread estimate for every node, in node order.

    The kernel releases the GIL, so ``threads > 1`` runs nodes concurrently;
    the output is identical for any thread count.
    """
    prob = _slot_probs(graph, params.beta)
    if threads <= 1 or graph.n < 2:
        return [_estimate(graph, v, params, prob) for v in range(graph.n)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda v: _estimate(graph, v, params, prob), range(graph.n)))


def default_beta(graph: FuzzyGraph) -> float:
    """``1.5 * <k> / (<k^2> - <k>)`` on crisp degrees, clamped to (0, 1]."""
    if graph.n < 2 or graph.m < 1:
        raise ValueError("default_beta needs n >= 2 and m >= 1")
    k = graph.degrees().astype(np.float64)
    k1 = float(k.mean())
    k2 = float((k * k).mean())
    denom = k2 - k1
    if denom <= 0:
        return 1.0
    return min(1.0, 1.5 * k1 / denom)


# ---------------------------------------------------------------------------
# Persistence and caching
# ---------------------------------------------------------------------------

SPREAD_HEADER = ["node", "mean_fraction", "std_error"]


def spread_table_to_csv(table: list[SpreadEstimate]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SPREAD_HEADER)
    for est in table:
        writer.writerow([est.node, f"{est.mean_fraction:.17g}", f"{est.std_error:.17g}"])
    return buf.getvalue()


def spread_table_from_csv(text: str, params: SirParams) -> list[SpreadEstimate]:
    rows = csv.DictReader(io.StringIO(text))
    table = [
        SpreadEstimate(int(r["node"]), float(r["mean_fraction"]), float(r["std_error"]), params)
        for r in rows
    ]
    if [e.node for e in table] != list(range(len(table))):
        raise ValueError("spread table rows must be in node order")
    return table


def cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    return Path(env) if env else Path.home() / ".cache" / "fuzzcent"


def _metadata(graph: FuzzyGraph, params: SirParams) -> dict:
    meta = {"graph_hash": graph.content_hash(), "n": graph.n}
    meta.update(asdict(params))
    return meta


def cached_spread_table(
    graph: FuzzyGraph,
    params: SirParams,
    directory: str | Path | None = None,
    threads: int = 1,
) -> tuple[list[SpreadEstimate], bool]:
    """Spread table from the cache when its metadata matches, else simulate and store.

    Returns the table and whether it was a cache hit.
    """
    directory = Path(directory) if directory is not None else cache_dir()
    meta = _metadata(graph, params)
    digest = hashlib.sha256(json.dumps(meta, sort_keys=True).encode()).hexdigest()
    stem = f"spread_{digest[:24]}"
    csv_path = directory / f"{stem}.csv"
    meta_path = directory / f"{stem}.json"
    if csv_path.exists() and meta_path.exists():
        try:
            stored = json.loads(meta_path.read_text())
            if stored == meta:
                table = spread_table_from_csv(csv_path.read_text(), params)
                if len(table) == graph.n:
                    log.info("spread cache hit: %s", csv_path)
                    return table, True
        except (ValueError, KeyError, OSError) as exc:
            log.warning("ignoring unreadable spread cache %s: %s", csv_path, exc)
    table = spread_table(graph, params, threads=threads)
    directory.mkdir(parents=True, exist_ok=True)
    tmp = csv_path.with_suffix(".csv.tmp")
    tmp.write_text(spread_table_to_csv(table))
    tmp.replace(csv_path)
    meta_path.write_text(json.dumps(meta, sort_keys=True, indent=1))
    return table, False
