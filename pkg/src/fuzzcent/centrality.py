"""Fuzzy centrality measures.

Proposed measures: NFDC (membership-weighted expected degree over the fuzzy
degree set) and NFRH (H-index over neighbours' NFDC). Baselines: FD (sum of
incident memberships) and the pairwise fuzzy-set comparison measures FRD/FRH,
which are reconstructions built on :func:`possibility_geq`.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .graphcore import FuzzyGraph

__all__ = [
    "Method",
    "NeighborMode",
    "FuzzyDegreeSet",
    "RankingResult",
    "fuzzy_degree_set",
    "fd",
    "nfdc",
    "nfrh",
    "h_index",
    "possibility_geq",
    "rank",
    "score_all",
    "ranking_to_csv",
    "ranking_from_csv",
]


class Method(str, enum.Enum):
    FD = "FD"
    FRD = "FRD"
    FRH = "FRH"
    NFDC = "NFDC"
    NFRH = "NFRH"

    @classmethod
    def parse(cls, tag: "str | Method") -> "Method":
        if isinstance(tag, Method):
            return tag
        try:
            return cls(str(tag).upper())
        except ValueError:
            raise ValueError(f"unknown centrality method {tag!r}") from None

    @property
    def reconstructed(self) -> bool:
        return self in (Method.FRD, Method.FRH)

    @property
    def display_name(self) -> str:
        return f"{self.value} (reconstructed baseline)" if self.reconstructed else self.value


class NeighborMode(str, enum.Enum):
    """Which neighbour score NFRH thresholds against."""

    NFDC = "NeighborNFDC"
    FD = "NeighborFD"


@dataclass(frozen=True)
class FuzzyDegreeSet:
    node: int
    crisp_degree: int
    pairs: tuple[tuple[int, float], ...]

    @property
    def memberships(self) -> tuple[float, ...]:
        return tuple(mu for _, mu in self.pairs)

    @classmethod
    def from_memberships(cls, memberships: Iterable[float], node: int = -1) -> "FuzzyDegreeSet":
        mus = [float(x) for x in memberships]
        return cls(node, len(mus), tuple((d, mu) for d, mu in enumerate(mus, start=1)))


@dataclass(frozen=True)
class RankingResult:
    method: Method
    scores: np.ndarray
    order: np.ndarray

    @classmethod
    def from_scores(cls, method: Method | str, scores: Sequence[float]) -> "RankingResult":
        scores = np.asarray(scores, dtype=np.float64)
        # descending score, ties by ascending index
        order = np.lexsort((np.arange(len(scores)), -scores))
        return cls(Method.parse(method), scores, order)

    @property
    def n(self) -> int:
        return len(self.scores)

    def ranks(self) -> np.ndarray:
        """1-based rank of each node."""
        r = np.empty(self.n, dtype=np.int64)
        r[self.order] = np.arange(1, self.n + 1)
        return r


def fuzzy_degree_set(graph: FuzzyGraph, v: int) -> FuzzyDegreeSet:
    """Fuzzy degree set of ``v``: the d-th pair holds the d-th largest incident weight.

    That is the max-min possibility that ``v`` has at least ``d`` edges: over
    all d-subsets of incident edges take the weakest member, then the best subset.
    """
    weights = sorted(graph.incident_weights(v).tolist(), reverse=True)
    return FuzzyDegreeSet(v, len(weights), tuple(enumerate(weights, start=1)))


def fd(graph: FuzzyGraph, v: int) -> float:
    """Fuzzy degree: sum of incident edge weights."""
    return float(sum(graph.incident_weights(v).tolist()))


def nfdc(graph: FuzzyGraph, v: int) -> float:
    """Node fuzzy degree centrality, ``(1/DC) * sum_d d * mu_d``; 0.0 for isolated nodes."""
    fs = fuzzy_degree_set(graph, v)
    if fs.crisp_degree == 0:
        return 0.0
    return sum(d * mu for d, mu in fs.pairs) / fs.crisp_degree


def h_index(values: Iterable[float]) -> int:
    """Largest h such that at least h of ``values`` are >= h."""
    h = 0
    for i, x in enumerate(sorted(values, reverse=True), start=1):
        if x >= i:
            h = i
        else:
            break
    return h


def nfrh(
    graph: FuzzyGraph,
    v: int,
    mode: NeighborMode | str = NeighborMode.NFDC,
    scores: Sequence[float] | None = None,
) -> int:
    """Node fuzzy relationship H-index.

    ``scores`` may carry precomputed per-node neighbour scores (NFDC or FD to
    match ``mode``); otherwise they are computed for the neighbours of ``v``.
    Real-valued scores are compared against the integer threshold unrounded.
    """
    mode = NeighborMode(mode)
    nbrs = graph.neighbors(v).tolist()
    if scores is None:
        score = nfdc if mode is NeighborMode.NFDC else fd
        vals = [score(graph, u) for u in nbrs]
    else:
        vals = [scores[u] for u in nbrs]
    return h_index(vals)


def possibility_geq(a: FuzzyDegreeSet, b: FuzzyDegreeSet) -> float:
    """Possibility that the degree described by ``a`` is at least that of ``b``.

    ``max`` over pairs ``d_a >= d_b`` of ``min(mu_a(d_a), mu_b(d_b))``. Empty
    sets: 0 when ``a`` is empty, 1 when only ``b`` is, 0.5 when both are.
    """
    ma, mb = a.memberships, b.memberships
    if not ma:
        return 0.5 if not mb else 0.0
    if not mb:
        return 1.0
    # suffix maxima of a: best mu_a(d_a) over d_a >= d
    suffix = list(ma)
    for i in range(len(suffix) - 2, -1, -1):
        suffix[i] = max(suffix[i], suffix[i + 1])
    best = 0.0
    for d in range(min(len(ma), len(mb))):
        best = max(best, min(suffix[d], mb[d]))
    return best


# ---------------------------------------------------------------------------
# Whole-graph scoring
# ---------------------------------------------------------------------------

def _fd_scores(graph: FuzzyGraph) -> np.ndarray:
    return np.array([fd(graph, v) for v in range(graph.n)], dtype=np.float64)


def _nfdc_scores(graph: FuzzyGraph) -> np.ndarray:
    return np.array([nfdc(graph, v) for v in range(graph.n)], dtype=np.float64)


def _nfrh_scores(graph: FuzzyGraph, mode: NeighborMode) -> np.ndarray:
    base = _nfdc_scores(graph) if mode is NeighborMode.NFDC else _fd_scores(graph)
    base = base.tolist()
    return np.array([nfrh(graph, v, mode, scores=base) for v in range(graph.n)], dtype=np.float64)


def _membership_matrix(graph: FuzzyGraph) -> tuple[np.ndarray, np.ndarray]:
    """Zero-padded fuzzy degree sets, one row per node, plus crisp degrees."""
    deg = graph.degrees()
    width = int(deg.max()) if graph.n else 0
    mat = np.zeros((graph.n, max(width, 1)))
    for v in range(graph.n):
        w = np.sort(graph.incident_weights(v))[::-1]
        mat[v, :len(w)] = w
    return mat, deg


def _frd_scores(graph: FuzzyGraph) -> np.ndarray:
    """Sum over all other nodes of :func:`possibility_geq` -- quadratic in n."""
    mat, deg = _membership_matrix(graph)
    # suffix maxima along each row; zero padding keeps d_a beyond the set at 0
    suffix = np.maximum.accumulate(mat[:, ::-1], axis=1)[:, ::-1]
    empty = deg == 0
    n_empty = int(empty.sum())
    scores = np.zeros(graph.n)
    for v in range(graph.n):
        if empty[v]:
            scores[v] = 0.5 * (n_empty - 1)
            continue
        row = np.minimum(suffix[v], mat).max(axis=1)
        row[empty] = 1.0
        row[v] = 0.0
        scores[v] = row.sum()
    return scores


def _frh_scores(graph: FuzzyGraph) -> np.ndarray:
    frd = RankingResult.from_scores(Method.FRD, _frd_scores(graph))
    # bottom-up rank position: the lowest FRD node scores 1, the top node n
    position = np.empty(graph.n, dtype=np.float64)
    position[frd.order] = np.arange(graph.n, 0, -1)
    pos = position.tolist()
    return np.array(
        [h_index(pos[u] for u in graph.neighbors(v).tolist()) for v in range(graph.n)],
        dtype=np.float64,
    )


def score_all(
    graph: FuzzyGraph,
    method: Method | str,
    mode: NeighborMode | str = NeighborMode.NFDC,
) -> np.ndarray:
    method = Method.parse(method)
    if method is Method.FD:
        return _fd_scores(graph)
    if method is Method.NFDC:
        return _nfdc_scores(graph)
    if method is Method.NFRH:
        return _nfrh_scores(graph, NeighborMode(mode))
    if method is Method.FRD:
        return _frd_scores(graph)
    return _frh_scores(graph)


def rank(
    graph: FuzzyGraph,
    method: Method | str,
    mode: NeighborMode | str = NeighborMode.NFDC,
) -> RankingResult:
    """Score every node with ``method`` and order them (descending, index tie-break)."""
    method = Method.parse(method)
    return RankingResult.from_scores(method, score_all(graph, method, mode))


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

RANKING_HEADER = ["node", "label", "method", "score", "rank"]


def ranking_to_csv(result: RankingResult, labels: Sequence[str] | None = None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RANKING_HEADER)
    for position, v in enumerate(result.order.tolist(), start=1):
        label = labels[v] if labels is not None else str(v)
        writer.writerow([v, label, result.method.value, f"{result.scores[v]:.17g}", position])
    return buf.getvalue()


def ranking_from_csv(text: str) -> RankingResult:
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows:
        raise ValueError("empty ranking CSV")
    n = len(rows)
    sc = np.empty(n)
    order = np.empty(n, dtype=np.int64)
    for row in rows:
        v = int(row["node"])
        sc[v] = float(row["score"])
        order[int(row["rank"]) - 1] = v
    return RankingResult(Method.parse(rows[0]["method"]), sc, order)
