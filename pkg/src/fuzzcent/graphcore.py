"""Fuzzy graph container, edge-list I/O, fuzzification and structural statistics."""

from __future__ import annotations

import hashlib
import math
import re
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

__all__ = [
    "EdgeListError",
    "FuzzyGraph",
    "GraphStats",
    "parse_edge_list",
    "read_edge_list",
    "serialize_edge_list",
    "write_edge_list",
    "fuzzify",
    "lcc_size",
    "graph_stats",
]

_MASK64 = (1 << 64) - 1


class EdgeListError(ValueError):
    """Raised for malformed edge-list input. ``lineno`` is 1-based, or None."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class FuzzyGraph:
    """Undirected simple graph with edge memberships in [0, 1].

    Immutable after construction. Edges are kept in canonical order
    (sorted by ``(min endpoint, max endpoint)``) in the ``src``/``dst``/``weight``
    arrays, and a CSR neighbour index (``indptr``, ``indices``, ``nbr_weight``)
    provides O(deg) iteration over ``(neighbour, weight)``.
    """

    __slots__ = (
        "n", "labels", "node_membership",
        "src", "dst", "weight",
        "indptr", "indices", "nbr_weight",
        "_hash",
    )

    def __init__(
        self,
        n: int,
        edges: Iterable[tuple[int, int, float]],
        labels: Sequence[str] | None = None,
        node_membership: Sequence[float] | None = None,
    ):
        if n < 0:
            raise ValueError("node count must be non-negative")
        seen: dict[tuple[int, int], float] = {}
        for u, v, w in edges:
            u, v, w = int(u), int(v), float(w)
            if not (0 <= u < n and 0 <= v < n):
                raise IndexError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop on node {u}")
            if not 0.0 <= w <= 1.0:
                raise ValueError(f"edge weight {w} outside [0, 1]")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen[key] = w

        keys = sorted(seen)
        m = len(keys)
        src = np.fromiter((k[0] for k in keys), dtype=np.int64, count=m)
        dst = np.fromiter((k[1] for k in keys), dtype=np.int64, count=m)
        weight = np.fromiter((seen[k] for k in keys), dtype=np.float64, count=m)

        if labels is None:
            labels = [str(i) for i in range(n)]
        if len(labels) != n:
            raise ValueError("labels length does not match node count")
        if node_membership is None:
            memb = np.ones(n)
        else:
            memb = np.asarray(node_membership, dtype=np.float64)
            if memb.shape != (n,) or ((memb < 0) | (memb > 1)).any():
                raise ValueError("node membership must be n values in [0, 1]")

        # CSR over both directions; neighbours of each node sorted by index
        both_src = np.concatenate([src, dst])
        both_dst = np.concatenate([dst, src])
        both_w = np.concatenate([weight, weight])
        order = np.lexsort((both_dst, both_src))
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(both_src, minlength=n), out=indptr[1:])

        self.n = n
        self.labels = tuple(str(x) for x in labels)
        self.node_membership = memb
        self.src, self.dst, self.weight = src, dst, weight
        self.indptr = indptr
        self.indices = both_dst[order]
        self.nbr_weight = both_w[order]
        self._hash = None
        for arr in (memb, src, dst, weight, self.indptr, self.indices, self.nbr_weight):
            arr.setflags(write=False)

    @property
    def m(self) -> int:
        return len(self.src)

    def degree(self, v: int) -> int:
        self._check(v)
        return int(self.indptr[v + 1] - self.indptr[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        self._check(v)
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def incident_weights(self, v: int) -> np.ndarray:
        self._check(v)
        return self.nbr_weight[self.indptr[v]:self.indptr[v + 1]]

    def edge_weight(self, u: int, v: int) -> float | None:
        """Weight of edge ``{u, v}`` or None when absent; symmetric in its arguments."""
        nbrs = self.neighbors(u)
        self._check(v)
        pos = int(np.searchsorted(nbrs, v))
        if pos < len(nbrs) and nbrs[pos] == v:
            return float(self.nbr_weight[self.indptr[u] + pos])
        return None

    def edges(self) -> list[tuple[int, int, float]]:
        return list(zip(self.src.tolist(), self.dst.tolist(), self.weight.tolist()))

    def with_weights(self, weights: Sequence[float]) -> "FuzzyGraph":
        """Same topology and labels, new weights in canonical edge order."""
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != (self.m,):
            raise ValueError("need exactly one weight per edge")
        return FuzzyGraph(
            self.n,
            zip(self.src.tolist(), self.dst.tolist(), weights.tolist()),
            labels=self.labels,
            node_membership=self.node_membership,
        )

    def content_hash(self) -> str:
        """SHA-256 of the canonical serialization; used as a cache key."""
        if self._hash is None:
            self._hash = hashlib.sha256(serialize_edge_list(self).encode()).hexdigest()
        return self._hash

    def _check(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise IndexError(f"node index {v} out of range for n={self.n}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FuzzyGraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.labels == other.labels
            and np.array_equal(self.node_membership, other.node_membership)
            and np.array_equal(self.src, other.src)
            and np.array_equal(self.dst, other.dst)
            and np.array_equal(self.weight, other.weight)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"FuzzyGraph(n={self.n}, m={self.m})"


# ---------------------------------------------------------------------------
# Edge-list I/O
# ---------------------------------------------------------------------------

def parse_edge_list(
    text: str | Iterable[str],
    weighted: bool | None = None,
    comments: tuple[str, ...] = ("#", "%"),
    delimiters: str = r"[,\s]+",
) -> FuzzyGraph:
    """Parse ``src dst [weight]`` lines into a :class:`FuzzyGraph`.

    Node identifiers are interned to 0..n-1 in order of first appearance.
    ``weighted=None`` reads a third column when present, ``True`` requires it
    and ``False`` ignores any extra columns (every edge gets membership 1.0).
    """
    lines = text.splitlines() if isinstance(text, str) else text
    splitter = re.compile(delimiters)
    index: dict[str, int] = {}
    labels: list[str] = []
    edges: list[tuple[int, int, float]] = []
    seen: set[tuple[int, int]] = set()

    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith(comments):
            continue
        fields = [f for f in splitter.split(line) if f]
        if len(fields) < 2 or (weighted is not False and len(fields) > 3):
            raise EdgeListError(f"expected 'src dst [weight]', got {line!r}", lineno)
        if weighted and len(fields) != 3:
            raise EdgeListError("missing weight column", lineno)

        w = 1.0
        if len(fields) == 3 and weighted is not False:
            try:
                w = float(fields[2])
            except ValueError:
                raise EdgeListError(f"weight {fields[2]!r} is not a number", lineno) from None
            if not 0.0 <= w <= 1.0:
                raise EdgeListError(f"weight {w} outside [0, 1]", lineno)

        a, b = fields[0], fields[1]
        if a == b:
            raise EdgeListError(f"self-loop on {a!r}", lineno)
        ids = []
        for label in (a, b):
            if label not in index:
                index[label] = len(labels)
                labels.append(label)
            ids.append(index[label])
        u, v = ids
        key = (u, v) if u < v else (v, u)
        if key in seen:
            raise EdgeListError(f"duplicate edge {a} {b}", lineno)
        seen.add(key)
        edges.append((u, v, w))

    return FuzzyGraph(len(labels), edges, labels=labels)


def read_edge_list(path: str | Path, **options) -> FuzzyGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh, **options)


def _serial_order(graph: FuzzyGraph) -> list[tuple[int, int]]:
    # Emit edges so that re-parsing interns every node at its current index:
    # node k is introduced either through an edge to an already-seen lower
    # node or, lacking one, as the first member of a fresh pair.
    order: list[tuple[int, int]] = []
    emitted: set[tuple[int, int]] = set()
    for k in range(graph.n):
        nbrs = graph.neighbors(k).tolist()
        lower = [j for j in nbrs if j < k]
        if not lower:
            upper = [j for j in nbrs if j > k]
            if upper:
                pair = (k, upper[0])
                order.append(pair)
                emitted.add(pair)
            continue
        for j in lower:
            if (j, k) not in emitted:
                order.append((j, k))
                emitted.add((j, k))
    return order


def serialize_edge_list(graph: FuzzyGraph) -> str:
    """Canonical text form: ``label label weight`` per line, weights at 17 significant digits.

    Isolated nodes cannot be expressed in an edge list and are dropped.
    """
    lab = graph.labels
    out = []
    for u, v in _serial_order(graph):
        out.append(f"{lab[u]} {lab[v]} {graph.edge_weight(u, v):.17g}\n")
    return "".join(out)


def write_edge_list(graph: FuzzyGraph, path: str | Path) -> None:
    Path(path).write_text(serialize_edge_list(graph), encoding="utf-8")


# ---------------------------------------------------------------------------
# Fuzzification
# ---------------------------------------------------------------------------

def fuzzify(graph: FuzzyGraph, rng_seed: int) -> FuzzyGraph:
    """Replace every edge membership with an independent Uniform(0, 1) draw.

    Draws are assigned in canonical edge order from a PCG64 stream seeded with
    ``rng_seed``, so the result depends on the seed and topology only.
    """
    rng = np.random.Generator(np.random.PCG64(rng_seed & _MASK64))
    weights = rng.random(graph.m)
    # random() samples [0, 1); redraw the (vanishingly rare) exact zeros
    while (zeros := weights == 0.0).any():
        weights[zeros] = rng.random(int(zeros.sum()))
    return graph.with_weights(weights)


# ---------------------------------------------------------------------------
# Connectivity and statistics
# ---------------------------------------------------------------------------

def lcc_size(graph: FuzzyGraph, removed: Iterable[int] = ()) -> int:
    """Size of the largest connected component after deleting ``removed`` nodes."""
    alive = np.ones(graph.n, dtype=bool)
    for v in removed:
        graph._check(v)
        alive[v] = False
    indptr, indices = graph.indptr, graph.indices
    seen = ~alive
    best = 0
    for s in np.flatnonzero(alive).tolist():
        if seen[s]:
            continue
        seen[s] = True
        size = 0
        queue = deque([s])
        while queue:
            x = queue.popleft()
            size += 1
            for y in indices[indptr[x]:indptr[x + 1]].tolist():
                if not seen[y]:
                    seen[y] = True
                    queue.append(y)
        best = max(best, size)
    return best


def _components(graph: FuzzyGraph) -> np.ndarray:
    """Component label per node."""
    label = np.full(graph.n, -1, dtype=np.int64)
    indptr, indices = graph.indptr, graph.indices
    c = 0
    for s in range(graph.n):
        if label[s] >= 0:
            continue
        label[s] = c
        stack = [s]
        while stack:
            x = stack.pop()
            for y in indices[indptr[x]:indptr[x + 1]].tolist():
                if label[y] < 0:
                    label[y] = c
                    stack.append(y)
        c += 1
    return label


@dataclass(frozen=True)
class GraphStats:
    n: int
    m: int
    avg_degree: float
    avg_distance: float
    clustering: float
    assortativity: float

    def rounded(self) -> dict[str, float]:
        """Values at the precision of the usual dataset summary table."""
        return {
            "n": self.n,
            "m": self.m,
            "avg_degree": round(self.avg_degree, 1),
            "avg_distance": round(self.avg_distance, 3),
            "clustering": round(self.clustering, 3),
            "assortativity": round(self.assortativity, 3),
        }


def _avg_distance(graph: FuzzyGraph, chunk: int = 256) -> float:
    comp = _components(graph)
    if graph.n == 0:
        return math.nan
    giant = int(np.bincount(comp).argmax())
    nodes = np.flatnonzero(comp == giant)
    k = len(nodes)
    if k < 2:
        return 0.0
    sub = _adjacency_matrix(graph)[nodes][:, nodes]
    total = 0.0
    for start in range(0, k, chunk):
        rows = np.arange(start, min(start + chunk, k))
        dist = shortest_path(sub, unweighted=True, directed=False, indices=rows)
        total += float(dist.sum())
    return total / (k * (k - 1))


def _adjacency_matrix(graph: FuzzyGraph) -> csr_matrix:
    data = np.ones(len(graph.indices))
    return csr_matrix((data, graph.indices, graph.indptr), shape=(graph.n, graph.n))


def _mean_clustering(graph: FuzzyGraph) -> float:
    adj = _adjacency_matrix(graph)
    deg = graph.degrees().astype(np.float64)
    # closed triangles through each node = diag(A^3) / 2
    triangles = np.asarray((adj @ adj).multiply(adj).sum(axis=1)).ravel() / 2.0
    pairs = deg * (deg - 1) / 2.0
    local = np.divide(triangles, pairs, out=np.zeros_like(triangles), where=pairs > 0)
    return float(local.mean())


def _assortativity(graph: FuzzyGraph) -> float:
    deg = graph.degrees().astype(np.float64)
    # each edge counted in both directions
    x = np.concatenate([deg[graph.src], deg[graph.dst]])
    y = np.concatenate([deg[graph.dst], deg[graph.src]])
    if len(x) == 0:
        return math.nan
    xc = x - x.mean()
    yc = y - y.mean()
    denom = math.sqrt(float((xc * xc).sum()) * float((yc * yc).sum()))
    if denom == 0.0:
        return math.nan
    return float((xc * yc).sum() / denom)


def graph_stats(graph: FuzzyGraph) -> GraphStats:
    if graph.n < 1:
        raise ValueError("graph_stats needs at least one node")
    return GraphStats(
        n=graph.n,
        m=graph.m,
        avg_degree=2.0 * graph.m / graph.n,
        avg_distance=_avg_distance(graph),
        clustering=_mean_clustering(graph),
        assortativity=_assortativity(graph),
    )
