"""Directed graphs, rankings, and edge-list I/O.

A ranking is a 1-D integer array ``r`` of length ``N`` where ``r[v]`` is the
rank class (``>= 1``) of node ``v``.  Rankings are plain numpy arrays so that
they compose with vectorized code; the helpers here validate and transform
them.
"""

from __future__ import annotations

import csv
import io
import logging
import os
from dataclasses import dataclass
from functools import cached_property
from typing import IO, Iterable, NamedTuple, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

log = logging.getLogger(__name__)

PathOrStream = Union[str, os.PathLike, IO]

Ranking = np.ndarray


class GraphError(ValueError):
    """Invalid graph construction or a graph-level precondition failure."""


class EdgeListParseError(ValueError):
    def __init__(self, lineno: int, line: str, reason: str):
        super().__init__(f"line {lineno}: {reason}: {line!r}")
        self.lineno = lineno
        self.line = line


class DirectedGraph:
    """Immutable binary directed graph on nodes ``0..node_count-1``.

    Parameters
    ----------
    node_count : int
        Number of nodes ``N``.
    edges : array-like of shape (m, 2)
        Ordered pairs ``(u, v)``.  Self-loops and duplicate pairs raise
        :class:`GraphError`.
    """

    __slots__ = ("_n", "_edges", "__dict__")

    def __init__(self, node_count: int, edges: Iterable = (), *, _trusted: bool = False):
        n = int(node_count)
        if n < 0:
            raise GraphError("node_count must be non-negative")
        e = np.asarray(edges, dtype=np.int64)
        if e.size == 0:
            e = np.empty((0, 2), dtype=np.int64)
        if e.ndim != 2 or e.shape[1] != 2:
            raise GraphError("edges must have shape (m, 2)")
        if not _trusted and len(e):
            if e.min() < 0 or e.max() >= n:
                raise GraphError(f"edge endpoint out of range for node_count={n}")
            if np.any(e[:, 0] == e[:, 1]):
                raise GraphError("self-loops are not allowed")
            keys = e[:, 0] * n + e[:, 1]
            if np.unique(keys).size != keys.size:
                raise GraphError("duplicate edges are not allowed")
        e = np.ascontiguousarray(e)
        e.flags.writeable = False
        self._n = n
        self._edges = e

    @classmethod
    def from_arrays(cls, node_count: int, src, dst) -> "DirectedGraph":
        return cls(node_count, np.column_stack([np.asarray(src), np.asarray(dst)]))

    @property
    def node_count(self) -> int:
        return self._n

    @property
    def edges(self) -> np.ndarray:
        return self._edges

    @property
    def m(self) -> int:
        return len(self._edges)

    @property
    def src(self) -> np.ndarray:
        return self._edges[:, 0]

    @property
    def dst(self) -> np.ndarray:
        return self._edges[:, 1]

    @cached_property
    def out_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """``(indptr, indices)`` of the out-adjacency."""
        return _csr(self._n, self.src, self.dst)

    @cached_property
    def in_csr(self) -> tuple[np.ndarray, np.ndarray]:
        return _csr(self._n, self.dst, self.src)

    def out_degree(self) -> np.ndarray:
        return np.bincount(self.src, minlength=self._n)

    def in_degree(self) -> np.ndarray:
        return np.bincount(self.dst, minlength=self._n)

    def subgraph(self, nodes) -> "DirectedGraph":
        """Induced subgraph, nodes relabelled ``0..k-1`` in the given order."""
        nodes = np.asarray(nodes, dtype=np.int64)
        index = np.full(self._n, -1, dtype=np.int64)
        index[nodes] = np.arange(len(nodes))
        u, v = index[self.src], index[self.dst]
        keep = (u >= 0) & (v >= 0)
        return DirectedGraph(len(nodes), np.column_stack([u[keep], v[keep]]), _trusted=True)

    def __eq__(self, other):
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        if self._n != other._n or self.m != other.m:
            return False
        a = np.sort(self.src * max(self._n, 1) + self.dst)
        b = np.sort(other.src * max(other._n, 1) + other.dst)
        return bool(np.array_equal(a, b))

    __hash__ = None

    def __repr__(self):
        return f"DirectedGraph(N={self._n}, m={self.m})"


def _csr(n, rows, cols):
    order = np.argsort(rows, kind="stable")
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    return indptr, np.ascontiguousarray(cols[order])


# --- edge lists -----------------------------------------------------------


class EdgeListResult(NamedTuple):
    graph: DirectedGraph
    duplicates: int
    self_loops: int


def read_edge_list(source: PathOrStream) -> EdgeListResult:
    """Parse a whitespace-separated ``u v`` edge list.

    ``#`` lines are comments, except ``# nodes: K`` which declares the node
    count.  Duplicate edges and self-loops are dropped and counted.
    """
    declared = None
    us: list[int] = []
    vs: list[int] = []
    with _open_text(source) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.lower().startswith("nodes:"):
                    try:
                        declared = int(body.split(":", 1)[1])
                    except ValueError:
                        raise EdgeListParseError(lineno, raw.rstrip("\n"), "bad node-count header") from None
                continue
            parts = line.split()
            if len(parts) < 2:
                raise EdgeListParseError(lineno, raw.rstrip("\n"), "expected two node ids")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise EdgeListParseError(lineno, raw.rstrip("\n"), "non-integer token") from None
            if u < 0 or v < 0:
                raise EdgeListParseError(lineno, raw.rstrip("\n"), "negative node id")
            us.append(u)
            vs.append(v)
    src = np.asarray(us, dtype=np.int64)
    dst = np.asarray(vs, dtype=np.int64)
    seen = int(max(src.max(), dst.max())) + 1 if len(src) else 0
    if declared is not None:
        if declared < seen:
            raise GraphError(f"declared '# nodes: {declared}' but node id {seen - 1} appears")
        n = declared
    else:
        n = seen
    loops = src == dst
    n_loops = int(loops.sum())
    src, dst = src[~loops], dst[~loops]
    keys = src * max(n, 1) + dst
    _, first = np.unique(keys, return_index=True)
    first.sort()
    n_dup = len(keys) - len(first)
    g = DirectedGraph(n, np.column_stack([src[first], dst[first]]), _trusted=True)
    return EdgeListResult(g, n_dup, n_loops)


def load_edge_list(source: PathOrStream) -> DirectedGraph:
    res = read_edge_list(source)
    if res.duplicates or res.self_loops:
        log.info("dropped %d duplicate edges and %d self-loops", res.duplicates, res.self_loops)
    return res.graph


def save_edge_list(g: DirectedGraph, dest: PathOrStream) -> None:
    with _open_text(dest, "w") as fh:
        fh.write(f"# nodes: {g.node_count}\n")
        buf = io.StringIO()
        np.savetxt(buf, g.edges, fmt="%d", delimiter=" ")
        fh.write(buf.getvalue())


def read_ranking_csv(source: PathOrStream) -> Ranking:
    with _open_text(source) as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or {"node", "rank"} - set(reader.fieldnames):
            raise ValueError("ranking CSV needs a 'node,rank' header")
        pairs = [(int(row["node"]), int(row["rank"])) for row in reader]
    r = np.zeros(len(pairs), dtype=np.int64)
    nodes = np.array([p[0] for p in pairs], dtype=np.int64)
    if len(pairs) and not np.array_equal(np.sort(nodes), np.arange(len(pairs))):
        raise ValueError("ranking CSV must list every node 0..N-1 exactly once")
    for node, rank in pairs:
        r[node] = rank
    return check_ranking(r)


def write_ranking_csv(r: Ranking, dest: PathOrStream) -> None:
    with _open_text(dest, "w") as fh:
        fh.write("node,rank\n")
        for node, rank in enumerate(np.asarray(r).tolist()):
            fh.write(f"{node},{rank}\n")


class _open_text:
    """Context manager accepting a path, a text stream or a byte stream."""

    def __init__(self, target, mode="r"):
        self.target, self.mode, self.owned = target, mode, None

    def __enter__(self):
        t = self.target
        if isinstance(t, (str, os.PathLike)):
            self.owned = open(t, self.mode, encoding="utf-8", newline="" if "w" in self.mode else None)
            return self.owned
        if isinstance(t, (io.RawIOBase, io.BufferedIOBase)) or "b" in getattr(t, "mode", ""):
            self.owned = io.TextIOWrapper(t, encoding="utf-8", write_through=True)
            return self.owned
        return t

    def __exit__(self, *exc):
        if self.owned is not None:
            if isinstance(self.target, (str, os.PathLike)):
                self.owned.close()
            else:
                self.owned.flush()
                self.owned.detach()
        return False


# --- DAG utilities --------------------------------------------------------


def _layers(g: DirectedGraph) -> np.ndarray | None:
    """Longest-path layer of every node (0-based), or None on a cycle."""
    n = g.node_count
    layer = np.zeros(n, dtype=np.int64)
    indeg = g.in_degree().astype(np.int64)
    indptr, indices = g.out_csr
    frontier = np.flatnonzero(indeg == 0)
    done = 0
    depth = 0
    while frontier.size:
        layer[frontier] = depth
        done += frontier.size
        starts, ends = indptr[frontier], indptr[frontier + 1]
        counts = ends - starts
        if counts.sum():
            idx = np.repeat(starts - np.cumsum(counts) + counts, counts) + np.arange(counts.sum())
            targets = indices[idx]
            np.subtract.at(indeg, targets, 1)
            cand = np.unique(targets)
            frontier = cand[indeg[cand] == 0]
        else:
            frontier = frontier[:0]
        depth += 1
    return layer if done == n else None


def is_dag(g: DirectedGraph) -> bool:
    if g.m == 0:
        return True
    return _layers(g) is not None


def dag_ranking(g: DirectedGraph) -> Ranking:
    """Longest-path layering: rank = 1 + length of the longest path into v."""
    layer = _layers(g)
    if layer is None:
        raise GraphError("not a DAG")
    return layer + 1


def largest_scc_size(g: DirectedGraph) -> int:
    if g.node_count == 0:
        return 0
    adj = csr_matrix((np.ones(g.m, dtype=np.int8), (g.src, g.dst)), shape=(g.node_count,) * 2)
    _, labels = connected_components(adj, directed=True, connection="strong")
    return int(np.bincount(labels).max())


# --- ranking algebra ------------------------------------------------------


def check_ranking(r, node_count: int | None = None) -> Ranking:
    r = np.asarray(r, dtype=np.int64)
    if r.ndim != 1:
        raise ValueError("a ranking is a 1-D sequence of ranks")
    if node_count is not None and len(r) != node_count:
        raise ValueError(f"ranking has length {len(r)}, graph has {node_count} nodes")
    if len(r) and r.min() < 1:
        raise ValueError("rank values must be >= 1")
    return r


def num_classes(r: Ranking) -> int:
    return int(np.unique(r).size)


def is_normalized(r: Ranking) -> bool:
    r = np.asarray(r)
    return len(r) == 0 or (r.min() == 1 and np.unique(r).size == r.max())


def normalize_ranking(r) -> Ranking:
    """Order-preserving relabelling onto ``1..R`` with no empty class."""
    r = check_ranking(r)
    _, inv = np.unique(r, return_inverse=True)
    return inv.reshape(-1).astype(np.int64) + 1


def invert_ranking(r) -> Ranking:
    r = check_ranking(r)
    if not is_normalized(r):
        raise ValueError("invert_ranking expects a normalized ranking")
    return (r.max() + 1 - r) if len(r) else r.copy()


def merge_ranking(r, block: int) -> Ranking:
    """Group consecutive runs of ``block`` classes into one class."""
    r = check_ranking(r)
    if block < 1:
        raise ValueError("block must be a positive integer")
    if not is_normalized(r):
        raise ValueError("merge_ranking expects a normalized ranking")
    R = int(r.max()) if len(r) else 0
    if R % block:
        raise ValueError(f"block={block} does not divide R={R}")
    return (r - 1) // block + 1


def trivial_ranking(n: int) -> Ranking:
    return np.ones(n, dtype=np.int64)


def planted_ranking(class_sizes) -> Ranking:
    sizes = np.asarray(class_sizes, dtype=np.int64)
    return np.repeat(np.arange(1, len(sizes) + 1, dtype=np.int64), sizes)


@dataclass(frozen=True)
class GraphSummary:
    node_count: int
    active_nodes: int
    m: int
    density: float
    largest_scc: int
    largest_scc_pct: float


def summarize(g: DirectedGraph) -> GraphSummary:
    """Node/edge counts, density ``m / (N (N + 1))`` and largest SCC share.

    ``active_nodes`` excludes ids that appear in no edge; real edge lists
    often skip ids, and the density and SCC percentage use the active count.
    """
    deg = g.out_degree() + g.in_degree()
    active = int(np.count_nonzero(deg)) if g.m else g.node_count
    scc = largest_scc_size(g) if g.m else min(1, g.node_count)
    n = active
    density = g.m / (n * (n + 1)) if n else 0.0
    return GraphSummary(g.node_count, active, g.m, density, scc, 100.0 * scc / n if n else 0.0)
