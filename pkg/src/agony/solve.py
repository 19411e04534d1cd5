"""Minimum-agony rankings.

``minimize_d1`` is exact (min-cost flow).  ``minimize_d0`` is the greedy
feedback-arc-set heuristic.  ``brute_force`` enumerates every ordered
partition and is only meant for graphs with at most 9 nodes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _backend
from .evaluate import agony_value, hierarchy_score, penalties
from .graph import (
    DirectedGraph,
    Ranking,
    check_ranking,
    dag_ranking,
    is_dag,
    normalize_ranking,
    num_classes,
)

BRUTE_FORCE_MAX_NODES = 9


@dataclass(frozen=True)
class SolveReport:
    ranking: Ranking
    agony: float
    hierarchy: float
    num_classes: int
    exact: bool
    d: float = 1

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "agony": self.agony,
            "hierarchy": self.hierarchy,
            "num_classes": self.num_classes,
            "exact": self.exact,
        }


def _report(g, r, d, exact) -> SolveReport:
    a = agony_value(g, r, d)
    return SolveReport(r, a, hierarchy_score(a, g.m), num_classes(r) if len(r) else 0, exact, d)


def minimize_d1(g: DirectedGraph) -> SolveReport:
    """Exact minimum of the linear agony.

    The returned ranking is the componentwise-smallest optimal one, which
    also has the fewest classes among all optimal rankings.
    """
    ranks, eulerian = _backend.agony_d1(
        np.int32(g.node_count),
        np.ascontiguousarray(g.src, dtype=np.int32),
        np.ascontiguousarray(g.dst, dtype=np.int32),
    )
    rep = _report(g, ranks, 1, exact=True)
    if rep.agony != eulerian:
        raise RuntimeError(f"flow value {eulerian} disagrees with ranking agony {rep.agony}")
    return rep


def minimize_d0(g: DirectedGraph) -> SolveReport:
    """Feedback-arc-set heuristic; exact (agony 0) only on DAGs."""
    if is_dag(g):
        return _report(g, dag_ranking(g), 0, exact=True)
    out_ptr, out_idx = g.out_csr
    in_ptr, in_idx = g.in_csr
    order = _backend.greedy_fas_order(np.int32(g.node_count), out_ptr, out_idx, in_ptr, in_idx)
    r = np.empty(g.node_count, dtype=np.int64)
    r[order] = np.arange(1, g.node_count + 1)
    return _report(g, r, 0, exact=False)


def minimize(g: DirectedGraph, d: float) -> SolveReport:
    if d == 1:
        return minimize_d1(g)
    if d == 0:
        return minimize_d0(g)
    raise ValueError(f"no optimizer for d={d}; use brute_force on tiny graphs")


# --- brute force -----------------------------------------------------------


def _set_partitions(n):
    """Restricted growth strings of length n, grouped by block count."""
    by_k: dict[int, list[tuple[int, ...]]] = {}

    def rec(prefix, k):
        if len(prefix) == n:
            by_k.setdefault(k, []).append(tuple(prefix))
            return
        for b in range(k + 1):
            prefix.append(b)
            rec(prefix, max(k, b + 1))
            prefix.pop()

    if n:
        rec([0], 1)
    return by_k


@lru_cache(maxsize=2)
def ordered_partitions(n: int) -> np.ndarray:
    """Every ranking of ``n`` nodes without empty classes, one per row.

    Rows are ordered by class count; there are Fubini(n) of them.
    """
    if n == 0:
        return np.zeros((1, 0), dtype=np.int8)
    blocks = []
    for k, rgs in sorted(_set_partitions(n).items()):
        rgs = np.array(rgs, dtype=np.int8)
        perms = np.array(list(itertools.permutations(range(1, k + 1))), dtype=np.int8)
        blocks.append(perms[:, rgs].reshape(-1, n))
    out = np.concatenate(blocks)
    out.flags.writeable = False
    return out


def brute_force(g: DirectedGraph, d: float) -> SolveReport:
    """Global minimum of the agony by enumeration (N <= 9).

    Ties are broken by fewest classes, then the lexicographically smallest
    rank vector.
    """
    n = g.node_count
    if n > BRUTE_FORCE_MAX_NODES:
        raise ValueError(f"brute_force refuses N={n} > {BRUTE_FORCE_MAX_NODES}")
    cand = ordered_partitions(n)
    integral = float(d).is_integer()
    total = np.zeros(len(cand), dtype=np.int64 if integral else np.float64)
    for u, v in g.edges.tolist():
        total += penalties(d, cand[:, u].astype(np.int16) - cand[:, v])
    best = total.min()
    if integral:
        hit = np.flatnonzero(total == best)
    else:
        hit = np.flatnonzero(total <= best + 1e-12 * max(1.0, abs(best)))
    rows = cand[hit].astype(np.int64)
    k = rows.max(axis=1) if n else np.zeros(len(rows), dtype=np.int64)
    rows = rows[k == k.min()]
    pick = np.lexsort(rows.T[::-1])[0] if n else 0
    return _report(g, rows[pick].copy(), d, exact=True)


# --- canonical form --------------------------------------------------------


def canonicalize(g: DirectedGraph, r: Ranking, d: float) -> Ranking:
    """Lower nodes and merge classes while agony does not increase.

    Moves, repeated to a fixed point: drop a single node to the lowest rank
    that does not increase agony; move the only member of a class into
    another class; merge two adjacent classes; compact empty classes.  A
    move is taken only if agony does not increase.  Each one lowers either
    the class count or the rank sum, so the loop terminates.

    For ``d == 1`` and an optimal ``r`` this jumps straight to the solver's
    ranking: it lies componentwise below every optimal ranking with ranks
    starting at 1 (a joint decrease of many nodes) and has the fewest
    classes.  Single-node moves cannot always find it.  For other ``d`` the
    local moves give no minimality guarantee.
    """
    r = normalize_ranking(check_ranking(r, g.node_count)).copy()
    n = g.node_count
    if n == 0:
        return r
    if d == 1:
        best = minimize_d1(g)
        if agony_value(g, r, 1) == best.agony:
            return best.ranking.copy()
    out_ptr, out_idx = g.out_csr
    in_ptr, in_idx = g.in_csr
    tol = 0 if float(d).is_integer() else 1e-12
    while True:
        changed = False
        for v in range(n):
            cur = int(r[v])
            R = int(r.max())
            outs = r[out_idx[out_ptr[v]:out_ptr[v + 1]]]
            ins = r[in_idx[in_ptr[v]:in_ptr[v + 1]]]
            ts = np.arange(1, R + 1)
            cost = penalties(d, ts[:, None] - outs[None, :]).sum(axis=1) + penalties(
                d, ins[None, :] - ts[:, None]
            ).sum(axis=1)
            ok = cost <= cost[cur - 1] + tol * max(1.0, abs(cost[cur - 1]))
            t = int(np.argmax(ok)) + 1
            if t == cur and np.count_nonzero(r == cur) == 1:
                # a singleton class may dissolve into any other class
                ok[cur - 1] = False
                if ok.any():
                    t = int(np.argmax(ok)) + 1
            if t != cur:
                r[v] = t
                r = normalize_ranking(r)
                changed = True
        current = agony_value(g, r, d)
        R = int(r.max())
        for k in range(R - 1, 0, -1):
            trial = np.where(r > k, r - 1, r)
            a = agony_value(g, trial, d)
            if a <= current + tol * max(1.0, abs(current)):
                r, current, changed = trial, a, True
                break
        if not changed:
            return r


# --- iterated agony --------------------------------------------------------


@dataclass
class IterationNode:
    """One class in the iteration tree.

    ``report`` is the solution of the subgraph induced by ``nodes`` (``None``
    when it was not solved).  ``leaf`` names why the class was not split
    further, or is ``None`` for an internal node.
    """

    nodes: np.ndarray
    depth: int
    report: SolveReport | None = None
    children: list["IterationNode"] = field(default_factory=list)
    leaf: str | None = None
    sub_edges: int = 0


@dataclass
class IterationTree:
    root: IterationNode
    ranking: Ranking
    node_count: int
    max_depth: int

    def level_ranking(self, depth: int) -> Ranking:
        """Composed ranking using splits up to ``depth`` (1 = first solve)."""
        return _compose(self.root, self.node_count, depth)

    def classes_at(self, depth: int = 1) -> list[IterationNode]:
        """Classes at ``depth`` of the tree (1 = classes of the first solve)."""
        out: list[IterationNode] = []

        def walk(node):
            if node.depth == depth:
                out.append(node)
            elif node.depth < depth:
                for c in node.children:
                    walk(c)

        walk(self.root)
        return out


def _compose(root: IterationNode, n: int, max_depth: int) -> Ranking:
    keys = np.zeros((n, max(max_depth, 1)), dtype=np.int64)

    def walk(node, depth):
        if depth > max_depth:
            return
        for idx, child in enumerate(node.children, start=1):
            keys[child.nodes, depth - 1] = idx
            walk(child, depth + 1)

    walk(root, 1)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    _, inv = np.unique(keys, axis=0, return_inverse=True)
    return inv.reshape(-1).astype(np.int64) + 1


def iterated_agony(
    g: DirectedGraph,
    d: float = 1,
    max_depth: int = 2,
    min_class_size: int = 3,
    min_subclasses: int = 3,
    max_sub_hierarchy: float = 0.99,
) -> IterationTree:
    """Re-solve inside every class to resolve structure the first pass merged.

    A class becomes a leaf when it is smaller than ``min_class_size``, its
    induced subgraph has no edges, its solution has fewer than
    ``min_subclasses`` classes, or that solution's hierarchy exceeds
    ``max_sub_hierarchy`` (near-perfect internal splits of sparse classes
    are mostly noise).
    """
    if d not in (0, 1):
        raise ValueError("iterated agony needs d in {0, 1}")
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    root = IterationNode(np.arange(g.node_count), depth=0, sub_edges=g.m)
    root.report = minimize(g, d)
    _split(root, root.report.ranking, 1)

    def expand(node: IterationNode, sub: DirectedGraph):
        if node.depth >= max_depth:
            node.leaf = "max_depth"
            return
        if len(node.nodes) < min_class_size:
            node.leaf = "small"
            return
        node.sub_edges = sub.m
        if sub.m == 0:
            node.leaf = "edgeless"
            return
        rep = minimize(sub, d)
        node.report = rep
        if rep.num_classes < min_subclasses:
            node.leaf = "few_subclasses"
        elif rep.hierarchy > max_sub_hierarchy:
            node.leaf = "high_hierarchy"
        else:
            _split(node, rep.ranking, node.depth + 1)
            for child in node.children:
                expand(child, g.subgraph(child.nodes))

    for child in root.children:
        sub = g.subgraph(child.nodes)
        child.sub_edges = sub.m
        expand(child, sub)
    ranking = _compose(root, g.node_count, max_depth)
    return IterationTree(root, ranking, g.node_count, max_depth)


def _split(node: IterationNode, ranking: Ranking, depth: int) -> None:
    order = np.argsort(ranking, kind="stable")
    bounds = np.flatnonzero(np.diff(ranking[order])) + 1
    node.children = [
        IterationNode(node.nodes[np.sort(part)], depth=depth) for part in np.split(order, bounds)
    ]
