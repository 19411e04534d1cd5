"""Generalized agony of a ranking and the derived hierarchy score."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import DirectedGraph, Ranking, check_ranking

# Above this the int64 edge sum might overflow; Python ints take over.
_INT64_SAFE = 2**62


def _is_integral(d) -> bool:
    return float(d).is_integer()


def penalty(d: float, x: int) -> float:
    """Cost ``(x + 1) ** d`` of a link with rank difference ``x >= 0``, else 0."""
    if d < 0:
        raise ValueError("d must be non-negative")
    if x < 0:
        return 0
    if _is_integral(d):
        return (int(x) + 1) ** int(d)
    return float(x + 1) ** d


def penalties(d: float, diff: np.ndarray) -> np.ndarray:
    """Vectorized :func:`penalty`; integer dtype for integral ``d``."""
    diff = np.asarray(diff)
    back = diff >= 0
    if _is_integral(d):
        out = np.zeros(diff.shape, dtype=np.int64)
        out[back] = (diff[back].astype(np.int64) + 1) ** int(d)
        return out
    out = np.zeros(diff.shape, dtype=np.float64)
    out[back] = (diff[back] + 1.0) ** float(d)
    return out


@dataclass(frozen=True)
class EvalReport:
    agony: float
    m: int
    hierarchy: float
    backward_edges: int
    num_classes: int
    block_counts: np.ndarray

    def to_dict(self) -> dict:
        return {
            "agony": self.agony,
            "m": self.m,
            "hierarchy": self.hierarchy,
            "backward_edges": self.backward_edges,
            "R": self.num_classes,
        }


def agony_value(g: DirectedGraph, r: Ranking, d: float):
    """Sum of penalties over edges; exact ``int`` for integral ``d``."""
    if d < 0:
        raise ValueError("d must be non-negative")
    r = check_ranking(r, g.node_count)
    if g.m == 0:
        return 0 if _is_integral(d) else 0.0
    diff = r[g.src] - r[g.dst]
    if _is_integral(d):
        back = diff[diff >= 0]
        if back.size == 0:
            return 0
        worst = (int(back.max()) + 1) ** int(d) * back.size
        if worst < _INT64_SAFE:
            return int(np.sum((back + 1) ** int(d), dtype=np.int64))
        vals, counts = np.unique(back, return_counts=True)
        return sum((int(x) + 1) ** int(d) * int(c) for x, c in zip(vals, counts))
    return math.fsum(penalties(d, diff).tolist())


def block_counts(g: DirectedGraph, r: Ranking, num_classes: int | None = None) -> np.ndarray:
    """``R x R`` matrix whose entry ``(i, j)`` counts edges from class i+1 to j+1."""
    r = check_ranking(r, g.node_count)
    R = int(r.max()) if num_classes is None and len(r) else int(num_classes or 0)
    flat = (r[g.src] - 1) * R + (r[g.dst] - 1)
    return np.bincount(flat, minlength=R * R).reshape(R, R)


def agony_from_blocks(blocks: np.ndarray, d: float):
    """Agony computed from class-pair edge counts: ``sum_{i>=j} m_ij (i-j+1)^d``."""
    R = blocks.shape[0]
    i, j = np.indices((R, R))
    mask = i >= j
    if _is_integral(d):
        return sum(int(c) * (int(k) + 1) ** int(d) for c, k in zip(blocks[mask], (i - j)[mask]) if c)
    return math.fsum((blocks[mask] * (i - j + 1.0)[mask] ** d).tolist())


def hierarchy_score(agony, m: int) -> float:
    """``1 - agony/m``; a graph without edges is perfectly hierarchical."""
    return 1.0 if m == 0 else 1.0 - agony / m


def agony(g: DirectedGraph, r: Ranking, d: float = 1) -> EvalReport:
    r = check_ranking(r, g.node_count)
    a = agony_value(g, r, d)
    back = int(np.count_nonzero(r[g.src] >= r[g.dst])) if g.m else 0
    blocks = block_counts(g, r)
    return EvalReport(a, g.m, hierarchy_score(a, g.m), back, int(np.unique(r).size), blocks)
