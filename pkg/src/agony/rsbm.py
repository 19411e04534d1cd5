"""Ranked stochastic block model: affinity matrix, sampling, estimation.

Class ``i`` links to class ``j`` with probability ``s`` when ``j <= i``
(backward or within the class), ``p`` when ``j = i + 1`` and ``q`` when
``j > i + 1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .graph import DirectedGraph, Ranking, check_ranking, planted_ranking


@dataclass(frozen=True)
class RsbmParams:
    p: float
    q: float
    s: float
    class_sizes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "class_sizes", tuple(int(n) for n in self.class_sizes))
        for name in ("p", "q", "s"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} is not a probability")
        if not self.class_sizes:
            raise ValueError("need at least one class")
        if min(self.class_sizes) < 1:
            raise ValueError("class sizes must be positive")

    @classmethod
    def uniform(cls, p: float, q: float, s: float, R: int, n: int) -> "RsbmParams":
        """``R`` classes of ``n`` nodes each."""
        return cls(p, q, s, (n,) * R)

    @property
    def R(self) -> int:
        return len(self.class_sizes)

    @property
    def N(self) -> int:
        return sum(self.class_sizes)

    def to_dict(self) -> dict:
        return {"p": self.p, "q": self.q, "s": self.s, "R": self.R, "class_sizes": list(self.class_sizes)}


def params_from_json(doc) -> tuple[RsbmParams, Optional[int]]:
    """Parse ``{p, q, s, R, n | class_sizes, seed}``; returns ``(params, seed)``.

    ``doc`` may be a JSON string or an already decoded mapping.
    """
    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    p, q, s = float(doc["p"]), float(doc["q"]), float(doc["s"])
    if "class_sizes" in doc:
        sizes = tuple(doc["class_sizes"])
        if "R" in doc and int(doc["R"]) != len(sizes):
            raise ValueError("R does not match len(class_sizes)")
        params = RsbmParams(p, q, s, sizes)
    else:
        params = RsbmParams.uniform(p, q, s, int(doc["R"]), int(doc["n"]))
    seed = doc.get("seed")
    return params, None if seed is None else int(seed)


def affinity_matrix(params: RsbmParams) -> np.ndarray:
    R = params.R
    i, j = np.indices((R, R))
    return np.where(j <= i, params.s, np.where(j == i + 1, params.p, params.q)).astype(float)


def b_k(class_sizes, k: int) -> int:
    """Number of ordered node pairs whose classes are ``k`` apart.

    ``b_0`` is ``sum n_i**2`` (it counts the self pairs too, as the
    expected-count formulas do).
    """
    sizes = [int(n) for n in class_sizes]
    R = len(sizes)
    if not 0 <= k <= R - 1:
        raise ValueError(f"k={k} outside 0..{R - 1}")
    return sum(sizes[i] * sizes[i + k] for i in range(R - k))


def s_max(p: float, q: float, R: int) -> float:
    """Largest ``s`` keeping expected backward links below forward ones (uniform sizes)."""
    if R < 2:
        raise ValueError("s_max needs R >= 2")
    return (2 * (R - 1) * p + (R - 2) * (R - 1) * q) / (R * (R + 1))


def hierarchy_constraint_ok(params: RsbmParams, tol: float = 1e-12) -> bool:
    """True when expected backward links do not exceed expected forward links."""
    sizes = params.class_sizes
    R = params.R
    b = [b_k(sizes, k) for k in range(R)]
    back = params.s * sum(b)
    fwd = (params.p * b[1] if R > 1 else 0.0) + params.q * sum(b[2:])
    return back <= fwd + tol * max(1.0, fwd)


def sample(params: RsbmParams, seed: int) -> tuple[DirectedGraph, Ranking]:
    """Draw one graph; returns it with the planted ranking (class i has rank i).

    Every ordered pair ``u != v`` gets its own Bernoulli draw.  Rows of class
    ``i`` use the stream ``SeedSequence(seed, spawn_key=(i,))``, so classes
    draw from independent streams.
    """
    if params.N == 0:
        raise ValueError("cannot sample an empty graph")
    C = affinity_matrix(params)
    r = planted_ranking(params.class_sizes)
    N = params.N
    starts = np.concatenate([[0], np.cumsum(params.class_sizes)])
    col_prob_by_class = C[:, r - 1]  # (R, N)
    src_parts, dst_parts = [], []
    for i, n_i in enumerate(params.class_sizes):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(i,))))
        hit = rng.random((n_i, N)) < col_prob_by_class[i]
        rows = np.arange(starts[i], starts[i + 1])
        hit[np.arange(n_i), rows] = False
        u, v = np.nonzero(hit)
        src_parts.append(u + starts[i])
        dst_parts.append(v)
    src = np.concatenate(src_parts).astype(np.int64)
    dst = np.concatenate(dst_parts).astype(np.int64)
    return DirectedGraph(N, np.column_stack([src, dst]), _trusted=True), r


@dataclass(frozen=True)
class AffinityEstimate:
    p: Optional[float]
    q: Optional[float]
    s: Optional[float]

    def as_tuple(self):
        return (self.p, self.q, self.s)


def estimate_affinity(g: DirectedGraph, r: Ranking) -> AffinityEstimate:
    """Pooled link densities of the three affinity regions under ranking ``r``.

    Within-class blocks have ``n_i (n_i - 1)`` possible pairs.  A region with
    no possible pairs (``p`` and ``q`` for one class, ``q`` for two) is
    reported as ``None``.
    """
    r = check_ranking(r, g.node_count)
    if g.node_count == 0:
        return AffinityEstimate(None, None, None)
    R = int(r.max())
    sizes = np.bincount(r, minlength=R + 1)[1:].astype(np.float64)
    pairs = np.outer(sizes, sizes) - np.diag(sizes)
    counts = np.zeros((R, R))
    np.add.at(counts, (r[g.src] - 1, r[g.dst] - 1), 1)
    i, j = np.indices((R, R))

    def density(mask):
        total = pairs[mask].sum()
        if total == 0:
            return None
        return float(counts[mask].sum() / total)

    return AffinityEstimate(density(j == i + 1), density(j > i + 1), density(j <= i))
