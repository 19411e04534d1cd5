"""Monte Carlo sweeps over ``s`` and the real-network report.

Sweep outputs in ``out_dir``:

``sweep.csv``
    one row per (s, replicate), byte-identical for a fixed master seed;
``timings.csv``
    wall-clock seconds per row (kept apart so ``sweep.csv`` stays
    reproducible);
``conf_s<value>_r<idx>.csv``
    planted-vs-inferred confusion matrix per row;
``summary.json``
    the spec plus per-``s`` medians.

Task seeds are ``blake2b("<master>:<s_index>:<replicate>")`` truncated to 63
bits, so a row does not depend on the worker count or on other rows.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .evaluate import agony as evaluate_agony
from .graph import DirectedGraph, load_edge_list, summarize
from .metrics import adjusted_rand_index, confusion_matrix
from .rsbm import RsbmParams, estimate_affinity, s_max, sample
from .solve import iterated_agony, minimize
from .theory import hbar_planted, optimal_summary

log = logging.getLogger(__name__)


def task_seed(master_seed: int, s_index: int, replicate: int) -> int:
    digest = hashlib.blake2b(f"{master_seed}:{s_index}:{replicate}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") >> 1


def geometric_s_grid(s_hi: float, count: int) -> list[float]:
    """``0`` followed by ``count - 1`` values halving down from ``s_hi``."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if count == 1:
        return [0.0]
    return [0.0] + [s_hi * 2.0 ** -(count - 2 - i) for i in range(count - 1)]


@dataclass(frozen=True)
class SweepSpec:
    p: float
    q: float
    R: int
    n_per_class: int
    s_grid: tuple[float, ...]
    replicates: int = 1
    master_seed: int = 0
    d: int = 1
    out_dir: Optional[str] = None
    iterate: bool = True
    max_depth: int = 2
    min_class_size: int = 3
    min_subclasses: int = 3
    max_sub_hierarchy: float = 0.99

    def __post_init__(self):
        object.__setattr__(self, "s_grid", tuple(float(s) for s in self.s_grid))
        if self.d not in (0, 1):
            raise ValueError("sweeps support d in {0, 1}")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if any(s < 0 for s in self.s_grid):
            raise ValueError("s values must be non-negative")
        if self.R < 1 or self.n_per_class < 1:
            raise ValueError("R and n_per_class must be positive")

    @property
    def a(self) -> Optional[int]:
        a = int(round(math.log2(self.R)))
        return a if 2**a == self.R else None


@dataclass
class SweepRow:
    s: float
    replicate: int
    seed: int
    h_star: float
    ari_level1: float
    classes_level1: int
    h_level2: Optional[float]
    ari_level2: Optional[float]
    classes_level2: Optional[int]
    planted_h: float
    hbar_planted: Optional[float]
    hbar_star_theory: Optional[float]
    hbar_star_estimated: Optional[float]
    p_hat: Optional[float]
    q_hat: Optional[float]
    s_hat: Optional[float]
    wall_time: float = field(default=0.0, compare=False)


CSV_FIELDS = [f.name for f in fields(SweepRow) if f.name != "wall_time"]


def _theory_star(spec: SweepSpec, p, q, s) -> Optional[float]:
    if spec.a is None or p is None or q is None or s is None:
        return None
    try:
        return optimal_summary(spec.d, p, q, s, spec.a, N=spec.R * spec.n_per_class).hbar
    except (ValueError, ZeroDivisionError, AssertionError):
        return None


def run_task(spec: SweepSpec, s_index: int, replicate: int):
    """One (s, replicate) cell; returns the row and the confusion matrix."""
    t0 = time.perf_counter()
    s = spec.s_grid[s_index]
    seed = task_seed(spec.master_seed, s_index, replicate)
    g, planted = sample(RsbmParams.uniform(spec.p, spec.q, s, spec.R, spec.n_per_class), seed)
    h2 = ari2 = k2 = None
    if spec.iterate:
        tree = iterated_agony(
            g,
            spec.d,
            max_depth=spec.max_depth,
            min_class_size=spec.min_class_size,
            min_subclasses=spec.min_subclasses,
            max_sub_hierarchy=spec.max_sub_hierarchy,
        )
        rep = tree.root.report
        level2 = tree.ranking
        h2 = evaluate_agony(g, level2, spec.d).hierarchy
        ari2 = adjusted_rand_index(planted, level2)
        k2 = int(level2.max()) if len(level2) else 0
    else:
        rep = minimize(g, spec.d)
    est = estimate_affinity(g, planted)
    p_hat, q_hat, s_hat = est.as_tuple()
    if spec.p == spec.q and p_hat is not None and q_hat is not None:
        # the generator has p = q, so estimate them jointly
        fwd = spec.R - 1 + (spec.R - 1) * (spec.R - 2) / 2
        p_hat = q_hat = (p_hat * (spec.R - 1) + q_hat * (fwd - spec.R + 1)) / fwd
    try:
        hp = hbar_planted(spec.d, spec.p, spec.q, s, spec.R)
    except ValueError:
        hp = None
    row = SweepRow(
        s=s,
        replicate=replicate,
        seed=seed,
        h_star=rep.hierarchy,
        ari_level1=adjusted_rand_index(planted, rep.ranking),
        classes_level1=rep.num_classes,
        h_level2=h2,
        ari_level2=ari2,
        classes_level2=k2,
        planted_h=evaluate_agony(g, planted, spec.d).hierarchy,
        hbar_planted=hp,
        hbar_star_theory=_theory_star(spec, spec.p, spec.q, s),
        hbar_star_estimated=_theory_star(spec, p_hat, q_hat, s_hat),
        p_hat=p_hat,
        q_hat=q_hat,
        s_hat=s_hat,
    )
    row.wall_time = time.perf_counter() - t0
    return row, confusion_matrix(planted, rep.ranking)


def _run_task_args(args):
    return run_task(*args)


def _fmt(x):
    return "" if x is None else x


def conf_filename(s: float, replicate: int) -> str:
    return f"conf_s{format(s, 'g')}_r{replicate}.csv"


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[SweepRow]:
    """Run every (s, replicate) task and write the outputs listed above.

    Rows come back in task order (s outer, replicate inner) whatever the
    worker count.  With ``out_dir=None`` nothing is written.
    """
    tasks = [(spec, i, k) for i in range(len(spec.s_grid)) for k in range(spec.replicates)]
    out = Path(spec.out_dir) if spec.out_dir else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        if not os.access(out, os.W_OK):
            raise PermissionError(f"output directory {out} is not writable")
    rows: list[SweepRow] = []
    writer = timing_writer = None
    files = []
    try:
        if out is not None:
            fh = open(out / "sweep.csv", "w", newline="", encoding="utf-8")
            th = open(out / "timings.csv", "w", newline="", encoding="utf-8")
            files = [fh, th]
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_FIELDS)
            timing_writer = csv.writer(th, lineterminator="\n")
            timing_writer.writerow(["s", "replicate", "wall_time"])
        if workers > 1:
            pool = ProcessPoolExecutor(max_workers=workers)
            results = pool.map(_run_task_args, tasks)
        else:
            pool = None
            results = map(_run_task_args, tasks)
        try:
            for row, conf in results:
                rows.append(row)
                log.info("s=%g rep=%d h*=%.4f R=%d", row.s, row.replicate, row.h_star, row.classes_level1)
                if writer is not None:
                    writer.writerow([_fmt(getattr(row, f)) for f in CSV_FIELDS])
                    timing_writer.writerow([row.s, row.replicate, f"{row.wall_time:.3f}"])
                    for f_ in files:
                        f_.flush()
                    conf.to_csv(out / conf_filename(row.s, row.replicate))
        finally:
            if pool is not None:
                pool.shutdown()
    finally:
        for f_ in files:
            f_.close()
    if out is not None:
        with open(out / "summary.json", "w", encoding="utf-8") as fh:
            json.dump(sweep_summary(spec, rows), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return rows


def _median(values):
    vals = [v for v in values if v is not None]
    return float(np.median(vals)) if vals else None


def sweep_summary(spec: SweepSpec, rows: Sequence[SweepRow]) -> dict:
    per_s = []
    for s in spec.s_grid:
        sel = [r for r in rows if r.s == s]
        per_s.append(
            {
                "s": s,
                "replicates": len(sel),
                "median_h_star": _median(r.h_star for r in sel),
                "median_classes_level1": _median(r.classes_level1 for r in sel),
                "median_ari_level1": _median(r.ari_level1 for r in sel),
                "median_classes_level2": _median(r.classes_level2 for r in sel),
                "median_ari_level2": _median(r.ari_level2 for r in sel),
                "median_planted_h": _median(r.planted_h for r in sel),
                "hbar_planted": sel[0].hbar_planted if sel else None,
                "hbar_star_theory": sel[0].hbar_star_theory if sel else None,
            }
        )
    spec_dict = asdict(spec)
    spec_dict["s_grid"] = list(spec.s_grid)
    spec_dict.pop("out_dir", None)
    if spec.R >= 2:
        spec_dict["s_max"] = s_max(spec.p, spec.q, spec.R)
    return {"spec": spec_dict, "per_s": per_s}


# --- real networks ---------------------------------------------------------


def run_real_network(
    source,
    d: int = 1,
    iterate: bool = True,
    max_depth: int = 2,
    min_class_size: int = 3,
    min_subclasses: int = 3,
    max_sub_hierarchy: float = 0.99,
) -> dict:
    """Summary of a real directed network in the shape of a networks table.

    ``source`` is an edge-list path or stream, or a :class:`DirectedGraph`.
    Node ids that appear in no edge are dropped before solving.
    """
    g = source if isinstance(source, DirectedGraph) else load_edge_list(source)
    summary = summarize(g)
    deg = g.out_degree() + g.in_degree()
    active = np.flatnonzero(deg) if g.m else np.arange(g.node_count)
    h = g.subgraph(active)
    report = {
        "nodes": summary.active_nodes,
        "edges": summary.m,
        "density": summary.density,
        "largest_scc_pct": summary.largest_scc_pct,
        "d": d,
    }
    if iterate:
        tree = iterated_agony(
            h,
            d,
            max_depth=max_depth,
            min_class_size=min_class_size,
            min_subclasses=min_subclasses,
            max_sub_hierarchy=max_sub_hierarchy,
        )
        rep = tree.root.report
        report["R_prime"] = int(tree.ranking.max()) if h.node_count else 0
        classes = []
        n = max(h.node_count, 1)
        for idx, c in enumerate(tree.root.children, start=1):
            classes.append(
                {
                    "class": idx,
                    "size_pct": 100.0 * len(c.nodes) / n,
                    "edges": c.sub_edges,
                    "h": None if c.report is None else c.report.hierarchy,
                    "subclasses": None if c.report is None else c.report.num_classes,
                    "split": c.leaf is None,
                    "leaf_reason": c.leaf,
                }
            )
        report["classes"] = classes
    else:
        rep = minimize(h, d)
    report["h_star"] = rep.hierarchy
    report["agony"] = rep.agony
    report["R"] = rep.num_classes
    report["exact"] = rep.exact
    return report
