"""``agony`` command line.

Every subcommand prints a JSON document (or CSV with ``--format csv`` where
the result is a table) on stdout.  Failures print ``{"error": ..., "message":
...}`` on stderr and exit with a nonzero status.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .evaluate import agony as evaluate_agony
from .experiments import SweepSpec, geometric_s_grid, run_real_network, run_sweep
from .graph import load_edge_list, read_ranking_csv, save_edge_list, write_ranking_csv
from .metrics import adjusted_rand_index, confusion_matrix
from .rsbm import RsbmParams, params_from_json, s_max, sample
from .solve import brute_force, iterated_agony, minimize
from .theory import (
    hbar_curve,
    optimal_summary,
    scaling_check,
    thresholds_d1,
    thresholds_d2,
)

log = logging.getLogger("agony")


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _emit_error("UsageError", message)
        sys.exit(2)


def _emit_error(kind, message):
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def _print_json(doc):
    json.dump(_jsonable(doc), sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _print_table(rows, fmt):
    if fmt == "json":
        _print_json(rows)
        return
    if not rows:
        return
    w = csv.DictWriter(sys.stdout, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: "" if v is None else v for k, v in r.items()})


def _out_path(args, explicit, default_name):
    if explicit:
        return Path(explicit)
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        return out / default_name
    return None


# --- subcommands ------------------------------------------------------------


def cmd_generate(args):
    if args.params:
        params, seed = params_from_json(Path(args.params).read_text())
    else:
        if args.class_sizes:
            sizes = [int(x) for x in args.class_sizes.split(",")]
        elif args.R is not None and args.n is not None:
            sizes = [args.n] * args.R
        else:
            raise CliError("give --params, --class-sizes, or both --R and --n")
        params, seed = RsbmParams(args.p, args.q, args.s, sizes), None
    seed = args.seed if args.seed is not None else (seed if seed is not None else 0)
    g, planted = sample(params, seed)
    edges = _out_path(args, args.out, "graph.edges")
    ranks = _out_path(args, args.planted_out, "planted.csv")
    if edges is None:
        raise CliError("give --out or --out-dir")
    save_edge_list(g, edges)
    if ranks is not None:
        write_ranking_csv(planted, ranks)
    _print_json(
        {
            "params": params.to_dict(),
            "seed": seed,
            "nodes": g.node_count,
            "edges": g.m,
            "graph": str(edges),
            "planted": None if ranks is None else str(ranks),
        }
    )


def cmd_solve(args):
    g = load_edge_list(args.graph)
    out = _out_path(args, args.out, "ranking.csv")
    if args.oracle:
        rep = brute_force(g, args.d)
        doc = rep.to_dict()
        ranking = rep.ranking
    elif args.iterate:
        tree = iterated_agony(
            g,
            args.d,
            max_depth=args.depth,
            min_class_size=args.min_class_size,
            min_subclasses=args.min_subclasses,
            max_sub_hierarchy=args.max_sub_hierarchy,
        )
        rep = tree.root.report
        doc = rep.to_dict()
        ranking = tree.ranking
        doc["iterated"] = {
            "depth": args.depth,
            "classes": int(ranking.max()) if len(ranking) else 0,
            "hierarchy": evaluate_agony(g, ranking, args.d).hierarchy,
        }
        if out is not None:
            write_ranking_csv(rep.ranking, out.with_name(out.stem + "_level1" + out.suffix))
    else:
        rep = minimize(g, args.d)
        doc = rep.to_dict()
        ranking = rep.ranking
    doc["nodes"] = g.node_count
    doc["edges"] = g.m
    if out is not None:
        write_ranking_csv(ranking, out)
        doc["ranking"] = str(out)
    _print_json(doc)


def cmd_eval(args):
    g = load_edge_list(args.graph)
    r = read_ranking_csv(args.ranking)
    _print_json(evaluate_agony(g, r, args.d).to_dict())


def cmd_compare(args):
    a = read_ranking_csv(args.planted)
    b = read_ranking_csv(args.inferred)
    conf = confusion_matrix(a, b)
    if args.confusion_csv:
        conf.to_csv(args.confusion_csv)
    if args.svg:
        conf.to_svg(args.svg)
    if args.format == "csv":
        conf.to_csv(sys.stdout)
        return
    _print_json({"ari": adjusted_rand_index(a, b), "confusion": conf.counts})


def _b_grid(spec):
    lo, hi, step = (float(x) for x in spec.split(":"))
    if step <= 0:
        raise CliError("b-grid step must be positive")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + i * step for i in range(n)]


def cmd_theory(args):
    p, q, s, a, d = args.p, args.q, args.s, args.a, args.d
    if args.scaling:
        rows = [asdict(r) for r in scaling_check(p, q, range(args.a, args.a + args.scaling))]
        _print_table(rows, args.format)
        return
    if args.curve or args.b_grid:
        bs = _b_grid(args.b_grid) if args.b_grid else [a - math.log2(k) for k in range(1, 2**a + 1)]
        rows = []
        for b in bs:
            rows.append(
                {
                    "b": b,
                    "R_tilde": 2.0 ** (a - b),
                    "hbar_direct": _safe(hbar_curve, d, p, q, s, a, b, False),
                    "hbar_inverted": _safe(hbar_curve, d, p, q, s, a, b, True),
                }
            )
        _print_table(rows, args.format)
        return
    doc = {"d": d, "p": p, "q": q, "s": s, "a": a, "R": 2**a}
    if 2**a >= 2:
        doc["s_max"] = s_max(p, q, 2**a)
    if d == 1:
        doc["thresholds"] = asdict(thresholds_d1(p, q, a, s))
    elif d == 2:
        doc["thresholds"] = asdict(thresholds_d2(p, q, a, s))
    N = args.N
    if d == 0 and N is None:
        raise CliError("--d 0 needs --N")
    doc["optimum"] = optimal_summary(d, p, q, s, a, N=N).to_dict()
    if args.b is not None:
        doc["b"] = args.b
        doc["hbar_direct"] = _safe(hbar_curve, d, p, q, s, a, args.b, False)
        doc["hbar_inverted"] = _safe(hbar_curve, d, p, q, s, a, args.b, True)
    _print_json(doc)


def _safe(fn, *a):
    try:
        return fn(*a)
    except (ValueError, ZeroDivisionError):
        return None


def cmd_sweep(args):
    if args.s_grid:
        grid = [float(x) for x in args.s_grid.split(",")]
    else:
        grid = geometric_s_grid(s_max(args.p, args.q, args.R), args.s_count)
    if not args.out_dir:
        raise CliError("sweep needs --out-dir")
    spec = SweepSpec(
        p=args.p,
        q=args.q,
        R=args.R,
        n_per_class=args.n,
        s_grid=grid,
        replicates=args.replicates,
        master_seed=args.seed if args.seed is not None else 0,
        d=args.d,
        out_dir=args.out_dir,
        iterate=not args.no_iterate,
        max_depth=args.depth,
    )
    rows = run_sweep(spec, workers=args.threads)
    summary = json.loads((Path(args.out_dir) / "summary.json").read_text())
    summary["rows"] = len(rows)
    summary["out_dir"] = args.out_dir
    _print_json(summary)


def cmd_network(args):
    report = run_real_network(
        args.graph,
        d=args.d,
        iterate=not args.no_iterate,
        max_depth=args.depth,
        min_class_size=args.min_class_size,
        min_subclasses=args.min_subclasses,
        max_sub_hierarchy=args.max_sub_hierarchy,
    )
    if args.format == "csv":
        _print_table(report.get("classes", []), "csv")
        return
    _print_json(report)


# --- parser -------------------------------------------------------------------


def _iterate_flags(p):
    p.add_argument("--depth", type=int, default=2, help="levels of iterated agony (default 2)")
    p.add_argument("--min-class-size", type=int, default=3)
    p.add_argument("--min-subclasses", type=int, default=3)
    p.add_argument("--max-sub-hierarchy", type=float, default=0.99)


def _common_flags(suppress: bool) -> argparse.ArgumentParser:
    # subcommand copies must not overwrite values given before the subcommand
    def dflt(v):
        return argparse.SUPPRESS if suppress else v

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=dflt(None), help="random seed")
    common.add_argument("--threads", type=int, default=dflt(1), help="worker processes for sweeps")
    common.add_argument("--out-dir", default=dflt(None), help="directory for output files")
    common.add_argument(
        "--format", choices=("json", "csv"), default=dflt("json"), help="stdout format for tables"
    )
    common.add_argument("-v", "--verbose", action="count", default=dflt(0))
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="agony", description="Hierarchy detection by agony minimization.", parents=[_common_flags(False)]
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _common_flags(True)

    p = sub.add_parser("generate", parents=[common], help="sample a ranked stochastic block model graph")
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--q", type=float, default=0.5)
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--R", type=int)
    p.add_argument("--n", type=int, help="nodes per class")
    p.add_argument("--class-sizes", help="comma-separated class sizes")
    p.add_argument("--params", help="JSON file {p, q, s, R, n | class_sizes, seed}")
    p.add_argument("--out", help="edge list path (default <out-dir>/graph.edges)")
    p.add_argument("--planted-out", help="planted ranking CSV (default <out-dir>/planted.csv)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", parents=[common], help="minimum-agony ranking of an edge list")
    p.add_argument("graph")
    p.add_argument("--d", type=int, choices=(0, 1), default=1)
    p.add_argument("--iterate", action="store_true", help="re-solve inside each class")
    p.add_argument("--oracle", action="store_true", help="brute force (at most 9 nodes)")
    p.add_argument("--out", help="ranking CSV path (default <out-dir>/ranking.csv)")
    _iterate_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("eval", parents=[common], help="agony and hierarchy of a given ranking")
    p.add_argument("graph")
    p.add_argument("ranking")
    p.add_argument("--d", type=float, default=1)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("compare", parents=[common], help="ARI and confusion matrix of two rankings")
    p.add_argument("--planted", required=True)
    p.add_argument("--inferred", required=True)
    p.add_argument("--confusion-csv")
    p.add_argument("--svg", help="write a heat map")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("theory", parents=[common], help="first-order hierarchy estimates and thresholds")
    p.add_argument("--d", type=int, choices=(0, 1, 2), default=1)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--a", type=int, required=True, help="log2 of the number of classes")
    p.add_argument("--N", type=int, help="node count (needed for d=0)")
    p.add_argument("--b", type=float, help="evaluate the merged/split ranking at this b")
    p.add_argument("--b-grid", help="lo:hi:step grid of b values (CSV/JSON table)")
    p.add_argument("--curve", action="store_true", help="table over every integer class count")
    p.add_argument("--scaling", type=int, metavar="K", help="threshold scaling for K values of a")
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("sweep", parents=[common], help="Monte Carlo sweep over s")
    p.add_argument("--d", type=int, choices=(0, 1), default=1)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--q", type=float, default=0.5)
    p.add_argument("--R", type=int, default=32)
    p.add_argument("--n", type=int, default=128, help="nodes per class")
    p.add_argument("--s-grid", help="comma-separated s values")
    p.add_argument("--s-count", type=int, default=9, help="geometric grid size when --s-grid is absent")
    p.add_argument("--replicates", type=int, default=1)
    p.add_argument("--no-iterate", action="store_true")
    p.add_argument("--depth", type=int, default=2)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("network", parents=[common], help="hierarchy report for a real edge list")
    p.add_argument("graph")
    p.add_argument("--d", type=int, choices=(0, 1), default=1)
    p.add_argument("--no-iterate", action="store_true")
    _iterate_flags(p)
    p.set_defaults(func=cmd_network)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        args.func(args)
    except Exception as exc:  # noqa: BLE001 - reported as JSON
        log.debug("command failed", exc_info=True)
        _emit_error(type(exc).__name__, str(exc))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
