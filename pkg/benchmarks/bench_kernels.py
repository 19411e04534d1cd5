"""Compiled vs pure-Python kernels on RSBM graphs.

    python3 benchmarks/bench_kernels.py --R 16 --n 32 --s 0.01 0.05 --repeat 3
"""

import argparse
import json
import sys
import time

import numpy as np

from agony import _backend
from agony.rsbm import RsbmParams, sample


def _time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench(R, n, s_values, repeat, seed):
    try:
        compiled = _backend.kernels("compiled")
    except ImportError:
        compiled = None
    python = _backend.kernels("python")
    rows = []
    for s in s_values:
        g, _ = sample(RsbmParams.uniform(0.5, 0.5, s, R, n), seed)
        flow_args = (np.int32(g.node_count), g.src.astype(np.int32), g.dst.astype(np.int32))
        out_ptr, out_idx = g.out_csr
        in_ptr, in_idx = g.in_csr
        fas_args = (np.int32(g.node_count), out_ptr, out_idx, in_ptr, in_idx)
        for kernel, args in (("agony_d1", flow_args), ("greedy_fas_order", fas_args)):
            t_py, r_py = _time(lambda: getattr(python, kernel)(*args), repeat)
            row = {"kernel": kernel, "N": g.node_count, "m": g.m, "s": s, "python_s": round(t_py, 4)}
            if compiled is not None:
                t_c, r_c = _time(lambda: getattr(compiled, kernel)(*args), repeat)
                if kernel == "agony_d1":
                    same = r_py[1] == r_c[1] and np.array_equal(r_py[0], r_c[0])
                else:
                    same = np.array_equal(r_py, r_c)
                row.update(compiled_s=round(t_c, 4), speedup=round(t_py / t_c, 1), identical=bool(same))
            rows.append(row)
            print(json.dumps(row), flush=True)
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--R", type=int, default=16)
    ap.add_argument("--n", type=int, default=32, help="nodes per class")
    ap.add_argument("--s", type=float, nargs="+", default=[0.0, 0.01, 0.05])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rows = bench(args.R, args.n, args.s, args.repeat, args.seed)
    return 0 if all(r.get("identical", True) for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
