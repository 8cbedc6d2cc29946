"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--radius N]
"""

from __future__ import annotations

import argparse
import time

from abgrowth import kernels
from abgrowth.abelian import load_group
from abgrowth.oracle import BallTable
from abgrowth.subgraph import MorphismCounts, load_subgraph

GROUPS = {
    "Z^3": "gens a,A,b,B,c,C; inv a~A,b~B,c~C; rel abAB; rel acAC; rel bcBC",
    "hex": "gens a,A,b,B,c,C; inv a~A,b~B,c~C; rel ab=ba; rel c=ab",
}


def timed(fn, repeat: int):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--radius", type=int, default=30)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if kernels.compiled is None:
        raise SystemExit("compiled kernels not built; run `pip install -e .` first")
    print(f"{'group':<6} {'kernel':<10} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for name, text in GROUPS.items():
        _, st = load_group(text)
        s = load_subgraph("path: a,b,c", st)
        results = {}
        for backend in ("python", "cython"):
            kernels.use(backend)
            t_bfs, table = timed(lambda: BallTable(st, args.radius), args.repeat)
            t_off, mc = timed(lambda: MorphismCounts(st, s, table), args.repeat)
            results[backend] = (t_bfs, t_off, table.sphere_counts(), mc.c_series())
        py, cy = results["python"], results["cython"]
        assert py[2] == cy[2] and py[3] == cy[3], "backends disagree"
        print(f"{name:<6} {'bfs':<10} {py[0]:>10.3f} {cy[0]:>10.4f} {py[0] / cy[0]:>7.0f}x")
        print(f"{name:<6} {'offsets':<10} {py[1]:>10.3f} {cy[1]:>10.4f} {py[1] / cy[1]:>7.0f}x")
    kernels.use("cython")


if __name__ == "__main__":
    main()
