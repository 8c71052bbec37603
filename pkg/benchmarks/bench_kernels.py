"""Time the numba and numpy flavours of each hot kernel on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--csv out.csv]

The numba flavour is warmed up once before timing, so compile time is
excluded.  Results of the two flavours are compared for equality.
"""
import argparse
import csv
import math
import sys
import time

import numpy as np

from selfsim import kernels
from selfsim._accel import HAVE_NUMBA
from selfsim.generate import gnp
from selfsim.oracle import edge_id_table


def _time(fn, args, repeat):
    best = math.inf
    out = None
    for _ in range(repeat):
        fresh = [a.copy() if isinstance(a, np.ndarray) else a for a in args]
        t0 = time.perf_counter()
        out = fn(*fresh)
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases():
    rng = np.random.default_rng(0)
    for k in (256, 1024):
        S = rng.integers(0, 50, size=(k, k)).astype(np.int64)
        yield f"assign_by_expectation k={k}", kernels.assign_by_expectation_nb, kernels.assign_by_expectation_np, (S,)
    for n in (2000, 8000):
        g = gnp(n, 10 / n, 1)
        indptr, indices = g.csr
        side = np.arange(g.n, dtype=np.int64) % 2
        yield f"local_search_cut n={n}", kernels.local_search_cut_nb, kernels.local_search_cut_np, (indptr, indices, side)
        eu, ev = g.edges[:, 0].copy(), g.edges[:, 1].copy()
        yield f"star_deletion n={n}", kernels.star_deletion_nb, kernels.star_deletion_np, (eu, ev, g.degrees.copy())
    for n in (7, 8):
        g = gnp(n, 0.45, 3)
        args = (n, g.edges[:, 0].copy(), g.edges[:, 1].copy(), edge_id_table(g), g.m + 1)  # unreachable target: full scan
        yield f"permutation_search n={n} m={g.m}", kernels.permutation_search_nb, kernels.permutation_search_np, args


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--csv")
    args = ap.parse_args(argv)
    if not HAVE_NUMBA:
        print("numba is not installed; nothing to compare", file=sys.stderr)
        return 1
    rows = []
    print(f"{'kernel':40s} {'numba ms':>10s} {'numpy ms':>10s} {'speedup':>8s}  equal")
    for name, nb, np_fn, a in cases():
        _time(nb, a, 1)  # compile
        t_nb, r_nb = _time(nb, a, args.repeat)
        t_np, r_np = _time(np_fn, a, args.repeat)
        eq = _same(r_nb, r_np)
        rows.append((name, t_nb * 1e3, t_np * 1e3, t_np / t_nb, eq))
        print(f"{name:40s} {t_nb * 1e3:10.2f} {t_np * 1e3:10.2f} {t_np / t_nb:7.1f}x  {eq}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["kernel", "numba_ms", "numpy_ms", "speedup", "equal"])
            w.writerows(rows)
    return 0 if all(r[-1] for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
