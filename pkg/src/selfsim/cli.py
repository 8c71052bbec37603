"""``selfsim`` command line: gen, solve, verify, bench, bound, oracle.

Exit codes: 0 ok, 2 parse error, 3 verification failure, 4 refusal (size
cap), 5 I/O error.
"""
import argparse
import csv
import json
import logging
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .driver import drive, union_bound_log
from .generate import gnp, gnp_header
from .graph import verify_certificate
from .greedy import GreedyConfig
from .io import ParseError, certificate_to_json, read_certificate, read_edge_list, write_certificate, write_edge_list
from .oracle import DEFAULT_CAP, OracleRefused, iso_exact

EXIT_OK, EXIT_PARSE, EXIT_VERIFY, EXIT_REFUSED, EXIT_IO = 0, 2, 3, 4, 5
BENCH_HEADER = ("n", "p", "seed", "m", "method", "s_found", "normalized", "runtime_ms")
P_RULES = ("sqrt-logn-over-n", "fixed", "c-over-n")

log = logging.getLogger("selfsim")


class VerificationFailed(RuntimeError):
    pass


def p_for(rule: str, n: int, value: float = None) -> float:
    if rule == "sqrt-logn-over-n":
        return math.sqrt(math.log(n) / n)
    if value is None:
        raise ValueError(f"p-rule {rule!r} needs --p-value")
    if rule == "fixed":
        return float(value)
    if rule == "c-over-n":
        return min(1.0, value / n)
    raise ValueError(f"unknown p-rule {rule!r}")


def _config(args) -> GreedyConfig:
    return GreedyConfig(alpha=args.alpha, restarts=args.restarts, seed=args.seed,
                        threshold_mode="fixed" if args.mode == "theory" else "adaptive")


def solve_graph(g, cfg: GreedyConfig, mode: str):
    """Drive ``g`` and re-verify the result; returns ``(certificate, runtime_ms, report)``."""
    t0 = time.perf_counter()
    report = drive(g, cfg, mode=mode)
    ms = (time.perf_counter() - t0) * 1000
    ok, why = verify_certificate(g, report.best)
    if not ok:
        raise VerificationFailed(why)
    return report.best, ms, report


@dataclass(frozen=True)
class BenchRow:
    n: int
    p: float
    seed: int
    m: int
    method: str
    s_found: int
    normalized: float
    runtime_ms: float

    def as_csv(self) -> list:
        return [self.n, repr(self.p), self.seed, self.m, self.method, self.s_found,
                f"{self.normalized:.6f}", f"{self.runtime_ms:.1f}"]


def bench_point(task) -> BenchRow:
    n, p, seed, cfg, mode = task
    g = gnp(n, p, seed)
    cert, ms, _ = solve_graph(g, cfg, mode)
    return BenchRow(n, p, seed, g.m, cert.method, cert.s, cert.s / (n * math.log(n)), ms)


def run_bench(n_list, p_rule="sqrt-logn-over-n", seeds=1, p_value=None, cfg=GreedyConfig(),
              mode="best", base_seed=0, workers=1) -> list:
    """One row per ``(n, seed)`` in input order; seeds are ``base_seed + i``."""
    if not n_list:
        raise ValueError("n_list must be nonempty")
    tasks = [(n, p_for(p_rule, n, p_value), base_seed + i, cfg, mode) for n in n_list for i in range(seeds)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(bench_point, tasks))
    return [bench_point(t) for t in tasks]


def write_bench_csv(rows, path) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(BENCH_HEADER)
        for r in rows:
            w.writerow(r.as_csv())


# commands --------------------------------------------------------------


def cmd_gen(args) -> int:
    g = gnp(args.n, args.p, args.seed)
    write_edge_list(g, args.out, gnp_header(args.n, args.p, args.seed))
    print(f"wrote n={g.n} m={g.m} to {args.out}")
    return EXIT_OK


def cmd_solve(args) -> int:
    g = read_edge_list(args.input)
    cert, ms, report = solve_graph(g, _config(args), args.mode)
    for w in report.warnings:
        log.warning(w)
    summary = f"s={cert.s} method={cert.method} n={g.n} m={g.m} runtime_ms={ms:.1f}"
    if args.out:
        write_certificate(cert, g.n, args.out, ms)
        print(summary)
    else:
        print(json.dumps(certificate_to_json(cert, g.n, ms)))
        print(summary, file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    g = read_edge_list(args.graph)
    try:
        cert, n = read_certificate(args.cert)
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        print(f"FAIL: {exc}")
        return EXIT_VERIFY
    if n != g.n:
        print(f"FAIL: vertex count mismatch (certificate n={n}, graph n={g.n})")
        return EXIT_VERIFY
    ok, why = verify_certificate(g, cert)
    if not ok:
        print(f"FAIL: {why}")
        return EXIT_VERIFY
    print(f"OK s={cert.s}")
    return EXIT_OK


def cmd_bench(args) -> int:
    rows = run_bench(args.n, args.p_rule, args.seeds, args.p_value, _config(args), args.mode,
                     args.seed, args.workers)
    write_bench_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def cmd_bound(args) -> int:
    exact, simplified = union_bound_log(args.n, args.p, args.t)
    print(f"exact_log={exact:.6f}")
    print(f"simplified_log={simplified:.6f}")
    print(f"check exact_log <= simplified_log: {'pass' if exact <= simplified else 'FAIL'}")
    return EXIT_OK if exact <= simplified else EXIT_VERIFY


def cmd_oracle(args) -> int:
    g = read_edge_list(args.input)
    t0 = time.perf_counter()
    value, cert = iso_exact(g, cap=args.oracle_cap)
    ms = (time.perf_counter() - t0) * 1000
    ok, why = verify_certificate(g, cert)
    if not ok:
        raise VerificationFailed(why)
    print(f"iso={value}")
    doc = json.dumps(certificate_to_json(cert, g.n, ms))
    if args.out:
        write_certificate(cert, g.n, args.out, ms)
    else:
        print(doc)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    algo = argparse.ArgumentParser(add_help=False)
    algo.add_argument("--mode", choices=("theory", "best"), default="best",
                      help="theory: only the branch the density test picks; best: keep the best of all")
    algo.add_argument("--restarts", type=int, default=1, help="random B-map restarts in the key branch")
    algo.add_argument("--alpha", type=float, default=1 / 25, help="forest-size exponent")
    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument("--seed", type=int, default=0)

    ap = argparse.ArgumentParser(prog="selfsim", description="Edge-disjoint isomorphic subgraph certificates.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[seeded], help="write a seeded G(n, p) edge list")
    p.add_argument("n", type=int)
    p.add_argument("p", type=float)
    p.add_argument("out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", parents=[algo, seeded], help="find a certificate for an edge list")
    p.add_argument("input")
    p.add_argument("-o", "--out", help="certificate JSON path (stdout if omitted)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a certificate against its graph")
    p.add_argument("graph")
    p.add_argument("cert")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", parents=[algo, seeded], help="scaling benchmark over G(n, p)")
    p.add_argument("--n", type=int, nargs="+", required=True, metavar="N")
    p.add_argument("--p-rule", choices=P_RULES, default="sqrt-logn-over-n")
    p.add_argument("--p-value", type=float, help="p for 'fixed', c for 'c-over-n'")
    p.add_argument("--seeds", type=int, default=1, help="seeds per n (seed, seed+1, ...)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("bound", help="log of the first-moment count and its simplified bound")
    p.add_argument("n", type=int)
    p.add_argument("p", type=float)
    p.add_argument("t", type=int)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("oracle", help="exact value by permutation search")
    p.add_argument("input")
    p.add_argument("--oracle-cap", type=int, default=DEFAULT_CAP)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except VerificationFailed as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except OracleRefused as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
