"""Acceptance criteria 1-9.

Each test prints ``criterion N: PASS|FAIL <detail>``; the lines are also
collected and repeated in the pytest terminal summary.  Run on its own with
``pytest tests/test_acceptance.py -v`` or ``python3 tests/test_acceptance.py``.
"""
import csv
import itertools
import math
import statistics
import sys
import time

import networkx as nx
import numpy as np
import pytest

from selfsim.bounds import iso_volume, similarity_by_expectation, split_star_forest, star_cover
from selfsim.cli import main as cli_main
from selfsim.driver import a_of, drive, regime_params, step_bound, union_bound_log
from selfsim.generate import gnp, gnp_bipartite
from selfsim.graph import BipartiteView, VertexBijection, build_graph, overlap_count, remove_isolated, verify_certificate
from selfsim.greedy import GreedyConfig, greedy_bipartite_similarity, key_similarity
from selfsim.oracle import iso_exact, iso_exact_naive
from selfsim.rng import stream

RESULTS = {}


def report(k, ok, detail):
    line = f"criterion {k}: {'PASS' if ok else 'FAIL'} {detail}"
    RESULTS[k] = line
    print(line)
    assert ok, line


def _random_small_graph(rng, n_max=7):
    n = int(rng.integers(1, n_max + 1))
    p = float(rng.choice([0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9, rng.uniform()]))
    pairs = [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p]
    return build_graph(n, pairs)


# 1 -------------------------------------------------------------------------


def test_criterion_1_oracle_ground_truth():
    t0 = time.perf_counter()
    k = lambda n: itertools.combinations(range(n), 2)
    named = {
        "single edge": (build_graph(2, [(0, 1)]), 0),
        "K3": (build_graph(3, k(3)), 1),
        "P3": (build_graph(3, [(0, 1), (1, 2)]), 1),
        "C5": (build_graph(5, [(i, (i + 1) % 5) for i in range(5)]), 2),
        "K4": (build_graph(4, k(4)), 3),
    }
    bad = [name for name, (g, v) in named.items() if iso_exact(g)[0] != v]
    catalog = 0
    for G in nx.graph_atlas_g():
        if G.number_of_nodes() > 6:
            break
        if G.number_of_nodes() == 0:
            continue
        g = build_graph(G.number_of_nodes(), G.edges())
        value, cert = iso_exact(g)
        if value != iso_exact_naive(g, max_edges=15) or not verify_certificate(g, cert)[0]:
            bad.append(f"atlas n={g.n} edges={g.edges.tolist()}")
        catalog += 1
    dt = time.perf_counter() - t0
    report(1, not bad and dt < 300,
           f"named values ok, {catalog} graphs with n<=6 agree with the naive oracle, {dt:.1f}s"
           + (f"; mismatches: {bad[:3]}" if bad else ""))


# 2 -------------------------------------------------------------------------


def _constructions(g):
    h, idx = remove_isolated(g)
    out = {
        "volume": iso_volume(g),
        "key": key_similarity(g, GreedyConfig(seed=g.m)),
        "key-fixed": key_similarity(g, GreedyConfig(seed=g.m, threshold_mode="fixed")),
        "drive-best": drive(g, exact_cap=0).best,
        "drive-theory": drive(g, mode="theory").best,
    }
    if h.n:
        out["star-forest"] = split_star_forest(star_cover(h)).relabel(idx)
    return out


def test_criterion_2_soundness():
    rng = np.random.default_rng(2002)
    failures, checked = [], 0
    for i in range(10_000):
        g = _random_small_graph(rng)
        exact, cert = iso_exact(g)
        cands = _constructions(g)
        cands["exact"] = cert
        for name, c in cands.items():
            ok, why = verify_certificate(g, c)
            checked += 1
            if not ok or c.s > exact:
                failures.append((i, name, why, c.s, exact))
    report(2, not failures, f"10000 graphs, {checked} certificates verified, all s <= exact"
           + (f"; failures: {failures[:3]}" if failures else ""))


# 3 -------------------------------------------------------------------------


def test_criterion_3_star_forest_guarantee():
    rng = np.random.default_rng(3003)
    bad, done = [], 0
    while done < 1000:
        n = int(rng.integers(2, 300))
        p = float(np.exp(rng.uniform(np.log(0.5 / n), np.log(0.5))))
        g, _ = remove_isolated(gnp(n, p, int(rng.integers(2**31))))
        if g.n == 0:
            continue
        c = split_star_forest(star_cover(g))
        if not verify_certificate(g, c)[0] or 4 * c.s < g.n - 2:
            bad.append((g.n, g.m, c.s))
        done += 1
    report(3, not bad, "1000 isolated-free graphs, s >= (n-2)/4 on each" + (f"; failures: {bad[:3]}" if bad else ""))


# 4 -------------------------------------------------------------------------


def test_criterion_4_volume_guarantee():
    rng = np.random.default_rng(4004)
    bad, done, slack = [], 0, []
    while done < 1000:
        n = int(rng.integers(7, 200))
        p = float(rng.uniform(0.02, 1.0))
        g = gnp(n, p, int(rng.integers(2**31)))
        if g.m < 20:
            continue
        c = iso_volume(g)
        if not verify_certificate(g, c)[0] or 5 * c.s * g.n * g.n < g.m * g.m:
            bad.append((g.n, g.m, c.s))
        slack.append(c.s / (g.m * g.m / (5 * g.n * g.n)))
        done += 1
    report(4, not bad, f"1000 graphs with m>=20, s >= m^2/(5n^2) on each (min ratio {min(slack):.2f})"
           + (f"; failures: {bad[:3]}" if bad else ""))


# 5 -------------------------------------------------------------------------


def _bipartite_instance(rng, max_part):
    na, nb = (int(x) for x in rng.integers(1, max_part + 1, 2))
    a1, b1 = list(range(na)), list(range(na, na + nb))
    a2, b2 = list(range(1000, 1000 + na)), list(range(2000, 2000 + nb))
    p1, p2 = rng.uniform(0.05, 1.0, 2)
    e1 = [(x, y) for x in a1 for y in b1 if rng.random() < p1]
    e2 = [(x, y) for x in a2 for y in b2 if rng.random() < p2]
    return e1, e2, a1, a2, b1, b2


def _exhaustive_optimum(e1, e2, a1, a2, b1, b2):
    return max(overlap_count(VertexBijection(a1 + b1, list(pa) + list(pb)), e1, e2)
               for pa in itertools.permutations(a2) for pb in itertools.permutations(b2))


def test_criterion_5_derandomization():
    rng = np.random.default_rng(5005)
    below = []
    for _ in range(1000):
        e1, e2, a1, a2, b1, b2 = _bipartite_instance(rng, 40)
        f, ov = similarity_by_expectation(e1, e2, a1, a2, b1, b2)
        if ov * len(a1) * len(b1) < len(e1) * len(e2) or ov != overlap_count(f, e1, e2):
            below.append((len(a1), len(b1), len(e1), len(e2), ov))
    not_opt = []
    for _ in range(1000):
        inst = _bipartite_instance(rng, 4)
        f, ov = similarity_by_expectation(*inst)
        opt = _exhaustive_optimum(*inst)
        if ov != opt:
            not_opt.append((len(inst[2]), len(inst[4]), ov, opt))
    report(5, not below and not not_opt,
           f"product bound held on {1000 - len(below)}/1000 pairs; "
           f"exhaustive optimum matched on {1000 - len(not_opt)}/1000 instances with parts <= 4"
           + (f"; first misses (|A|,|B|,found,optimum): {not_opt[:3]}" if not_opt else ""))


# 6 -------------------------------------------------------------------------


def test_criterion_6_greedy_gain():
    t0 = time.perf_counter()
    n = 4096
    p = n ** -0.5
    ratios = []
    for seed in range(20):
        g1, a, b = gnp_bipartite(n, n, p, seed, 1)
        g2, _, _ = gnp_bipartite(n, n, p, seed, 2)
        v1, v2 = BipartiteView(g1, a, b), BipartiteView(g2, a, b)
        f, greedy = greedy_bipartite_similarity(v1, v2, GreedyConfig(seed=seed))
        assert greedy == overlap_count(f, v1.edges, v2.edges)
        rng = stream(seed, 100)
        rand = max(overlap_count(VertexBijection(np.concatenate([a, b]),
                                                 np.concatenate([rng.permutation(a), rng.permutation(b)])),
                                 v1.edges, v2.edges) for _ in range(10))
        ratios.append(greedy / rand)
    med = statistics.median(ratios)
    dt = time.perf_counter() - t0
    report(6, med >= 1.3 and dt < 600,
           f"median greedy/best-of-10-random = {med:.3f} over 20 seeds (min {min(ratios):.3f}), {dt:.0f}s")


# 7 -------------------------------------------------------------------------


def test_criterion_7_scaling(tmp_path):
    t0 = time.perf_counter()
    out = tmp_path / "bench.csv"
    ns = [256, 512, 1024, 2048]
    assert cli_main(["bench", "--n", *map(str, ns), "--seeds", "5", "-o", str(out)]) == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 20
    med = {n: statistics.median(float(r["normalized"]) for r in rows if int(r["n"]) == n) for n in ns}
    spread = max(med.values()) / min(med.values())
    rising = med[ns[-1]] >= med[ns[0]]
    dt = time.perf_counter() - t0
    detail = ", ".join(f"n={n}: {med[n]:.4f}" for n in ns)
    report(7, spread < 3 and rising and dt < 1800,
           f"median s/(n ln n): {detail}; spread x{spread:.3f}, n=2048 vs n=256 {'>=' if rising else '<'}; {dt:.0f}s")


# 8 -------------------------------------------------------------------------


def test_criterion_8_union_bound():
    rng = np.random.default_rng(8008)
    bad = []
    for _ in range(10_000):
        n = int(np.exp(rng.uniform(np.log(2), np.log(1e7))))
        p = float(np.exp(rng.uniform(np.log(1e-9), 0)))
        pairs = n * (n - 1) // 2
        t = max(1, min(pairs, int(np.exp(rng.uniform(0, np.log(pairs + 1))))))
        exact, simple = union_bound_log(n, p, t)
        if not exact <= simple:
            bad.append((n, p, t, exact, simple))
    n = 10**4
    p = math.sqrt(math.log(n) / n)
    anchor1 = union_bound_log(n, p, math.ceil(math.exp(12) * n * n * p * p))[0]
    n = 10**6
    p = n ** -0.5
    gamma = regime_params(n, p).gamma
    anchor2 = union_bound_log(n, p, math.ceil(n * math.log(n) / math.log(gamma)))[0]
    report(8, not bad and anchor1 < 0 and anchor2 < 0,
           f"inequality held on {10_000 - len(bad)}/10000 triples; anchors exact_log = {anchor1:.6g}, {anchor2:.6g}")


# 9 -------------------------------------------------------------------------


def _recursion_graphs():
    """Dense cores with pendant leaves: sparse enough to need the degree cut, then dense."""
    out = []
    for k, leaves in ((440, 8500), (300, 5000), (500, 12000)):
        e = [(i, j) for i in range(k) for j in range(i + 1, k)] + [(i % k, k + i) for i in range(leaves)]
        out.append(build_graph(k + leaves, e))
    return out


def test_criterion_9_driver_bookkeeping():
    graphs = [gnp(n, math.sqrt(math.log(n) / n), s) for n in (256, 512, 1024, 2048) for s in range(5)]
    graphs += _recursion_graphs()
    problems, recursions = [], 0
    for g in graphs:
        h, _ = remove_isolated(g)
        bound = step_bound(a_of(h.n, h.m))
        for mode in ("theory", "best"):
            try:
                r = drive(g, mode=mode)
            except AssertionError as exc:
                problems.append(f"n={g.n} {mode}: {exc}")
                continue
            for st in r.steps:
                if st.branch == "recurse":
                    recursions += 1
                    if not st.state.a > 3 or not all(st.checks.values()) or len(st.checks) != 3:
                        problems.append(f"n={g.n} {mode} step {st.state.t}: {st.checks}")
            if len(r.steps) > bound:
                problems.append(f"n={g.n} {mode}: {len(r.steps)} steps > {bound}")
    report(9, not problems and recursions > 0,
           f"{len(graphs)} graphs x 2 modes, {recursions} recursion steps checked, all within ceil(3a0)+1 steps"
           + (f"; problems: {problems[:3]}" if problems else ""))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
