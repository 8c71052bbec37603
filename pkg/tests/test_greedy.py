import itertools
import math

import numpy as np
import pytest
from conftest import complete, random_graph

from selfsim.bounds import Star, StarForest, iso_volume
from selfsim.generate import gnp, gnp_bipartite
from selfsim.graph import BipartiteView, VertexBijection, build_graph, overlap_count, verify_certificate
from selfsim.greedy import (
    GreedyConfig,
    best_hit,
    default_quota,
    forest_pair_similarity,
    four_partition,
    greedy_bipartite_similarity,
    key_similarity,
    max_star_forest,
    theory_threshold,
)
from selfsim.oracle import iso_exact


def test_config_validation():
    for bad in (dict(alpha=0.5), dict(alpha=0), dict(leaf_quota=0), dict(restarts=0), dict(threshold_mode="x")):
        with pytest.raises(ValueError):
            GreedyConfig(**bad)


def _forest(*leafsets, start=100):
    return StarForest(tuple(Star(start + i, tuple(ls)) for i, ls in enumerate(leafsets)))


def test_best_hit_exact_containment():
    assert best_hit({2, 3}, _forest([0, 1], [2, 3])) == (101, 2)


def test_best_hit_disjoint_returns_some_star():
    assert best_hit({9}, _forest([0, 1], [2, 3])) == (100, 0)


def test_best_hit_hand_count():
    assert best_hit({1, 2, 3}, _forest([0, 1], [2, 3], [4, 5])) == (101, 2)


def test_best_hit_skips_used():
    assert best_hit({2, 3}, _forest([0, 1], [2, 3]), used={101}) == (100, 0)
    assert best_hit({2}, _forest([0]), used={100}) is None


def test_max_star_forest_k33():
    g = build_graph(6, [(a, b) for a in range(3) for b in range(3, 6)])
    bv = BipartiteView(g, [0, 1, 2], [3, 4, 5])
    sf = max_star_forest(bv, [0, 1, 2], 1, 3)
    assert [(s.center, s.leaves) for s in sf] == [(0, (3,)), (1, (4,)), (2, (5,))]


def test_max_star_forest_quota_too_large():
    g = build_graph(6, [(a, b) for a in range(3) for b in range(3, 6)])
    bv = BipartiteView(g, [0, 1, 2], [3, 4, 5])
    assert len(max_star_forest(bv, [0, 1, 2], 4)) == 0


def test_max_star_forest_matching():
    k = 5
    g = build_graph(2 * k, [(i, k + i) for i in range(k)])
    bv = BipartiteView(g, range(k), range(k, 2 * k))
    sf = max_star_forest(bv, range(k), 1, k)
    assert len(sf) == k and all(s.d == 1 for s in sf)


def test_max_star_forest_centers_one_side():
    g = build_graph(4, [(0, 2), (1, 3)])
    bv = BipartiteView(g, [0, 1], [2, 3])
    with pytest.raises(ValueError):
        max_star_forest(bv, [0, 2], 1)


def test_max_star_forest_properties(rng):
    g = random_graph(rng, 40, 0.3)
    bv = BipartiteView(g, range(20), range(20, 40))
    sf = max_star_forest(bv, range(20), 2)
    assert all(s.d == 2 for s in sf)
    assert g.contains_edges(sf.edges()).all()


def test_greedy_identical_forests_identity_seed():
    # three 2-stars: centers 0..2, leaves 3..8
    e = [(0, 3), (0, 4), (1, 5), (1, 6), (2, 7), (2, 8)]
    g = build_graph(9, e)
    bv = BipartiteView(g, [0, 1, 2], [3, 4, 5, 6, 7, 8])
    f_b = VertexBijection.identity(range(3, 9))
    f, ov = greedy_bipartite_similarity(bv, bv, GreedyConfig(leaf_quota=2), f_b=f_b)
    assert ov == 6


def test_greedy_empty_g1():
    g1 = build_graph(4, [])
    g2 = build_graph(4, [(0, 2), (1, 3)])
    f, ov = greedy_bipartite_similarity(BipartiteView(g1, [0, 1], [2, 3]), BipartiteView(g2, [0, 1], [2, 3]))
    assert ov == 0


def test_greedy_part_size_mismatch():
    g = complete(5)
    with pytest.raises(ValueError):
        greedy_bipartite_similarity(BipartiteView(g, [0, 1], [2, 3, 4]), BipartiteView(g, [0], [1, 2, 3, 4]))


def test_greedy_reported_count_is_recomputed():
    g1, a, b = gnp_bipartite(200, 200, 0.1, 1, 1)
    g2, _, _ = gnp_bipartite(200, 200, 0.1, 1, 2)
    v1, v2 = BipartiteView(g1, a, b), BipartiteView(g2, a, b)
    f, ov = greedy_bipartite_similarity(v1, v2, GreedyConfig(restarts=3, seed=4))
    assert ov == overlap_count(f, v1.edges, v2.edges)


def test_greedy_fixed_mode_steps_meet_threshold():
    g1, a, b = gnp_bipartite(300, 300, 0.05, 2, 1)
    g2, _, _ = gnp_bipartite(300, 300, 0.05, 2, 2)
    gains = []
    cfg = GreedyConfig(threshold_mode="fixed", threshold=2, leaf_quota=3)
    greedy_bipartite_similarity(BipartiteView(g1, a, b), BipartiteView(g2, a, b), cfg, gains=gains)
    assert gains and min(gains) >= 2


def test_greedy_beats_random_small():
    n, p = 512, 512 ** -0.5
    wins = []
    for seed in range(5):
        g1, a, b = gnp_bipartite(n, n, p, seed, 1)
        g2, _, _ = gnp_bipartite(n, n, p, seed, 2)
        v1, v2 = BipartiteView(g1, a, b), BipartiteView(g2, a, b)
        _, ov = greedy_bipartite_similarity(v1, v2, GreedyConfig(seed=seed))
        r = np.random.default_rng(seed)
        rand = max(overlap_count(VertexBijection(np.arange(2 * n), np.concatenate([r.permutation(a), r.permutation(b)])),
                                 v1.edges, v2.edges) for _ in range(10))
        wins.append(ov > rand)
    assert sum(wins) >= 4


def test_theory_threshold():
    assert theory_threshold(10**6, 1e-6) >= 1
    assert theory_threshold(100, 0.5) == 1


def _two_regular(centers, leaves):
    return StarForest(tuple(Star(c, tuple(ls)) for c, ls in zip(centers, leaves)))


def test_forest_pair_aligned():
    s1 = _two_regular([0, 1], [(10, 11), (12, 13)])
    s2 = _two_regular([2, 3], [(20, 21), (22, 23)])
    fb = VertexBijection([10, 11, 12, 13], [22, 23, 20, 21])
    ext, gain = forest_pair_similarity(s1, s2, fb)
    assert gain == 4 and ext.as_dict() == {0: 3, 1: 2}


def test_forest_pair_misaligned_gain_zero():
    s1 = StarForest((Star(0, (10,)), Star(1, (11,))))
    s2 = StarForest((Star(2, (20,)), Star(3, (21,))))
    fb = VertexBijection([10, 11], [30, 31])
    assert forest_pair_similarity(s1, s2, fb)[1] == 0


def test_forest_pair_missing_fb():
    s1 = StarForest((Star(0, (10,)),))
    with pytest.raises(ValueError):
        forest_pair_similarity(s1, s1, VertexBijection([11], [12]))


def test_forest_pair_matches_brute_force_on_three_stars():
    s1 = _two_regular([0, 1, 2], [(3, 4), (5, 6), (7, 8)])
    s2 = _two_regular([9, 10, 11], [(12, 13), (14, 15), (16, 17)])
    fb = VertexBijection([3, 4, 5, 6, 7, 8], [12, 14, 13, 16, 15, 17])
    _, gain = forest_pair_similarity(s1, s2, fb)
    img = {st.center: {fb.as_dict()[x] for x in st.leaves} for st in s1}
    brute = max(sum(len(img[a.center] & set(b.leaves)) for a, b in zip(s1, perm))
                for perm in itertools.permutations(s2.stars))
    assert gain == brute


def test_forest_pair_availability_bound(rng):
    leaves = rng.permutation(np.arange(100, 160))
    s1 = StarForest(tuple(Star(i, tuple(leaves[4 * i:4 * i + 4].tolist())) for i in range(15)))
    s2 = StarForest(tuple(Star(20 + i, tuple(range(200 + 4 * i, 204 + 4 * i))) for i in range(15)))
    fb = VertexBijection(np.arange(100, 160), rng.permutation(np.arange(200, 260)))
    trace = []
    forest_pair_similarity(s1, s2, fb, trace=trace)
    assert all(unavail <= 2 * mapped for mapped, unavail in trace)


def test_forest_pair_fixed_mode_stops_at_quarter():
    s1 = StarForest(tuple(Star(i, (100 + i,)) for i in range(8)))
    s2 = StarForest(tuple(Star(20 + i, (200 + i,)) for i in range(8)))
    fb = VertexBijection(range(100, 108), range(200, 208))
    ext, _ = forest_pair_similarity(s1, s2, fb, GreedyConfig(threshold_mode="fixed"))
    assert len(ext) == 2


def test_four_partition_sizes():
    parts = four_partition(10, 3)
    assert sorted(len(p) for p in parts) == [2, 2, 3, 3]
    assert sorted(np.concatenate(parts).tolist()) == list(range(10))


def test_key_similarity_empty():
    assert key_similarity(build_graph(5, [])).s == 0


def test_key_similarity_low_degree_falls_back():
    g = build_graph(8, [(0, 1), (2, 3)])
    info = {}
    c = key_similarity(g, GreedyConfig(leaf_quota=5), info)
    assert info["fallback"] == "no-forest" and c.method == "key/fallback-volume"
    assert verify_certificate(g, c)[0]


def test_key_similarity_verifies_and_warns():
    g = gnp(600, math.sqrt(math.log(600) / 600), 5)
    info = {}
    c = key_similarity(g, GreedyConfig(seed=2, restarts=2), info)
    assert verify_certificate(g, c)[0] and c.s > 0
    assert info["warnings"] and "window" in info["warnings"][0]


def test_key_similarity_fixed_mode_verifies():
    g = gnp(400, 0.1, 6)
    info = {}
    c = key_similarity(g, GreedyConfig(threshold_mode="fixed"), info)
    assert verify_certificate(g, c)[0]


def test_key_similarity_below_oracle(rng):
    for _ in range(15):
        g = random_graph(rng, 7, 0.6)
        assert key_similarity(g).s <= iso_exact(g)[0]


def test_default_quota():
    g = complete(40)
    bv = BipartiteView(g, range(20), range(20, 40))
    assert default_quota(bv) == 1
