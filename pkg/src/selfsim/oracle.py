"""Exact self-similarity for small graphs.

Any injection between vertex subsets extends to a permutation of the whole
vertex set, so ISO(G) is the maximum over permutations ``pi`` of the largest
``S`` with ``pi(S) ⊆ E`` and ``S ∩ pi(S) = ∅``.  For fixed ``pi`` the map
``e -> pi(e)`` is injective on edges, so its restriction to ``E`` splits into
chains (ending at an edge whose image leaves ``E``) and cycles, and the
problem becomes "no two consecutive" on each of them.
"""
import itertools
from dataclasses import dataclass

import numpy as np

from . import kernels
from .graph import Graph, SimilarityCertificate, VertexBijection

DEFAULT_CAP = 9


class OracleRefused(RuntimeError):
    """Input exceeds the configured size cap."""


@dataclass(frozen=True)
class EdgeOrbitDecomposition:
    chains: list
    cycles: list


def edge_id_table(g: Graph) -> np.ndarray:
    eid = np.full((g.n, g.n), -1, dtype=np.int64)
    if g.m:
        eid[g.edges[:, 0], g.edges[:, 1]] = np.arange(g.m)
    return eid


def _check_perm(g: Graph, perm) -> np.ndarray:
    perm = np.asarray(perm, dtype=np.int64).ravel()
    if perm.size != g.n or not np.array_equal(np.sort(perm), np.arange(g.n)):
        raise ValueError(f"not a permutation of 0..{g.n - 1}: {perm.tolist()}")
    return perm


def edge_orbits(g: Graph, perm) -> EdgeOrbitDecomposition:
    """Split ``E(g)`` into maximal chains and cycles of the edge map induced by ``perm``."""
    perm = _check_perm(g, perm)
    eid = edge_id_table(g)
    img = perm[g.edges] if g.m else g.edges
    nxt = eid[img.min(axis=1), img.max(axis=1)] if g.m else np.zeros(0, dtype=np.int64)
    has_pred = np.zeros(g.m, dtype=bool)
    has_pred[nxt[nxt >= 0]] = True
    seen = np.zeros(g.m, dtype=bool)
    chains, cycles = [], []
    for e in range(g.m):
        if not has_pred[e]:
            chain, cur = [], e
            while cur >= 0:
                seen[cur] = True
                chain.append(cur)
                cur = int(nxt[cur])
            chains.append(chain)
    for e in range(g.m):
        if not seen[e]:
            cycle, cur = [], e
            while not seen[cur]:
                seen[cur] = True
                cycle.append(cur)
                cur = int(nxt[cur])
            cycles.append(cycle)
    return EdgeOrbitDecomposition(chains, cycles)


def _path_dp(length: int) -> list:
    """Positions of a maximum set of pairwise non-consecutive elements on a path."""
    if length <= 0:
        return []
    take = [0] * (length + 1)   # best using positions < i with i-1 taken
    skip = [0] * (length + 1)   # best using positions < i with i-1 not taken
    for i in range(1, length + 1):
        take[i] = skip[i - 1] + 1
        skip[i] = max(take[i - 1], skip[i - 1])
    chosen = []
    i, taken = length, take[length] >= skip[length]
    while i > 0:
        if taken:
            chosen.append(i - 1)
            taken = False
        else:
            taken = take[i - 1] >= skip[i - 1]
        i -= 1
    return chosen[::-1]


def orbit_value(g: Graph, perm) -> tuple[int, SimilarityCertificate]:
    """Best ``S`` for the fixed permutation ``perm`` and its certificate ``(S, perm(S))``."""
    perm = _check_perm(g, perm)
    dec = edge_orbits(g, perm)
    chosen = []
    for chain in dec.chains:
        # the chain's last edge maps outside E and cannot be used
        chosen.extend(chain[i] for i in _path_dp(len(chain) - 1))
    for cycle in dec.cycles:
        if len(cycle) >= 2:
            # break the cycle at its last edge, which stays unused
            chosen.extend(cycle[i] for i in _path_dp(len(cycle) - 1))
    f = VertexBijection(np.arange(g.n), perm)
    cert = SimilarityCertificate.from_map(g.edges[sorted(chosen)], f, method="exact")
    return cert.s, cert


def iso_exact(g: Graph, cap: int = DEFAULT_CAP) -> tuple[int, SimilarityCertificate]:
    """Exact ISO(g) by scanning all ``n!`` vertex permutations (stopping at ``floor(m/2)``)."""
    if g.n > cap:
        raise OracleRefused(f"n={g.n} exceeds the oracle cap of {cap} vertices ({g.n}! permutations)")
    if g.m < 2:
        return 0, SimilarityCertificate.empty("exact")
    best, perm, _ = kernels.permutation_search(g.n, g.edges[:, 0], g.edges[:, 1], edge_id_table(g), g.m // 2)
    value, cert = orbit_value(g, perm)
    if value != best:  # pragma: no cover - kernel and witness disagree
        raise AssertionError(f"kernel value {best} != witness value {value}")
    return value, cert


# ---------------------------------------------------------------------------
# independent brute force
# ---------------------------------------------------------------------------


def _edge_invariant(edges):
    deg = {}
    for u, v in edges:
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
    pair_degs = sorted(tuple(sorted((deg[u], deg[v]))) for u, v in edges)
    return tuple(pair_degs), deg


def _isomorphic(e1, e2) -> bool:
    """Backtracking search for a vertex bijection carrying edge list ``e1`` onto ``e2``."""
    inv1, deg1 = _edge_invariant(e1)
    inv2, deg2 = _edge_invariant(e2)
    if inv1 != inv2:
        return False
    adj1 = {v: set() for v in deg1}
    adj2 = {v: set() for v in deg2}
    for u, v in e1:
        adj1[u].add(v)
        adj1[v].add(u)
    for u, v in e2:
        adj2[u].add(v)
        adj2[v].add(u)
    order = sorted(deg1, key=lambda v: (-deg1[v], v))
    mapping, used = {}, set()

    def extend(i):
        if i == len(order):
            return True
        v = order[i]
        for w in deg2:
            if w in used or deg2[w] != deg1[v]:
                continue
            if all((mapping[x] in adj2[w]) == (x in adj1[v]) for x in mapping):
                mapping[v] = w
                used.add(w)
                if extend(i + 1):
                    return True
                del mapping[v]
                used.discard(w)
        return False

    return extend(0)


def iso_exact_naive(g: Graph, max_edges: int = 8) -> int:
    """ISO(g) by enumerating disjoint pairs of equal-size edge subsets.

    Sizes are tried from ``floor(m/2)`` down; a pair counts when a vertex
    bijection maps one subset onto the other.  Independent of the
    permutation reduction used by :func:`iso_exact`.
    """
    m = g.m
    if m > max_edges:
        raise OracleRefused(f"m={m} exceeds the naive oracle cap of {max_edges} edges")
    edges = [tuple(e) for e in g.edges.tolist()]
    full = (1 << m) - 1
    for s in range(m // 2, 0, -1):
        groups = {}
        for combo in itertools.combinations(range(m), s):
            mask = 0
            for i in combo:
                mask |= 1 << i
            sub = [edges[i] for i in combo]
            groups.setdefault(_edge_invariant(sub)[0], []).append((mask, sub))
        for members in groups.values():
            for i, (mask1, sub1) in enumerate(members):
                if bin(full & ~mask1).count("1") < s:
                    continue
                for mask2, sub2 in members[i + 1:]:
                    if mask1 & mask2 == 0 and _isomorphic(sub1, sub2):
                        return s
    return 0
