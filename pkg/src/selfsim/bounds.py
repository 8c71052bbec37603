"""Deterministic baseline constructions: star forests and the volume bound."""
import logging
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .graph import (
    BipartiteView,
    Graph,
    GraphError,
    SimilarityCertificate,
    VertexBijection,
    edge_keys,
    overlap_certificate,
    overlap_count,
)

log = logging.getLogger(__name__)

# cost (nA * nB * (nA + nB)) above which the exact derandomisation is replaced by restarts
EXPECTATION_COST_LIMIT = 10**11


@dataclass(frozen=True)
class Star:
    center: int
    leaves: tuple

    def __post_init__(self):
        if not self.leaves:
            raise ValueError("a star needs at least one leaf")
        if self.center in self.leaves:
            raise ValueError("star center listed as its own leaf")

    @property
    def d(self) -> int:
        return len(self.leaves)

    def vertices(self):
        return (self.center,) + tuple(self.leaves)

    def edges(self) -> np.ndarray:
        return np.array([sorted((self.center, x)) for x in self.leaves], dtype=np.int64).reshape(-1, 2)


@dataclass(frozen=True)
class StarForest:
    stars: tuple

    def __post_init__(self):
        seen = set()
        for st in self.stars:
            vs = st.vertices()
            if seen.intersection(vs):
                raise ValueError("stars of a forest must be vertex-disjoint")
            seen.update(vs)

    def __len__(self):
        return len(self.stars)

    def __iter__(self):
        return iter(self.stars)

    @property
    def centers(self) -> list:
        return [st.center for st in self.stars]

    def vertices(self) -> set:
        return {v for st in self.stars for v in st.vertices()}

    def edges(self) -> np.ndarray:
        if not self.stars:
            return np.zeros((0, 2), dtype=np.int64)
        return np.concatenate([st.edges() for st in self.stars])


def star_cover(g: Graph) -> StarForest:
    """Vertex-disjoint stars covering every vertex of an isolated-free graph.

    Edges joining two vertices of degree >= 2 are deleted in lexicographic
    order; what remains is a disjoint union of stars.
    """
    if g.n and (g.degrees == 0).any():
        v = int(np.flatnonzero(g.degrees == 0)[0])
        raise GraphError(f"vertex {v} is isolated; call remove_isolated first")
    keep = kernels.star_deletion(g.edges[:, 0], g.edges[:, 1], g.degrees)
    rest = g.edges[keep]
    deg = np.bincount(rest.ravel(), minlength=g.n)
    stars = []
    assigned = np.zeros(g.n, dtype=bool)
    for c in np.flatnonzero(deg >= 2).tolist():
        leaves = np.concatenate([rest[rest[:, 0] == c, 1], rest[rest[:, 1] == c, 0]])
        stars.append(Star(c, tuple(sorted(leaves.tolist()))))
        assigned[c] = True
        assigned[leaves] = True
    for u, v in rest.tolist():
        if not assigned[u] and not assigned[v]:
            stars.append(Star(u, (v,)))
            assigned[u] = assigned[v] = True
    stars.sort(key=lambda st: st.center)
    return StarForest(tuple(stars))


def split_star_forest(forest: StarForest, method: str = "star-forest") -> SimilarityCertificate:
    """Two isomorphic halves of a star forest.

    1-stars are paired in order of center id (one of each pair per side);
    every d-star with d >= 2 keeps its center and splits its leaves into two
    halves of ``d // 2``.
    """
    src, dst, e1 = [], [], []
    ones = [st for st in forest if st.d == 1]
    for a, b in zip(ones[0::2], ones[1::2]):
        src += [a.center, a.leaves[0]]
        dst += [b.center, b.leaves[0]]
        e1.append((a.center, a.leaves[0]))
    for st in forest:
        if st.d < 2:
            continue
        h = st.d // 2
        src.append(st.center)
        dst.append(st.center)
        for x, y in zip(st.leaves[:h], st.leaves[h:2 * h]):
            src.append(x)
            dst.append(y)
            e1.append((st.center, x))
    if not e1:
        return SimilarityCertificate.empty(method)
    return SimilarityCertificate.from_map(e1, VertexBijection(src, dst), method)


def bipartition_halver(g: Graph, init=None) -> BipartiteView:
    """Local-search bipartition with at least ``ceil(m/2)`` crossing edges.

    Starts from the even/odd split (or ``init``, a 0/1 side per vertex) and
    flips any vertex with more same-side than cross-side neighbours until
    none is left.
    """
    side = np.arange(g.n, dtype=np.int64) % 2 if init is None else np.asarray(init, dtype=np.int64)
    indptr, indices = g.csr
    side = kernels.local_search_cut(indptr, indices, side)
    return BipartiteView(g, np.flatnonzero(side == 0), np.flatnonzero(side == 1))


def edge_halves(bv: BipartiteView) -> tuple[np.ndarray, np.ndarray]:
    """Round-robin split of the sorted crossing edges: odd positions, then even positions."""
    return bv.edges[1::2], bv.edges[0::2]


def _index(parts, n):
    idx = np.full(n, -1, dtype=np.int64)
    idx[parts] = np.arange(len(parts))
    return idx


def _orient(edges, first_idx, second_idx, label):
    """Rows ``(i, j)``: position of the endpoint in the first and second part."""
    u, v = edges[:, 0], edges[:, 1]
    iu, jv = first_idx[u], second_idx[v]
    iv, ju = first_idx[v], second_idx[u]
    fwd = (iu >= 0) & (jv >= 0)
    bwd = (iv >= 0) & (ju >= 0)
    if not (fwd | bwd).all():
        raise ValueError(f"{label} has an edge not crossing its parts")
    return np.where(fwd, iu, iv), np.where(fwd, jv, ju)


def expected_overlap(n_edges1: int, n_edges2: int, na: int, nb: int) -> float:
    """Mean overlap of a uniformly random part-preserving bijection."""
    if na == 0 or nb == 0:
        return 0.0
    return n_edges1 * n_edges2 / (na * nb)


def similarity_by_expectation(g1, g2, parts_a1, parts_a2, parts_b1, parts_b2,
                              restarts: int = 16, seed: int = 0):
    """Bijection ``A1 -> A2``, ``B1 -> B2`` with overlap at least ``|g1||g2| / (|A||B|)``.

    Method of conditional expectations: every ``A1`` vertex is fixed first (in
    ascending order), then every ``B1`` vertex, each to the image maximising
    the exact conditional expected overlap under a uniform completion.  In
    the A phase the expected weight of ``a1 -> a2`` is
    ``deg1(a1) * deg2(a2) / |B|``; in the B phase it is the number of
    ``a1`` with ``a1 ~ b1`` in ``g1`` and ``f(a1) ~ b2`` in ``g2``.

    Above :data:`EXPECTATION_COST_LIMIT` the best of ``restarts`` seeded
    uniform bijections is returned instead (no guarantee).

    Returns ``(VertexBijection, overlap)``.
    """
    a1, a2, b1, b2 = (np.unique(np.asarray(p, dtype=np.int64)) for p in (parts_a1, parts_a2, parts_b1, parts_b2))
    if a1.size != a2.size or b1.size != b2.size:
        raise ValueError(f"part sizes differ: |A1|={a1.size}, |A2|={a2.size}, |B1|={b1.size}, |B2|={b2.size}")
    if np.intersect1d(np.union1d(a1, a2), np.union1d(b1, b2)).size:
        raise ValueError("A-parts and B-parts must be disjoint")
    e1 = np.asarray(g1, dtype=np.int64).reshape(-1, 2)
    e2 = np.asarray(g2, dtype=np.int64).reshape(-1, 2)
    na, nb = int(a1.size), int(b1.size)
    n = int(max([0] + [p.max() + 1 for p in (a1, a2, b1, b2) if p.size])) if (na or nb) else 0
    if na == 0 or nb == 0:
        f = VertexBijection(np.concatenate([a1, b1]), np.concatenate([a2, b2]))
        return f, 0
    ia1, ia2, ib1, ib2 = (_index(p, n) for p in (a1, a2, b1, b2))
    r1, c1 = _orient(e1, ia1, ib1, "g1")
    r2, c2 = _orient(e2, ia2, ib2, "g2")

    if na * nb * (na + nb) > EXPECTATION_COST_LIMIT:
        log.info("similarity_by_expectation: %d x %d parts above cost limit, using %d restarts", na, nb, restarts)
        return _best_random(e1, e2, a1, a2, b1, b2, restarts, seed)

    M1 = np.zeros((na, nb), dtype=np.int64)
    M2 = np.zeros((na, nb), dtype=np.int64)
    np.add.at(M1, (r1, c1), 1)
    np.add.at(M2, (r2, c2), 1)
    # A phase: the B side is still uniformly random
    S_a = np.outer(M1.sum(axis=1), M2.sum(axis=1))
    sigma_a = kernels.assign_by_expectation(S_a)
    # B phase: count edge pairs completed through the fixed A map
    # float64 product goes through BLAS and is exact while entries stay below 2^53
    S_b = np.rint(M1.T.astype(np.float64) @ M2[sigma_a].astype(np.float64)).astype(np.int64)
    sigma_b = kernels.assign_by_expectation(S_b)

    f = VertexBijection(np.concatenate([a1, b1]), np.concatenate([a2[sigma_a], b2[sigma_b]]))
    return f, overlap_count(f, e1, e2)


def _best_random(e1, e2, a1, a2, b1, b2, restarts, seed):
    rng = np.random.default_rng(seed)
    best_f, best = None, -1
    for _ in range(max(1, restarts)):
        f = VertexBijection(np.concatenate([a1, b1]), np.concatenate([rng.permutation(a2), rng.permutation(b2)]))
        val = overlap_count(f, e1, e2)
        if val > best:
            best_f, best = f, val
    return best_f, best


def iso_volume(g: Graph) -> SimilarityCertificate:
    """Volume certificate: halve a large cut, then map half onto half by conditional expectations.

    For ``m >= 20`` the result has ``s >= m^2 / (5 n^2)``; below that the
    certificate is still valid but carries no guarantee.
    """
    if g.m == 0:
        return SimilarityCertificate.empty("volume")
    bv = bipartition_halver(g)
    h1, h2 = edge_halves(bv)
    f, _ = similarity_by_expectation(h1, h2, bv.part_a, bv.part_a, bv.part_b, bv.part_b)
    return overlap_certificate(f, h1, h2, method="volume")


def volume_guarantee(n: int, m: int) -> float:
    """The volume lower bound ``m^2 / (5 n^2)`` (meaningful for ``m >= 20``)."""
    return m * m / (5.0 * n * n) if n else 0.0


def star_forest_guarantee(n_covered: int) -> int:
    """Integer form of ``(n' - 2) / 4`` for a forest covering ``n'`` vertices."""
    return max(0, math.ceil((n_covered - 2) / 4))
