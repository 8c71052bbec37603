"""Graphs, vertex bijections and similarity certificates.

Vertices are the integers ``0..n-1``.  Edge sets are ``(m, 2)`` int64 arrays
with ``u < v`` in every row and rows sorted lexicographically; every
constructor below returns that canonical form.
"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional

import numpy as np


class GraphError(ValueError):
    """Invalid graph input (loop, endpoint out of range, malformed pair)."""


def canonical_edges(raw, n: Optional[int] = None) -> np.ndarray:
    """Return the canonical edge array for ``raw`` (duplicates collapsed).

    Raises :class:`GraphError` on loops or, when ``n`` is given, on endpoints
    outside ``0..n-1``.
    """
    arr = np.asarray(raw, dtype=np.int64)
    if arr.size == 0:
        return np.zeros((0, 2), dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise GraphError("edges must be vertex pairs")
    loops = np.flatnonzero(arr[:, 0] == arr[:, 1])
    if loops.size:
        u, v = arr[loops[0]]
        raise GraphError(f"loop edge ({u}, {v})")
    if (arr < 0).any() or (n is not None and (arr >= n).any()):
        bad = np.flatnonzero((arr < 0).any(axis=1) | ((arr >= n).any(axis=1) if n is not None else False))
        u, v = arr[bad[0]]
        raise GraphError(f"endpoint out of range in edge ({u}, {v}) for n={n}")
    lo = arr.min(axis=1)
    hi = arr.max(axis=1)
    return np.unique(np.stack([lo, hi], axis=1), axis=0)


def edge_keys(edges: np.ndarray, base: int) -> np.ndarray:
    """Encode canonical edges as ``u * base + v``."""
    return edges[:, 0] * base + edges[:, 1]


def _edge_array(g) -> np.ndarray:
    if isinstance(g, Graph):
        return g.edges
    return canonical_edges(g)


@dataclass(frozen=True, eq=False)
class Graph:
    n: int
    edges: np.ndarray

    def __post_init__(self):
        self.edges.setflags(write=False)

    @property
    def m(self) -> int:
        return int(self.edges.shape[0])

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n).astype(np.int64)

    @cached_property
    def csr(self):
        """Sorted neighbour lists as ``(indptr, indices)``."""
        both = np.concatenate([self.edges, self.edges[:, ::-1]])
        order = np.lexsort((both[:, 1], both[:, 0]))
        both = both[order]
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(both[:, 0], minlength=self.n), out=indptr[1:])
        return indptr, np.ascontiguousarray(both[:, 1])

    def neighbors(self, v: int) -> np.ndarray:
        indptr, indices = self.csr
        return indices[indptr[v]:indptr[v + 1]]

    @cached_property
    def adjacency_bits(self) -> np.ndarray:
        """Adjacency as an ``(n, ceil(n/64))`` uint64 bitset matrix."""
        words = max(1, (self.n + 63) // 64)
        bits = np.zeros((self.n, words), dtype=np.uint64)
        for u, v in ((self.edges[:, 0], self.edges[:, 1]), (self.edges[:, 1], self.edges[:, 0])):
            np.bitwise_or.at(bits, (u, v // 64), np.left_shift(np.uint64(1), (v % 64).astype(np.uint64)))
        return bits

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False
        return bool(int(self.adjacency_bits[u, v // 64]) >> (v % 64) & 1)

    @cached_property
    def _keys(self) -> np.ndarray:
        return edge_keys(self.edges, max(self.n, 1))

    def contains_edges(self, edges: np.ndarray) -> np.ndarray:
        """Boolean mask: which rows of a canonical edge array are edges of this graph."""
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        inside = (edges >= 0).all(axis=1) & (edges < self.n).all(axis=1)
        keys = np.where(inside, edge_keys(np.where(edges < self.n, edges, 0), max(self.n, 1)), -1)
        return inside & np.isin(keys, self._keys)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edges, other.edges)

    def __hash__(self):
        return hash((self.n, self.edges.tobytes()))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def build_graph(n: int, raw_edges: Iterable) -> Graph:
    if n < 0:
        raise GraphError("vertex count must be non-negative")
    return Graph(int(n), canonical_edges(list(raw_edges) if not isinstance(raw_edges, np.ndarray) else raw_edges, n))


def induced_subgraph(g: Graph, keep) -> tuple[Graph, np.ndarray]:
    """Subgraph induced by ``keep``, relabelled ``0..k-1`` in ascending order.

    The returned index map sends new labels to the original ones.
    """
    keep = np.unique(np.asarray(list(keep) if not isinstance(keep, np.ndarray) else keep, dtype=np.int64))
    if keep.size and (keep[0] < 0 or keep[-1] >= g.n):
        raise GraphError("kept vertex out of range")
    relabel = np.full(g.n, -1, dtype=np.int64)
    relabel[keep] = np.arange(keep.size)
    e = relabel[g.edges] if g.m else g.edges
    e = e[(e >= 0).all(axis=1)]
    return Graph(int(keep.size), np.ascontiguousarray(e)), keep


def remove_isolated(g: Graph) -> tuple[Graph, np.ndarray]:
    return induced_subgraph(g, np.flatnonzero(g.degrees > 0))


@dataclass(frozen=True, eq=False)
class BipartiteView:
    """The edges of ``parent`` that cross between the disjoint sets ``part_a`` and ``part_b``."""

    parent: Graph
    part_a: np.ndarray
    part_b: np.ndarray
    edges: np.ndarray = field(init=False)

    def __post_init__(self):
        a = np.unique(np.asarray(self.part_a, dtype=np.int64))
        b = np.unique(np.asarray(self.part_b, dtype=np.int64))
        if np.intersect1d(a, b).size:
            raise GraphError("bipartite parts overlap")
        object.__setattr__(self, "part_a", a)
        object.__setattr__(self, "part_b", b)
        side = np.full(self.parent.n, -1, dtype=np.int64)
        side[a] = 0
        side[b] = 1
        e = self.parent.edges
        su, sv = side[e[:, 0]], side[e[:, 1]]
        cross = (su >= 0) & (sv >= 0) & (su != sv)
        object.__setattr__(self, "edges", e[cross])
        object.__setattr__(self, "_side", side)

    @property
    def m(self) -> int:
        return int(self.edges.shape[0])

    @cached_property
    def csr(self):
        """Neighbour lists restricted to crossing edges, indexed by parent vertex id."""
        return Graph(self.parent.n, self.edges).csr

    def neighbors(self, v: int) -> np.ndarray:
        indptr, indices = self.csr
        return indices[indptr[v]:indptr[v + 1]]

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.parent.n).astype(np.int64)

    def side_of(self, v: int) -> int:
        """0 for ``part_a``, 1 for ``part_b``, -1 otherwise."""
        return int(self._side[v])


class VertexBijection:
    """Injective map between vertex sets, stored as parallel ``src``/``dst`` arrays sorted by ``src``."""

    __slots__ = ("src", "dst")

    def __init__(self, src, dst):
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        if src.shape != dst.shape:
            raise ValueError("src and dst lengths differ")
        order = np.argsort(src, kind="stable")
        src, dst = src[order], dst[order]
        if src.size > 1 and (np.diff(src) == 0).any():
            raise ValueError("source vertex mapped twice")
        if np.unique(dst).size != dst.size:
            raise ValueError("map is not injective: two sources share a target")
        src.setflags(write=False)
        dst.setflags(write=False)
        self.src = src
        self.dst = dst

    @classmethod
    def from_pairs(cls, pairs) -> "VertexBijection":
        pairs = list(pairs.items()) if isinstance(pairs, dict) else list(pairs)
        if not pairs:
            return cls([], [])
        arr = np.asarray(pairs, dtype=np.int64)
        return cls(arr[:, 0], arr[:, 1])

    @classmethod
    def identity(cls, vertices) -> "VertexBijection":
        v = np.asarray(vertices, dtype=np.int64)
        return cls(v, v)

    def __len__(self):
        return int(self.src.size)

    def as_dict(self) -> dict:
        return dict(zip(self.src.tolist(), self.dst.tolist()))

    def as_array(self, size: int) -> np.ndarray:
        """Dense map of length ``size`` with -1 where undefined."""
        size = max(size, int(self.src.max()) + 1 if self.src.size else 0)
        out = np.full(size, -1, dtype=np.int64)
        out[self.src] = self.dst
        return out

    def restrict(self, vertices) -> "VertexBijection":
        keep = np.isin(self.src, np.asarray(vertices, dtype=np.int64))
        return VertexBijection(self.src[keep], self.dst[keep])

    def relabel(self, index_map: np.ndarray) -> "VertexBijection":
        return VertexBijection(index_map[self.src], index_map[self.dst])

    def __eq__(self, other):
        if not isinstance(other, VertexBijection):
            return NotImplemented
        return np.array_equal(self.src, other.src) and np.array_equal(self.dst, other.dst)

    def __repr__(self):
        return f"VertexBijection({self.as_dict()})"


def map_edges(f: VertexBijection, edges: np.ndarray) -> np.ndarray:
    """Canonical images of ``edges`` under ``f`` (row order preserved, not re-sorted)."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if edges.shape[0] == 0:
        return edges.copy()
    size = int(edges.max()) + 1
    fa = f.as_array(size)[:size]
    img = fa[edges]
    missing = (img < 0).any(axis=1)
    if missing.any():
        u, v = edges[np.flatnonzero(missing)[0]]
        raise KeyError(f"edge ({u}, {v}) has an endpoint outside the bijection's domain")
    return np.stack([img.min(axis=1), img.max(axis=1)], axis=1)


def overlap_count(f: VertexBijection, g1, g2) -> int:
    """``|f(g1) ∩ g2|`` where ``g1``/``g2`` are graphs or edge collections."""
    e1 = _edge_array(g1)
    e2 = _edge_array(g2)
    img = map_edges(f, e1)
    if img.shape[0] == 0 or e2.shape[0] == 0:
        return 0
    base = int(max(img.max(), e2.max())) + 1
    return int(np.isin(edge_keys(img, base), edge_keys(e2, base)).sum())


@dataclass(frozen=True, eq=False)
class SimilarityCertificate:
    e1: np.ndarray
    e2: np.ndarray
    f: VertexBijection
    s: int
    method: str = ""
    seed: Optional[int] = None

    @classmethod
    def from_map(cls, e1, f: VertexBijection, method: str = "", seed=None) -> "SimilarityCertificate":
        """Certificate for edges ``e1`` and their images, with ``f`` cut down to the endpoints of ``e1``."""
        e1 = canonical_edges(e1)
        e2 = canonical_edges(map_edges(f, e1))
        f = f.restrict(np.unique(e1)) if e1.size else VertexBijection([], [])
        return cls(e1, e2, f, int(e1.shape[0]), method, seed)

    @classmethod
    def empty(cls, method: str = "", seed=None) -> "SimilarityCertificate":
        z = np.zeros((0, 2), dtype=np.int64)
        return cls(z, z.copy(), VertexBijection([], []), 0, method, seed)

    def relabel(self, index_map: np.ndarray) -> "SimilarityCertificate":
        """Lift a certificate on a relabelled subgraph back to the original labels."""
        index_map = np.asarray(index_map, dtype=np.int64)

        def lift(e):
            if e.shape[0] == 0:
                return e.copy()
            return canonical_edges(index_map[e])

        return SimilarityCertificate(lift(self.e1), lift(self.e2), self.f.relabel(index_map),
                                     self.s, self.method, self.seed)

    def with_method(self, method: str) -> "SimilarityCertificate":
        return SimilarityCertificate(self.e1, self.e2, self.f, self.s, method, self.seed)

    def __repr__(self):
        return f"SimilarityCertificate(s={self.s}, method={self.method!r}, seed={self.seed})"


def overlap_certificate(f: VertexBijection, g1_edges, g2_edges, method: str = "", seed=None) -> SimilarityCertificate:
    """Certificate made of the ``g1`` edges that ``f`` maps onto ``g2`` edges.

    Edges of ``g1`` with an endpoint outside ``f``'s domain are skipped.
    """
    e1 = _edge_array(g1_edges)
    e2 = _edge_array(g2_edges)
    if e1.shape[0] == 0 or len(f) == 0:
        return SimilarityCertificate.empty(method, seed)
    size = int(max(e1.max(), f.src.max())) + 1
    fa = f.as_array(size)
    img = fa[e1]
    ok = (img >= 0).all(axis=1)
    e1, img = e1[ok], img[ok]
    if e1.shape[0] == 0 or e2.shape[0] == 0:
        return SimilarityCertificate.empty(method, seed)
    img = np.stack([img.min(axis=1), img.max(axis=1)], axis=1)
    base = int(max(img.max(), e2.max())) + 1
    hit = np.isin(edge_keys(img, base), edge_keys(e2, base))
    return SimilarityCertificate.from_map(e1[hit], f, method, seed)


def verify_certificate(g: Graph, c: SimilarityCertificate) -> tuple[bool, str]:
    """Check every certificate invariant against ``g``; return ``(ok, diagnostic)``."""
    e1 = np.asarray(c.e1, dtype=np.int64).reshape(-1, 2)
    e2 = np.asarray(c.e2, dtype=np.int64).reshape(-1, 2)
    for name, e in (("e1", e1), ("e2", e2)):
        if e.shape[0] and (e[:, 0] >= e[:, 1]).any():
            return False, f"{name} contains a non-canonical or loop edge"
        if np.unique(e, axis=0).shape[0] != e.shape[0]:
            return False, f"{name} contains a duplicate edge"
    if e1.shape[0] != c.s or e2.shape[0] != c.s:
        return False, f"size mismatch: |e1|={e1.shape[0]}, |e2|={e2.shape[0]}, s={c.s}"
    for name, e in (("e1", e1), ("e2", e2)):
        inside = g.contains_edges(e)
        if not inside.all():
            u, v = e[np.flatnonzero(~inside)[0]]
            return False, f"edge not in graph: ({u}, {v}) from {name}"
    if c.s:
        base = g.n
        if np.intersect1d(edge_keys(e1, base), edge_keys(e2, base)).size:
            return False, "not edge-disjoint"
    try:
        img = map_edges(c.f, e1)
    except KeyError as exc:
        return False, f"mapping undefined: {exc.args[0]}"
    if c.s:
        base = g.n
        if not np.array_equal(np.sort(edge_keys(img, base)), np.sort(edge_keys(e2, base))):
            return False, "image mismatch: f(e1) != e2"
    return True, "ok"
