"""Seeded G(n, p) generation."""
import numpy as np

from .graph import Graph
from .rng import PRNG_ID, stream


def gnp(n: int, p: float, seed: int) -> Graph:
    """``G(n, p)`` on ``0..n-1``.

    Pairs ``(u, v)`` with ``u < v`` are visited in lexicographic order and
    each consumes exactly one uniform draw from ``stream(seed)``; the pair is
    an edge when the draw is below ``p``.
    """
    if not 0 <= p <= 1:
        raise ValueError(f"p={p} outside [0, 1]")
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = stream(seed)
    chunks = []
    for u in range(n - 1):
        hit = np.flatnonzero(rng.random(n - 1 - u) < p)
        if hit.size:
            chunks.append(np.column_stack([np.full(hit.size, u, dtype=np.int64), hit + u + 1]))
    edges = np.concatenate(chunks) if chunks else np.zeros((0, 2), dtype=np.int64)
    return Graph(n, edges)


def gnp_header(n: int, p: float, seed: int) -> list:
    return [f"G(n,p) n={n} p={p!r} seed={seed} prng={PRNG_ID}"]


def gnp_bipartite(na: int, nb: int, p: float, seed: int, key: int = 1):
    """Random bipartite graph: parts ``0..na-1`` and ``na..na+nb-1``, each cross pair an edge with probability ``p``.

    Returns ``(Graph, part_a, part_b)``.  Draws come from ``stream(seed, key)``
    row by row over ``part_a``.
    """
    if not 0 <= p <= 1:
        raise ValueError(f"p={p} outside [0, 1]")
    rng = stream(seed, key)
    chunks = []
    for u in range(na):
        hit = np.flatnonzero(rng.random(nb) < p)
        chunks.append(np.column_stack([np.full(hit.size, u, dtype=np.int64), hit + na]))
    edges = np.concatenate(chunks) if chunks else np.zeros((0, 2), dtype=np.int64)
    return Graph(na + nb, edges), np.arange(na), np.arange(na, na + nb)
