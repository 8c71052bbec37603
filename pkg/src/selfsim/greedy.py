"""Greedy bijection extension over star forests.

A uniformly random bijection ``f_B: B1 -> B2`` is fixed first; vertices on
the A side are then mapped one at a time to the partner whose star leaves
best overlap the image of their neighbourhood.  Overlaps of a random set
with many disjoint leaf sets have Poisson-like tails, so the best of many
candidates beats a random choice by a logarithmic factor.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bounds import Star, StarForest, iso_volume
from .graph import (
    BipartiteView,
    Graph,
    SimilarityCertificate,
    VertexBijection,
    induced_subgraph,
    overlap_certificate,
    overlap_count,
)
from .rng import stream

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GreedyConfig:
    """Parameters of the greedy mappers.

    ``threshold_mode`` is ``"adaptive"`` (always take the best available
    partner) or ``"fixed"`` (take it only when the overlap reaches
    ``threshold``; ``None`` means the asymptotic value).  ``leaf_quota=None``
    picks ``max(1, avg_degree // 16)`` per bipartite view.
    """

    alpha: float = 1 / 25
    leaf_quota: Optional[int] = None
    threshold_mode: str = "adaptive"
    threshold: Optional[float] = None
    restarts: int = 1
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.alpha < 0.5:
            raise ValueError("alpha must lie in (0, 1/2)")
        if self.leaf_quota is not None and self.leaf_quota < 1:
            raise ValueError("leaf_quota must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.threshold_mode not in ("adaptive", "fixed"):
            raise ValueError("threshold_mode must be 'adaptive' or 'fixed'")

    @property
    def fixed(self) -> bool:
        return self.threshold_mode == "fixed"


@dataclass
class ForestCollection:
    forests: list = field(default_factory=list)
    residual_high_degree: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    residual_leafset: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def __post_init__(self):
        centers = [c for fo in self.forests for c in fo.centers]
        if len(centers) != len(set(centers)):
            raise ValueError("center sets of the forests must be disjoint")

    @property
    def k(self) -> int:
        return len(self.forests)


def default_quota(bv: BipartiteView) -> int:
    nv = bv.part_a.size + bv.part_b.size
    avg = 2 * bv.m / nv if nv else 0.0
    return max(1, int(avg // 16))


# ---------------------------------------------------------------------------
# candidate selection
# ---------------------------------------------------------------------------


def best_hit(image_set, candidates: StarForest, used=()):
    """Unused star with the most leaves in ``image_set``; ties to the lowest center.

    Returns ``(center, overlap)`` or ``None`` when every center is used.
    """
    image = set(np.asarray(list(image_set) if not isinstance(image_set, np.ndarray) else image_set).tolist())
    used = set(used)
    best = None
    for st in candidates:
        if st.center in used:
            continue
        hit = len(image.intersection(st.leaves))
        if best is None or hit > best[1] or (hit == best[1] and st.center < best[0]):
            best = (st.center, hit)
    return best


class _ForestIndex:
    """Array view of a star forest for O(|image|) best-hit queries."""

    def __init__(self, forest: StarForest, n: int):
        order = np.argsort([st.center for st in forest.stars], kind="stable")
        self.stars = [forest.stars[i] for i in order]
        self.centers = np.array([st.center for st in self.stars], dtype=np.int64)
        self.sizes = np.array([st.d for st in self.stars], dtype=np.int64)
        self.owner = np.full(n, -1, dtype=np.int64)
        for i, st in enumerate(self.stars):
            self.owner[list(st.leaves)] = i
        self.eligible = np.ones(len(self.stars), dtype=bool)

    def hits(self, image: np.ndarray) -> np.ndarray:
        own = self.owner[image]
        return np.bincount(own[own >= 0], minlength=len(self.stars))

    def best(self, image: np.ndarray):
        if not self.eligible.any():
            return None
        score = np.where(self.eligible, self.hits(image), -1)
        i = int(np.argmax(score))
        return i, int(score[i])


def max_star_forest(bv: BipartiteView, centers_from, leaf_quota: int, max_stars: Optional[int] = None) -> StarForest:
    """Greedy maximal star forest with exactly ``leaf_quota`` leaves per star.

    Centers are scanned in ascending id; a vertex becomes a center when at
    least ``leaf_quota`` of its neighbours across the view are unclaimed, and
    it claims the lowest ``leaf_quota`` of them.
    """
    centers = np.unique(np.asarray(list(centers_from) if not isinstance(centers_from, np.ndarray) else centers_from,
                                   dtype=np.int64))
    if max_stars is None:
        max_stars = centers.size
    sides = bv._side[centers]
    if centers.size and (sides[0] < 0 or (sides != sides[0]).any()):
        raise ValueError("centers must all lie in one part of the view")
    claimed = np.zeros(bv.parent.n, dtype=bool)
    stars = []
    for c in centers.tolist():
        if len(stars) >= max_stars:
            break
        nb = bv.neighbors(c)
        free = nb[~claimed[nb]]
        if free.size >= leaf_quota:
            leaves = free[:leaf_quota]
            claimed[leaves] = True
            stars.append(Star(c, tuple(leaves.tolist())))
    return StarForest(tuple(stars))


# ---------------------------------------------------------------------------
# random-graph mapper
# ---------------------------------------------------------------------------


def random_b_map(b1: np.ndarray, b2: np.ndarray, rng) -> VertexBijection:
    """Uniform injection from ``b1`` into ``b2`` covering ``min(|b1|, |b2|)`` vertices."""
    k = min(b1.size, b2.size)
    src = b1 if b1.size == k else rng.permutation(b1)[:k]
    return VertexBijection(src, rng.permutation(b2)[:k])


def theory_threshold(n: int, p: float) -> int:
    """``ceil(log n / (20 log gamma))`` with ``gamma = sqrt(log n / n) / p`` (at least 1)."""
    if n < 2 or p <= 0:
        return 1
    gamma = math.sqrt(math.log(n) / n) / p
    if gamma <= math.e:
        return 1
    return max(1, math.ceil(math.log(n) / (20 * math.log(gamma))))


def _complete(src_all, dst_all, mapped: dict):
    """Extend ``mapped`` to all of ``src_all`` by ascending ids over the unused targets."""
    rest_src = [v for v in src_all.tolist() if v not in mapped]
    used = set(mapped.values())
    rest_dst = [v for v in dst_all.tolist() if v not in used]
    out = dict(mapped)
    out.update(zip(rest_src, rest_dst))
    return out


def greedy_bipartite_similarity(g1: BipartiteView, g2: BipartiteView, cfg: GreedyConfig = GreedyConfig(),
                                f_b: Optional[VertexBijection] = None, gains: Optional[list] = None):
    """Greedy bijection ``A1 ∪ B1 -> A2 ∪ B2`` between two bipartite views.

    For each restart a uniform ``f_B`` is drawn (or ``f_b`` is used as given),
    a star forest is grown on the A2 side, and ``A1`` vertices are visited in
    ascending order, each sent to :func:`best_hit` of its mapped
    neighbourhood.  The forest is regrown over the unused A2 vertices when its
    centers run out.  Unmapped vertices are completed in ascending order.

    Returns ``(VertexBijection, overlap)`` for the best restart; ``gains``
    (if a list) receives the per-step leaf overlaps of that restart.
    """
    a1, b1, a2, b2 = g1.part_a, g1.part_b, g2.part_a, g2.part_b
    if a1.size != a2.size or b1.size != b2.size:
        raise ValueError(f"part sizes differ: |A1|={a1.size}, |A2|={a2.size}, |B1|={b1.size}, |B2|={b2.size}")
    n_parent = max(g1.parent.n, g2.parent.n)
    n_total = a1.size + a2.size + b1.size + b2.size
    quota = cfg.leaf_quota or default_quota(g2)
    if cfg.fixed:
        p_hat = g2.m / (a2.size * b2.size) if a2.size and b2.size else 0.0
        t = cfg.threshold if cfg.threshold is not None else theory_threshold(n_total, p_hat)
        max_stars = max(1, math.ceil(n_total ** (1 / 3)))
    else:
        t = None
        max_stars = None

    best = (None, -1, [])
    runs = 1 if f_b is not None else cfg.restarts
    for r in range(runs):
        fb = f_b if f_b is not None else random_b_map(b1, b2, stream(cfg.seed, 1 + r))
        fmap = fb.as_array(n_parent)
        used = np.zeros(n_parent, dtype=bool)
        mapped = {}
        step_gains = []
        index = None
        for x1 in a1.tolist():
            if index is None or not index.eligible.any():
                forest = max_star_forest(g2, a2[~used[a2]], quota, max_stars)
                if len(forest) == 0:
                    break
                index = _ForestIndex(forest, n_parent)
            img = fmap[g1.neighbors(x1)]
            i, hit = index.best(img[img >= 0])
            if t is not None and hit < t:
                continue
            x2 = int(index.centers[i])
            index.eligible[i] = False
            used[x2] = True
            mapped[x1] = x2
            step_gains.append(hit)
        full = _complete(a1, a2, mapped)
        f = VertexBijection(np.concatenate([np.fromiter(full.keys(), np.int64, len(full)), fb.src]),
                            np.concatenate([np.fromiter(full.values(), np.int64, len(full)), fb.dst]))
        val = overlap_count(f, g1.edges, g2.edges)
        if val > best[1]:
            best = (f, val, step_gains)
    if gains is not None:
        gains.extend(best[2])
    return best[0], best[1]


# ---------------------------------------------------------------------------
# general-graph mapper
# ---------------------------------------------------------------------------


def forest_pair_similarity(s1: StarForest, s2: StarForest, f_b: VertexBijection,
                           cfg: GreedyConfig = GreedyConfig(), trace: Optional[list] = None):
    """Extend ``f_b`` over the centers of ``s1`` into the centers of ``s2``.

    A target center is available while at most half of its leaves lie in the
    image of the leaves already used.  Each center of ``s1`` (ascending) goes
    to the available center maximising ``|f_b(N_x1) ∩ N_x2|``, lowest id on
    ties.  With ``cfg.fixed`` the process stops after ``ceil(k/4)`` centers.

    Returns ``(VertexBijection on centers, total leaf overlap)``; ``trace``
    (if a list) receives ``(mapped, unavailable)`` after every step.
    """
    leaves1 = np.array(sorted({x for st in s1 for x in st.leaves}), dtype=np.int64)
    dom = set(f_b.src.tolist())
    if leaves1.size and not set(leaves1.tolist()) <= dom:
        missing = sorted(set(leaves1.tolist()) - dom)[:3]
        raise ValueError(f"f_B is not defined on leaves {missing}")
    size = 1 + max([0] + [v for st in s2 for v in st.vertices()] + [v for st in s1 for v in st.vertices()]
                   + f_b.src.tolist() + f_b.dst.tolist())
    fmap = f_b.as_array(size)
    idx = _ForestIndex(s2, size)
    used_leaves = np.zeros(len(idx.stars), dtype=np.int64)
    touched = np.zeros(size, dtype=bool)
    taken = np.zeros(len(idx.stars), dtype=bool)
    limit = math.ceil(len(s1) / 4) if cfg.fixed else len(s1)
    src, dst, gain = [], [], 0
    for st in sorted(s1, key=lambda st: st.center):
        if len(src) >= limit:
            break
        available = (~taken) & (2 * (idx.sizes - used_leaves) >= idx.sizes)
        idx.eligible = available
        pick = idx.best(fmap[list(st.leaves)])
        if pick is None:
            continue
        i, hit = pick
        taken[i] = True
        src.append(st.center)
        dst.append(int(idx.centers[i]))
        gain += hit
        img = fmap[list(st.leaves)]
        fresh = img[~touched[img]]
        touched[fresh] = True
        own = idx.owner[fresh]
        np.add.at(used_leaves, own[own >= 0], 1)
        if trace is not None:
            unavailable = int(((~taken) & (2 * (idx.sizes - used_leaves) < idx.sizes)).sum())
            trace.append((len(src), unavailable))
    return VertexBijection(src, dst), gain


def _median_degree(g: Graph) -> int:
    """Largest ``d`` such that at least ``n/2`` vertices have degree ``>= d``."""
    if g.n == 0:
        return 0
    desc = np.sort(g.degrees)[::-1]
    return int(desc[math.ceil(g.n / 2) - 1])


def degree_window(n: int, d: float, alpha: float) -> tuple[float, float]:
    lo = 6 * n ** (0.5 - alpha / 16)
    hi = math.sqrt(alpha * n * math.log(n)) if n > 1 else 0.0
    return lo, hi


def four_partition(n: int, seed: int):
    """Seeded shuffle dealt round-robin into ``A1, A2, B1, B2`` (sizes differ by at most one)."""
    order = stream(seed, 0).permutation(n)
    return tuple(np.sort(order[i::4]) for i in range(4))


def build_collection(bv: BipartiteView, quota: int, stars_per_forest: Optional[int], fixed: bool,
                     high_degree: float = 0.0) -> ForestCollection:
    """Forests with disjoint center sets grown greedily over ``bv.part_a``.

    In fixed mode growth stops at the first forest with fewer than
    ``stars_per_forest`` stars; that maximal forest, restricted to the
    uncovered vertices of view-degree ``>= high_degree``, becomes the residual.
    """
    remaining = bv.part_a.copy()
    coll = ForestCollection()
    while remaining.size:
        forest = max_star_forest(bv, remaining, quota, stars_per_forest)
        if len(forest) == 0:
            break
        if fixed and stars_per_forest is not None and len(forest) < stars_per_forest:
            break
        coll.forests.append(forest)
        remaining = np.setdiff1d(remaining, forest.centers)
    if fixed:
        high = remaining[bv.degrees[remaining] >= high_degree]
        residual = max_star_forest(bv, high, quota, stars_per_forest)
        x = np.array(residual.centers, dtype=np.int64)
        coll.residual_high_degree = np.setdiff1d(high, x)
        coll.residual_leafset = np.array(sorted({v for st in residual for v in st.leaves}), dtype=np.int64)
    return coll


def key_similarity(g: Graph, cfg: GreedyConfig = GreedyConfig(), info: Optional[dict] = None) -> SimilarityCertificate:
    """Certificate from star-forest collections on a random four-way split.

    Splits ``V`` into ``A1, A2, B1, B2``, grows forest collections in the views
    ``A1-B1`` and ``A2-B2``, pairs the forests in order and extends a random
    ``f_B`` over each pair with :func:`forest_pair_similarity`.  Falls back to
    the volume construction when no forest exists, or (fixed mode) when the
    collection stalls on a dense residual.  ``info`` (if a dict) receives the
    degree-window check, collection sizes and the branch taken.
    """
    info = {} if info is None else info
    info.update(warnings=[], fallback=None, gain=0)
    if g.m == 0:
        return SimilarityCertificate.empty("key", cfg.seed)
    n = g.n
    d = _median_degree(g)
    lo, hi = degree_window(n, d, cfg.alpha)
    info.update(d=d, window=(lo, hi))
    if not lo <= d <= hi:
        msg = f"median degree {d} outside the window [{lo:.2f}, {hi:.2f}]"
        if lo > hi:
            msg += " (window empty at this n)"
        info["warnings"].append(msg)
        log.info("key_similarity: %s", msg)

    a1, a2, b1, b2 = four_partition(n, cfg.seed)
    # f_B must be total on B1; when n % 4 == 3 the extra B1 vertex is left out
    b1 = b1[:b2.size]
    v1, v2 = BipartiteView(g, a1, b1), BipartiteView(g, a2, b2)
    if cfg.fixed:
        quotas = (max(1, d // 10),) * 2
        per_forest = max(1, math.ceil((n / 4) ** cfg.alpha))
    else:
        quotas = (cfg.leaf_quota or default_quota(v1), cfg.leaf_quota or default_quota(v2))
        per_forest = None
    colls = [build_collection(v, q, per_forest, cfg.fixed, d / 5) for v, q in zip((v1, v2), quotas)]
    info.update(k1=colls[0].k, k2=colls[1].k, quota=quotas)

    if colls[0].k == 0 or colls[1].k == 0:
        info["fallback"] = "no-forest"
        return iso_volume(g).with_method("key/fallback-volume")
    if cfg.fixed:
        need = n ** (1 - cfg.alpha) / 18
        for coll in colls:
            if coll.k < need and coll.residual_high_degree.size and coll.residual_leafset.size:
                sub, index_map = induced_subgraph(g, np.union1d(coll.residual_high_degree, coll.residual_leafset))
                info["fallback"] = "dense-residual"
                return iso_volume(sub).relabel(index_map).with_method("key/fallback-volume")

    best, best_gain = None, 0
    pairs = list(zip(colls[0].forests, colls[1].forests))
    for r in range(cfg.restarts):
        fb = random_b_map(b1, b2, stream(cfg.seed, 1 + r))
        mapped, gain = {}, 0
        for s1, s2 in pairs:
            ext, hit = forest_pair_similarity(s1, s2, fb, cfg)
            mapped.update(ext.as_dict())
            gain += hit
        if not cfg.fixed:
            mapped = _complete(a1, a2, mapped)
        f = VertexBijection(np.concatenate([np.fromiter(mapped.keys(), np.int64, len(mapped)), fb.src]),
                            np.concatenate([np.fromiter(mapped.values(), np.int64, len(mapped)), fb.dst]))
        cert = overlap_certificate(f, v1.edges, v2.edges, method="key", seed=cfg.seed)
        if best is None or cert.s > best.s:
            best, best_gain = cert, gain
    info["gain"] = best_gain
    return best
