"""Hot inner loops, each in a numba flavour (``*_nb``) and a numpy flavour (``*_np``).

Both flavours return identical results on identical input; the public names
without suffix dispatch on :data:`selfsim._accel.BACKEND`.  Arrays are int64
throughout.
"""
import itertools

import numpy as np

from ._accel import BACKEND, njit

# ---------------------------------------------------------------------------
# conditional-expectation assignment
# ---------------------------------------------------------------------------


def _assign_by_expectation_loop(S):
    k = S.shape[0]
    perm = np.full(k, -1, dtype=np.int64)
    free = np.ones(k, dtype=np.bool_)
    colsum = np.zeros(k, dtype=np.int64)
    for r in range(k):
        for c in range(k):
            colsum[c] += S[r, c]
    for r in range(k):
        nfree = k - r
        best = -1
        best_score = 0
        for c in range(k):
            if not free[c]:
                continue
            score = nfree * S[r, c] - colsum[c]
            if best < 0 or score > best_score:
                best = c
                best_score = score
        perm[r] = best
        free[best] = False
        for c in range(k):
            colsum[c] -= S[r, c]
    return perm


assign_by_expectation_nb = njit(_assign_by_expectation_loop)


def assign_by_expectation_np(S):
    S = np.asarray(S, dtype=np.int64)
    k = S.shape[0]
    perm = np.full(k, -1, dtype=np.int64)
    free = np.ones(k, dtype=bool)
    colsum = S.sum(axis=0)
    lowest = np.iinfo(np.int64).min
    for r in range(k):
        score = (k - r) * S[r] - colsum
        score = np.where(free, score, lowest)
        best = int(np.argmax(score))
        perm[r] = best
        free[best] = False
        colsum -= S[r]
    return perm


def assign_by_expectation(S):
    """Greedy row-by-row assignment maximising the conditional expected score.

    ``S[r, c]`` is the (integer) weight of sending row ``r`` to column ``c``.
    Rows are fixed in order 0..k-1; with ``F`` free columns left, row ``r``
    takes the free column maximising ``|F| * S[r, c] - sum_{free rows} S[., c]``,
    which is the exact conditional expectation of the total weight under a
    uniformly random completion, up to terms constant in ``c``.  Ties go to
    the lowest column.  The total weight of the result is at least
    ``S.sum() / k``.
    """
    S = np.ascontiguousarray(S, dtype=np.int64)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError("score matrix must be square")
    if S.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    if BACKEND == "numba":
        return assign_by_expectation_nb(S)
    return assign_by_expectation_np(S)


# ---------------------------------------------------------------------------
# local-search bipartition
# ---------------------------------------------------------------------------


def _local_search_cut_loop(indptr, indices, side):
    n = side.shape[0]
    side = side.copy()
    moved = True
    while moved:
        moved = False
        for v in range(n):
            same = 0
            cross = 0
            for j in range(indptr[v], indptr[v + 1]):
                if side[indices[j]] == side[v]:
                    same += 1
                else:
                    cross += 1
            if same > cross:
                side[v] = 1 - side[v]
                moved = True
    return side


local_search_cut_nb = njit(_local_search_cut_loop)


def local_search_cut_np(indptr, indices, side):
    side = np.array(side, dtype=np.int64)
    n = side.shape[0]
    moved = True
    while moved:
        moved = False
        for v in range(n):
            nb = indices[indptr[v]:indptr[v + 1]]
            same = int(np.count_nonzero(side[nb] == side[v]))
            if 2 * same > nb.shape[0]:
                side[v] = 1 - side[v]
                moved = True
    return side


def local_search_cut(indptr, indices, side):
    """Flip vertices (ascending sweeps) while any has more same-side neighbours."""
    indptr = np.ascontiguousarray(indptr, dtype=np.int64)
    indices = np.ascontiguousarray(indices, dtype=np.int64)
    side = np.ascontiguousarray(side, dtype=np.int64)
    if BACKEND == "numba":
        return local_search_cut_nb(indptr, indices, side)
    return local_search_cut_np(indptr, indices, side)


# ---------------------------------------------------------------------------
# star-cover edge deletion
# ---------------------------------------------------------------------------


def _star_deletion_loop(eu, ev, deg):
    deg = deg.copy()
    m = eu.shape[0]
    keep = np.ones(m, dtype=np.bool_)
    for i in range(m):
        if deg[eu[i]] >= 2 and deg[ev[i]] >= 2:
            keep[i] = False
            deg[eu[i]] -= 1
            deg[ev[i]] -= 1
    return keep


star_deletion_nb = njit(_star_deletion_loop)


def star_deletion_np(eu, ev, deg):
    # one sequential pass; later edges see earlier deletions, so no vectorised form
    deg = np.array(deg, dtype=np.int64)
    keep = np.ones(eu.shape[0], dtype=bool)
    for i, (u, v) in enumerate(zip(eu.tolist(), ev.tolist())):
        if deg[u] >= 2 and deg[v] >= 2:
            keep[i] = False
            deg[u] -= 1
            deg[v] -= 1
    return keep


def star_deletion(eu, ev, deg):
    """Keep-mask after deleting, in edge order, every edge whose endpoints both have degree >= 2.

    A single ordered pass reaches the fixpoint: degrees only decrease and an
    endpoint of degree 1 is never touched again.
    """
    eu = np.ascontiguousarray(eu, dtype=np.int64)
    ev = np.ascontiguousarray(ev, dtype=np.int64)
    deg = np.ascontiguousarray(deg, dtype=np.int64)
    if BACKEND == "numba":
        return star_deletion_nb(eu, ev, deg)
    return star_deletion_np(eu, ev, deg)


# ---------------------------------------------------------------------------
# permutation search for the exact oracle
# ---------------------------------------------------------------------------


def _orbit_value_loop(perm, eu, ev, eid, nxt, has_pred, seen):
    m = eu.shape[0]
    for e in range(m):
        a = perm[eu[e]]
        b = perm[ev[e]]
        if a > b:
            a, b = b, a
        nxt[e] = eid[a, b]
        has_pred[e] = False
        seen[e] = False
    for e in range(m):
        if nxt[e] >= 0:
            has_pred[nxt[e]] = True
    total = 0
    # chains first: they start at edges with no preimage
    for e in range(m):
        if not has_pred[e]:
            length = 0
            cur = e
            while cur >= 0:
                seen[cur] = True
                length += 1
                cur = nxt[cur]
            total += length // 2
    for e in range(m):
        if not seen[e]:
            length = 0
            cur = e
            while not seen[cur]:
                seen[cur] = True
                length += 1
                cur = nxt[cur]
            total += length // 2
    return total


def _next_permutation(a):
    n = a.shape[0]
    i = n - 2
    while i >= 0 and a[i] >= a[i + 1]:
        i -= 1
    if i < 0:
        return False
    j = n - 1
    while a[j] <= a[i]:
        j -= 1
    a[i], a[j] = a[j], a[i]
    lo = i + 1
    hi = n - 1
    while lo < hi:
        a[lo], a[hi] = a[hi], a[lo]
        lo += 1
        hi -= 1
    return True


_orbit_value_nb = njit(_orbit_value_loop)
_next_permutation_nb = njit(_next_permutation)


@njit
def permutation_search_nb(n, eu, ev, eid, target):
    m = eu.shape[0]
    nxt = np.empty(m, dtype=np.int64)
    has_pred = np.empty(m, dtype=np.bool_)
    seen = np.empty(m, dtype=np.bool_)
    perm = np.arange(n)
    best_perm = perm.copy()
    best = -1
    count = 0
    while True:
        count += 1
        val = _orbit_value_nb(perm, eu, ev, eid, nxt, has_pred, seen)
        if val > best:
            best = val
            best_perm[:] = perm
            if best >= target:
                break
        if not _next_permutation_nb(perm):
            break
    return best, best_perm, count


def orbit_values_np(perms, eu, ev, eid):
    """Vectorised ``sum over edge orbits of floor(size / 2)`` for a batch of permutations."""
    B = perms.shape[0]
    m = eu.shape[0]
    if m == 0:
        return np.zeros(B, dtype=np.int64)
    a = perms[:, eu]
    b = perms[:, ev]
    nxt = eid[np.minimum(a, b), np.maximum(a, b)]
    rows = np.arange(B)[:, None]
    has_pred = np.zeros((B, m + 1), dtype=bool)
    has_pred[rows, np.where(nxt >= 0, nxt, m)] = True
    has_pred = has_pred[:, :m]
    # sentinel column m maps to itself so walks can run off the end
    nxt_ext = np.concatenate([np.where(nxt >= 0, nxt, m), np.full((B, 1), m)], axis=1)

    cur = np.where(~has_pred, np.arange(m)[None, :], m)
    on_chain = np.zeros((B, m + 1), dtype=bool)
    length = np.zeros((B, m), dtype=np.int64)
    for _ in range(m):
        alive = cur < m
        if not alive.any():
            break
        on_chain[rows, cur] = True
        length += alive
        cur = np.take_along_axis(nxt_ext, cur, axis=1)
    total = (length // 2).sum(axis=1)

    # remaining edges lie on cycles; count each cycle once, at its smallest edge id
    on_cycle = ~on_chain[:, :m]
    start = np.where(on_cycle, np.arange(m)[None, :], m)
    cur = np.take_along_axis(nxt_ext, start, axis=1)
    cyc_len = np.ones((B, m), dtype=np.int64)
    is_min = on_cycle.copy()
    for _ in range(m - 1):
        moving = cur != start
        if not moving.any():
            break
        is_min &= ~(moving & (cur < start))
        cyc_len += moving
        cur = np.where(moving, np.take_along_axis(nxt_ext, cur, axis=1), cur)
    total += np.where(is_min, cyc_len // 2, 0).sum(axis=1)
    return total


def permutation_search_np(n, eu, ev, eid, target, batch=20000):
    best = -1
    best_perm = np.arange(n)
    count = 0
    it = itertools.permutations(range(n))
    while True:
        chunk = list(itertools.islice(it, batch))
        if not chunk:
            break
        perms = np.array(chunk, dtype=np.int64).reshape(len(chunk), n)
        vals = orbit_values_np(perms, eu, ev, eid)
        hit = np.flatnonzero(vals >= target)
        stop = hit.size > 0
        upto = int(hit[0]) + 1 if stop else len(chunk)
        i = int(np.argmax(vals[:upto]))
        if vals[i] > best:
            best = int(vals[i])
            best_perm = perms[i].copy()
        count += upto
        if stop:
            break
    return best, best_perm, count


def permutation_search(n, eu, ev, eid, target):
    """Scan permutations of ``0..n-1`` in lexicographic order for the best orbit value.

    Stops early once the value reaches ``target``.  Returns ``(value, perm,
    permutations_evaluated)``; the first best permutation in lexicographic
    order is kept.
    """
    eu = np.ascontiguousarray(eu, dtype=np.int64)
    ev = np.ascontiguousarray(ev, dtype=np.int64)
    eid = np.ascontiguousarray(eid, dtype=np.int64)
    if BACKEND == "numba":
        best, perm, count = permutation_search_nb(n, eu, ev, eid, target)
        return int(best), perm, int(count)
    return permutation_search_np(n, eu, ev, eid, target)
