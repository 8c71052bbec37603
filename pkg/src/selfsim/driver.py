"""Top-level certificate search, random-graph regimes and the union-bound evaluator.

``drive`` follows the iterative density argument: a graph with many vertices
relative to ``m^{2/3}`` is handled by star forests, a dense one by the
volume bound, and in between either most vertices have large degree (star
forest collections + greedy mapping) or the low-degree half is dropped and
the process repeats on what is left.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bounds import iso_volume, split_star_forest, star_cover
from .graph import Graph, SimilarityCertificate, induced_subgraph, remove_isolated, verify_certificate
from .greedy import GreedyConfig, key_similarity
from .oracle import iso_exact

log = logging.getLogger(__name__)

# tie-break among equal certificate sizes: earlier wins
BRANCH_PRIORITY = ("key", "volume", "star-forest", "exact")
DEFAULT_EXACT_CAP = 8
DEFAULT_MAX_ITER = 200


class DegenerateSize(ValueError):
    pass


@dataclass(frozen=True)
class DriverState:
    t: int
    vertices: np.ndarray
    n: int
    m: int
    a: Optional[float] = None
    d: Optional[float] = None


@dataclass
class StepRecord:
    state: DriverState
    branch: str
    sizes: dict
    checks: dict = field(default_factory=dict)


@dataclass
class PipelineReport:
    steps: list = field(default_factory=list)
    best: Optional[SimilarityCertificate] = None
    warnings: list = field(default_factory=list)

    @property
    def s(self) -> int:
        return self.best.s if self.best is not None else 0

    @property
    def branches(self) -> list:
        return [st.branch for st in self.steps]


def a_of(n: int, m: int) -> float:
    """Density exponent ``a`` with ``n = 2^a m^{2/3} / (ln m)^{1/3}``."""
    if m < 3:
        raise DegenerateSize(f"degenerate-size: m={m} < 3")
    return math.log2(n * math.log(m) ** (1 / 3) / m ** (2 / 3))


def d_of(st: DriverState) -> float:
    """Degree threshold ``m / (2^a n)``.

    When ``a`` is the exponent of ``(n, m)`` this equals
    ``2^{-2a} (m ln m)^{1/3}``; that identity is checked.
    """
    if st.a is None or not math.isfinite(st.a):
        raise ValueError("a_t must be finite")
    d = st.m / (2 ** st.a * st.n)
    if st.m >= 3 and math.isclose(st.a, a_of(st.n, st.m), rel_tol=0, abs_tol=1e-12):
        alt = 2 ** (-2 * st.a) * (st.m * math.log(st.m)) ** (1 / 3)
        if not math.isclose(d, alt, rel_tol=1e-9):
            raise AssertionError(f"degree threshold forms disagree: {d} vs {alt}")
    return d


def star_forest_threshold(m: int) -> float:
    """Vertex count at and above which the star-forest branch fires: ``(m ln m)^{2/3}``."""
    return (m * math.log(m)) ** (2 / 3)


def volume_threshold(m: int) -> float:
    """Vertex count at and below which the volume branch fires: ``8 m^{2/3} / (ln m)^{1/3}``."""
    return 8 * m ** (2 / 3) / math.log(m) ** (1 / 3)


def step_bound(a0: float) -> int:
    """Maximum number of driver steps, ``ceil(3 a_0) + 1`` (at least one)."""
    return max(1, math.ceil(3 * a0) + 1)


def _pick(cands: dict) -> tuple[str, SimilarityCertificate]:
    order = sorted(cands, key=lambda k: (-cands[k].s, BRANCH_PRIORITY.index(k)))
    return order[0], cands[order[0]]


def _star_branch(g: Graph) -> SimilarityCertificate:
    return split_star_forest(star_cover(g))


def drive(g: Graph, cfg: GreedyConfig = GreedyConfig(), mode: str = "best",
          exact_cap: int = DEFAULT_EXACT_CAP, max_iter: int = DEFAULT_MAX_ITER) -> PipelineReport:
    """Run the branching process on ``g`` and return the best verified certificate.

    ``mode="theory"`` evaluates only the branch the density test selects;
    ``mode="best"`` also evaluates the star-forest and volume constructions
    at every step (and the exact oracle on graphs with at most ``exact_cap``
    vertices) and keeps the largest certificate.
    """
    if mode not in ("best", "theory"):
        raise ValueError("mode must be 'best' or 'theory'")
    report = PipelineReport()
    cur, index_map = remove_isolated(g)
    found = {}

    def offer(label, cert, t):
        cert = cert.relabel(index_map).with_method(cert.method or label)
        prev = found.get(label)
        if prev is None or cert.s > prev[1].s:
            found[label] = (t, cert)
        return cert.s

    for t in range(max_iter):
        n_t, m_t = cur.n, cur.m
        if m_t <= 2:
            state = DriverState(t, index_map, n_t, m_t)
            sizes = {"exact": offer("exact", iso_exact(cur, cap=max(exact_cap, n_t))[1], t)}
            report.steps.append(StepRecord(state, "exact", sizes))
            break
        a = a_of(n_t, m_t)
        sizes = {}
        d = None
        vp = None
        if n_t >= star_forest_threshold(m_t):
            branch = "star-forest"
            sizes[branch] = offer(branch, _star_branch(cur), t)
        elif n_t <= volume_threshold(m_t):
            branch = "volume"
            sizes[branch] = offer(branch, iso_volume(cur), t)
        else:
            d = d_of(DriverState(t, index_map, n_t, m_t, a))
            vp = np.flatnonzero(cur.degrees >= d)
            if vp.size >= n_t / 2:
                branch = "key"
                info = {}
                sizes[branch] = offer(branch, key_similarity(cur, cfg, info), t)
                report.warnings.extend(f"step {t}: {w}" for w in info.get("warnings", []))
            else:
                branch = "recurse"
        state = DriverState(t, index_map, n_t, m_t, a, d)
        if mode == "best":
            if "star-forest" not in sizes:
                sizes["star-forest"] = offer("star-forest", _star_branch(cur), t)
            if "volume" not in sizes:
                sizes["volume"] = offer("volume", iso_volume(cur), t)
            if n_t <= exact_cap:
                sizes["exact"] = offer("exact", iso_exact(cur, cap=exact_cap)[1], t)
        record = StepRecord(state, branch, sizes)
        report.steps.append(record)
        if branch != "recurse":
            break
        sub, sub_map = induced_subgraph(cur, vp)
        nxt, nxt_map = remove_isolated(sub)
        m_next = nxt.m
        record.checks = {
            "edge_loss": m_next >= m_t - n_t * d,
            "half_edges": m_next > m_t / 2,
        }
        if m_next >= 3:
            record.checks["a_drop"] = a_of(nxt.n, m_next) <= a - 1 / 3
        failed = [k for k, ok in record.checks.items() if not ok]
        if failed:
            raise AssertionError(f"recursion bookkeeping violated at step {t}: {failed}")
        cur = nxt
        index_map = index_map[sub_map[nxt_map]]
    else:
        report.warnings.append(f"iteration cap {max_iter} reached")

    if not found:
        report.best = SimilarityCertificate.empty("empty")
        return report
    label, best = _pick({k: v[1] for k, v in found.items()})
    ok, why = verify_certificate(g, best)
    if not ok:  # pragma: no cover - internal consistency
        raise AssertionError(f"best certificate ({label}) failed verification: {why}")
    report.best = best
    return report


# ---------------------------------------------------------------------------
# random-graph regimes and the first-moment bound
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegimeParams:
    n: int
    p: float
    gamma: float
    regime: str
    t_upper: float
    predicted_order: str
    predicted_value: float


def regime_params(n: int, p: float) -> RegimeParams:
    """Classify ``G(n, p)`` and report the union-bound subgraph size for its regime.

    ``gamma = sqrt(ln n / n) / p``.  Sparse when ``p < 0.99/n``; dense when
    ``gamma <= e^6`` (the boundary itself counts as dense); intermediate
    otherwise.
    """
    if not 0 <= p <= 1:
        raise ValueError(f"p={p} outside [0, 1]")
    if n < 2:
        raise ValueError("n must be at least 2")
    root = math.sqrt(math.log(n) / n)
    gamma = math.inf if p == 0 else root / p
    e6 = math.exp(6)
    if p < 0.99 / n:
        m_mean = n * (n - 1) / 2 * p
        return RegimeParams(n, p, gamma, "sparse", m_mean / 2, "Theta(m)", m_mean)
    if gamma > e6 and not math.isclose(gamma, e6, rel_tol=1e-9):
        t = n * math.log(n) / math.log(gamma)
        return RegimeParams(n, p, gamma, "intermediate", t, "Theta(n log n / log gamma)", t)
    return RegimeParams(n, p, gamma, "dense", math.exp(12) * n * n * p * p, "Theta(n^2 p^2)", n * n * p * p)


def union_bound_log(n: int, p: float, t: int) -> tuple[float, float]:
    """Natural logs of ``C(C(n,2), t) n! p^{2t}`` and of ``(e n^2 p^2 / t)^t e^{n ln n}``.

    For ``t > C(n,2)`` the binomial coefficient vanishes and the exact log is
    ``-inf``.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0 < p <= 1:
        raise ValueError(f"p={p} outside (0, 1]")
    if t < 1 or t != int(t):
        raise ValueError(f"t={t} must be a positive integer")
    t = int(t)
    pairs = n * (n - 1) // 2
    simplified = t * (1 + math.log(n * n * p * p / t)) + n * math.log(n)
    if t > pairs:
        return -math.inf, simplified
    log_binom = math.lgamma(pairs + 1) - math.lgamma(t + 1) - math.lgamma(pairs - t + 1)
    exact = log_binom + math.lgamma(n + 1) + 2 * t * math.log(p)
    return exact, simplified
