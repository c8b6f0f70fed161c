"""Edge realizations, query bookkeeping and the omniscient optimum.

Randomness is counter based: realization ``i`` of a stream is keyed on a
64-bit seed derived from ``(seed, tag, i)``, and inside a realization edge
``e`` reads the ``e``-th output of a Philox generator keyed on that seed.  The
outcome of an edge therefore never depends on iteration order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .errors import StochMatchError, TooLarge
from .graph import WeightedGraph
from .matching import max_weight_matching

EXACT_LIMIT = 20
# vertex-subset DP is vectorised over realizations up to this many vertices
_DP_VERTEX_LIMIT = 12
_DP_CELLS = 1 << 22

_TAGS = {"opt": 1, "trial": 2, "graph": 3, "sweep": 4}


def derive_seed(seed: int, tag: str, index: int = 0) -> int:
    """Deterministic 64-bit child seed for stream ``tag``, item ``index``."""
    ss = np.random.SeedSequence([seed & (2**64 - 1), _TAGS[tag], index])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class Realization:
    realized: frozenset
    seed: int

    def __contains__(self, k):
        return k in self.realized


def _uniforms(seed: int, m: int) -> np.ndarray:
    return np.random.Generator(np.random.Philox(key=seed)).random(m)


def realize(g: WeightedGraph, seed: int) -> Realization:
    """Draw the hidden edge set: edge e survives independently w.p. p_e."""
    if g.m == 0:
        return Realization(frozenset(), seed)
    u = _uniforms(seed, g.m)
    p = np.fromiter((e.p for e in g.edges), dtype=float, count=g.m)
    return Realization(frozenset(np.flatnonzero(u < p).tolist()), seed)


@dataclass(frozen=True)
class QueryLedger:
    """Which edges have been queried and what each query returned."""
    queried: frozenset = frozenset()
    outcomes: Mapping[int, bool] = field(default_factory=dict)
    per_vertex_counts: tuple[int, ...] = ()

    @classmethod
    def empty(cls, g: WeightedGraph) -> QueryLedger:
        return cls(frozenset(), {}, (0,) * g.n)

    @property
    def realized(self) -> frozenset:
        return frozenset(k for k, ok in self.outcomes.items() if ok)

    @property
    def max_per_vertex(self) -> int:
        return max(self.per_vertex_counts, default=0)


def query(ledger: QueryLedger, realization: Realization, edges: Iterable[int],
          g: WeightedGraph) -> QueryLedger:
    """Query ``edges``; already-queried edges are ignored."""
    new = sorted(set(edges) - ledger.queried)
    if not new:
        return ledger
    outcomes = dict(ledger.outcomes)
    counts = list(ledger.per_vertex_counts)
    for k in new:
        outcomes[k] = k in realization.realized
        u, v = g.endpoints(k)
        counts[u] += 1
        counts[v] += 1
    out = QueryLedger(ledger.queried | frozenset(new), outcomes, tuple(counts))
    if any(ok != (k in realization.realized) for k, ok in out.outcomes.items()):
        raise StochMatchError("query ledger contradicts the realization")
    return out


# --- matching weight of many realizations -----------------------------------

class MatchingOracle:
    """Cached ``w(M(S))`` for edge subsets of one graph."""

    def __init__(self, g: WeightedGraph):
        self.g = g
        self._cache: dict[frozenset, int] = {}

    def weight(self, edge_ids: Iterable[int]) -> int:
        key = frozenset(edge_ids)
        w = self._cache.get(key)
        if w is None:
            if len(self._cache) > 200_000:
                self._cache.clear()
            w = max_weight_matching(self.g, key).weight
            self._cache[key] = w
        return w


def _components(g: WeightedGraph, edge_ids: Iterable[int]) -> list[list[int]]:
    """Positive-weight edges grouped by connected component, id-sorted."""
    ids = sorted(k for k in set(edge_ids) if g.edges[k].w > 0)
    parent: dict[int, int] = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for k in ids:
        u, v = g.endpoints(k)
        parent[find(u)] = find(v)
    groups: dict[int, list[int]] = {}
    for k in ids:
        groups.setdefault(find(g.edges[k].u), []).append(k)
    return sorted(groups.values(), key=lambda c: c[0])


def _dp_weights(g: WeightedGraph, comp: list[int], start: int, stop: int) -> np.ndarray:
    """``w(M)`` for realization indices ``start..stop-1`` of one component.

    Bit t of a realization index says whether ``comp[t]`` is present.  The
    matching weight is a DP over vertex subsets: the lowest vertex of a
    subset is either left unmatched or matched through one of its edges.
    """
    verts = sorted({x for k in comp for x in g.endpoints(k)})
    local = {x: i for i, x in enumerate(verts)}
    idx = np.arange(start, stop, dtype=np.int64)
    present = [((idx >> t) & 1).astype(bool) for t in range(len(comp))]
    adj: list[list[tuple[int, int, int]]] = [[] for _ in verts]
    for t, k in enumerate(comp):
        e = g.edges[k]
        a, b = local[e.u], local[e.v]
        adj[a].append((b, e.w, t))
        adj[b].append((a, e.w, t))
    zero = np.zeros(stop - start, dtype=np.int64)
    memo: dict[int, np.ndarray] = {}

    def f(mask):
        if mask & (mask - 1) == 0:
            return zero
        got = memo.get(mask)
        if got is not None:
            return got
        v = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << v)
        res = f(rest)
        for u, w, t in adj[v]:
            if rest >> u & 1:
                cand = f(rest & ~(1 << u)) + w
                res = np.where(present[t], np.maximum(res, cand), res)
        memo[mask] = res
        return res

    return f((1 << len(verts)) - 1)


def _component_expectation(g: WeightedGraph, comp: list[int]) -> float:
    k = len(comp)
    total = 1 << k
    ps = [g.edges[e].p for e in comp]
    nverts = len({x for e in comp for x in g.endpoints(e)})
    terms: list[float] = []
    if nverts <= _DP_VERTEX_LIMIT:
        chunk = max(1, min(total, _DP_CELLS >> nverts))
        for start in range(0, total, chunk):
            stop = min(total, start + chunk)
            idx = np.arange(start, stop, dtype=np.int64)
            prob = np.ones(stop - start)
            for t, p in enumerate(ps):
                prob = prob * np.where((idx >> t) & 1, p, 1.0 - p)
            weights = _dp_weights(g, comp, start, stop)
            terms.extend((prob * weights).tolist())
    else:
        for r in range(total):
            present = [comp[t] for t in range(k) if r >> t & 1]
            prob = 1.0
            for t, p in enumerate(ps):
                prob *= p if r >> t & 1 else 1.0 - p
            terms.append(prob * max_weight_matching(g, present).weight)
    return math.fsum(terms)


def expected_matching_exact(g: WeightedGraph, edge_ids: Iterable[int] | None = None) -> float:
    """Exact E[w(M(S ∩ realization))] for ``S = edge_ids`` (default all).

    Enumerates all 2^|S| realizations.  The expectation splits over connected
    components of S; inside a component, terms are summed with ``math.fsum``
    so the result does not depend on evaluation order.
    """
    ids = g.all_edges if edge_ids is None else frozenset(edge_ids)
    if len(ids) > EXACT_LIMIT:
        raise TooLarge(f"{len(ids)} edges exceeds exact enumeration limit {EXACT_LIMIT}")
    return math.fsum(_component_expectation(g, c) for c in _components(g, ids))


def omniscient_opt_exact(g: WeightedGraph) -> float:
    """opt = E[w(M(realization))] by full enumeration (m <= 20)."""
    return expected_matching_exact(g)


def mean_se(total: int, total_sq: int, n: int) -> tuple[float, float]:
    """Sample mean and standard error from exact integer sums."""
    if n < 2:
        raise ValueError("need at least two samples")
    mean = Fraction(total, n)
    var = (Fraction(total_sq) - n * mean * mean) / (n - 1)
    return float(mean), math.sqrt(float(var) / n)


def sample_matching_weights(g: WeightedGraph, edge_ids: Iterable[int] | None,
                            trials: int, seed: int, tag: str,
                            oracle: MatchingOracle | None = None) -> list[int]:
    """``w(M(S ∩ realization_i))`` for the first ``trials`` realizations."""
    ids = g.all_edges if edge_ids is None else frozenset(edge_ids)
    oracle = oracle or MatchingOracle(g)
    out = []
    for i in range(trials):
        if not ids:
            out.append(0)
            continue
        r = realize(g, derive_seed(seed, tag, i))
        out.append(oracle.weight(r.realized & ids))
    return out


def omniscient_opt_mc(g: WeightedGraph, trials: int, seed: int,
                      oracle: MatchingOracle | None = None) -> tuple[float, float]:
    """Monte Carlo estimate ``(mean, standard_error)`` of opt."""
    if trials < 2:
        raise ValueError("trials must be at least 2")
    ws = sample_matching_weights(g, None, trials, seed, "opt", oracle)
    return mean_se(sum(ws), sum(w * w for w in ws), trials)
