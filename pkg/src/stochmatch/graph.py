"""Weighted graphs, matchings and symmetric differences.

Edges carry a dense id (their position in the input), a non-negative integer
weight and a realization probability.  Sets of edges are plain frozensets of
edge ids throughout the package.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple

from .errors import (BadProbability, DuplicateEdge, GraphError, NotAMatching,
                     Overflow, SelfLoop)

EdgeSet = frozenset  # frozenset[int] of edge ids

_MAX_TOTAL_WEIGHT = 2**63 - 1


class Edge(NamedTuple):
    id: int
    u: int
    v: int
    w: int
    p: float


@dataclass(frozen=True)
class WeightedGraph:
    n: int
    edges: tuple[Edge, ...]

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def all_edges(self) -> frozenset[int]:
        return frozenset(range(len(self.edges)))

    @cached_property
    def incident(self) -> tuple[tuple[int, ...], ...]:
        """Edge ids incident to each vertex, in increasing id order."""
        inc: list[list[int]] = [[] for _ in range(self.n)]
        for e in self.edges:
            inc[e.u].append(e.id)
            inc[e.v].append(e.id)
        return tuple(tuple(x) for x in inc)

    @cached_property
    def p_min(self) -> float:
        return min((e.p for e in self.edges), default=1.0)

    def weight(self, edge_ids: Iterable[int]) -> int:
        edges = self.edges
        return sum(edges[k].w for k in edge_ids)

    def endpoints(self, k: int) -> tuple[int, int]:
        e = self.edges[k]
        return e.u, e.v

    def subgraph_edges(self, edge_ids: Iterable[int]) -> list[Edge]:
        return [self.edges[k] for k in sorted(edge_ids)]

    def with_probability(self, p: float) -> WeightedGraph:
        """Copy of the graph with every p_e set to ``p``."""
        return build_graph(self.n, [(e.u, e.v, e.w, p) for e in self.edges])


@dataclass(frozen=True)
class Matching:
    edge_ids: tuple[int, ...]
    weight: int

    def __len__(self):
        return len(self.edge_ids)

    def __iter__(self):
        return iter(self.edge_ids)

    @property
    def edge_set(self) -> frozenset[int]:
        return frozenset(self.edge_ids)


EMPTY_MATCHING = Matching((), 0)


def build_graph(n: int, edge_list: Iterable[tuple]) -> WeightedGraph:
    """Build a validated simple graph on vertices ``0..n-1``.

    Each entry of ``edge_list`` is ``(u, v, w, p)``; edge ids follow input
    order.
    """
    if n < 0:
        raise GraphError(f"vertex count must be non-negative, got {n}")
    seen: set[tuple[int, int]] = set()
    edges: list[Edge] = []
    total = 0
    for k, (u, v, w, p) in enumerate(edge_list):
        u, v = int(u), int(v)
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge {k}: endpoint out of range for n={n}")
        if u == v:
            raise SelfLoop(f"edge {k}: self-loop at vertex {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DuplicateEdge(f"edge {k}: duplicate pair {key}")
        seen.add(key)
        if isinstance(w, bool) or int(w) != w:
            raise GraphError(f"edge {k}: weight must be an integer, got {w!r}")
        w = int(w)
        if w < 0:
            raise GraphError(f"edge {k}: negative weight {w}")
        total += w
        if total > _MAX_TOTAL_WEIGHT:
            raise Overflow("sum of edge weights exceeds 2**63 - 1")
        p = float(p)
        if not (0.0 < p <= 1.0):
            raise BadProbability(f"edge {k}: probability {p} outside (0, 1]")
        edges.append(Edge(k, u, v, w, p))
    return WeightedGraph(n, tuple(edges))


def validate_matching(g: WeightedGraph, edge_ids: Iterable[int]) -> Matching:
    ids = sorted(set(edge_ids))
    used: set[int] = set()
    for k in ids:
        if not 0 <= k < g.m:
            raise GraphError(f"edge id {k} out of range")
        u, v = g.endpoints(k)
        if u in used or v in used:
            raise NotAMatching(f"edge {k} shares a vertex with another edge")
        used.add(u)
        used.add(v)
    return Matching(tuple(ids), g.weight(ids))


class RawComponent(NamedTuple):
    shape: str  # "path" or "cycle"
    edges: tuple[int, ...]  # traversal order


def symmetric_difference(m_a: Matching, m_b: Matching,
                         g: WeightedGraph) -> list[RawComponent]:
    """Connected components of ``m_a`` xor ``m_b`` as ordered paths/cycles.

    Components come out ordered by their smallest edge id.  A path is walked
    from the endpoint whose incident edge has the smaller id; a cycle starts
    at its smallest-id edge from ``m_b`` and heads towards the smaller-id
    neighbouring edge.
    """
    a, b = set(m_a.edge_ids), set(m_b.edge_ids)
    diff = sorted(a ^ b)
    if not diff:
        return []
    at: dict[int, list[int]] = {}
    for k in diff:
        for x in g.endpoints(k):
            at.setdefault(x, []).append(k)

    def other(k, x):
        u, v = g.endpoints(k)
        return v if x == u else u

    seen: set[int] = set()
    out: list[RawComponent] = []
    for k0 in diff:
        if k0 in seen:
            continue
        # collect the component
        comp = {k0}
        stack = [k0]
        while stack:
            k = stack.pop()
            for x in g.endpoints(k):
                for j in at[x]:
                    if j not in comp:
                        comp.add(j)
                        stack.append(j)
        seen |= comp
        ends = sorted({x for k in comp for x in g.endpoints(k) if len(at[x]) == 1},
                      key=lambda x: at[x][0])
        if ends:
            start_vertex = ends[0]
            first = at[start_vertex][0]
            shape = "path"
        else:
            first = min(comp & b)
            u, v = g.endpoints(first)
            nxt_u = [j for j in at[u] if j != first][0]
            nxt_v = [j for j in at[v] if j != first][0]
            # leave ``first`` through the vertex whose other edge is smaller
            start_vertex = v if nxt_u < nxt_v else u
            shape = "cycle"
        order = [first]
        x = other(first, start_vertex)
        while len(order) < len(comp):
            nxt = [j for j in at[x] if j != order[-1]]
            if not nxt:
                break
            order.append(nxt[0])
            x = other(nxt[0], x)
        out.append(RawComponent(shape, tuple(order)))
    return out


# --- edge-list text format -------------------------------------------------

def parse_edge_list(text: str, p: float = 1.0) -> WeightedGraph:
    """Parse the ``n <count> m <count>`` + ``u v w [p]`` text format."""
    n = m = None
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 4 or parts[0] != "n" or parts[2] != "m":
                raise GraphError(f"line {lineno}: expected header 'n <count> m <count>'")
            n, m = int(parts[1]), int(parts[3])
            continue
        if len(parts) not in (3, 4):
            raise GraphError(f"line {lineno}: expected 'u v w [p]'")
        u, v, w = int(parts[0]), int(parts[1]), int(parts[2])
        pe = float(parts[3]) if len(parts) == 4 else p
        rows.append((u, v, w, pe))
    if n is None:
        raise GraphError("missing header line")
    if len(rows) != m:
        raise GraphError(f"header declares m={m} but {len(rows)} edges follow")
    return build_graph(n, rows)


def read_edge_list(path: str | os.PathLike, p: float = 1.0) -> WeightedGraph:
    with open(path) as fh:
        return parse_edge_list(fh.read(), p)


def format_edge_list(g: WeightedGraph, with_p: bool = True) -> str:
    buf = io.StringIO()
    buf.write(f"n {g.n} m {g.m}\n")
    for e in g.edges:
        if with_p:
            buf.write(f"{e.u} {e.v} {e.w} {e.p!r}\n")
        else:
            buf.write(f"{e.u} {e.v} {e.w}\n")
    return buf.getvalue()


def write_edge_list(g: WeightedGraph, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write(format_edge_list(g))
