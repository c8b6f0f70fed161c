"""Alternating and augmenting components of two matchings.

For a light matching M_L and a heavy matching M_H, every connected component
C of M_L xor M_H is a path or an even cycle.  Its base edges B come from M_L,
its augmenting edges Q from M_H; ``delta = w(Q) - w(B)`` is the weight gained
by swapping B for Q and ``w(Q) / delta`` is its normalized length.

Long components are cut by deleting every alpha-th augmenting edge (one
residue class D_i, the lightest one), which loses at most ``w(Q)/alpha``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import BadEpsilon, NotAMatching, NotAugmentable, NotAugmenting
from .graph import Matching, WeightedGraph, symmetric_difference, validate_matching


@dataclass(frozen=True)
class AlternatingComponent:
    shape: str  # "path" | "cycle"
    ordered_edges: tuple[int, ...]
    weights: tuple[int, ...]  # aligned with ordered_edges
    aug_mask: tuple[bool, ...]  # True where the edge belongs to Q

    @property
    def base_edges(self) -> frozenset:
        return frozenset(k for k, q in zip(self.ordered_edges, self.aug_mask) if not q)

    @property
    def aug_edges(self) -> frozenset:
        return frozenset(k for k, q in zip(self.ordered_edges, self.aug_mask) if q)

    @property
    def q_weight(self) -> int:
        return sum(w for w, q in zip(self.weights, self.aug_mask) if q)

    @property
    def b_weight(self) -> int:
        return sum(w for w, q in zip(self.weights, self.aug_mask) if not q)

    @property
    def delta(self) -> int:
        return self.q_weight - self.b_weight

    @property
    def augmenting(self) -> bool:
        return self.delta > 0

    @property
    def norm_length(self) -> Fraction | None:
        d = self.delta
        return Fraction(self.q_weight, d) if d > 0 else None

    def __len__(self):
        return len(self.ordered_edges)


def _component(shape, order, g, heavy):
    return AlternatingComponent(
        shape, tuple(order), tuple(g.edges[k].w for k in order),
        tuple(k in heavy for k in order))


def decompose(m_l: Matching, m_h: Matching, g: WeightedGraph) -> list[AlternatingComponent]:
    heavy = set(m_h.edge_ids)
    return [_component(rc.shape, rc.edges, g, heavy)
            for rc in symmetric_difference(m_l, m_h, g)]


def component_report(c: AlternatingComponent) -> dict:
    """JSON-ready summary of a component."""
    return {
        "shape": c.shape,
        "edge_ids": list(c.ordered_edges),
        "delta": c.delta,
        "L_num": c.q_weight,
        "L_den": c.delta,
        "alpha": compute_alpha(c) if c.delta > 0 else None,
    }


def augment(m_l: Matching, c: AlternatingComponent, g: WeightedGraph) -> Matching:
    """Swap the component's base edges in ``m_l`` for its augmenting edges."""
    current = set(m_l.edge_ids)
    if not c.base_edges <= current:
        raise NotAugmentable("component base edges are not all in the matching")
    try:
        out = validate_matching(g, (current - c.base_edges) | c.aug_edges)
    except NotAMatching as exc:
        raise NotAugmentable(str(exc)) from exc
    assert out.weight == m_l.weight + c.delta
    return out


@dataclass(frozen=True)
class LabeledComponent:
    """Component edges named q_1.., b_0/b_1.. by traversal position.

    case 1: path starting with an augmenting edge (q1 b1 q2 b2 ...)
    case 2: path starting with a base edge (b0 q1 b1 q2 ...)
    case 3: cycle, rotated to start at its smallest-id augmenting edge
    """
    case: int
    q_edges: tuple[int, ...]
    q_weights: tuple[int, ...]
    b_edges: tuple[int, ...]
    b_weights: tuple[int, ...]
    source: AlternatingComponent

    @property
    def k(self) -> int:
        return len(self.q_edges)

    def sequence(self) -> list[tuple[int, int, bool]]:
        """``(edge_id, weight, is_aug)`` in labeled traversal order."""
        qs = list(zip(self.q_edges, self.q_weights))
        bs = list(zip(self.b_edges, self.b_weights))
        out = []
        if self.case == 2:
            out.append((*bs.pop(0), False))
        while qs or bs:
            if qs:
                out.append((*qs.pop(0), True))
            if bs:
                out.append((*bs.pop(0), False))
        return out


def label_edges(c: AlternatingComponent) -> LabeledComponent:
    if not c.ordered_edges:
        raise ValueError("empty component")
    seq = list(zip(c.ordered_edges, c.weights, c.aug_mask))
    if c.shape == "cycle":
        qs = [t for t, (k, _, q) in enumerate(seq) if q]
        assert qs, "alternating cycle without augmenting edges"
        start = min(qs, key=lambda t: seq[t][0])
        seq = seq[start:] + seq[:start]
        case = 3
    else:
        case = 1 if seq[0][2] else 2
    q = [(k, w) for k, w, a in seq if a]
    b = [(k, w) for k, w, a in seq if not a]
    return LabeledComponent(
        case,
        tuple(k for k, _ in q), tuple(w for _, w in q),
        tuple(k for k, _ in b), tuple(w for _, w in b),
        c)


@dataclass(frozen=True)
class DeletionPartition:
    alpha: int
    parts: tuple[tuple[int, ...], ...]  # D_1..D_alpha as q edge ids
    part_weights: tuple[int, ...]
    chosen_index: int  # 1-based
    q_weight: int

    @property
    def chosen(self) -> tuple[int, ...]:
        return self.parts[self.chosen_index - 1]

    @property
    def chosen_weight(self) -> int:
        return self.part_weights[self.chosen_index - 1]

    @property
    def within_share(self) -> bool:
        """``w(D_chosen) <= w(Q)/alpha`` by cross-multiplication."""
        return self.chosen_weight * self.alpha <= self.q_weight


def deletion_partition(lc: LabeledComponent, alpha: int) -> DeletionPartition:
    """Residue classes ``D_i = {q_i, q_{i+alpha}, ...}`` and the lightest one."""
    if alpha < 1:
        raise ValueError("alpha must be a positive integer")
    parts = tuple(tuple(lc.q_edges[i::alpha]) for i in range(alpha))
    weights = tuple(sum(lc.q_weights[i::alpha]) for i in range(alpha))
    chosen = min(range(alpha), key=lambda i: (weights[i], i)) + 1
    dp = DeletionPartition(alpha, parts, weights, chosen, sum(lc.q_weights))
    assert dp.within_share
    return dp


def compute_alpha(c: AlternatingComponent) -> int:
    """``ceil(2 * L_C)`` in integer arithmetic."""
    d = c.delta
    if d <= 0:
        raise NotAugmenting(f"component value {d} is not positive")
    return -(-2 * c.q_weight // d)


@dataclass(frozen=True)
class SubComponentSplit:
    fragments: tuple[AlternatingComponent, ...]
    removed: tuple[int, ...]
    removed_weight: int

    @property
    def total_delta(self) -> int:
        return sum(f.delta for f in self.fragments)


def split_component(c: AlternatingComponent, dp: DeletionPartition) -> SubComponentSplit:
    """Delete ``dp.chosen`` from ``c`` and return the pieces left over.

    Pieces holding only base edges are kept, so the values always add up to
    ``delta - w(D_chosen)``.
    """
    lc = label_edges(c)
    removed = set(dp.chosen)
    seq = lc.sequence()
    if c.shape == "cycle" and removed:
        # open the cycle just after a deleted edge
        cut = max(t for t, (k, _, _) in enumerate(seq) if k in removed)
        seq = seq[cut + 1:] + seq[:cut + 1]
    runs: list[list[tuple[int, int, bool]]] = [[]]
    for item in seq:
        if item[0] in removed:
            runs.append([])
        else:
            runs[-1].append(item)
    shape = "cycle" if c.shape == "cycle" and not removed else "path"
    frags = tuple(
        AlternatingComponent(shape, tuple(k for k, _, _ in r),
                             tuple(w for _, w, _ in r), tuple(a for _, _, a in r))
        for r in runs if r)
    rw = sum(w for k, w in zip(lc.q_edges, lc.q_weights) if k in removed)
    out = SubComponentSplit(frags, tuple(sorted(removed)), rw)
    assert out.total_delta + rw == c.delta
    return out


def _parse_eps(eps) -> Fraction:
    e = eps if isinstance(eps, Fraction) else Fraction(str(eps))
    if not 0 < e < 1:
        raise BadEpsilon(f"eps must lie in (0, 1), got {eps}")
    return e


@dataclass(frozen=True)
class BoundedDecomposition:
    reduced: Matching  # M'_H
    original: Matching  # M_H
    eps: Fraction
    deletions: tuple[dict, ...]  # one record per cut component
    components: tuple[AlternatingComponent, ...]  # of M_L xor M'_H

    @property
    def max_edges(self) -> int:
        return -(-4 * self.eps.denominator // self.eps.numerator)

    @property
    def length_bound_ok(self) -> bool:
        return all(len(c) <= self.max_edges for c in self.components if c.augmenting)

    @property
    def weight_bound_ok(self) -> bool:
        """``w(M'_H) >= (1 - eps/2) w(M_H)`` exactly."""
        num, den = self.eps.numerator, self.eps.denominator
        return 2 * den * self.reduced.weight >= (2 * den - num) * self.original.weight

    def report(self) -> dict:
        return {
            "eps": str(self.eps),
            "weight_before": self.original.weight,
            "weight_after": self.reduced.weight,
            "deletions": list(self.deletions),
            "components": [component_report(c) for c in self.components],
        }


def decompose_bounded(m_l: Matching, m_h: Matching, g: WeightedGraph,
                      eps) -> BoundedDecomposition:
    """Thin ``m_h`` so no augmenting component of M_L xor M'_H is long.

    Every augmenting component with more than ``ceil(4/eps)`` edges loses its
    lightest residue class of augmenting edges modulo ``ceil(2/eps)``.  A
    path is then always short enough.  A cycle whose augmenting-edge count is
    not a multiple of alpha can leave one over-long piece; passes repeat
    until no long augmenting component remains.
    """
    e = _parse_eps(eps)
    limit = -(-4 * e.denominator // e.numerator)
    alpha = -(-2 * e.denominator // e.numerator)
    current = m_h
    deletions: list[dict] = []
    pass_no = 0
    while True:
        comps = decompose(m_l, current, g)
        long = [c for c in comps if c.augmenting and len(c) > limit]
        if not long:
            break
        pass_no += 1
        drop: set[int] = set()
        for c in long:
            dp = deletion_partition(label_edges(c), alpha)
            drop.update(dp.chosen)
            deletions.append({**component_report(c), "pass": pass_no, "cut_alpha": alpha,
                              "removed": list(dp.chosen),
                              "removed_weight": dp.chosen_weight})
        current = validate_matching(g, set(current.edge_ids) - drop)
    return BoundedDecomposition(current, m_h, e, tuple(deletions), tuple(comps))

