"""Adaptive and non-adaptive query algorithms with per-round certificates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .components import _parse_eps, decompose
from .errors import CoverageViolation, TooLarge
from .graph import EMPTY_MATCHING, Matching, WeightedGraph
from .matching import max_weight_matching
from .stochastic import (EXACT_LIMIT, MatchingOracle, QueryLedger, Realization,
                         expected_matching_exact, mean_se, query,
                         sample_matching_weights)

DEFAULT_ROUND_CAP = 10**6


@dataclass(frozen=True)
class CertificateReport:
    """Exact per-round checks for one adaptive round.

    ``obs1``: the round's matching is at least as heavy as the best matching
    of the realization.  ``lemma2``: if the realized matching so far is below
    ``(1-eps)`` of the round's matching, the augmenting components with
    normalized length under ``2/eps`` carry value at least ``eps/2 * w(M_r)``;
    compared as ``lemma2_lhs >= lemma2_rhs`` after clearing denominators.
    """
    eps: Fraction
    mr_weight: int
    realized_opt_weight: int
    o_prev_weight: int
    u_r_size: int
    short_count: int
    short_value: int
    lemma2_premise: bool
    lemma2_lhs: int
    lemma2_rhs: int
    obs1_ok: bool
    lemma2_ok: bool

    def recheck(self) -> bool:
        """Recompute both booleans from the raw integers."""
        num, den = self.eps.numerator, self.eps.denominator
        premise = den * self.o_prev_weight < (den - num) * self.mr_weight
        lhs, rhs = 2 * den * self.short_value, num * self.mr_weight
        return (premise == self.lemma2_premise
                and (lhs, rhs) == (self.lemma2_lhs, self.lemma2_rhs)
                and self.lemma2_ok == (not premise or lhs >= rhs)
                and self.obs1_ok == (self.mr_weight >= self.realized_opt_weight))

    @property
    def ok(self) -> bool:
        return self.obs1_ok and self.lemma2_ok

    def to_dict(self) -> dict:
        return {
            "eps": str(self.eps), "mr_weight": self.mr_weight,
            "realized_opt_weight": self.realized_opt_weight,
            "o_prev_weight": self.o_prev_weight, "u_r_size": self.u_r_size,
            "short_count": self.short_count, "short_value": self.short_value,
            "lemma2_premise": self.lemma2_premise,
            "lemma2_lhs": self.lemma2_lhs, "lemma2_rhs": self.lemma2_rhs,
            "obs1_ok": self.obs1_ok, "lemma2_ok": self.lemma2_ok,
        }

    @classmethod
    def from_dict(cls, d: dict) -> CertificateReport:
        d = dict(d)
        d["eps"] = Fraction(d["eps"])
        return cls(**d)


def certify_round(g: WeightedGraph, o_prev: Matching, m_r: Matching, eps,
                  realized_opt_weight: int) -> CertificateReport:
    e = _parse_eps(eps)
    num, den = e.numerator, e.denominator
    aug = [c for c in decompose(o_prev, m_r, g) if c.augmenting]
    # L_C < 2/eps  <=>  num * w(Q_C) < 2 * den * delta_C
    short = [c for c in aug if num * c.q_weight < 2 * den * c.delta]
    short_value = sum(c.delta for c in short)
    premise = den * o_prev.weight < (den - num) * m_r.weight
    lhs, rhs = 2 * den * short_value, num * m_r.weight
    return CertificateReport(
        e, m_r.weight, realized_opt_weight, o_prev.weight, len(aug), len(short),
        short_value, premise, lhs, rhs,
        obs1_ok=m_r.weight >= realized_opt_weight,
        lemma2_ok=(not premise) or lhs >= rhs)


@dataclass(frozen=True)
class RoundRecord:
    r: int
    m_r: Matching
    m_r_realized: frozenset
    m_r_failed: frozenset
    e_star_after: frozenset
    o_r_weight: int
    certificates: CertificateReport | None = None

    def to_dict(self, trial: int | None = None) -> dict:
        d = {
            "trial": trial, "r": self.r,
            "m_r": list(self.m_r.edge_ids), "m_r_weight": self.m_r.weight,
            "m_r_realized": sorted(self.m_r_realized),
            "m_r_failed": sorted(self.m_r_failed),
            "e_star_after": sorted(self.e_star_after),
            "o_r_weight": self.o_r_weight,
            "certificates": self.certificates.to_dict() if self.certificates else None,
        }
        return d


@dataclass
class AdaptiveRun:
    final: Matching
    rounds: list[RoundRecord]
    ledger: QueryLedger
    early_exit: int | None = None  # round after which nothing could change
    realized_opt_weight: int | None = None

    @property
    def certificate_failures(self) -> int:
        return sum(1 for rec in self.rounds
                   if rec.certificates is not None and not rec.certificates.ok)


def adaptive_run(g: WeightedGraph, realization: Realization, rounds: int, eps=Fraction(1, 2),
                 certificates: bool = True,
                 oracle: MatchingOracle | None = None) -> AdaptiveRun:
    """Run the adaptive algorithm against one hidden realization.

    Each round takes a maximum-weight matching of the edges not yet known to
    have failed, queries it, and drops the failures.  The output is the best
    matching among realized queried edges.

    If a round's matching holds only edges queried earlier, the candidate set
    no longer changes and every later round would repeat it; the run stops
    there and ``early_exit`` records the round.
    """
    if rounds < 0:
        raise ValueError("rounds must be non-negative")
    solve = oracle.weight if oracle is not None else None
    e_star = set(g.all_edges)
    ledger = QueryLedger.empty(g)
    known: set[int] = set()
    o_r = EMPTY_MATCHING
    realized_opt = None
    if certificates:
        realized_opt = (solve(realization.realized) if solve
                        else max_weight_matching(g, realization.realized).weight)
    records: list[RoundRecord] = []
    early = None
    for r in range(1, rounds + 1):
        m_r = max_weight_matching(g, e_star)
        fresh = set(m_r.edge_ids) - ledger.queried
        cert = certify_round(g, o_r, m_r, eps, realized_opt) if certificates else None
        ledger = query(ledger, realization, m_r.edge_ids, g)
        realized = frozenset(k for k in m_r.edge_ids if ledger.outcomes[k])
        failed = frozenset(m_r.edge_ids) - realized
        e_star -= failed
        if realized - known:
            known |= realized
            o_r = max_weight_matching(g, known)
        records.append(RoundRecord(r, m_r, realized, failed, frozenset(e_star),
                                   o_r.weight, cert))
        if not fresh:
            early = r
            break
    return AdaptiveRun(o_r, records, ledger, early, realized_opt)


def default_rounds(eps, p_min: float, cap: int = DEFAULT_ROUND_CAP) -> int:
    """``ceil(4 / (eps * p_min ** (4/eps)))``, capped at ``cap``."""
    e = _parse_eps(eps)
    if not 0 < p_min <= 1:
        raise ValueError("p_min must lie in (0, 1]")
    denom = float(e) * p_min ** float(4 / e)
    if denom <= 0:
        return cap
    return min(cap, math.ceil(4 / denom))


def nonadaptive_matchings(g: WeightedGraph, rounds: int) -> Iterator[Matching]:
    """Yield M_1, M_2, ...: each a maximum matching of the edges left over."""
    remaining = set(g.all_edges)
    for _ in range(rounds):
        m_r = max_weight_matching(g, remaining)
        if not m_r.edge_ids:
            return
        remaining -= set(m_r.edge_ids)
        yield m_r


def nonadaptive_select(g: WeightedGraph, rounds: int) -> frozenset:
    """The union H of ``rounds`` successive disjoint maximum matchings.

    No realization is consulted; H is queried once, afterwards.
    """
    if rounds < 0:
        raise ValueError("rounds must be non-negative")
    h: set[int] = set()
    for m_r in nonadaptive_matchings(g, rounds):
        h.update(m_r.edge_ids)
    return frozenset(h)


def max_degree(g: WeightedGraph, edge_ids) -> int:
    deg = [0] * g.n
    for k in edge_ids:
        u, v = g.endpoints(k)
        deg[u] += 1
        deg[v] += 1
    return max(deg, default=0)


def evaluate_subgraph(g: WeightedGraph, h, trials: int, seed: int,
                      oracle: MatchingOracle | None = None) -> tuple[float, float]:
    """Monte Carlo ``(mean, se)`` of ``w(M(H ∩ realization))``."""
    if trials < 2:
        raise ValueError("trials must be at least 2")
    ws = sample_matching_weights(g, h, trials, seed, "trial", oracle)
    return mean_se(sum(ws), sum(w * w for w in ws), trials)


@dataclass(frozen=True)
class SuperadditivityCertificate:
    w1: int
    w2: int
    w_all: int

    @property
    def ok(self) -> bool:
        return self.w1 + self.w2 >= self.w_all


def check_superadditivity(g: WeightedGraph, e1, e2) -> SuperadditivityCertificate:
    e1, e2 = frozenset(e1), frozenset(e2)
    if e1 | e2 != g.all_edges:
        raise CoverageViolation("the two edge sets must cover every edge")
    cert = SuperadditivityCertificate(
        max_weight_matching(g, e1).weight, max_weight_matching(g, e2).weight,
        max_weight_matching(g).weight)
    if not cert.ok:
        raise AssertionError(f"superadditivity violated: {cert}")
    return cert


@dataclass(frozen=True)
class NextIsHalfCertificate:
    expected_all: float
    expected_prev: float
    next_weight: int
    exact: bool
    se_all: float = 0.0
    se_prev: float = 0.0

    @property
    def premise(self) -> bool:
        return self.expected_prev < self.expected_all / 2

    @property
    def ok(self) -> bool:
        if not self.premise:
            return True
        # Monte Carlo estimates are allowed three standard errors of slack
        slack = 0.0 if self.exact else 3 * self.se_all / 2
        return self.next_weight >= self.expected_all / 2 - slack


def check_next_is_half(g: WeightedGraph, h_prev, mc_trials: int | None = None,
                       seed: int = 0) -> NextIsHalfCertificate:
    """If E[M(H_prev)] < E[M(E)]/2, the best matching outside H_prev weighs >= E[M(E)]/2.

    Expectations are exact when the graph has at most 20 edges; otherwise
    ``mc_trials`` Monte Carlo trials are used and must be given.
    """
    h_prev = frozenset(h_prev)
    rest = g.all_edges - h_prev
    next_weight = max_weight_matching(g, rest).weight
    if g.m <= EXACT_LIMIT:
        return NextIsHalfCertificate(expected_matching_exact(g),
                                     expected_matching_exact(g, h_prev),
                                     next_weight, exact=True)
    if not mc_trials:
        raise TooLarge(f"{g.m} edges needs a Monte Carlo budget")
    oracle = MatchingOracle(g)
    all_ws = sample_matching_weights(g, None, mc_trials, seed, "opt", oracle)
    prev_ws = sample_matching_weights(g, h_prev, mc_trials, seed, "trial", oracle)
    m_all, se_all = mean_se(sum(all_ws), sum(w * w for w in all_ws), mc_trials)
    m_prev, se_prev = mean_se(sum(prev_ws), sum(w * w for w in prev_ws), mc_trials)
    return NextIsHalfCertificate(m_all, m_prev, next_weight, False, se_all, se_prev)


def verify_trace_records(records) -> list[str]:
    """Re-check serialized round records; returns a list of problems."""
    problems = []
    last_o: dict = {}
    for i, d in enumerate(records):
        where = f"record {i} (trial {d.get('trial')}, round {d.get('r')})"
        if d.get("mode") == "nonadaptive":
            problems += _verify_nonadaptive(d, where)
            continue
        m_r = set(d["m_r"])
        t, f = set(d["m_r_realized"]), set(d["m_r_failed"])
        if t | f != m_r or t & f:
            problems.append(f"{where}: realized/failed do not partition M_r")
        if f & set(d["e_star_after"]):
            problems.append(f"{where}: failed edge still in E*")
        key = d.get("trial")
        if key in last_o and d["o_r_weight"] < last_o[key]:
            problems.append(f"{where}: w(O_r) decreased")
        last_o[key] = d["o_r_weight"]
        c = d.get("certificates")
        if c is None:
            continue
        cert = CertificateReport.from_dict(c)
        if cert.mr_weight != d["m_r_weight"]:
            problems.append(f"{where}: certificate weight mismatch")
        if not cert.recheck():
            problems.append(f"{where}: certificate booleans inconsistent with raw fields")
        if not cert.obs1_ok:
            problems.append(f"{where}: w(M_r) below realized optimum")
        if not cert.lemma2_ok:
            problems.append(f"{where}: short-component value below eps/2 * w(M_r)")
    return problems


def _verify_nonadaptive(d: dict, where: str) -> list[str]:
    problems = []
    sup = d.get("superadditivity")
    if sup is not None:
        ok = sup["w1"] + sup["w2"] >= sup["w_all"]
        if ok != sup["ok"]:
            problems.append(f"{where}: superadditivity flag inconsistent with weights")
        if not ok:
            problems.append(f"{where}: superadditivity violated")
    nh = d.get("next_is_half")
    if nh is not None:
        premise = nh["expected_prev"] < nh["expected_all"] / 2
        ok = not premise or nh["next_weight"] >= nh["expected_all"] / 2
        if premise != nh["premise"] or ok != nh["ok"]:
            problems.append(f"{where}: next-is-half flags inconsistent with values")
        if not ok:
            problems.append(f"{where}: next matching below half of E[M(E)]")
        if nh["next_weight"] != d["m_r_weight"]:
            problems.append(f"{where}: next matching weight differs from M_r")
    return problems
