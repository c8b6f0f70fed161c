import itertools
import math
import random
import statistics

import pytest

from helpers import random_graph
from stochmatch.errors import StochMatchError, TooLarge
from stochmatch.graph import build_graph
from stochmatch.matching import brute_force_matching
from stochmatch.stochastic import (MatchingOracle, QueryLedger, Realization, derive_seed,
                                   expected_matching_exact, mean_se, omniscient_opt_exact,
                                   omniscient_opt_mc, query, realize)


def enumerate_expectation(g, ids=None):
    """Plain sum over every subset of ``ids`` with the brute-force solver."""
    ids = sorted(range(g.m) if ids is None else ids)
    terms = []
    for bits in itertools.product((0, 1), repeat=len(ids)):
        prob = 1.0
        for k, b in zip(ids, bits):
            prob *= g.edges[k].p if b else 1 - g.edges[k].p
        present = [k for k, b in zip(ids, bits) if b]
        terms.append(prob * brute_force_matching(g, present).weight)
    return math.fsum(terms)


def test_derive_seed_is_stable_and_tag_separated():
    assert derive_seed(7, "trial", 3) == derive_seed(7, "trial", 3)
    assert derive_seed(7, "trial", 3) != derive_seed(7, "opt", 3)
    assert derive_seed(7, "trial", 3) != derive_seed(7, "trial", 4)


def test_realize_is_deterministic_and_prefix_stable():
    g = build_graph(6, [(i, j, 1, 0.5) for i in range(6) for j in range(i + 1, 6)])
    r1, r2 = realize(g, 123), realize(g, 123)
    assert r1 == r2
    # an edge's outcome does not depend on edges added after it
    g_small = build_graph(6, [(e.u, e.v, e.w, e.p) for e in g.edges[:5]])
    assert realize(g_small, 123).realized == frozenset(k for k in r1.realized if k < 5)


def test_realize_frequency_matches_probability():
    g = build_graph(2, [(0, 1, 1, 0.3)])
    hits = sum(0 in realize(g, derive_seed(0, "trial", i)) for i in range(4000))
    assert abs(hits / 4000 - 0.3) < 4 * math.sqrt(0.3 * 0.7 / 4000)


def test_probability_one_edges_always_present():
    g = build_graph(3, [(0, 1, 1, 1.0), (1, 2, 1, 1.0)])
    assert realize(g, 99).realized == {0, 1}


def test_query_ledger_counts_and_idempotence():
    g = build_graph(3, [(0, 1, 1, 1.0), (1, 2, 1, 1.0)])
    real = Realization(frozenset({0}), 0)
    led = query(QueryLedger.empty(g), real, [0, 1], g)
    assert led.outcomes == {0: True, 1: False}
    assert led.per_vertex_counts == (1, 2, 1)
    assert led.realized == {0}
    assert query(led, real, [1, 0], g) is led
    assert led.max_per_vertex == 2


def test_query_detects_tampering():
    g = build_graph(3, [(0, 1, 1, 1.0), (1, 2, 1, 1.0)])
    # edge 1 recorded as present although the realization lacks it
    tampered = QueryLedger(frozenset(), {1: True}, (0, 0, 0))
    with pytest.raises(StochMatchError):
        query(tampered, Realization(frozenset({0}), 0), [0], g)


def test_exact_expectation_matches_enumeration():
    rng = random.Random(3)
    for _ in range(40):
        g = random_graph(rng, n_max=7, p=rng.choice([0.2, 0.5, 0.9]), wmax=30)
        if g.m > 12:
            continue
        assert expected_matching_exact(g) == pytest.approx(enumerate_expectation(g), rel=1e-12)


def test_exact_expectation_subset_and_large_components():
    rng = random.Random(4)
    # 13 vertices in one component forces the solver loop
    g = build_graph(13, [(i, i + 1, rng.randint(1, 9), 0.5) for i in range(12)])
    assert expected_matching_exact(g) == pytest.approx(enumerate_expectation(g), rel=1e-12)
    ids = [0, 2, 3, 7]
    assert expected_matching_exact(g, ids) == pytest.approx(enumerate_expectation(g, ids))


def test_star_closed_form():
    k, p = 6, 0.5
    g = build_graph(k + 1, [(0, i, 1, p) for i in range(1, k + 1)])
    assert omniscient_opt_exact(g) == pytest.approx(1 - (1 - p) ** k, rel=1e-14)


def test_exact_limit():
    g = build_graph(22, [(i, i + 1, 1, 0.5) for i in range(21)])
    with pytest.raises(TooLarge):
        expected_matching_exact(g)


def test_mean_se_matches_statistics():
    xs = [3, 5, 5, 9, 0, 12]
    mean, se = mean_se(sum(xs), sum(x * x for x in xs), len(xs))
    assert mean == pytest.approx(statistics.fmean(xs))
    assert se == pytest.approx(statistics.stdev(xs) / math.sqrt(len(xs)))
    with pytest.raises(ValueError):
        mean_se(1, 1, 1)


def test_mc_opt_close_to_exact():
    rng = random.Random(8)
    g = random_graph(rng, n=6, density=0.6, p=0.5, wmax=20)
    exact = omniscient_opt_exact(g)
    mean, se = omniscient_opt_mc(g, 3000, seed=1)
    assert abs(mean - exact) <= 4 * se


def test_oracle_cache_returns_same_weight():
    g = build_graph(3, [(0, 1, 2, 1.0), (1, 2, 3, 1.0)])
    o = MatchingOracle(g)
    assert o.weight([0, 1]) == 3 and o.weight({1, 0}) == 3
