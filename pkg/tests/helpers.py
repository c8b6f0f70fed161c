"""Shared random instance builders for the test suite."""

import random

from stochmatch.components import AlternatingComponent
from stochmatch.graph import Matching, build_graph, validate_matching
from stochmatch.matching import max_weight_matching


def random_graph(rng: random.Random, n_max=8, wmax=100, p=0.5, density=None, n=None):
    n = n if n is not None else rng.randint(2, n_max)
    d = density if density is not None else rng.random()
    edges = [(i, j, rng.randint(0, wmax), p)
             for i in range(n) for j in range(i + 1, n) if rng.random() < d]
    return build_graph(n, edges)


def random_matching(rng: random.Random, g, keep=0.7) -> Matching:
    """Greedy matching over a shuffled subset of edges."""
    ids = list(range(g.m))
    rng.shuffle(ids)
    used, chosen = set(), []
    for k in ids:
        u, v = g.endpoints(k)
        if u not in used and v not in used and rng.random() < keep:
            used |= {u, v}
            chosen.append(k)
    return validate_matching(g, chosen)


def random_pair(rng: random.Random, n_max=14):
    """A graph with a light random matching and a max-weight one."""
    g = random_graph(rng, n_max=n_max, density=rng.uniform(0.2, 0.7), wmax=50)
    return g, random_matching(rng, g), max_weight_matching(g)


def random_component(rng, shape=None, k_max=12, wmax=20):
    shape = shape or rng.choice(["path", "cycle"])
    k = rng.randint(1, k_max)
    if shape == "cycle":
        k = max(k, 2)
        pattern = "qb" * k
    else:
        pattern = rng.choice(["", "b"]) + "qb" * (k - 1) + "q" + rng.choice(["", "b"])
    weights = [rng.randint(0, wmax) for _ in pattern]
    ids = list(range(len(pattern)))
    if shape == "cycle":
        # arbitrary ids so the rotation rule matters
        rng.shuffle(ids)
    return AlternatingComponent(shape, tuple(ids), tuple(weights),
                                tuple(c == "q" for c in pattern))


def random_augmenting(rng, shape=None):
    while True:
        c = random_component(rng, shape)
        if c.augmenting:
            return c
