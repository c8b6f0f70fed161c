"""
Alternating components and how to shorten them
==============================================

Compare a light matching with the maximum one.  Their symmetric difference
splits into paths and cycles; the augmenting ones are thinned so that none
is long, at a small loss of weight.
"""

import random
from fractions import Fraction

from stochmatch import (decompose, decompose_bounded, deletion_partition, gen_graph,
                        label_edges, max_weight_matching, split_component)
from stochmatch.graph import validate_matching

g = gen_graph("gnm(80, 100)", seed=5)
m_h = max_weight_matching(g)

# a greedy random matching plays the light side
rng = random.Random(0)
order = list(range(g.m))
rng.shuffle(order)
used, light = set(), []
for k in order:
    u, v = g.endpoints(k)
    if u not in used and v not in used:
        used |= {u, v}
        light.append(k)
m_l = validate_matching(g, light)
print(f"light matching {m_l.weight}, heavy matching {m_h.weight}")

for c in decompose(m_l, m_h, g):
    tag = f"L={c.norm_length}" if c.augmenting else "not augmenting"
    print(f"  {c.shape:5s} {len(c):2d} edges, value {c.delta:4d}, {tag}")

# cut the longest augmenting component with alpha = ceil(2 L)
aug = [c for c in decompose(m_l, m_h, g) if c.augmenting]
longest = max(aug, key=len)
lc = label_edges(longest)
alpha = -(-2 * longest.q_weight // longest.delta)
dp = deletion_partition(lc, alpha)
out = split_component(longest, dp)
print(f"\nlongest component: {len(longest)} edges, value {longest.delta}, alpha {alpha}")
print(f"  class weights {dp.part_weights}, drop class {dp.chosen_index}")
print(f"  fragments keep value {out.total_delta} (at least half of {longest.delta})")

for eps in (Fraction(1, 2), Fraction(1, 4)):
    bd = decompose_bounded(m_l, m_h, g, eps)
    print(f"\neps={eps}: kept weight {bd.reduced.weight}/{m_h.weight}, "
          f"{len(bd.deletions)} cuts, short={bd.length_bound_ok}, "
          f"weight bound={bd.weight_bound_ok}")
