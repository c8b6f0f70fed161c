"""
Adaptive querying, round by round
=================================

Draw one hidden realization of a small random graph and watch the adaptive
algorithm pick a matching, query it, throw away the failures and try again.
"""

from stochmatch import adaptive_run, gen_graph, max_weight_matching, realize
from stochmatch.stochastic import derive_seed

g = gen_graph("gnm(10, 18)", seed=2, p=0.6)
print(f"graph: {g.n} vertices, {g.m} edges, every edge exists w.p. 0.6")

# the realization is hidden from the algorithm; we peek for comparison
real = realize(g, derive_seed(2, "trial"))
best = max_weight_matching(g, real.realized)
print(f"omniscient matching of this realization: weight {best.weight}")

run = adaptive_run(g, real, rounds=8)
for rec in run.rounds:
    cert = rec.certificates
    print(f"round {rec.r}: queried {len(rec.m_r.edge_ids)} edges "
          f"(w={rec.m_r.weight}), {len(rec.m_r_realized)} exist, "
          f"best so far {rec.o_r_weight}, certificates {'ok' if cert.ok else 'FAILED'}")
if run.early_exit:
    print(f"stopped after round {run.early_exit}: nothing new left to query")

print(f"final matching weight {run.final.weight} of {best.weight}; "
      f"at most {run.ledger.max_per_vertex} queries touched any vertex")
