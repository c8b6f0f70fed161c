"""Query-efficient stochastic weighted matching.

Adaptive and non-adaptive query algorithms over graphs whose edges exist
independently with known probabilities, an exact blossom matching solver,
and the augmenting-component toolkit used to certify each round.
"""

from .algorithms import (adaptive_run, check_next_is_half, check_superadditivity,
                         default_rounds, evaluate_subgraph, nonadaptive_select)
from .components import (AlternatingComponent, augment, compute_alpha, decompose,
                         decompose_bounded, deletion_partition, label_edges,
                         split_component)
from .graph import (Matching, WeightedGraph, build_graph, read_edge_list,
                    symmetric_difference, validate_matching, write_edge_list)
from .harness import ExperimentConfig, gen_graph, run_experiment, sweep
from .matching import brute_force_matching, max_weight_matching
from .stochastic import (QueryLedger, Realization, omniscient_opt_exact,
                         omniscient_opt_mc, query, realize)

__version__ = "0.1.0"
