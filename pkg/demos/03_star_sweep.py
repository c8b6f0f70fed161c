"""
Why a star needs many rounds
============================

On a star with unit weights the best any algorithm can do after R rounds is
to have found one existing edge, which happens with probability
1 - (1 - p)^R.  A sweep over R reproduces that curve.
"""

from stochmatch import ExperimentConfig, sweep

cfg = ExperimentConfig(gen="star(16, 1)", p=0.5, trials=2000, mode="adaptive",
                       certificates=False)
results = sweep(cfg, "rounds", [1, 2, 3, 4, 6, 8])
print(" R  achieved  closed form")
for res in results:
    mr = res.modes[0]
    print(f"{mr.rounds:2d}  {mr.achieved:.4f}    {1 - 0.5 ** min(mr.rounds, 16):.4f}"
          f"  (SE {mr.achieved_se:.4f})")
