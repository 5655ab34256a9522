"""Random-removal evaluation: hide 10% of the links, rank every missing pair,
score precision@L and AUPR, then compare methods and method classes.

A small number of repetitions keeps the run short; the published protocol
uses 100.

    python3 demos/03_evaluate_protocol.py [reps]
"""

import sys

import numpy as np

from bilink import aggregate_classes, load_dataset, run_experiment

reps = int(sys.argv[1]) if len(sys.argv) > 1 else 3
g, _ = load_dataset("movielens100k")

methods = ["car", "cra", "cn", "ra", "nbi", "cos", "random"]
res = run_experiment(g, methods, fraction=0.1, reps=reps, seed=1,
                     progress=lambda r: print(f"  repetition {r + 1}/{reps}", flush=True))

print(f"L = {res.removed_per_rep}, candidates = {res.candidates_per_rep}")
for m in res.methods:
    print(f"{m:>7}  precision {res.mean('precision', m):.4f} +- {res.se('precision', m):.4f}"
          f"  aupr {res.mean('aupr', m):.4f}")

c = res.comparison("precision", "cra", "cn")
print(f"CRA vs CN: U = {c.u:.1f}, adjusted p = {c.p_adjusted:.3g}")

aggs, _ = aggregate_classes({"movielens": res})
for name, a in aggs.items():
    print(f"class {name:<10} mean precision {a.precision_mean:.4f} over {a.n} results")
print("random baseline expectation:", np.round(res.removed_per_rep / res.candidates_per_rep, 5))
