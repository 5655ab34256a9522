"""Common neighbours, local community links and the eleven local indices on
a six-edge toy graph.

    python3 demos/01_local_community.py
"""

from pathlib import Path

from bilink import IndexKind, Partition, local_community, read_edge_list, score
from bilink.bigraph import candidate_pairs

g, report = read_edge_list(Path(__file__).parent.parent / "tests" / "data" / "g_fix.tsv")
print(f"{g.n_left} left x {g.n_right} right nodes, {g.m} edges")

x = g.node(Partition.LEFT, "a1").index
y = g.node(Partition.RIGHT, "b3").index

# a1 and b3 are not linked; the only 3-path between them is a1-b2-a3-b3
lc = local_community(g, x, y)
print("right CNs:", [g.right_labels[b] for b in lc.cn_right])
print("left CNs: ", [g.left_labels[a] for a in lc.cn_left])
print("LCL:", lc.lcl)

for kind in IndexKind:
    print(f"  {kind.value:>4} = {score(kind, g, x, y):.4f}")

# every missing link, ranked by CAR
ranked = sorted(candidate_pairs(g), key=lambda p: -score("car", g, *p))
for a, b in ranked:
    print(g.left_labels[a], g.right_labels[b], score("car", g, a, b))
