"""A tour of the per-axis generalization hierarchy and its loss model.

Each coordinate axis gets a full binary tree over equal-width intervals.
Publishing a coarser tree node instead of a leaf surrenders bits of
precision; this script shows how nodes, intervals and losses relate.
"""

from trajanon import build_tree

# A toy axis: longitudes 0..8 degrees, tree of height 3 -> 8 leaf intervals.
tree = build_tree(0.0, 8.0, height=3)

print("Tree over [0, 8] with height 3")
print(f"  leaves: ids {tree.first_leaf}..{tree.last_leaf}, "
      f"width {tree.leaf_width} degrees each")
print()

print("Heap numbering: the root is node 1, children of n are 2n and 2n+1.")
for node in (1, 2, 5, 10):
    lo, hi = tree.node_interval(node)
    print(f"  node {node:2d} covers [{lo:.1f}, {hi:.1f}) "
          f"and owns {tree.lf(node)} leaves")
print()

value = 2.7
leaf = tree.leaf_of(value)
print(f"A GPS coordinate {value} quantizes to leaf {leaf}, "
      f"interval {tree.node_interval(leaf)}")
print()

print("Generalizing a leaf to an ancestor loses one bit per level:")
for anc in (leaf, leaf // 2, leaf // 4, 1):
    lo, hi = tree.node_interval(anc)
    print(f"  publish node {anc:2d} -> interval width {hi - lo:.1f}, "
          f"loss {tree.loss_single(anc, leaf):.0f} bits")
print(f"Suppression (leaf -> root) always costs the tree height: "
      f"{tree.loss_suppress():.0f} bits")
print()

print("Two different leaves are merged at their lowest common ancestor:")
for a, b in [(8, 9), (8, 11), (8, 15)]:
    loss, anc = tree.loss_pair(a, b)
    print(f"  leaves {a} and {b}: LCA {anc}, joint loss {loss:.0f} bits "
          f"-> published interval {tree.node_interval(anc)}")
