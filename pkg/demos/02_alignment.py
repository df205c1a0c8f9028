"""Aligning trajectories: pairwise DP merge and progressive cluster merge.

Two trajectories of different lengths are merged by a dynamic program that
either generalizes two points to their per-axis LCAs (a diagonal move) or
suppresses a point entirely (a gap move).  A whole cluster is merged by
folding members into a running merge, longest first.
"""

from trajanon import BoundingBox, Trajectory, dsa, lift, psa, quantize

box = BoundingBox(0.0, 8.0, 0.0, 8.0)
trees = box.trees(3)


def make(tid, cells):
    pts = [quantize(x + 0.5, y + 0.5, trees) for x, y in cells]
    return Trajectory(tid, f"user{tid}", pts)


def show(gen, label):
    cells = " ".join(f"({p.x_node},{p.y_node})" for p in gen.points)
    print(f"  {label}: {cells}")


# Two commuters on nearby routes; the second one has an extra detour point.
a = make(0, [(0, 0), (2, 2), (4, 4)])
b = make(1, [(1, 0), (2, 3), (7, 7), (4, 5)])

print("Pairwise alignment (node ids on the longitude/latitude trees):")
show(lift(a), "trajectory a")
show(lift(b), "trajectory b")
result = dsa(a, b, trees)
show(result.merged, "merged     ")
print(f"  alignment loss: {result.loss:.0f} bits")
print("  (1,1) entries are suppressed positions generalized to the roots;")
print("  every original point is still covered by the merge, in order.")
print()

# The merge cost is what the clustering stages use as a distance: similar
# routes are cheap to merge, dissimilar ones expensive.
c = make(2, [(7, 0), (7, 7)])
print("Alignment loss doubles as the trajectory distance:")
print(f"  loss(a, b) = {dsa(a, b, trees).loss:5.0f} bits   (similar routes)")
print(f"  loss(a, c) = {dsa(a, c, trees).loss:5.0f} bits   (unrelated route)")
print()

# A cluster is folded into a single representative: that representative is
# what gets published for every member, which is what makes k-anonymity hold.
cluster = [a, b, make(3, [(0, 1), (2, 2), (5, 4)])]
merged, total = psa(cluster, trees)
print(f"Progressive merge of a {len(cluster)}-member cluster "
      f"(total loss {total:.0f} bits):")
show(merged, "representative")
print(f"  members covered: {sorted(merged.member_ids)}")
