"""Trajectory alignment: pairwise DP merge and progressive cluster merge.

The pairwise alignment fills a DP table where a diagonal move generalizes
two points to their per-axis LCAs and a horizontal/vertical move suppresses
one point on both axes (cost = sum of the two tree heights).  Backtracking
yields the merged trajectory; suppressed positions are kept as fully
generalized (root, root) points so that every member point stays covered
by the merge.  Progressive alignment folds a whole cluster into one merged
trajectory, longest member first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .data import Trajectory
from .grid import ROOT, GridTree, lca_of

try:
    from . import _kernels
except ImportError:  # numba unavailable; pure-Python paths below
    _kernels = None


@dataclass(frozen=True)
class GenPoint:
    x_node: int  # longitude-tree node, any depth
    y_node: int  # latitude-tree node, any depth


@dataclass
class GenTrajectory:
    points: list[GenPoint]
    member_ids: frozenset[int]

    def __post_init__(self):
        if not self.points:
            raise ValueError("generalized trajectory has no points")
        if not self.member_ids:
            raise ValueError("generalized trajectory has no members")

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class AlignmentResult:
    loss: float  # bits
    merged: GenTrajectory


AnyTrajectory = Union[Trajectory, GenTrajectory]


def lift(traj: Trajectory) -> GenTrajectory:
    """View a quantized trajectory as a generalized one (leaves as nodes)."""
    return GenTrajectory(
        points=[GenPoint(p.x_leaf, p.y_leaf) for p in traj.points],
        member_ids=frozenset({traj.id}),
    )


def _as_gen(t: AnyTrajectory) -> GenTrajectory:
    return t if isinstance(t, GenTrajectory) else lift(t)


def _validate(t: GenTrajectory, trees: tuple[GridTree, GridTree]) -> None:
    lon_tree, lat_tree = trees
    for p in t.points:
        lon_tree.check_node(p.x_node)
        lat_tree.check_node(p.y_node)


def _pair_loss(a: int, b: int) -> int:
    da, db = a.bit_length(), b.bit_length()
    if da > db:
        x, y = a >> (da - db), b
    elif db > da:
        x, y = b >> (db - da), a
    else:
        x, y = a, b
    return da + db - 2 * min(da, db) + 2 * (x ^ y).bit_length()


def _node_arrays(t: GenTrajectory) -> tuple[np.ndarray, np.ndarray]:
    xs = np.fromiter((p.x_node for p in t.points), np.int64, len(t.points))
    ys = np.fromiter((p.y_node for p in t.points), np.int64, len(t.points))
    return xs, ys


def _dp_loss_py(px, py, qx, qy, hx: int, hy: int) -> int:
    sup = hx + hy
    n = len(qx)
    prev = [j * sup for j in range(n + 1)]
    for i in range(1, len(px) + 1):
        cur = [i * sup]
        a, b = px[i - 1], py[i - 1]
        for j in range(1, n + 1):
            cur.append(min(
                prev[j - 1] + _pair_loss(a, qx[j - 1]) + _pair_loss(b, qy[j - 1]),
                prev[j] + sup,
                cur[j - 1] + sup,
            ))
        prev = cur
    return prev[n]


def dsa(p: AnyTrajectory, q: AnyTrajectory,
        trees: tuple[GridTree, GridTree]) -> AlignmentResult:
    """Align two trajectories: minimum loss plus the backtracked merge.

    Backtracking tie-break is diagonal, then up (suppress a point of ``p``),
    then left (suppress a point of ``q``), making the merge reproducible.
    """
    p, q = _as_gen(p), _as_gen(q)
    _validate(p, trees)
    _validate(q, trees)
    lon_tree, lat_tree = trees
    sup = lon_tree.height + lat_tree.height
    px = [pt.x_node for pt in p.points]
    py = [pt.y_node for pt in p.points]
    qx = [pt.x_node for pt in q.points]
    qy = [pt.y_node for pt in q.points]
    m, n = len(px), len(qx)

    table = [[0] * (n + 1) for _ in range(m + 1)]
    for j in range(1, n + 1):
        table[0][j] = j * sup
    for i in range(1, m + 1):
        row = table[i]
        above = table[i - 1]
        row[0] = i * sup
        a, b = px[i - 1], py[i - 1]
        for j in range(1, n + 1):
            row[j] = min(
                above[j - 1] + _pair_loss(a, qx[j - 1]) + _pair_loss(b, qy[j - 1]),
                above[j] + sup,
                row[j - 1] + sup,
            )

    merged_rev: list[GenPoint] = []
    i, j = m, n
    while i > 0 or j > 0:
        if i > 0 and j > 0:
            diag = _pair_loss(px[i - 1], qx[j - 1]) + _pair_loss(py[i - 1], qy[j - 1])
            if table[i][j] == table[i - 1][j - 1] + diag:
                merged_rev.append(GenPoint(
                    lca_of(px[i - 1], qx[j - 1]),
                    lca_of(py[i - 1], qy[j - 1]),
                ))
                i -= 1
                j -= 1
                continue
        if i > 0 and table[i][j] == table[i - 1][j] + sup:
            merged_rev.append(GenPoint(ROOT, ROOT))
            i -= 1
            continue
        merged_rev.append(GenPoint(ROOT, ROOT))
        j -= 1

    merged = GenTrajectory(
        points=merged_rev[::-1],
        member_ids=p.member_ids | q.member_ids,
    )
    return AlignmentResult(loss=float(table[m][n]), merged=merged)


def dsa_loss(p: AnyTrajectory, q: AnyTrajectory,
             trees: tuple[GridTree, GridTree]) -> float:
    """Alignment loss only, without materializing the merge."""
    p, q = _as_gen(p), _as_gen(q)
    _validate(p, trees)
    _validate(q, trees)
    hx, hy = trees[0].height, trees[1].height
    if _kernels is not None:
        px, py = _node_arrays(p)
        qx, qy = _node_arrays(q)
        return float(_kernels.dp_loss(px, py, qx, qy, hx, hy))
    return float(_dp_loss_py(
        [pt.x_node for pt in p.points], [pt.y_node for pt in p.points],
        [pt.x_node for pt in q.points], [pt.y_node for pt in q.points],
        hx, hy,
    ))


pairwise_distance = dsa_loss


def psa(members: Sequence[AnyTrajectory],
        trees: tuple[GridTree, GridTree]) -> tuple[GenTrajectory, float]:
    """Progressively merge a cluster: longest member first, then fold each
    remaining member into the running merge.  Returns (merge, summed loss)."""
    if not members:
        raise ValueError("cannot align an empty cluster")
    gens = [_as_gen(t) for t in members]
    gens.sort(key=lambda t: (-len(t.points), min(t.member_ids)))
    base = gens[0]
    total = 0.0
    for nxt in gens[1:]:
        result = dsa(base, nxt, trees)
        total += result.loss
        base = result.merged
    return base, total
