"""Clustering trajectories into groups of size >= k and generalizing them.

Two algorithms produce the k-anonymous grouping: a density-based clustering
whose neighborhood radius grows adaptively until every trajectory sits in a
cluster of at least ``k`` members, and an iterative k'-means baseline that
re-clusters dissolved undersized clusters until the same holds.  Both use
the pairwise alignment loss as the distance between trajectories.
"""

from __future__ import annotations

from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .align import GenTrajectory, dsa_loss, lift, psa
from .data import Trajectory
from .errors import ConfigError, InfeasibleAnonymityError
from .grid import GridTree

try:
    from . import _kernels
except ImportError:
    _kernels = None


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric pairwise alignment losses, indexed by trajectory id."""

    ids: tuple[int, ...]
    values: np.ndarray  # (n, n) float64, zero diagonal

    def __post_init__(self):
        object.__setattr__(
            self, "_pos", {tid: i for i, tid in enumerate(self.ids)}
        )

    def get(self, a: int, b: int) -> float:
        return float(self.values[self._pos[a], self._pos[b]])

    def row(self, a: int) -> np.ndarray:
        return self.values[self._pos[a]]

    def offdiagonal(self, ids=None) -> np.ndarray:
        """Distances of all unordered pairs among ``ids`` (default: all)."""
        if ids is None:
            idx = np.arange(len(self.ids))
        else:
            idx = np.array([self._pos[i] for i in ids])
        sub = self.values[np.ix_(idx, idx)]
        iu = np.triu_indices(len(idx), k=1)
        return sub[iu]


@dataclass
class Cluster:
    member_ids: frozenset[int]
    representative: Optional[GenTrajectory] = None
    gen_loss: Optional[float] = None


@dataclass(frozen=True)
class DbscanConfig:
    k: int
    epsilon0: Optional[float] = None  # default: low quantile of distances
    top_epsilon: Optional[float] = None  # default: max pairwise distance
    quantile_step: float = 0.002
    seed: int = 0

    def __post_init__(self):
        if self.k < 2:
            raise ConfigError(f"anonymity parameter k must be >= 2, got {self.k}")
        if self.epsilon0 is not None and self.epsilon0 <= 0:
            raise ConfigError("epsilon0 must be positive")


def _pack(trajectories: list[Trajectory]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    lens = np.array([len(t.points) for t in trajectories], np.int64)
    max_len = int(lens.max())
    xs = np.zeros((len(trajectories), max_len), np.int64)
    ys = np.zeros((len(trajectories), max_len), np.int64)
    for i, t in enumerate(trajectories):
        xs[i, : lens[i]] = [p.x_leaf for p in t.points]
        ys[i, : lens[i]] = [p.y_leaf for p in t.points]
    return xs, ys, lens


def _fill_block(args):
    xs, ys, lens, hx, hy, rows = args
    out = []
    for i in rows:
        row = np.empty(len(lens) - i - 1, np.float64)
        for off, j in enumerate(range(i + 1, len(lens))):
            if _kernels is not None:
                row[off] = _kernels.dp_loss(
                    xs[i, : lens[i]], ys[i, : lens[i]],
                    xs[j, : lens[j]], ys[j, : lens[j]], hx, hy,
                )
            else:
                from .align import _dp_loss_py

                row[off] = _dp_loss_py(
                    list(xs[i, : lens[i]]), list(ys[i, : lens[i]]),
                    list(xs[j, : lens[j]]), list(ys[j, : lens[j]]), hx, hy,
                )
        out.append((i, row))
    return out


def build_distance_matrix(
    trajectories: list[Trajectory],
    trees: tuple[GridTree, GridTree],
    threads: int = 1,
) -> DistanceMatrix:
    """Pairwise alignment losses over all unordered trajectory pairs."""
    n = len(trajectories)
    if n < 2:
        raise ValueError("distance matrix needs at least 2 trajectories")
    xs, ys, lens = _pack(trajectories)
    hx, hy = trees[0].height, trees[1].height
    values = np.zeros((n, n), np.float64)
    if threads > 1:
        chunks = [list(range(s, n, threads)) for s in range(threads)]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for block in pool.map(
                _fill_block, [(xs, ys, lens, hx, hy, c) for c in chunks]
            ):
                for i, row in block:
                    values[i, i + 1:] = row
    elif _kernels is not None:
        cond = _kernels.fill_condensed(xs, ys, lens, hx, hy)
        values[np.triu_indices(n, k=1)] = cond
    else:
        for i, row in _fill_block((xs, ys, lens, hx, hy, list(range(n)))):
            values[i, i + 1:] = row
    values += values.T
    return DistanceMatrix(ids=tuple(t.id for t in trajectories), values=values)


def dbscan_core(
    ids: list[int],
    dist: DistanceMatrix,
    epsilon: float,
    min_pts: int,
) -> tuple[list[set[int]], set[int]]:
    """Classic density expansion over a precomputed distance matrix.

    Neighbor counts include the trajectory itself.  Clusters are seeded from
    cores in ascending id order and fully expanded one at a time, so a border
    trajectory joins the first cluster that reaches it.
    """
    if min_pts < 2:
        raise ConfigError(f"min_pts must be >= 2, got {min_pts}")
    ids = sorted(ids)
    id_set = set(ids)

    def neighbors(a: int) -> list[int]:
        return [b for b in ids if b in id_set and dist.get(a, b) <= epsilon]

    NOISE = -1
    label: dict[int, int] = {}
    clusters: list[set[int]] = []
    for a in ids:
        if a in label:
            continue
        nbrs = neighbors(a)
        if len(nbrs) < min_pts:
            label[a] = NOISE
            continue
        cid = len(clusters)
        clusters.append(set())
        seeds = deque(nbrs)
        label[a] = cid
        clusters[cid].add(a)
        while seeds:
            b = seeds.popleft()
            if label.get(b) == NOISE:
                label[b] = cid  # border point claimed by this cluster
                clusters[cid].add(b)
                continue
            if b in label:
                continue
            label[b] = cid
            clusters[cid].add(b)
            bn = neighbors(b)
            if len(bn) >= min_pts:
                seeds.extend(bn)
    noise = {a for a, l in label.items() if l == NOISE}
    return clusters, noise


def _merge_into_nearest(leftover: list[int], clusters: list[set[int]],
                        dist: DistanceMatrix) -> None:
    # fewer leftovers than k: absorb each into the closest existing cluster
    for a in sorted(leftover):
        best = None
        for ci, members in enumerate(clusters):
            d = min(dist.get(a, b) for b in sorted(members))
            if best is None or d < best[0]:
                best = (d, ci)
        clusters[best[1]].add(a)


def adaptive_dbscan(
    trajectories: list[Trajectory],
    dist: DistanceMatrix,
    cfg: DbscanConfig,
) -> list[Cluster]:
    """Grow the neighborhood radius until every cluster has >= k members.

    Each round runs the density clustering with ``min_pts = k``; clusters of
    size >= k are kept, everything else (noise plus undersized clusters) is
    recycled with an enlarged radius.  Once fewer than ``2k`` trajectories
    remain they are lumped into one final cluster.
    """
    ids = sorted(t.id for t in trajectories)
    if len(ids) < cfg.k:
        raise InfeasibleAnonymityError(
            f"{len(ids)} trajectories cannot satisfy k = {cfg.k}"
        )
    offdiag = dist.offdiagonal(ids)
    top = cfg.top_epsilon if cfg.top_epsilon is not None else float(offdiag.max())
    if cfg.epsilon0 is not None:
        eps = cfg.epsilon0
    else:
        positive = offdiag[offdiag > 0]
        eps = float(np.quantile(positive, 0.002)) if positive.size else 1.0
    out: list[set[int]] = []
    remaining = ids
    round_no = 0
    while True:
        clusters, noise = dbscan_core(remaining, dist, eps, cfg.k)
        recycled: set[int] = set(noise)
        for c in clusters:
            if len(c) >= cfg.k:
                out.append(c)
            else:
                recycled |= c
        remaining = sorted(recycled)
        if not remaining:
            break
        if len(remaining) < 2 * cfg.k or eps >= top:
            if len(remaining) >= cfg.k or not out:
                out.append(set(remaining))
            else:
                _merge_into_nearest(remaining, out, dist)
            break
        round_no += 1
        q = float(np.quantile(
            dist.offdiagonal(remaining),
            min(cfg.quantile_step * round_no, 0.9),
        ))
        eps = min(max(eps * 1.1, q), top)
    return [Cluster(member_ids=frozenset(c)) for c in out]


def iterative_kmeans(
    trajectories: list[Trajectory],
    trees: tuple[GridTree, GridTree],
    k: int,
    seed: int = 0,
    max_iter: int = 50,
) -> list[Cluster]:
    """k'-means over trajectories with alignment loss as the distance.

    Starts with ``floor(n / k)`` randomly seeded centers, assigns each
    trajectory to the center of minimal alignment loss, and replaces each
    center with the progressive merge of its members until the assignment
    stops changing.  Undersized clusters are dissolved and their members
    re-clustered among themselves until every cluster reaches size ``k``.
    """
    if k < 2:
        raise ConfigError(f"anonymity parameter k must be >= 2, got {k}")
    if len(trajectories) < k:
        raise InfeasibleAnonymityError(
            f"{len(trajectories)} trajectories cannot satisfy k = {k}"
        )
    by_id = {t.id: lift(t) for t in trajectories}
    rng = np.random.default_rng(seed)
    pool = sorted(by_id)
    final: list[tuple[set[int], GenTrajectory]] = []
    while pool:
        if len(pool) < k and final:
            # too few to form a new cluster: absorb into the nearest center
            for tid in pool:
                losses = [dsa_loss(by_id[tid], c, trees) for _, c in final]
                final[int(np.argmin(losses))][0].add(tid)
            break
        n_clusters = max(1, len(pool) // k)
        chosen = sorted(rng.choice(len(pool), size=n_clusters, replace=False))
        centers = [by_id[pool[i]] for i in chosen]
        groups: list[list[int]] = []
        prev_partition = None
        for _ in range(max_iter):
            buckets: list[list[int]] = [[] for _ in centers]
            for tid in pool:
                losses = [dsa_loss(by_id[tid], c, trees) for c in centers]
                buckets[int(np.argmin(losses))].append(tid)
            groups = [g for g in buckets if g]  # empty centers are dropped
            partition = tuple(tuple(g) for g in groups)
            if partition == prev_partition:
                break
            prev_partition = partition
            centers = [psa([by_id[t] for t in g], trees)[0] for g in groups]
        next_pool: list[int] = []
        for g in groups:
            if len(g) >= k:
                final.append((set(g), psa([by_id[t] for t in g], trees)[0]))
            else:
                next_pool.extend(g)
        pool = sorted(next_pool)
    return [Cluster(member_ids=frozenset(members)) for members, _ in final]


def generalize_clusters(
    clusters: list[Cluster],
    trajectories: list[Trajectory],
    trees: tuple[GridTree, GridTree],
) -> tuple[list[Cluster], float]:
    """Fill each cluster's merged representative; returns the summed loss."""
    by_id = {t.id: t for t in trajectories}
    total = 0.0
    filled = []
    for c in clusters:
        rep, loss = psa([by_id[i] for i in sorted(c.member_ids)], trees)
        filled.append(Cluster(member_ids=c.member_ids, representative=rep,
                              gen_loss=loss))
        total += loss
    return filled, total


@dataclass(frozen=True)
class AnonRecord:
    pseudonym: int
    trajectory: GenTrajectory


def anonymize(clusters: list[Cluster], k: int) -> list[AnonRecord]:
    """One published record per original trajectory, pseudonymized.

    Records within a cluster share the cluster representative, so each
    published value appears at least ``k`` times.
    """
    for c in clusters:
        if len(c.member_ids) < k:
            raise InfeasibleAnonymityError(
                f"cluster of size {len(c.member_ids)} violates k = {k}"
            )
        if c.representative is None:
            raise ValueError("clusters must be generalized before publication")
    records = []
    pseudonym = 0
    for c in sorted(clusters, key=lambda c: min(c.member_ids)):
        for _ in sorted(c.member_ids):
            records.append(AnonRecord(pseudonym, c.representative))
            pseudonym += 1
    return records


def write_published_csv(records: list[AnonRecord],
                        trees: tuple[GridTree, GridTree], fp) -> None:
    """Published dataset CSV with per-axis generalized interval bounds."""
    lon_tree, lat_tree = trees
    fp.write("pseudonym,seq,x_node,y_node,lon_lo,lon_hi,lat_lo,lat_hi\n")
    for rec in records:
        for seq, p in enumerate(rec.trajectory.points):
            lon_lo, lon_hi = lon_tree.node_interval(p.x_node)
            lat_lo, lat_hi = lat_tree.node_interval(p.y_node)
            fp.write(
                f"{rec.pseudonym},{seq},{p.x_node},{p.y_node},"
                f"{lon_lo!r},{lon_hi!r},{lat_lo!r},{lat_hi!r}\n"
            )
