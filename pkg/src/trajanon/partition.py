"""Density-based trajectory segmentation preprocessing.

Long trajectories are cut along point-density boundaries before
anonymization: auxiliary points are interpolated along each trajectory at a
fixed spacing ``d`` so point density reflects the line geometry, the whole
point set is k-means clustered, and each trajectory is cut wherever two
consecutive points land in different point clusters.  Auxiliary points
survive only as segment endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.cluster import KMeans

from .data import BoundingBox, TrajPoint, Trajectory, quantize
from .errors import ConfigError
from .grid import GridTree


@dataclass(frozen=True)
class PartitionConfig:
    d: float  # auxiliary-point spacing, degrees
    m: int = 27  # number of point clusters
    kmeans_max_iter: int = 300
    seed: int = 0

    def __post_init__(self):
        if self.d <= 0:
            raise ConfigError(f"auxiliary spacing d must be > 0, got {self.d}")
        if self.m < 1:
            raise ConfigError(f"point-cluster count m must be >= 1, got {self.m}")
        if self.kmeans_max_iter < 1:
            raise ConfigError("kmeans_max_iter must be >= 1")


def default_spacing(bbox: BoundingBox) -> float:
    """Default auxiliary spacing: 1/256 of the bounding-box diagonal."""
    return bbox.diagonal / 256.0


def densify(traj: Trajectory, d: float,
            trees: tuple[GridTree, GridTree]) -> Trajectory:
    """Insert auxiliary points every ``d`` degrees along each segment.

    For a consecutive real-point pair separated by Euclidean distance L,
    auxiliaries appear at arc-length offsets d, 2d, ... strictly below L.
    """
    if d <= 0:
        raise ConfigError(f"auxiliary spacing d must be > 0, got {d}")
    points: list[TrajPoint] = [traj.points[0]]
    for a, b in zip(traj.points, traj.points[1:]):
        length = math.hypot(b.lon - a.lon, b.lat - a.lat)
        k = 1
        while k * d < length:
            frac = k * d / length
            lon = a.lon + frac * (b.lon - a.lon)
            lat = a.lat + frac * (b.lat - a.lat)
            points.append(quantize(lon, lat, trees, is_real=False))
            k += 1
        points.append(b)
    return Trajectory(traj.id, traj.user_id, points)


def kmeans_points(trajectories: list[Trajectory],
                  cfg: PartitionConfig) -> dict[int, np.ndarray]:
    """Cluster every point of every trajectory into ``cfg.m`` spatial groups.

    Returns a total labeling: trajectory id -> per-point label array.
    """
    coords = np.array(
        [(p.lon, p.lat) for tr in trajectories for p in tr.points],
        dtype=np.float64,
    )
    if len(coords) < cfg.m:
        raise ConfigError(
            f"{len(coords)} points cannot form {cfg.m} point clusters"
        )
    km = KMeans(
        n_clusters=cfg.m,
        init="k-means++",
        n_init=1,
        max_iter=cfg.kmeans_max_iter,
        random_state=cfg.seed,
    )
    flat = km.fit_predict(coords)
    labels: dict[int, np.ndarray] = {}
    offset = 0
    for tr in trajectories:
        labels[tr.id] = flat[offset:offset + len(tr.points)]
        offset += len(tr.points)
    return labels


def segment(trajectories: list[Trajectory],
            labels: dict[int, np.ndarray]) -> list[Trajectory]:
    """Cut each trajectory at every point-cluster boundary.

    Real points are always kept; an auxiliary point survives only when it
    ends a segment at a cut (or starts the next one).  Output trajectories
    get fresh ids and inherit the source user id.
    """
    out: list[Trajectory] = []
    next_id = 0

    def emit(seg: list[TrajPoint], user_id: str) -> None:
        nonlocal next_id
        out.append(Trajectory(next_id, user_id, seg))
        next_id += 1

    for tr in trajectories:
        lab = labels[tr.id]
        pts = tr.points
        current = [pts[0]]
        for p in range(len(pts) - 1):
            if lab[p] == lab[p + 1]:
                if pts[p + 1].is_real:
                    current.append(pts[p + 1])
            else:
                # an auxiliary cut endpoint was skipped above; restore it
                if not pts[p].is_real and current[-1] is not pts[p]:
                    current.append(pts[p])
                emit(current, tr.user_id)
                current = [pts[p + 1]]
        emit(current, tr.user_id)
    return out


def partition_dataset(
    trajectories: list[Trajectory],
    cfg: PartitionConfig,
    trees: tuple[GridTree, GridTree],
) -> tuple[list[Trajectory], dict[int, np.ndarray], list[Trajectory]]:
    """Densify, point-cluster and segment a whole dataset.

    Returns (densified trajectories, point labeling, segmented trajectories).
    """
    densified = [densify(tr, cfg.d, trees) for tr in trajectories]
    labels = kmeans_points(densified, cfg)
    return densified, labels, segment(densified, labels)


def write_labels_csv(trajectories: list[Trajectory],
                     labels: dict[int, np.ndarray], fp) -> None:
    """Debug dump of the labeled point set, one row per point."""
    fp.write("traj_id,seq,lon,lat,is_real,label\n")
    for tr in trajectories:
        lab = labels[tr.id]
        for seq, p in enumerate(tr.points):
            fp.write(
                f"{tr.id},{seq},{p.lon!r},{p.lat!r},{int(p.is_real)},{lab[seq]}\n"
            )
