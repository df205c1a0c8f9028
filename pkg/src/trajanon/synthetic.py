"""Seeded synthetic trajectory generators for demos and evaluation.

Real GPS corpora cannot ship with the package, so two generators stand in:
small random-walk datasets for correctness checks, and a road-network-like
corpus (noisy copies of Manhattan-style template routes over a street grid)
that reproduces the density structure the clustering algorithms exploit.
"""

from __future__ import annotations

import numpy as np

from .data import BoundingBox, TrajPoint, Trajectory
from .grid import GridTree


def _leaf_center(tree: GridTree, leaf: int) -> float:
    lo, hi = tree.node_interval(leaf)
    return (lo + hi) / 2


def _point(trees: tuple[GridTree, GridTree], ix: int, iy: int) -> TrajPoint:
    lon_tree, lat_tree = trees
    x_leaf = lon_tree.first_leaf + ix
    y_leaf = lat_tree.first_leaf + iy
    return TrajPoint(
        x_leaf=x_leaf,
        y_leaf=y_leaf,
        lon=_leaf_center(lon_tree, x_leaf),
        lat=_leaf_center(lat_tree, y_leaf),
        is_real=True,
    )


def random_dataset(
    trees: tuple[GridTree, GridTree],
    n_traj: int,
    min_len: int = 1,
    max_len: int = 10,
    seed: int = 0,
) -> list[Trajectory]:
    """Random-walk trajectories over the leaf grid, pairwise distinguishable.

    Every trajectory carries one globally unique leaf pair that appears in no
    other trajectory, so no trajectory embeds into another and an adversary
    holding a full trajectory matches exactly one original record.
    """
    lon_tree, lat_tree = trees
    nx, ny = lon_tree.leaf_count, lat_tree.leaf_count
    if n_traj > nx * ny // 2:
        raise ValueError("grid too small for that many distinct trajectories")
    rng = np.random.default_rng(seed)
    cells = rng.choice(nx * ny, size=n_traj, replace=False)
    signatures = {(int(c) % nx, int(c) // nx) for c in cells}
    sig_list = sorted(signatures)
    sig_list = [sig_list[j] for j in rng.permutation(len(sig_list))]

    out = []
    for i in range(n_traj):
        length = int(rng.integers(min_len, max_len + 1))
        ix = int(rng.integers(nx))
        iy = int(rng.integers(ny))
        walk = []
        for _ in range(length):
            while (ix, iy) in signatures:
                ix = (ix + int(rng.integers(1, 4))) % nx
                iy = (iy + int(rng.integers(1, 4))) % ny
            walk.append((ix, iy))
            ix = min(max(ix + int(rng.integers(-3, 4)), 0), nx - 1)
            iy = min(max(iy + int(rng.integers(-3, 4)), 0), ny - 1)
        walk[int(rng.integers(length))] = sig_list[i]
        out.append(Trajectory(i, f"u{i}", [_point(trees, x, y) for x, y in walk]))
    return out


def road_corpus(
    bbox: BoundingBox,
    trees: tuple[GridTree, GridTree],
    n_traj: int = 270,
    n_routes: int = 30,
    copies_frac: float = 0.67,
    grid_lines: int = 9,
    seed: int = 0,
) -> list[Trajectory]:
    """Trajectories walked along a rectangular street grid.

    A ``copies_frac`` share of the corpus consists of jittered, slightly
    truncated copies of ``n_routes`` template routes (commuter-style dense
    groups); the rest are independent one-off walks over the same streets.
    """
    rng = np.random.default_rng(seed)
    lon_tree, lat_tree = trees
    xs = np.linspace(bbox.lon_min, bbox.lon_max, grid_lines + 2)[1:-1]
    ys = np.linspace(bbox.lat_min, bbox.lat_max, grid_lines + 2)[1:-1]
    step = bbox.diagonal / 48  # sampling distance along a route
    jitter = min(lon_tree.leaf_width, lat_tree.leaf_width) * 0.5

    def walk(n_legs: int) -> list[tuple[float, float]]:
        gx = int(rng.integers(grid_lines))
        gy = int(rng.integers(grid_lines))
        waypoints = [(xs[gx], ys[gy])]
        for _ in range(n_legs):
            if rng.random() < 0.5:
                gx = min(max(gx + int(rng.integers(-3, 4)), 0), grid_lines - 1)
            else:
                gy = min(max(gy + int(rng.integers(-3, 4)), 0), grid_lines - 1)
            waypoints.append((xs[gx], ys[gy]))
        pts = [waypoints[0]]
        for (x0, y0), (x1, y1) in zip(waypoints, waypoints[1:]):
            span = np.hypot(x1 - x0, y1 - y0)
            if span == 0:
                continue
            for s in np.arange(step, span, step):
                f = s / span
                pts.append((x0 + f * (x1 - x0), y0 + f * (y1 - y0)))
            pts.append((x1, y1))
        return pts

    def emit(i: int, pts: list[tuple[float, float]]) -> Trajectory:
        points = []
        for lon, lat in pts:
            lon = float(np.clip(lon + rng.normal(0, jitter), bbox.lon_min, bbox.lon_max))
            lat = float(np.clip(lat + rng.normal(0, jitter), bbox.lat_min, bbox.lat_max))
            points.append(TrajPoint(
                x_leaf=lon_tree.leaf_of(lon),
                y_leaf=lat_tree.leaf_of(lat),
                lon=lon,
                lat=lat,
                is_real=True,
            ))
        return Trajectory(i, f"u{i}", points)

    n_copies = int(n_traj * copies_frac)
    templates = [walk(int(rng.integers(3, 7))) for _ in range(n_routes)]
    out = []
    for i in range(n_copies):
        base = templates[i % n_routes]
        drop_head = int(rng.integers(0, 3))
        drop_tail = int(rng.integers(0, 3))
        out.append(emit(i, base[drop_head:len(base) - drop_tail] or base))
    for i in range(n_copies, n_traj):
        out.append(emit(i, walk(int(rng.integers(2, 6)))))
    return out
