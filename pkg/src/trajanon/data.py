"""Trajectory data model and GPS log ingestion.

Two raw input layouts are supported: Geolife ``.plt`` files (6 header lines,
then ``lat,lon,flag,altitude,days,date,time`` rows) and taxi logs
(``id,datetime,lon,lat`` rows).  Raw streams are cut to a bounding box,
quantized onto the per-axis grid trees, and exchanged on disk as the
canonical CSV ``traj_id,user_id,seq,lon,lat,is_real``.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from datetime import datetime, timezone

from .errors import BoundsError, ConfigError, EmptyTrajectoryError, ParseError
from .grid import GridTree

PLT_HEADER_LINES = 6

CANONICAL_CSV_HEADER = "traj_id,user_id,seq,lon,lat,is_real"


@dataclass(frozen=True)
class RawPoint:
    lat: float
    lon: float
    timestamp: float  # seconds since epoch, used for ordering only

    def __post_init__(self):
        if not (math.isfinite(self.lat) and math.isfinite(self.lon)):
            raise ValueError("non-finite coordinates")


@dataclass(frozen=True)
class TrajPoint:
    x_leaf: int  # leaf on the longitude tree
    y_leaf: int  # leaf on the latitude tree
    lon: float
    lat: float
    is_real: bool = True


@dataclass
class Trajectory:
    id: int
    user_id: str
    points: list[TrajPoint]

    def __post_init__(self):
        if not self.points:
            raise ValueError(f"trajectory {self.id} has no points")

    def __len__(self) -> int:
        return len(self.points)

    def real_points(self) -> list[TrajPoint]:
        return [p for p in self.points if p.is_real]


@dataclass(frozen=True)
class BoundingBox:
    lon_min: float
    lon_max: float
    lat_min: float
    lat_max: float

    def __post_init__(self):
        if not (self.lon_min < self.lon_max and self.lat_min < self.lat_max):
            raise ConfigError(f"degenerate bounding box {self}")

    def contains(self, lon: float, lat: float) -> bool:
        return (
            self.lon_min <= lon <= self.lon_max
            and self.lat_min <= lat <= self.lat_max
        )

    @property
    def diagonal(self) -> float:
        return math.hypot(self.lon_max - self.lon_min, self.lat_max - self.lat_min)

    def trees(self, height: int) -> tuple[GridTree, GridTree]:
        """(longitude tree, latitude tree) of the given height over this box."""
        return (
            GridTree(self.lon_min, self.lon_max, height),
            GridTree(self.lat_min, self.lat_max, height),
        )


#: Experiment region used throughout the demos (a patch of Beijing).
DEFAULT_BBOX = BoundingBox(116.300000, 116.316000, 39.989500, 40.000000)


def _epoch(date_s: str, time_s: str, lineno: int) -> float:
    try:
        dt = datetime.strptime(f"{date_s} {time_s}", "%Y-%m-%d %H:%M:%S")
    except ValueError as exc:
        raise ParseError(f"bad date/time {date_s!r} {time_s!r}", line=lineno) from exc
    return dt.replace(tzinfo=timezone.utc).timestamp()


def parse_plt(text: str) -> list[RawPoint]:
    """Parse one Geolife .plt file; the 6 header lines are skipped."""
    lines = text.splitlines()
    if len(lines) <= PLT_HEADER_LINES:
        raise EmptyTrajectoryError("no data rows after the 6 header lines")
    points = []
    for lineno, line in enumerate(lines[PLT_HEADER_LINES:], PLT_HEADER_LINES + 1):
        if not line.strip():
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) < 7:
            raise ParseError(f"expected 7 fields, got {len(fields)}", line=lineno)
        try:
            lat, lon = float(fields[0]), float(fields[1])
        except ValueError as exc:
            raise ParseError(f"bad coordinate in {line!r}", line=lineno) from exc
        points.append(RawPoint(lat=lat, lon=lon, timestamp=_epoch(fields[5], fields[6], lineno)))
    if not points:
        raise EmptyTrajectoryError("no data rows after the 6 header lines")
    return points


def parse_taxi_log(text: str) -> list[tuple[str, RawPoint]]:
    """Parse taxi-log rows ``id,datetime,lon,lat``; empty input gives []."""
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != 4:
            raise ParseError(f"expected 4 fields, got {len(fields)}", line=lineno)
        taxi_id, stamp, lon_s, lat_s = fields
        try:
            lon, lat = float(lon_s), float(lat_s)
        except ValueError as exc:
            raise ParseError(f"bad coordinate in {line!r}", line=lineno) from exc
        try:
            dt = datetime.strptime(stamp, "%Y-%m-%d %H:%M:%S")
        except ValueError as exc:
            raise ParseError(f"bad datetime {stamp!r}", line=lineno) from exc
        ts = dt.replace(tzinfo=timezone.utc).timestamp()
        rows.append((taxi_id, RawPoint(lat=lat, lon=lon, timestamp=ts)))
    return rows


def quantize(lon: float, lat: float, trees: tuple[GridTree, GridTree],
             is_real: bool = True) -> TrajPoint:
    lon_tree, lat_tree = trees
    return TrajPoint(
        x_leaf=lon_tree.leaf_of(lon),
        y_leaf=lat_tree.leaf_of(lat),
        lon=lon,
        lat=lat,
        is_real=is_real,
    )


def build_dataset(
    points_by_user: dict[str, list[RawPoint]],
    bbox: BoundingBox,
    trees: tuple[GridTree, GridTree],
    min_len: int = 2,
) -> list[Trajectory]:
    """Cut each user's stream to the box and quantize the kept runs.

    A point falling outside ``bbox`` splits the stream: the runs of in-box
    points on either side become separate trajectories.  Runs shorter than
    ``min_len`` are dropped.  Fresh sequential ids are assigned.
    """
    out: list[Trajectory] = []
    next_id = 0
    for user_id in sorted(points_by_user):
        stream = sorted(points_by_user[user_id], key=lambda p: p.timestamp)
        run: list[TrajPoint] = []
        for rp in stream:
            if bbox.contains(rp.lon, rp.lat):
                run.append(quantize(rp.lon, rp.lat, trees))
            else:
                if len(run) >= min_len:
                    out.append(Trajectory(next_id, user_id, run))
                    next_id += 1
                run = []
        if len(run) >= min_len:
            out.append(Trajectory(next_id, user_id, run))
            next_id += 1
    return out


def write_trajectories_csv(trajectories: list[Trajectory], fp) -> None:
    """Write the canonical trajectory CSV (UTF-8, LF line endings)."""
    fp.write(CANONICAL_CSV_HEADER + "\n")
    for tr in trajectories:
        for seq, p in enumerate(tr.points):
            fp.write(
                f"{tr.id},{tr.user_id},{seq},{p.lon!r},{p.lat!r},{int(p.is_real)}\n"
            )


def trajectories_to_csv(trajectories: list[Trajectory]) -> str:
    buf = io.StringIO()
    write_trajectories_csv(trajectories, buf)
    return buf.getvalue()


def read_trajectories_csv(text: str, trees: tuple[GridTree, GridTree]) -> list[Trajectory]:
    """Read the canonical trajectory CSV back, re-quantizing onto ``trees``."""
    lines = text.splitlines()
    if not lines or lines[0].strip() != CANONICAL_CSV_HEADER:
        raise ParseError(f"expected header {CANONICAL_CSV_HEADER!r}", line=1)
    by_id: dict[int, tuple[str, list[TrajPoint]]] = {}
    order: list[int] = []
    for lineno, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != 6:
            raise ParseError(f"expected 6 fields, got {len(fields)}", line=lineno)
        try:
            traj_id = int(fields[0])
            seq = int(fields[2])
            lon, lat = float(fields[3]), float(fields[4])
            is_real = bool(int(fields[5]))
        except ValueError as exc:
            raise ParseError(f"bad field in {line!r}", line=lineno) from exc
        try:
            point = quantize(lon, lat, trees, is_real=is_real)
        except BoundsError as exc:
            raise ParseError(str(exc), line=lineno) from exc
        if traj_id not in by_id:
            by_id[traj_id] = (fields[1], [])
            order.append(traj_id)
        user_id, pts = by_id[traj_id]
        if seq != len(pts):
            raise ParseError(f"out-of-order seq {seq}", line=lineno)
        pts.append(point)
    return [Trajectory(tid, by_id[tid][0], by_id[tid][1]) for tid in order]
