"""End-to-end anonymization pipeline and its machine-readable reports.

Stages: ingest -> optional partition preprocessing -> pairwise distance
matrix -> clustering (density-based or iterative k'-means) -> progressive
generalization -> published dataset -> re-identification attack evaluation.
Every stage is timed and all randomness derives from one master seed.
"""

from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import partition as part
from .attack import AttackReport, evaluate, sample_knowledge
from .clustering import (
    AnonRecord,
    Cluster,
    DbscanConfig,
    adaptive_dbscan,
    anonymize,
    build_distance_matrix,
    generalize_clusters,
    iterative_kmeans,
    write_published_csv,
)
from .data import (
    DEFAULT_BBOX,
    BoundingBox,
    Trajectory,
    build_dataset,
    parse_plt,
    parse_taxi_log,
    read_trajectories_csv,
)
from .errors import ConfigError, TrajAnonError

ALGO_DBSCAN = "dbscan"
ALGO_KMEANS = "kmeans"


@dataclass(frozen=True)
class RunConfig:
    bbox: BoundingBox = DEFAULT_BBOX
    height: int = 10
    k: int = 2
    partition: bool = True
    d: Optional[float] = None  # auxiliary spacing; default diagonal / 256
    m: int = 27
    algo: str = ALGO_DBSCAN
    epsilon0: Optional[float] = None
    sample_sizes: tuple[int, ...] = (1, 2, 3, 5)
    seed: int = 0
    threads: int = 1
    min_len: int = 2
    input_path: Optional[str] = None
    input_format: Optional[str] = None  # plt-dir | taxi-log | csv
    out_dir: Optional[str] = None
    dump_labels: bool = False

    def __post_init__(self):
        if self.k < 2:
            raise ConfigError(f"k must be >= 2, got {self.k}")
        if self.algo not in (ALGO_DBSCAN, ALGO_KMEANS):
            raise ConfigError(f"unknown algorithm {self.algo!r}")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")

    def spacing(self) -> float:
        return self.d if self.d is not None else self.bbox.diagonal / 256.0


@dataclass
class RunReport:
    k: int
    algo: str
    partition: bool
    seed: int
    threads: int
    total_information_loss: float
    cluster_count: int
    avg_loss_per_cluster: float
    traj_count_before_partition: int
    traj_count_after_partition: int
    stage_seconds: dict[str, float]
    attack_success_rates: dict[int, float]

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "algo": self.algo,
            "partition": self.partition,
            "seed": self.seed,
            "threads": self.threads,
            "total_information_loss": self.total_information_loss,
            "cluster_count": self.cluster_count,
            "avg_loss_per_cluster": self.avg_loss_per_cluster,
            "traj_count_before_partition": self.traj_count_before_partition,
            "traj_count_after_partition": self.traj_count_after_partition,
            "stage_seconds": {k: round(v, 3) for k, v in self.stage_seconds.items()},
            "attack_success_rates": {
                str(s): r for s, r in self.attack_success_rates.items()
            },
        }


@dataclass
class RunResult:
    """Full pipeline output: the report plus the published artifacts."""

    report: RunReport
    clusters: list[Cluster]
    records: list[AnonRecord]
    attack_reports: list[AttackReport]
    working_set: list[Trajectory]  # the dataset that was clustered


def _stage_seeds(master: int) -> dict[str, int]:
    children = np.random.SeedSequence(master).spawn(3)
    names = ("partition", "clustering", "attack")
    return {n: int(c.generate_state(1)[0]) for n, c in zip(names, children)}


@contextmanager
def _stage(name: str, timings: dict[str, float]):
    start = time.perf_counter()
    try:
        yield
    except TrajAnonError as exc:
        raise type(exc)(f"[{name}] {exc}") from exc
    finally:
        timings[name] = timings.get(name, 0.0) + time.perf_counter() - start


def load_input(path: str, fmt: str, bbox: BoundingBox, trees,
               min_len: int = 2) -> list[Trajectory]:
    """Ingest raw GPS logs or a canonical trajectory CSV."""
    p = Path(path)
    if fmt == "plt-dir":
        by_user: dict[str, list] = {}
        for f in sorted(p.rglob("*.plt")):
            rel = f.relative_to(p)
            user = rel.parts[0] if len(rel.parts) > 1 else f.stem
            by_user.setdefault(user, []).extend(parse_plt(f.read_text()))
        return build_dataset(by_user, bbox, trees, min_len=min_len)
    if fmt == "taxi-log":
        files = sorted(p.rglob("*.txt")) if p.is_dir() else [p]
        by_user = {}
        for f in files:
            for taxi_id, point in parse_taxi_log(f.read_text()):
                by_user.setdefault(taxi_id, []).append(point)
        return build_dataset(by_user, bbox, trees, min_len=min_len)
    if fmt == "csv":
        return read_trajectories_csv(p.read_text(), trees)
    raise ConfigError(f"unknown input format {fmt!r}")


def run(cfg: RunConfig, trajectories: Optional[list[Trajectory]] = None) -> RunResult:
    """Execute the full pipeline; writes output files when out_dir is set."""
    trees = cfg.bbox.trees(cfg.height)
    seeds = _stage_seeds(cfg.seed)
    timings: dict[str, float] = {
        "partition": 0.0, "distance_matrix": 0.0,
        "clustering": 0.0, "generalization": 0.0,
    }

    if trajectories is None:
        if cfg.input_path is None or cfg.input_format is None:
            raise ConfigError("no input dataset given")
        with _stage("ingest", timings):
            trajectories = load_input(
                cfg.input_path, cfg.input_format, cfg.bbox, trees, cfg.min_len
            )
    count_before = len(trajectories)

    labels = None
    densified = None
    working = trajectories
    if cfg.partition:
        with _stage("partition", timings):
            pcfg = part.PartitionConfig(
                d=cfg.spacing(), m=cfg.m, seed=seeds["partition"]
            )
            densified, labels, working = part.partition_dataset(
                trajectories, pcfg, trees
            )

    dist = None
    if cfg.algo == ALGO_DBSCAN:
        with _stage("distance_matrix", timings):
            dist = build_distance_matrix(working, trees, threads=cfg.threads)

    with _stage("clustering", timings):
        if cfg.algo == ALGO_DBSCAN:
            clusters = adaptive_dbscan(
                working, dist,
                DbscanConfig(k=cfg.k, epsilon0=cfg.epsilon0,
                             seed=seeds["clustering"]),
            )
        else:
            clusters = iterative_kmeans(
                working, trees, cfg.k, seed=seeds["clustering"]
            )

    with _stage("generalization", timings):
        clusters, total_loss = generalize_clusters(clusters, working, trees)
        records = anonymize(clusters, cfg.k)

    attack_reports = []
    rates: dict[int, float] = {}
    for i, size in enumerate(cfg.sample_sizes):
        knowledge = sample_knowledge(working, size, seed=seeds["attack"] + i)
        rep = evaluate(records, knowledge)
        attack_reports.append(rep)
        rates[size] = rep.success_rate

    report = RunReport(
        k=cfg.k,
        algo=cfg.algo,
        partition=cfg.partition,
        seed=cfg.seed,
        threads=cfg.threads,
        total_information_loss=total_loss,
        cluster_count=len(clusters),
        avg_loss_per_cluster=total_loss / len(clusters),
        traj_count_before_partition=count_before,
        traj_count_after_partition=len(working),
        stage_seconds=timings,
        attack_success_rates=rates,
    )
    result = RunResult(report=report, clusters=clusters, records=records,
                       attack_reports=attack_reports, working_set=working)

    if cfg.out_dir is not None:
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "published.csv", "w", newline="\n") as fp:
            write_published_csv(records, trees, fp)
        with open(out / "attack.json", "w") as fp:
            json.dump(
                [json.loads(r.to_json(k=cfg.k)) for r in attack_reports], fp,
                indent=2,
            )
        with open(out / "report.json", "w") as fp:
            json.dump(report.to_dict(), fp, indent=2)
        if cfg.dump_labels and labels is not None:
            with open(out / "labels.csv", "w", newline="\n") as fp:
                part.write_labels_csv(densified, labels, fp)
    return result


def compare(report_a: RunReport, report_b: RunReport) -> dict[str, float]:
    """Reduction percentages 100 * (A - B) / A between two runs of equal k."""
    if report_a.k != report_b.k:
        raise ConfigError(
            f"cannot compare runs with k={report_a.k} and k={report_b.k}"
        )

    def reduction(a: float, b: float) -> float:
        return 100.0 * (a - b) / a if a else 0.0

    return {
        "total_loss_reduction_pct": reduction(
            report_a.total_information_loss, report_b.total_information_loss
        ),
        "per_cluster_loss_reduction_pct": reduction(
            report_a.avg_loss_per_cluster, report_b.avg_loss_per_cluster
        ),
    }
