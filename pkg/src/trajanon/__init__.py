"""Trajectory k-anonymization toolkit.

Groups GPS trajectories into clusters of at least k members, generalizes
each cluster onto per-axis binary hierarchies via dynamic-programming
alignment, and scores the published dataset against a re-identification
adversary.  A density-based partition step can preprocess long trajectories
to cut the generalization loss.
"""

from .align import AlignmentResult, GenPoint, GenTrajectory, dsa, dsa_loss, lift, pairwise_distance, psa
from .attack import AttackKnowledge, AttackReport, evaluate, matches, records_from_trajectories, sample_knowledge
from .clustering import (
    AnonRecord,
    Cluster,
    DbscanConfig,
    DistanceMatrix,
    adaptive_dbscan,
    anonymize,
    build_distance_matrix,
    dbscan_core,
    generalize_clusters,
    iterative_kmeans,
    write_published_csv,
)
from .data import (
    DEFAULT_BBOX,
    BoundingBox,
    RawPoint,
    TrajPoint,
    Trajectory,
    build_dataset,
    parse_plt,
    parse_taxi_log,
    quantize,
    read_trajectories_csv,
    write_trajectories_csv,
)
from .errors import (
    BoundsError,
    ConfigError,
    EmptyTrajectoryError,
    InfeasibleAnonymityError,
    ParseError,
    TrajAnonError,
)
from .grid import GridTree, build_tree, depth_of, is_ancestor, lca_of
from .partition import PartitionConfig, densify, kmeans_points, partition_dataset, segment
from .pipeline import RunConfig, RunReport, RunResult, compare, load_input, run

__version__ = "0.1.0"
