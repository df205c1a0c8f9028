import io

import numpy as np
import pytest

from trajanon.align import dsa_loss
from trajanon.clustering import (
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
from trajanon.data import BoundingBox, Trajectory, quantize
from trajanon.errors import ConfigError, InfeasibleAnonymityError
from trajanon.synthetic import random_dataset

from oracles import density_clusters

BOX = BoundingBox(0.0, 8.0, 0.0, 8.0)
TREES = BOX.trees(3)


def traj(tid, cells):
    pts = [quantize(x + 0.5, y + 0.5, TREES) for x, y in cells]
    return Trajectory(tid, f"u{tid}", pts)


def matrix_from(values):
    values = np.asarray(values, dtype=np.float64)
    return DistanceMatrix(ids=tuple(range(len(values))), values=values)


def test_distance_matrix_lookup():
    dm = matrix_from([[0, 1, 2], [1, 0, 3], [2, 3, 0]])
    assert dm.get(0, 2) == 2.0
    assert dm.get(2, 1) == 3.0
    assert list(dm.row(1)) == [1.0, 0.0, 3.0]
    assert sorted(dm.offdiagonal()) == [1.0, 2.0, 3.0]
    assert list(dm.offdiagonal(ids=[0, 2])) == [2.0]


def test_build_distance_matrix_matches_dsa_loss():
    data = random_dataset(TREES, n_traj=8, min_len=1, max_len=6, seed=1)
    dm = build_distance_matrix(data, TREES)
    assert dm.ids == tuple(t.id for t in data)
    for a in data:
        for b in data:
            assert dm.get(a.id, b.id) == dsa_loss(a, b, TREES)
    assert (dm.values == dm.values.T).all()
    assert (np.diag(dm.values) == 0).all()


def test_build_distance_matrix_parallel_agrees():
    data = random_dataset(TREES, n_traj=10, min_len=1, max_len=6, seed=2)
    serial = build_distance_matrix(data, TREES, threads=1)
    parallel = build_distance_matrix(data, TREES, threads=2)
    assert (serial.values == parallel.values).all()


def test_build_distance_matrix_needs_two():
    data = random_dataset(TREES, n_traj=1, seed=0)
    with pytest.raises(ValueError):
        build_distance_matrix(data, TREES)


def test_dbscan_core_two_blobs():
    # 0-1-2 mutually close, 3-4 close, 5 isolated
    big = 100.0
    values = np.full((6, 6), big)
    np.fill_diagonal(values, 0.0)
    for a, b in [(0, 1), (0, 2), (1, 2), (3, 4)]:
        values[a, b] = values[b, a] = 1.0
    dm = matrix_from(values)
    clusters, noise = dbscan_core(list(range(6)), dm, epsilon=2.0, min_pts=2)
    assert clusters == [{0, 1, 2}, {3, 4}]
    assert noise == {5}


def test_dbscan_core_border_goes_to_first_cluster():
    # 2 is within epsilon of cores 0 and 4 but is not a core itself
    values = np.full((7, 7), 9.0)
    np.fill_diagonal(values, 0.0)
    for a, b, d in [(0, 1, 1), (0, 5, 1), (1, 5, 1), (0, 2, 2),  # group A
                    (3, 4, 1), (4, 6, 1), (2, 4, 2)]:            # group B
        values[a, b] = values[b, a] = d
    dm = matrix_from(values)
    clusters, noise = dbscan_core(list(range(7)), dm, epsilon=2.0, min_pts=4)
    assert clusters == [{0, 1, 2, 5}, {3, 4, 6}]
    assert noise == set()


def test_dbscan_core_min_pts_validation():
    dm = matrix_from([[0, 1], [1, 0]])
    with pytest.raises(ConfigError):
        dbscan_core([0, 1], dm, epsilon=1.0, min_pts=1)


def test_dbscan_core_against_oracle():
    rng = np.random.default_rng(77)
    for case in range(100):
        n = int(rng.integers(2, 9))
        raw = rng.integers(1, 10, size=(n, n)).astype(float)
        values = np.triu(raw, 1)
        values = values + values.T
        dm = matrix_from(values)
        eps = float(rng.integers(1, 10))
        min_pts = int(rng.integers(2, 5))
        got = dbscan_core(list(range(n)), dm, eps, min_pts)
        want = density_clusters(list(range(n)), dm.get, eps, min_pts)
        assert got == want, f"case {case}: eps={eps} min_pts={min_pts}\n{values}"


def test_dbscan_config_validation():
    with pytest.raises(ConfigError):
        DbscanConfig(k=1)
    with pytest.raises(ConfigError):
        DbscanConfig(k=2, epsilon0=0.0)


def test_adaptive_dbscan_cluster_sizes():
    data = random_dataset(TREES, n_traj=25, min_len=1, max_len=8, seed=5)
    dm = build_distance_matrix(data, TREES)
    for k in (2, 3, 5):
        clusters = adaptive_dbscan(data, dm, DbscanConfig(k=k, seed=5))
        sizes = [len(c.member_ids) for c in clusters]
        assert min(sizes) >= k
        assert sum(sizes) == len(data)
        members = set().union(*(c.member_ids for c in clusters))
        assert members == {t.id for t in data}


def test_adaptive_dbscan_infeasible():
    data = random_dataset(TREES, n_traj=3, min_len=1, max_len=4, seed=0)
    dm = build_distance_matrix(data, TREES)
    with pytest.raises(InfeasibleAnonymityError):
        adaptive_dbscan(data, dm, DbscanConfig(k=4))


def test_adaptive_dbscan_deterministic():
    data = random_dataset(TREES, n_traj=20, min_len=1, max_len=8, seed=8)
    dm = build_distance_matrix(data, TREES)
    a = adaptive_dbscan(data, dm, DbscanConfig(k=3, seed=8))
    b = adaptive_dbscan(data, dm, DbscanConfig(k=3, seed=8))
    assert [c.member_ids for c in a] == [c.member_ids for c in b]


def test_adaptive_dbscan_explicit_epsilon0():
    data = random_dataset(TREES, n_traj=12, min_len=1, max_len=6, seed=4)
    dm = build_distance_matrix(data, TREES)
    clusters = adaptive_dbscan(data, dm, DbscanConfig(k=2, epsilon0=0.5))
    assert min(len(c.member_ids) for c in clusters) >= 2


def test_iterative_kmeans_cluster_sizes():
    data = random_dataset(TREES, n_traj=25, min_len=1, max_len=8, seed=5)
    for k in (2, 3, 5):
        clusters = iterative_kmeans(data, TREES, k=k, seed=5)
        sizes = [len(c.member_ids) for c in clusters]
        assert min(sizes) >= k
        assert sum(sizes) == len(data)


def test_iterative_kmeans_validation():
    data = random_dataset(TREES, n_traj=6, min_len=1, max_len=4, seed=1)
    with pytest.raises(ConfigError):
        iterative_kmeans(data, TREES, k=1)
    with pytest.raises(InfeasibleAnonymityError):
        iterative_kmeans(data, TREES, k=7)


def test_iterative_kmeans_deterministic():
    data = random_dataset(TREES, n_traj=18, min_len=1, max_len=6, seed=3)
    a = iterative_kmeans(data, TREES, k=3, seed=3)
    b = iterative_kmeans(data, TREES, k=3, seed=3)
    assert [c.member_ids for c in a] == [c.member_ids for c in b]


def test_generalize_clusters():
    data = [traj(0, [(0, 0), (1, 1)]), traj(1, [(0, 0), (1, 1)]),
            traj(2, [(7, 7)]), traj(3, [(6, 6)])]
    clusters = [Cluster(member_ids=frozenset({0, 1})),
                Cluster(member_ids=frozenset({2, 3}))]
    filled, total = generalize_clusters(clusters, data, TREES)
    assert filled[0].gen_loss == 0.0  # identical members merge for free
    assert filled[0].representative is not None
    assert total == sum(c.gen_loss for c in filled)
    assert filled[1].representative.member_ids == frozenset({2, 3})


def test_anonymize_counts_and_errors():
    data = [traj(i, [(i, i)]) for i in range(4)]
    clusters, _ = generalize_clusters(
        [Cluster(member_ids=frozenset({0, 1})),
         Cluster(member_ids=frozenset({2, 3}))], data, TREES)
    records = anonymize(clusters, k=2)
    assert [r.pseudonym for r in records] == [0, 1, 2, 3]
    assert records[0].trajectory is records[1].trajectory
    with pytest.raises(InfeasibleAnonymityError):
        anonymize([Cluster(member_ids=frozenset({0}))], k=2)
    with pytest.raises(ValueError):
        anonymize([Cluster(member_ids=frozenset({0, 1}))], k=2)  # not generalized


def test_write_published_csv():
    data = [traj(0, [(0, 0)]), traj(1, [(0, 1)])]
    clusters, _ = generalize_clusters(
        [Cluster(member_ids=frozenset({0, 1}))], data, TREES)
    records = anonymize(clusters, k=2)
    buf = io.StringIO()
    write_published_csv(records, TREES, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "pseudonym,seq,x_node,y_node,lon_lo,lon_hi,lat_lo,lat_hi"
    assert len(lines) == 3
    # both records publish the same generalized value
    assert lines[1].split(",")[2:] == lines[2].split(",")[2:]
