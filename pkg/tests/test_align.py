import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trajanon.align import (
    GenPoint,
    GenTrajectory,
    dsa,
    dsa_loss,
    lift,
    pairwise_distance,
    psa,
)
from trajanon.data import BoundingBox, Trajectory, quantize
from trajanon.grid import ROOT, is_ancestor

from oracles import monotone_alignment_loss

BOX = BoundingBox(0.0, 8.0, 0.0, 8.0)
TREES = BOX.trees(3)  # leaves 8..15 on both axes


def gen(cells):
    """Generalized trajectory from (x_node, y_node) pairs."""
    return GenTrajectory(points=[GenPoint(x, y) for x, y in cells],
                         member_ids=frozenset({0}))


def traj(tid, cells):
    t = BOX.trees(3)
    pts = [quantize(x + 0.5, y + 0.5, t) for x, y in cells]
    return Trajectory(tid, f"u{tid}", pts)


def test_lift():
    t = traj(7, [(0, 0), (3, 5)])
    g = lift(t)
    assert g.member_ids == frozenset({7})
    assert g.points[0] == GenPoint(8, 8)
    assert g.points[1] == GenPoint(11, 13)


def test_gen_trajectory_validation():
    with pytest.raises(ValueError):
        GenTrajectory(points=[], member_ids=frozenset({0}))
    with pytest.raises(ValueError):
        GenTrajectory(points=[GenPoint(8, 8)], member_ids=frozenset())


def test_dsa_identical_trajectories_cost_zero():
    g = gen([(8, 8), (10, 12), (15, 15)])
    res = dsa(g, g, TREES)
    assert res.loss == 0.0
    assert [(p.x_node, p.y_node) for p in res.merged.points] == \
        [(8, 8), (10, 12), (15, 15)]


def test_dsa_single_points():
    # siblings on both axes: lift each axis by one level, twice
    res = dsa(gen([(8, 8)]), gen([(9, 9)]), TREES)
    assert res.loss == 4.0
    assert res.merged.points == [GenPoint(4, 4)]
    # opposite corners: generalizing costs 12, two suppressions also 12
    res = dsa(gen([(8, 8)]), gen([(15, 15)]), TREES)
    assert res.loss == 12.0


def test_dsa_prefers_suppression_when_cheaper():
    # lengths 2 vs 1: one point must be suppressed whatever happens
    res = dsa(gen([(8, 8), (15, 15)]), gen([(8, 8)]), TREES)
    assert res.loss == 6.0
    assert res.merged.points == [GenPoint(8, 8), GenPoint(ROOT, ROOT)]


def test_dsa_merged_length_is_max_length():
    p = gen([(8, 8), (9, 9), (10, 10)])
    q = gen([(12, 12)])
    res = dsa(p, q, TREES)
    assert len(res.merged) == 3
    assert res.merged.member_ids == p.member_ids | q.member_ids


def test_dsa_accepts_raw_trajectories():
    a, b = traj(0, [(0, 0), (1, 1)]), traj(1, [(0, 0), (1, 2)])
    res = dsa(a, b, TREES)
    assert res.merged.member_ids == frozenset({0, 1})
    assert res.loss == dsa_loss(a, b, TREES)


def test_dsa_loss_agrees_with_dsa():
    rng = np.random.default_rng(11)
    for _ in range(200):
        p = gen([(int(a), int(b)) for a, b in rng.integers(8, 16, (rng.integers(1, 6), 2))])
        q = gen([(int(a), int(b)) for a, b in rng.integers(8, 16, (rng.integers(1, 6), 2))])
        assert dsa(p, q, TREES).loss == dsa_loss(p, q, TREES)


def test_dsa_validates_nodes():
    bad = gen([(99, 8)])
    with pytest.raises(ValueError):
        dsa(bad, gen([(8, 8)]), TREES)
    with pytest.raises(ValueError):
        dsa_loss(gen([(8, 8)]), bad, TREES)


def test_pairwise_distance_alias():
    assert pairwise_distance is dsa_loss


def test_merge_covers_both_members():
    """Every input point must sit under the merged point at its position."""
    rng = np.random.default_rng(3)
    for _ in range(100):
        p = gen([(int(a), int(b)) for a, b in rng.integers(8, 16, (rng.integers(1, 5), 2))])
        q = gen([(int(a), int(b)) for a, b in rng.integers(8, 16, (rng.integers(1, 5), 2))])
        merged = dsa(p, q, TREES).merged
        for member in (p, q):
            pos = 0
            for pt in member.points:
                while not (is_ancestor(merged.points[pos].x_node, pt.x_node)
                           and is_ancestor(merged.points[pos].y_node, pt.y_node)):
                    pos += 1
                pos += 1


leaf = st.integers(min_value=8, max_value=15)
gen_traj = st.lists(st.tuples(leaf, leaf), min_size=1, max_size=5).map(gen)


@settings(max_examples=60, deadline=None)
@given(gen_traj, gen_traj)
def test_dsa_loss_symmetric(p, q):
    assert dsa_loss(p, q, TREES) == dsa_loss(q, p, TREES)


@settings(max_examples=60, deadline=None)
@given(gen_traj)
def test_dsa_loss_identity_and_nonnegative(p):
    assert dsa_loss(p, p, TREES) == 0.0
    other = gen([(8, 8)])
    assert dsa_loss(p, other, TREES) >= 0.0


@settings(max_examples=60, deadline=None)
@given(gen_traj, gen_traj)
def test_dsa_loss_matches_brute_force(p, q):
    expected = monotone_alignment_loss(
        [(pt.x_node, pt.y_node) for pt in p.points],
        [(pt.x_node, pt.y_node) for pt in q.points],
        3, 3,
    )
    assert dsa_loss(p, q, TREES) == expected


def test_psa_single_member_is_identity():
    g = gen([(8, 9), (14, 12)])
    merged, loss = psa([g], TREES)
    assert loss == 0.0
    assert merged.points == g.points


def test_psa_identical_members_cost_zero():
    ts = [traj(i, [(0, 0), (5, 5)]) for i in range(4)]
    merged, loss = psa(ts, TREES)
    assert loss == 0.0
    assert merged.member_ids == frozenset({0, 1, 2, 3})


def test_psa_orders_longest_first():
    short = traj(0, [(0, 0)])
    long = traj(1, [(0, 0), (1, 1), (2, 2)])
    merged, _ = psa([short, long], TREES)
    assert len(merged) == 3  # the base is the longest member


def test_psa_merge_covers_all_members():
    rng = np.random.default_rng(5)
    members = [
        Trajectory(i, f"u{i}", [
            quantize(float(x) + 0.5, float(y) + 0.5, TREES)
            for x, y in rng.integers(0, 8, (rng.integers(1, 6), 2))
        ])
        for i in range(6)
    ]
    merged, loss = psa(members, TREES)
    assert loss >= 0.0
    assert merged.member_ids == frozenset(range(6))
    for t in members:
        pos = 0
        for pt in lift(t).points:
            while not (is_ancestor(merged.points[pos].x_node, pt.x_node)
                       and is_ancestor(merged.points[pos].y_node, pt.y_node)):
                pos += 1
            pos += 1


def test_psa_empty_cluster():
    with pytest.raises(ValueError):
        psa([], TREES)
