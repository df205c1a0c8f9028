import json

import pytest

from trajanon.align import GenPoint, GenTrajectory
from trajanon.attack import (
    AttackKnowledge,
    evaluate,
    matches,
    records_from_trajectories,
    sample_knowledge,
)
from trajanon.clustering import AnonRecord
from trajanon.data import BoundingBox, Trajectory, quantize

BOX = BoundingBox(0.0, 8.0, 0.0, 8.0)
TREES = BOX.trees(3)


def traj(tid, cells, user=None):
    pts = [quantize(x + 0.5, y + 0.5, TREES) for x, y in cells]
    return Trajectory(tid, user or f"u{tid}", pts)


def gen(cells):
    return GenTrajectory(points=[GenPoint(x, y) for x, y in cells],
                         member_ids=frozenset({0}))


def test_matches_exact_leaves():
    record = gen([(8, 8), (10, 12), (15, 15)])
    assert matches(record, [(8, 8)])
    assert matches(record, [(10, 12), (15, 15)])
    assert matches(record, [(8, 8), (10, 12), (15, 15)])
    assert not matches(record, [(9, 9)])
    assert not matches(record, [(15, 15), (8, 8)])  # order violated


def test_matches_generalized_coverage():
    record = gen([(4, 4), (7, 6)])
    # node 4 covers leaves 8 and 9; node 7 covers 14 and 15
    assert matches(record, [(8, 9)])
    assert matches(record, [(9, 8), (15, 12)])
    assert not matches(record, [(10, 8)])  # 10 is under neither 4 nor 7


def test_matches_each_observation_needs_its_own_position():
    record = gen([(4, 4)])
    assert not matches(record, [(8, 8), (9, 9)])  # one point, two observations
    assert matches(gen([(4, 4), (4, 4)]), [(8, 8), (9, 9)])


def test_matches_empty_observation_always_true():
    assert matches(gen([(8, 8)]), [])


def test_sample_knowledge_is_ordered_subsequence():
    data = [traj(0, [(0, 0), (1, 1), (2, 2), (3, 3), (4, 4)])]
    know = sample_knowledge(data, sample_size=3, seed=1)
    obs = know.observations["u0"]
    assert len(obs) == 3
    leaves = [(p.x_leaf, p.y_leaf) for p in data[0].points]
    positions = [leaves.index(o) for o in obs]
    assert positions == sorted(positions)


def test_sample_knowledge_caps_at_real_length():
    data = [traj(0, [(0, 0), (1, 1)])]
    know = sample_knowledge(data, sample_size=10, seed=0)
    assert len(know.observations["u0"]) == 2


def test_sample_knowledge_ignores_auxiliary_points():
    pts = [quantize(0.5, 0.5, TREES),
           quantize(3.5, 3.5, TREES, is_real=False),
           quantize(6.5, 6.5, TREES)]
    data = [Trajectory(0, "u0", pts)]
    know = sample_knowledge(data, sample_size=3, seed=0)
    aux_leaf = (pts[1].x_leaf, pts[1].y_leaf)
    assert aux_leaf not in know.observations["u0"]


def test_sample_knowledge_one_target_per_user():
    data = [traj(0, [(0, 0)], user="shared"), traj(1, [(7, 7)], user="shared")]
    know = sample_knowledge(data, sample_size=1, seed=3)
    assert list(know.observations) == ["shared"]
    assert len(know.observations["shared"]) == 1


def test_sample_knowledge_validation_and_determinism():
    data = [traj(0, [(0, 0), (1, 1)])]
    with pytest.raises(ValueError):
        sample_knowledge(data, sample_size=0)
    a = sample_knowledge(data, sample_size=2, seed=9)
    b = sample_knowledge(data, sample_size=2, seed=9)
    assert a == b


def test_records_from_trajectories():
    data = [traj(0, [(0, 0)]), traj(1, [(1, 1)])]
    records = records_from_trajectories(data)
    assert [r.pseudonym for r in records] == [0, 1]
    assert records[0].trajectory.points == [GenPoint(8, 8)]


def test_evaluate_unique_match_succeeds():
    records = [AnonRecord(0, gen([(8, 8)])), AnonRecord(1, gen([(15, 15)]))]
    know = AttackKnowledge(observations={"a": [(8, 8)]}, sample_size=1, seed=0)
    report = evaluate(records, know)
    assert report.per_user == {"a": 1}
    assert report.success_rate == 1.0


def test_evaluate_ambiguous_match_fails():
    shared = gen([(4, 4)])
    records = [AnonRecord(0, shared), AnonRecord(1, shared)]
    know = AttackKnowledge(observations={"a": [(8, 8)]}, sample_size=1, seed=0)
    report = evaluate(records, know)
    assert report.per_user == {"a": 0}
    assert report.success_rate == 0.0


def test_evaluate_no_match_fails():
    records = [AnonRecord(0, gen([(8, 8)]))]
    know = AttackKnowledge(observations={"a": [(15, 15)]}, sample_size=1, seed=0)
    assert evaluate(records, know).success_rate == 0.0


def test_evaluate_mixed_users():
    records = [AnonRecord(0, gen([(8, 8)])), AnonRecord(1, gen([(7, 7)])),
               AnonRecord(2, gen([(7, 7)]))]
    know = AttackKnowledge(
        observations={"a": [(8, 8)], "b": [(15, 15)]}, sample_size=1, seed=0)
    report = evaluate(records, know)
    # a matches only record 0; b matches the two generalized records
    assert report.per_user == {"a": 1, "b": 0}
    assert report.success_count == 1
    assert report.success_rate == 0.5


def test_evaluate_empty_knowledge():
    report = evaluate([], AttackKnowledge(observations={}, sample_size=1, seed=0))
    assert report.success_rate == 0.0


def test_attack_report_json():
    records = [AnonRecord(0, gen([(8, 8)]))]
    know = AttackKnowledge(observations={"a": [(8, 8)]}, sample_size=1, seed=4)
    payload = json.loads(evaluate(records, know).to_json(k=2))
    assert payload["k"] == 2
    assert payload["sample_size"] == 1
    assert payload["seed"] == 4
    assert payload["success_rate"] == 1.0
    assert payload["per_user"] == [{"user_id": "a", "reidentified": 1}]
