"""Re-identification adversary simulation.

The adversary knows, per user, a small ordered sample of points observed on
that user's true trajectory.  An attack succeeds when exactly one published
record is consistent with the sample, i.e. the observed leaf pairs embed
order-preservingly into the record with every observation covered by the
record point's generalized nodes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .align import GenTrajectory, lift
from .clustering import AnonRecord
from .data import Trajectory
from .grid import is_ancestor

Observation = tuple[int, int]  # (longitude leaf, latitude leaf)


@dataclass(frozen=True)
class AttackKnowledge:
    observations: dict[str, list[Observation]]  # user id -> sampled points
    sample_size: int
    seed: int


@dataclass(frozen=True)
class AttackReport:
    per_user: dict[str, int]  # 1 iff the user was re-identified
    success_count: int
    success_rate: float
    sample_size: int
    seed: int

    def to_json(self, k: int | None = None) -> str:
        payload = {
            "k": k,
            "sample_size": self.sample_size,
            "seed": self.seed,
            "success_rate": self.success_rate,
            "per_user": [
                {"user_id": u, "reidentified": c}
                for u, c in sorted(self.per_user.items())
            ],
        }
        return json.dumps(payload, indent=2)


def sample_knowledge(trajectories: list[Trajectory], sample_size: int,
                     seed: int = 0) -> AttackKnowledge:
    """Sample an order-preserving subsequence of real points per user.

    A user split over several trajectories is observed within a single one,
    picked at random, so the attack target stays well-defined.
    """
    if sample_size < 1:
        raise ValueError(f"sample_size must be >= 1, got {sample_size}")
    rng = np.random.default_rng(seed)
    by_user: dict[str, list[Trajectory]] = {}
    for t in trajectories:
        by_user.setdefault(t.user_id, []).append(t)
    observations: dict[str, list[Observation]] = {}
    for user in sorted(by_user):
        candidates = sorted(by_user[user], key=lambda t: t.id)
        target = candidates[rng.integers(len(candidates))]
        reals = target.real_points()
        size = min(sample_size, len(reals))
        idx = np.sort(rng.choice(len(reals), size=size, replace=False))
        observations[user] = [(reals[i].x_leaf, reals[i].y_leaf) for i in idx]
    return AttackKnowledge(observations=observations,
                           sample_size=sample_size, seed=seed)


def matches(record: GenTrajectory, observed: list[Observation]) -> bool:
    """True iff the observations embed, in order, into the record.

    Greedy left-to-right matching: each observed leaf pair must be covered
    by some record point (both its nodes ancestors of the observed leaves)
    at a strictly advancing position.
    """
    pos = 0
    points = record.points
    for x_leaf, y_leaf in observed:
        while pos < len(points) and not (
            is_ancestor(points[pos].x_node, x_leaf)
            and is_ancestor(points[pos].y_node, y_leaf)
        ):
            pos += 1
        if pos == len(points):
            return False
        pos += 1
    return True


def records_from_trajectories(trajectories: list[Trajectory]) -> list[AnonRecord]:
    """View an un-anonymized dataset as publishable records (leaves as-is)."""
    return [AnonRecord(i, lift(t)) for i, t in enumerate(trajectories)]


def evaluate(records: list[AnonRecord],
             knowledge: AttackKnowledge) -> AttackReport:
    """Per-user re-identification bits: 1 iff exactly one record matches."""
    per_user: dict[str, int] = {}
    for user, observed in knowledge.observations.items():
        hits = sum(1 for rec in records if matches(rec.trajectory, observed))
        per_user[user] = 1 if hits == 1 else 0
    count = sum(per_user.values())
    rate = count / len(per_user) if per_user else 0.0
    return AttackReport(per_user=per_user, success_count=count,
                        success_rate=rate, sample_size=knowledge.sample_size,
                        seed=knowledge.seed)
