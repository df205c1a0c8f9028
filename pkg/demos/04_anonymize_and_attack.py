"""End to end: cluster, generalize, publish, then attack the publication.

Runs the full pipeline twice on the same synthetic road corpus - once with
the partition preprocessing and once without - and shows the published
dataset defeating a re-identification adversary in both cases while the
partitioned run pays far less information loss.
"""

from trajanon import (
    DEFAULT_BBOX,
    RunConfig,
    compare,
    evaluate,
    records_from_trajectories,
    run,
    sample_knowledge,
)
from trajanon.synthetic import road_corpus

HEIGHT = 8
data = road_corpus(DEFAULT_BBOX, DEFAULT_BBOX.trees(HEIGHT), seed=0)
print(f"Input: {len(data)} synthetic road-network trajectories\n")

# How exposed is the raw data?  An adversary who saw 3 points of a user's
# trip checks which original trajectories embed those observations.
raw_records = records_from_trajectories(data)
knowledge = sample_knowledge(data, sample_size=3, seed=0)
baseline = evaluate(raw_records, knowledge)
print(f"Attack on the RAW data (3 observed points per user): "
      f"success rate {baseline.success_rate:.2f}")
print()

common = dict(bbox=DEFAULT_BBOX, height=HEIGHT, k=4, algo="dbscan",
              d=DEFAULT_BBOX.diagonal / 128, sample_sizes=(1, 3, 5), seed=0)

without = run(RunConfig(partition=False, **common), trajectories=data)
with_part = run(RunConfig(partition=True, **common), trajectories=data)

for label, result in [("without partition", without),
                      ("with partition   ", with_part)]:
    r = result.report
    print(f"k={r.k} dbscan {label}: {r.cluster_count} clusters, "
          f"total loss {r.total_information_loss:8.0f} bits, "
          f"avg {r.avg_loss_per_cluster:7.1f} bits/cluster")
    rates = ", ".join(f"{s}->{v:.2f}" for s, v in r.attack_success_rates.items())
    print(f"  attack success by sample size: {rates}")

print()
delta = compare(without.report, with_part.report)
print(f"Partition preprocessing cut the per-cluster loss by "
      f"{delta['per_cluster_loss_reduction_pct']:.1f}%")
print()
print("Every published record shares its generalized trajectory with at")
print("least k-1 others, so no sample of true points ever pins down a")
print("single record: the attack success rate is exactly zero.")
