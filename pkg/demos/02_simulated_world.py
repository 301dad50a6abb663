"""Generate a synthetic season and compare it with its own math.

The simulator is a Markov chain over counts with two pitcher profiles,
so pitch mix, zone rate, and plate-appearance length all have closed
forms. A corpus disagreeing with them would be a bug, not noise.
"""

from collections import Counter

from sabergen.events import in_zone
from sabergen.simulate import analytic_oracle, default_config, simulate

config = default_config(num_games=40, seed=13, postseason_games=2)
games = simulate(config)

n_pa = sum(len(g.plate_appearances) for g in games)
n_pitch = sum(len(pa.pitches) for g in games for pa in g.plate_appearances)
print(f"{len(games)} games, {n_pa} plate appearances, {n_pitch} pitches")

oracle = analytic_oracle(config)
print("\nanalytic values for this configuration:")
print(f"  P(pitch in zone)        {oracle.chain.p_in_zone:.4f}")
print(f"  E[pitches per PA]       {oracle.chain.pitches_per_pa:.4f}")
print(f"  Bayes type accuracy     {oracle.pooled_bayes_type_accuracy:.4f}")
print(f"  majority type accuracy  {oracle.majority_type_accuracy:.4f}")

zone = sum(
    in_zone(p) for g in games for pa in g.plate_appearances for p in pa.pitches
)
print("\nMonte Carlo from the corpus:")
print(f"  P(pitch in zone)        {zone / n_pitch:.4f}")
print(f"  E[pitches per PA]       {n_pitch / n_pa:.4f}")

mix = Counter(
    p.pitch_type.code for g in games for pa in g.plate_appearances for p in pa.pitches
)
print("\npitch mix over both pitchers:")
for code, n in mix.most_common():
    print(f"  {code}  {n / n_pitch:.4f}")

per_pitcher = {}
for g in games:
    for pa in g.plate_appearances:
        per_pitcher.setdefault(pa.pitcher_id, Counter())[
            pa.pitches[0].pitch_type.code
        ] += 0  # touch so both appear
        for p in pa.pitches:
            per_pitcher[pa.pitcher_id][p.pitch_type.code] += 1
print("\narsenals:")
for pid, counts in sorted(per_pitcher.items()):
    total = sum(counts.values())
    desc = ", ".join(f"{c} {n / total:.2f}" for c, n in counts.most_common())
    print(f"  {pid}: {desc}")
