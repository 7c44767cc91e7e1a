"""The desk-scale targeting experiment, simulated.

108 targets (36 directions x 3 radial zones), three feedback conditions,
12 sampled targets per condition per simulated participant.  Agents are
synthetic: a cue follower that only hears the wristband, a direct-visual
agent with Gaussian perception error, and a combined agent that uses
vision to get close and haptics to finish.
"""

from wristcue import run_experiment
from wristcue.harness import aggregate

result = run_experiment(participants=6, seed=42)

print(f"{len(result.records)} trials "
      f"({len({r.participant_id for r in result.records})} participants x 36)\n")

print("end-point deviation by condition (mm):")
for row in aggregate(result.records, "condition", "deviation_mm"):
    print(f"  {row.group:>16s}  mean {row.mean:6.2f}  sd {row.sd:5.2f}  n={row.n}")

print("\ntime to target by zone (s):")
for row in aggregate(result.records, "zone", "time_s"):
    print(f"  {row.group:>16s}  mean {row.mean:6.2f}  sd {row.sd:5.2f}  n={row.n}")

print("\nmanifest (reproduces this run byte-exactly):")
for line in result.manifest.strip().split("\n")[:10]:
    print(f"  {line}")
print("  ...")
