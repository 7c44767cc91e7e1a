"""The five cue patterns, rendered and decoded back.

Encodes each cue to its tick-aligned timeline, draws a terminal strip
chart of which motors are on when, and runs the machine decoder on the
stripped timeline to show the round trip.
"""

from wristcue import CueCategory, GuidanceConfig, Tier, decode, encode, timeline_to_csv

cfg = GuidanceConfig()

CUES = [
    ("move_to 20 deg, medium", CueCategory.move_to(20.0, Tier.MEDIUM), 2.1),
    ("move_to 15 deg, close", CueCategory.move_to(15.0, Tier.CLOSE), 2.1),
    ("move_up", CueCategory.move_up(), 2.1),
    ("move_down", CueCategory.move_down(), 2.1),
    ("pause", CueCategory.pause(), 2.1),
    ("arrived", CueCategory.arrived(), 2.1),
]


def strip_chart(timeline, width=70):
    """One row per motor, '#' where it is driven."""
    span = timeline.duration_s
    rows = []
    for i, lab in enumerate("ABCDEFGHIJKL"):
        cells = []
        for c in range(width):
            t = span * c / width
            cells.append("#" if timeline.drives_at(t)[i] > 0 else ".")
        rows.append(f"  {lab} |{''.join(cells)}|")
    return "\n".join(rows)


for name, cue, duration in CUES:
    timeline = encode(cue, duration, cfg)
    print(f"\n=== {name}  ({timeline.duration_s:.1f} s, "
          f"{len(timeline.frames)} change frames) ===")
    print(strip_chart(timeline))
    decoded, confidence = decode(timeline.without_category(), cfg)
    print(f"  decoder: {decoded.token()}  (confidence {confidence:.2f})")

print("\nCSV head of the first timeline:")
print("\n".join(timeline_to_csv(encode(CUES[0][1], 2.1, cfg)).split("\n")[:4]))
