"""One closed-loop guidance session, scripted end to end.

A simulated tool starts at the origin, wanders above the operating plane
(triggering a move_down correction and a pause on recovery), then heads
for the target until the arrival vibration fires.  The printed event log
is exactly what a session records; the spliced timeline at the bottom is
what the wristband would have played.
"""

import numpy as np

from wristcue import GuidanceConfig, OperatingPlane, ToolState, run_session
from wristcue.controller import events_to_csv

cfg = GuidanceConfig()
plane = OperatingPlane.xy()
target = (45.0, 0.0, 0.0)

# scripted path: drift up out of the band, recover, then go get the target
rate = 60.0
path = []
for k in range(int(1.5 * rate)):           # rise to +7 mm
    path.append((0.0, 0.0, 7.0 * k / (1.5 * rate)))
for k in range(int(1.5 * rate)):           # settle back onto the plane
    path.append((0.0, 0.0, 7.0 * (1.0 - k / (1.5 * rate))))
for k in range(int(2.0 * rate)):           # hold through the pause
    path.append((0.0, 0.0, 0.0))
for k in range(int(3.0 * rate)):           # straight run at 30 mm/s
    x = min(45.0, 30.0 * k / rate)
    path.append((x, 0.0, 0.0))
for k in range(int(3.5 * rate)):           # hold while the arrival cue plays
    path.append((45.0, 0.0, 0.0))

stream = [ToolState(p, k / rate) for k, p in enumerate(path)]
events, timeline = run_session(stream, target, plane, cfg)

print("state transitions and cues:")
for e in events:
    if e.from_state.token() != e.to_state.token():
        cue = f"  cue={e.cue.token()}" if e.cue else ""
        print(f"  t={e.t_s:6.2f}s  {e.from_state.token():>14s} -> "
              f"{e.to_state.token():<14s}{cue}")

cues = [e.cue.token() for e in events if e.cue is not None]
print(f"\n{len(cues)} cues issued in total; first few: {cues[:5]}")
print(f"spliced timeline: {len(timeline.frames)} frames over "
      f"{timeline.duration_s:.1f} s")

print("\nevent log CSV head:")
print("\n".join(events_to_csv(events).split("\n")[:5]))
