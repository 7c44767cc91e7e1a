"""Driving real hardware: the 17-byte serial frame format.

Streams the arrival cue to a mock port, hexdumps the capture, decodes it
back, and shows that any single flipped byte is caught by the frame
validation rather than reaching the motors.
"""

import io

from wristcue import CueCategory, GuidanceConfig, encode
from wristcue.wire import (
    MockPort,
    decode_frame,
    encode_frame,
    read_frames,
    stream_timeline,
    write_frames,
)

timeline = encode(CueCategory.arrived(), 3.0, GuidanceConfig())
frames = stream_timeline(timeline)

sink = io.BytesIO()
n = write_frames(MockPort(sink), frames)
capture = sink.getvalue()
print(f"streamed {n} frames ({len(capture)} bytes) for the arrival cue\n")

for (t, _), off in zip(frames, range(0, len(capture), 17)):
    raw = capture[off:off + 17]
    print(f"  t={t:4.2f}s  " + " ".join(f"{b:02x}" for b in raw))

decoded = read_frames(capture)
print(f"\ndecoded back: seq={[f.seq for f in decoded]}, "
      f"first duties={decoded[0].duties[:4]}..., last duties={decoded[-1].duties[:4]}...")

print("\nsingle-byte corruption is always detected:")
raw = encode_frame(decoded[0])
for pos in (0, 1, 2, 7, 15, 16):
    corrupt = raw[:pos] + bytes([raw[pos] ^ 0x40]) + raw[pos + 1:]
    try:
        decode_frame(corrupt)
        print(f"  byte {pos:2d}: NOT DETECTED (bug!)")
    except Exception as exc:
        print(f"  byte {pos:2d} flipped -> {type(exc).__name__}")
