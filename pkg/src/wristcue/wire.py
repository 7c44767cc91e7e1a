"""Bit-exact serial framing for the 12-motor wristband driver.

Frame layout (17 bytes, this repository's wire ABI):

    offset  0   SOF   0xA5
    offset  1   VER   0x01
    offset  2   SEQ   0..255, wraps
    offset  3   D0..D11  12 PWM duty bytes, motor A..L
    offset 15   CHK   XOR of bytes 1..14 (version, seq, duties)
    offset 16   EOF   0x5A

Constants were chosen for trivial microcontroller-side validation; there
is no acknowledgment channel (fire-and-forget at <= 100 frames/s, well
within ERM actuation inertia).  The default port settings are 115200 baud
8N1.  This module also ingests accelerometer calibration sweeps into
CalibrationTable rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import BinaryIO, Iterable

from .actuators import CalibrationTable, voltage_to_duty
from .cues import TICK_S, CueTimeline

SOF = 0xA5
EOF = 0x5A
VERSION = 0x01
FRAME_LEN = 17

DEFAULT_BAUD = 115200  # 8N1

CALIBRATION_CSV_HEADER = "voltage_v,amplitude_ms2,frequency_hz"


class FrameError(ValueError):
    pass


class BadSof(FrameError):
    pass


class BadEof(FrameError):
    pass


class BadChecksum(FrameError):
    pass


class BadVersion(FrameError):
    pass


class ParseError(ValueError):
    pass


class NonMonotoneVoltage(ParseError):
    pass


@dataclass(frozen=True)
class DriveFrame:
    seq: int
    duties: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "seq", self.seq % 256)
        if len(self.duties) != 12:
            raise ValueError("a drive frame carries exactly 12 duty bytes")
        if any(not 0 <= d <= 255 for d in self.duties):
            raise ValueError("duties must be bytes 0..255")


def _checksum(version: int, seq: int, duties) -> int:
    x = version ^ seq
    for d in duties:
        x ^= d
    return x


def encode_frame(frame: DriveFrame) -> bytes:
    """DriveFrame -> 17 wire bytes."""
    body = bytes([VERSION, frame.seq, *frame.duties])
    return bytes([SOF]) + body + bytes([_checksum(VERSION, frame.seq, frame.duties), EOF])


def decode_frame(raw: bytes) -> DriveFrame:
    """17 wire bytes -> validated DriveFrame.

    Every single-byte corruption of a valid frame raises exactly one of
    BadSof / BadEof / BadVersion / BadChecksum; a frame is never silently
    wrong.  Truncated input is a framing (EOF) error.
    """
    if len(raw) != FRAME_LEN:
        raise BadEof(f"expected {FRAME_LEN} bytes, got {len(raw)}")
    if raw[0] != SOF:
        raise BadSof(f"start byte {raw[0]:#04x} != {SOF:#04x}")
    if raw[16] != EOF:
        raise BadEof(f"end byte {raw[16]:#04x} != {EOF:#04x}")
    if raw[1] != VERSION:
        raise BadVersion(f"version {raw[1]:#04x} != {VERSION:#04x}")
    seq, duties = raw[2], tuple(raw[3:15])
    if raw[15] != _checksum(raw[1], seq, duties):
        raise BadChecksum(f"checksum {raw[15]:#04x} != {_checksum(raw[1], seq, duties):#04x}")
    return DriveFrame(seq=seq, duties=duties)


# ---------------------------------------------------------------------------
# Timeline streaming
# ---------------------------------------------------------------------------

def stream_timeline(timeline: CueTimeline, rate_hz: float = 100.0,
                    start_seq: int = 0) -> list[tuple[float, DriveFrame]]:
    """Timeline -> (send time, frame) pairs, one per drive-change tick.

    The port rate must cover the tick rate (>= 1/tick = 100 Hz) so every
    change can be emitted on time.  Sequence numbers increment mod 256.
    """
    if rate_hz < 1.0 / TICK_S:
        raise ValueError(f"rate must be >= {1.0 / TICK_S:.0f} Hz to cover the tick grid")
    out: list[tuple[float, DriveFrame]] = []
    seq = start_seq % 256
    for f in timeline.frames:
        duties = tuple(voltage_to_duty(v) for v in f.drives)
        out.append((f.t_s, DriveFrame(seq=seq, duties=duties)))
        seq = (seq + 1) % 256
    return out


class MockPort:
    """File-backed stand-in for a serial port; frames land verbatim."""

    def __init__(self, sink: BinaryIO):
        self._sink = sink

    def write(self, data: bytes) -> int:
        return self._sink.write(data)

    def flush(self) -> None:
        self._sink.flush()


def write_frames(port, frames: Iterable[tuple[float, DriveFrame]]) -> int:
    """Write encoded frames to a port-like object; returns the frame count."""
    n = 0
    for _, frame in frames:
        port.write(encode_frame(frame))
        n += 1
    port.flush()
    return n


def read_frames(data: bytes) -> list[DriveFrame]:
    """Split a byte capture back into frames (length must divide evenly)."""
    if len(data) % FRAME_LEN:
        raise BadEof(f"capture length {len(data)} not a multiple of {FRAME_LEN}")
    return [
        decode_frame(data[i:i + FRAME_LEN]) for i in range(0, len(data), FRAME_LEN)
    ]


# ---------------------------------------------------------------------------
# Calibration ingestion
# ---------------------------------------------------------------------------

def ingest_calibration(text: str) -> CalibrationTable:
    """Accelerometer sweep CSV -> validated calibration table.

    Header must be exactly `voltage_v,amplitude_ms2,frequency_hz`; voltages
    must already be strictly increasing (a shuffled sweep is rejected
    rather than silently resorted).
    """
    lines = [ln.strip() for ln in text.split("\n") if ln.strip()]
    if not lines or lines[0] != CALIBRATION_CSV_HEADER:
        raise ParseError(f"expected header {CALIBRATION_CSV_HEADER!r}")
    rows: list[tuple[float, float, float]] = []
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        if len(parts) != 3:
            raise ParseError(f"line {lineno}: expected 3 columns, got {len(parts)}")
        try:
            rows.append((float(parts[0]), float(parts[1]), float(parts[2])))
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
    if len(rows) < 2:
        raise ParseError("calibration needs at least two rows")
    volts = [r[0] for r in rows]
    if any(b <= a for a, b in zip(volts, volts[1:])):
        raise NonMonotoneVoltage("voltages must be strictly increasing")
    try:
        return CalibrationTable(rows=tuple(rows))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
