from __future__ import annotations

import io
from functools import reduce

import numpy as np
import pytest

from wristcue.config import GuidanceConfig
from wristcue.cues import CueCategory, encode
from wristcue.wire import (
    CALIBRATION_CSV_HEADER,
    FRAME_LEN,
    BadChecksum,
    BadEof,
    BadSof,
    BadVersion,
    DriveFrame,
    FrameError,
    MockPort,
    NonMonotoneVoltage,
    ParseError,
    decode_frame,
    encode_frame,
    ingest_calibration,
    read_frames,
    stream_timeline,
    write_frames,
)

CFG = GuidanceConfig()


def xor_oracle(payload: bytes) -> int:
    """Independent checksum: XOR-fold of the body bytes."""
    return reduce(lambda a, b: a ^ b, payload, 0)


# ---------------------------------------------------------------------------
# Frame codec
# ---------------------------------------------------------------------------

def test_all_zero_frame_bytes():
    raw = encode_frame(DriveFrame(seq=0, duties=(0,) * 12))
    assert raw == bytes([0xA5, 0x01, 0x00] + [0x00] * 12 + [0x01, 0x5A])
    assert raw[15] == xor_oracle(raw[1:15]) == 0x01


def test_full_drive_frame_checksum():
    # duties 153 (= 3.0 V duty), seq 7: twelve 0x99 XORs cancel pairwise,
    # leaving 0x01 ^ 0x07 = 0x06
    raw = encode_frame(DriveFrame(seq=7, duties=(153,) * 12))
    assert raw == bytes([0xA5, 0x01, 0x07] + [0x99] * 12 + [0x06, 0x5A])
    assert raw[15] == xor_oracle(raw[1:15]) == 0x06


def test_round_trip_random_frames_10k():
    rng = np.random.default_rng(99)
    for _ in range(10_000):
        frame = DriveFrame(
            seq=int(rng.integers(0, 256)),
            duties=tuple(int(d) for d in rng.integers(0, 256, size=12)),
        )
        assert decode_frame(encode_frame(frame)) == frame


def test_exhaustive_single_byte_corruption_always_detected():
    frame = DriveFrame(seq=42, duties=tuple(range(12)))
    raw = encode_frame(frame)
    assert len(raw) == FRAME_LEN
    for pos in range(FRAME_LEN):
        for value in range(256):
            if value == raw[pos]:
                continue
            corrupt = bytes(raw[:pos]) + bytes([value]) + bytes(raw[pos + 1:])
            with pytest.raises((BadSof, BadEof, BadChecksum, BadVersion)):
                decode_frame(corrupt)


def test_error_kinds_are_distinguishable():
    raw = bytearray(encode_frame(DriveFrame(seq=1, duties=(5,) * 12)))
    sof = bytes([raw[0] ^ 0xFF]) + bytes(raw[1:])
    with pytest.raises(BadSof):
        decode_frame(sof)
    eof = bytes(raw[:16]) + bytes([raw[16] ^ 0xFF])
    with pytest.raises(BadEof):
        decode_frame(eof)
    ver = bytes(raw[:1]) + bytes([0x02]) + bytes(raw[2:])
    with pytest.raises(BadVersion):
        decode_frame(ver)
    chk = bytes(raw[:15]) + bytes([raw[15] ^ 0x01]) + bytes(raw[16:])
    with pytest.raises(BadChecksum):
        decode_frame(chk)


def test_truncated_input_is_framing_error():
    raw = encode_frame(DriveFrame(seq=9, duties=(1,) * 12))
    with pytest.raises(FrameError):
        decode_frame(raw[:10])
    with pytest.raises(FrameError):
        decode_frame(b"")


def test_seq_wraps_modulo_256():
    assert DriveFrame(seq=256, duties=(0,) * 12).seq == 0
    assert DriveFrame(seq=300, duties=(0,) * 12).seq == 44


def test_duty_byte_validation():
    with pytest.raises(ValueError):
        DriveFrame(seq=0, duties=(0,) * 11)
    with pytest.raises(ValueError):
        DriveFrame(seq=0, duties=(256,) + (0,) * 11)


# ---------------------------------------------------------------------------
# Timeline streaming
# ---------------------------------------------------------------------------

def test_stream_arrived_timeline():
    timeline = encode(CueCategory.arrived(), 3.0, CFG)
    frames = stream_timeline(timeline)
    assert len(frames) == 2
    t0, first = frames[0]
    t1, last = frames[1]
    assert t0 == 0.0 and first.duties == (153,) * 12  # 3.0 V -> duty 153
    assert t1 == pytest.approx(3.0) and last.duties == (0,) * 12


def test_stream_empty_timeline():
    from wristcue.cues import CueTimeline
    assert stream_timeline(CueTimeline(frames=(), duration_s=0.0)) == []


def test_stream_seq_increments_mod_256():
    timeline = encode(CueCategory.move_up(), 120.0, CFG)  # 480 frames
    frames = stream_timeline(timeline, start_seq=250)
    seqs = [f.seq for _, f in frames]
    assert len(seqs) > 256
    assert all(b == (a + 1) % 256 for a, b in zip(seqs, seqs[1:]))


def test_stream_rejects_slow_rate():
    timeline = encode(CueCategory.pause(), 1.0, CFG)
    with pytest.raises(ValueError):
        stream_timeline(timeline, rate_hz=50.0)


def test_mock_port_round_trip_reproduces_timeline():
    timeline = encode(CueCategory.pause(), 1.0, CFG)
    sink = io.BytesIO()
    n = write_frames(MockPort(sink), stream_timeline(timeline))
    assert n == len(timeline.frames)
    decoded = read_frames(sink.getvalue())
    # duties map back through the voltage grid: v = duty / 255 * 5
    for frame, original in zip(decoded, timeline.frames):
        volts = tuple(d / 255.0 * 5.0 for d in frame.duties)
        assert volts == pytest.approx(original.drives, abs=5.0 / 255.0)


# ---------------------------------------------------------------------------
# Calibration ingestion
# ---------------------------------------------------------------------------

def test_ingest_two_anchor_default():
    table = ingest_calibration(
        f"{CALIBRATION_CSV_HEADER}\n1.3,0.3,150\n3.0,1.3,150\n"
    )
    assert table.rows == ((1.3, 0.3, 150.0), (3.0, 1.3, 150.0))


def test_ingest_rejects_unsorted():
    with pytest.raises(NonMonotoneVoltage):
        ingest_calibration(f"{CALIBRATION_CSV_HEADER}\n3.0,1.3,150\n1.3,0.3,150\n")


def test_ingest_rejects_bad_header_and_fields():
    with pytest.raises(ParseError):
        ingest_calibration("volts,amp,freq\n1,2,3\n")
    with pytest.raises(ParseError):
        ingest_calibration(f"{CALIBRATION_CSV_HEADER}\n1.3,x,150\n3.0,1.3,150\n")
    with pytest.raises(ParseError):
        ingest_calibration(f"{CALIBRATION_CSV_HEADER}\n1.3,0.3,150\n")


def test_ingest_sweep_segment_count():
    rows = "\n".join(f"{1.0 + 0.1 * i:.1f},{0.05 * i:.2f},150" for i in range(20))
    table = ingest_calibration(f"{CALIBRATION_CSV_HEADER}\n{rows}\n")
    assert len(table.rows) == 20
    assert len(table.rows) - 1 == 19  # piecewise-linear segments
