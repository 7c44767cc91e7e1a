from __future__ import annotations

import json
import socket
import threading

import pytest

from wristcue.config import GuidanceConfig
from wristcue.controller import GuidanceSession
from wristcue.cues import BOTTOM_ARC
from wristcue.geometry import OperatingPlane, ToolState
from wristcue.service import ServerSession, ServiceConfig, serve

CFG = GuidanceConfig()


def make_session(condition="haptics_only", participant="p1", **kwargs):
    session = ServerSession(ServiceConfig(cfg=CFG, **kwargs))
    replies, close = session.on_message(
        {"type": "hello", "participant": participant, "condition": condition}
    )
    assert not close
    return session, replies


def tool_update(t_s, x, y, z):
    return {"type": "tool_update", "t_s": t_s, "x_mm": x, "y_mm": y, "z_mm": z}


# ---------------------------------------------------------------------------
# Protocol state machine (transport-free)
# ---------------------------------------------------------------------------

def test_hello_starts_a_trial():
    session, replies = make_session()
    assert len(replies) == 1
    start = replies[0]
    assert start["type"] == "start_trial"
    assert start["trial"] == 0
    assert start["zone"] in ("T1", "T2", "T3")
    assert 0.0 <= start["direction_deg"] < 360.0


def test_haptics_only_never_reveals_target_coordinates():
    session, replies = make_session("haptics_only")
    assert "target_mm" not in replies[0]
    # a full trial's worth of messages never contains coordinates either
    for k in range(30):
        replies, _ = session.on_message(tool_update(k / 60.0, 1.0 * k, 0.0, 0.0))
        for msg in replies:
            assert "target_mm" not in msg
    replies, _ = session.on_message({"type": "confirm"})
    for msg in replies:
        if msg["type"] != "start_trial":
            assert "target_mm" not in msg


def test_ar_conditions_carry_target():
    for cond in ("ar_only", "ar_plus_haptics"):
        _, replies = make_session(cond)
        assert len(replies[0]["target_mm"]) == 3


def test_unknown_condition_errors_and_closes():
    session = ServerSession(ServiceConfig(cfg=CFG))
    replies, close = session.on_message(
        {"type": "hello", "participant": "p1", "condition": "telepathy"}
    )
    assert close
    assert replies[0]["type"] == "error"


def test_message_before_hello_errors():
    session = ServerSession(ServiceConfig(cfg=CFG))
    replies, close = session.on_message(tool_update(0.0, 0, 0, 0))
    assert close and replies[0]["type"] == "error"


def test_tool_update_echoes_time_and_reports_state():
    session, _ = make_session("haptics_only")
    replies, close = session.on_message(tool_update(0.25, 0.0, 0.0, 0.0))
    assert not close
    cue_state = replies[0]
    assert cue_state["type"] == "cue_state"
    assert cue_state["t_s"] == 0.25
    assert len(cue_state["motors"]) == 12
    assert all(0.0 <= m <= 1.0 for m in cue_state["motors"])
    assert cue_state["tier"] in ("far", "medium", "close")
    assert cue_state["distance_mm"] > 0


def test_out_of_plane_stream_lights_bottom_arc():
    session, _ = make_session("haptics_only")
    replies, _ = session.on_message(tool_update(0.0, 0.0, 0.0, 6.0))  # +6 mm
    motors = replies[0]["motors"]
    lit = {lab for lab, m in zip("ABCDEFGHIJKL", motors) if m > 0.0}
    assert lit == BOTTOM_ARC
    assert replies[0]["state"] == "correct_down"


def test_ar_only_motors_always_dark():
    session, _ = make_session("ar_only")
    for k in range(20):
        replies, _ = session.on_message(tool_update(k / 60.0, 0.0, 0.0, 6.0))
        assert replies[0]["motors"] == [0.0] * 12


def test_stale_timestamp_errors():
    session, _ = make_session()
    session.on_message(tool_update(1.0, 0, 0, 0))
    replies, close = session.on_message(tool_update(0.5, 0, 0, 0))
    assert close and replies[0]["type"] == "error"
    assert "stale" in replies[0]["message"]


def test_confirm_scores_and_starts_next_trial():
    session, replies = make_session("ar_only")
    target = replies[0]["target_mm"]
    # walk the tip to 9 mm short of the target center along x
    session.on_message(tool_update(0.0, 0.0, 0.0, 0.0))
    session.on_message(tool_update(1.0, target[0] - 9.0, target[1], target[2]))
    replies, close = session.on_message({"type": "confirm"})
    assert not close
    result, nxt = replies
    assert result["type"] == "trial_result"
    assert result["deviation_mm"] == 0.0  # 9 mm is inside the 10 mm radius
    assert result["time_s"] == pytest.approx(1.0)
    assert nxt["type"] == "start_trial" and nxt["trial"] == 1
    assert session.result_rows and session.result_rows[0].endswith(",ok")


def test_confirm_far_away_reports_distance_minus_radius():
    session, replies = make_session("ar_only")
    target = replies[0]["target_mm"]
    session.on_message(tool_update(0.5, target[0] - 25.0, target[1], target[2]))
    replies, _ = session.on_message({"type": "confirm"})
    assert replies[0]["deviation_mm"] == pytest.approx(15.0)


def test_cue_state_equals_run_session_on_same_stream():
    # the service adds no behavior: replaying the same tool stream through
    # a bare controller yields the same state/drive sequence
    session, replies = make_session("haptics_only", participant="replay")
    start = replies[0]
    plane = OperatingPlane.xy()
    # reconstruct the target from the announced direction/zone
    radius = {"T3": 30.0, "T2": 60.0, "T1": 90.0}[start["zone"]]
    target = plane.point_at(start["direction_deg"], radius)

    stream = [(k / 60.0, 0.5 * k, 0.2 * k, 0.0) for k in range(120)]
    observed = []
    for t, x, y, z in stream:
        replies, _ = session.on_message(tool_update(t, x, y, z))
        observed.append((replies[0]["state"], tuple(replies[0]["motors"])))

    controller = GuidanceSession(target, plane, CFG)
    for (t, x, y, z), (state_token, motors) in zip(stream, observed):
        state, _ = controller.step(ToolState((x, y, z), t))
        assert state.token() == state_token
        drives = controller.drives_at(t)
        assert tuple(round(v / CFG.interp.v_max, 6) for v in drives) == motors


# ---------------------------------------------------------------------------
# TCP transport
# ---------------------------------------------------------------------------

class Client:
    def __init__(self, port):
        self.sock = socket.create_connection(("127.0.0.1", port), timeout=5)
        self.file = self.sock.makefile("rwb")

    def send(self, msg):
        self.file.write((json.dumps(msg) + "\n").encode())
        self.file.flush()

    def recv(self):
        line = self.file.readline()
        return json.loads(line) if line else None

    def close(self):
        self.file.close()
        self.sock.close()


@pytest.fixture()
def server(tmp_path):
    service = ServiceConfig(cfg=CFG, results_path=str(tmp_path / "results.csv"))
    srv = serve(service, port=0)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    yield srv
    srv.shutdown()
    srv.server_close()


def test_full_trial_over_socket(server, tmp_path):
    client = Client(server.port)
    client.send({"type": "hello", "participant": "sock", "condition": "ar_plus_haptics"})
    start = client.recv()
    assert start["type"] == "start_trial"
    tx, ty, tz = start["target_mm"]
    client.send(tool_update(0.0, 0.0, 0.0, 0.0))
    assert client.recv()["type"] == "cue_state"
    client.send(tool_update(2.0, tx, ty, tz))
    state = client.recv()
    assert state["type"] == "cue_state" and state["state"] == "arrived"
    client.send({"type": "confirm"})
    result = client.recv()
    assert result["type"] == "trial_result" and result["deviation_mm"] == 0.0
    assert client.recv()["type"] == "start_trial"
    client.close()
    # persisted after disconnect
    import time
    for _ in range(50):
        if (tmp_path / "results.csv").exists():
            break
        time.sleep(0.05)
    text = (tmp_path / "results.csv").read_text()
    assert text.startswith("participant,condition,")
    assert "sock,ar_plus_haptics," in text


def test_concurrent_sessions_are_isolated(server):
    clients = []
    for i in range(3):
        c = Client(server.port)
        c.send({"type": "hello", "participant": f"c{i}", "condition": "haptics_only"})
        assert c.recv()["type"] == "start_trial"
        clients.append(c)
    for i, c in enumerate(clients):
        c.send(tool_update(0.0, float(i), 0.0, 0.0))
        assert c.recv()["type"] == "cue_state"
        c.close()


def test_protocol_violation_closes_connection(server):
    client = Client(server.port)
    client.send({"type": "confirm"})
    assert client.recv()["type"] == "error"
    assert client.recv() is None  # server closed
    client.close()
