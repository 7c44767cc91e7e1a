"""Live guidance sessions over newline-delimited JSON.

One connection = one participant session.  The client opens with `hello`
(participant id + condition), then for each trial the server sends
`start_trial`, the client streams `tool_update` samples and receives a
`cue_state` per sample, and `confirm` (the foot-pedal stand-in) closes the
trial with a `trial_result`.  Protocol violations get an `error` message
and the connection is closed.

Message fields (all JSON objects, one per line, UTF-8):

  hello        {"type": "hello", "participant": str, "condition":
                "haptics_only" | "ar_only" | "ar_plus_haptics"}
  start_trial  {"type": "start_trial", "trial": int, "direction_deg":
                float, "zone": "T1"|"T2"|"T3", "target_mm": [x, y, z]}
               target_mm is only present in AR-bearing conditions;
               haptics-only clients never see target coordinates.
  tool_update  {"type": "tool_update", "t_s": float, "x_mm": float,
                "y_mm": float, "z_mm": float}   t_s monotone per session
  cue_state    {"type": "cue_state", "t_s": float (echo), "state": str,
                "motors": [12 floats in 0..1, normalized by v_max],
                "distance_mm": float, "tier": "far"|"medium"|"close"}
  confirm      {"type": "confirm"}
  trial_result {"type": "trial_result", "trial": int, "deviation_mm":
                float, "time_s": float}
  error        {"type": "error", "message": str}

The per-sample cue_state is a pure view of the guidance controller: a
client replaying a recorded tool_update stream observes exactly what
run_session computes for that stream.  The service adds no behavior.
"""

from __future__ import annotations

import json
import socketserver
import threading
import zlib
from dataclasses import dataclass, field

import numpy as np

from .config import GuidanceConfig
from .controller import GuidanceSession
from .geometry import DEFAULT_ZONES, OperatingPlane, ToolState
from .harness import RESULTS_CSV_HEADER, Condition, Target, generate_field

PROTOCOL_CONDITIONS = {c.value: c for c in Condition}


@dataclass
class ServiceConfig:
    cfg: GuidanceConfig = field(default_factory=GuidanceConfig)
    plane: OperatingPlane = field(default_factory=OperatingPlane.xy)
    zones: tuple = DEFAULT_ZONES
    seed: int = 0
    trials_per_session: int = 12
    results_path: str | None = None  # append-only CSV, harness row format


class ServerSession:
    """Transport-free protocol state machine for one connection.

    on_message(dict) -> (replies, close).  Kept free of sockets so the
    protocol can be tested (and replayed) directly.
    """

    def __init__(self, service: ServiceConfig):
        self.service = service
        self.participant: str | None = None
        self.condition: Condition | None = None
        self._plan: list[Target] = []
        self._trial_index = -1
        self._controller: GuidanceSession | None = None
        self._target: Target | None = None
        self._trial_t0: float | None = None
        self._last_t: float | None = None
        self._last_tool: ToolState | None = None
        self._rows: list[str] = []

    # -- helpers -------------------------------------------------------------

    def _fail(self, message: str) -> tuple[list[dict], bool]:
        return [{"type": "error", "message": message}], True

    def _start_trial(self) -> dict:
        self._trial_index += 1
        target = self._plan[self._trial_index % len(self._plan)]
        self._target = target
        self._controller = GuidanceSession(
            target.point, self.service.plane, self.service.cfg
        )
        self._trial_t0 = None
        self._last_tool = None
        msg = {
            "type": "start_trial",
            "trial": self._trial_index,
            "direction_deg": target.direction_deg,
            "zone": target.zone.zone.value,
        }
        if self.condition.has_visual:
            msg["target_mm"] = list(target.point)
        return msg

    # -- message dispatch ------------------------------------------------------

    def on_message(self, msg: dict) -> tuple[list[dict], bool]:
        mtype = msg.get("type")
        if self.participant is None:
            if mtype != "hello":
                return self._fail("expected hello")
            return self._on_hello(msg)
        if mtype == "tool_update":
            return self._on_tool_update(msg)
        if mtype == "confirm":
            return self._on_confirm()
        return self._fail(f"unexpected message type {mtype!r}")

    def _on_hello(self, msg: dict) -> tuple[list[dict], bool]:
        condition = PROTOCOL_CONDITIONS.get(msg.get("condition"))
        participant = msg.get("participant")
        if condition is None:
            return self._fail(f"unknown condition {msg.get('condition')!r}")
        if not isinstance(participant, str) or not participant:
            return self._fail("hello needs a participant id")
        self.participant = participant
        self.condition = condition
        field_ = generate_field(self.service.plane, self.service.zones,
                                seed=self.service.seed)
        rng = np.random.default_rng(
            np.random.SeedSequence([self.service.seed, zlib.crc32(participant.encode())])
        )
        picks = rng.choice(len(field_.targets),
                           size=self.service.trials_per_session, replace=False)
        self._plan = [field_.targets[int(i)] for i in picks]
        return [self._start_trial()], False

    def _on_tool_update(self, msg: dict) -> tuple[list[dict], bool]:
        if self._controller is None:
            return self._fail("no active trial")
        try:
            t_s = float(msg["t_s"])
            tip = (float(msg["x_mm"]), float(msg["y_mm"]), float(msg["z_mm"]))
        except (KeyError, TypeError, ValueError):
            return self._fail("malformed tool_update")
        if self._last_t is not None and t_s < self._last_t:
            return self._fail(f"stale timestamp {t_s} < {self._last_t}")
        self._last_t = t_s
        if self._trial_t0 is None:
            self._trial_t0 = t_s
        rel_t = t_s - self._trial_t0
        tool = ToolState(tip, rel_t)
        self._last_tool = tool
        state, _ = self._controller.step(tool)
        v_max = self.service.cfg.interp.v_max
        drives = self._controller.drives_at(rel_t)
        if self.condition is Condition.AR_ONLY:
            motors = [0.0] * 12  # no wristband in the visual-only condition
        else:
            motors = [round(v / v_max, 6) for v in drives]
        dist = _distance(tool.tip, self._target.point)
        return [{
            "type": "cue_state",
            "t_s": t_s,
            "state": state.token(),
            "motors": motors,
            "distance_mm": round(dist, 3),
            "tier": self.service.cfg.tier_of(dist).value,
        }], False

    def _on_confirm(self) -> tuple[list[dict], bool]:
        if self._controller is None:
            return self._fail("no active trial")
        tool = self._last_tool or ToolState(self.service.plane.origin, 0.0)
        endpoint = self._controller.confirm(tool)
        time_s = tool.timestamp
        self._rows.append(
            f"{self.participant},{self.condition.value},"
            f"{self._target.direction_deg:.0f},{self._target.zone.zone.value},"
            f"{endpoint.deviation_mm:.3f},{time_s:.3f},ok"
        )
        result = {
            "type": "trial_result",
            "trial": self._trial_index,
            "deviation_mm": round(endpoint.deviation_mm, 3),
            "time_s": round(time_s, 3),
        }
        return [result, self._start_trial()], False

    @property
    def result_rows(self) -> list[str]:
        return list(self._rows)


# ---------------------------------------------------------------------------
# TCP server
# ---------------------------------------------------------------------------

class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        server: SessionServer = self.server  # type: ignore[assignment]
        session = ServerSession(server.service)
        try:
            for raw in self.rfile:
                line = raw.strip()
                if not line:
                    continue
                try:
                    msg = json.loads(line)
                except json.JSONDecodeError:
                    replies, close = [{"type": "error", "message": "invalid JSON"}], True
                else:
                    replies, close = session.on_message(msg)
                for reply in replies:
                    self.wfile.write((json.dumps(reply) + "\n").encode("utf-8"))
                self.wfile.flush()
                if close:
                    break
        finally:
            server.persist(session.result_rows)


class SessionServer(socketserver.ThreadingTCPServer):
    """One guidance session per connection; connections are isolated."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, service: ServiceConfig, host: str = "127.0.0.1",
                 port: int = 0):
        super().__init__((host, port), _Handler)
        self.service = service
        self._persist_lock = threading.Lock()

    @property
    def port(self) -> int:
        return self.server_address[1]

    def persist(self, rows: list[str]) -> None:
        if not rows or self.service.results_path is None:
            return
        with self._persist_lock:
            path = self.service.results_path
            try:
                new = False
                try:
                    with open(path, "r", encoding="utf-8"):
                        pass
                except FileNotFoundError:
                    new = True
                with open(path, "a", encoding="utf-8", newline="\n") as f:
                    if new:
                        f.write(RESULTS_CSV_HEADER + "\n")
                    for row in rows:
                        f.write(row + "\n")
            except OSError:
                pass  # persistence is best-effort; the client already has results


def serve(service: ServiceConfig, host: str = "127.0.0.1",
          port: int = 8787) -> SessionServer:
    """Bind and return a server (caller runs serve_forever / shutdown)."""
    return SessionServer(service, host, port)


def _distance(a, b) -> float:
    return float(
        ((a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2 + (a[2] - b[2]) ** 2) ** 0.5
    )
