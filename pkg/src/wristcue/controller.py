"""Closed-loop guidance state machine.

A session compares each tracked tool sample against the active target and
operating plane and decides which cue, if any, the wristband should play.
Transition priority, highest first:

  1. 3D distance to target <= arrival_radius  -> arrived cue, then done
     after the full arrival vibration (arrival outranks plane deviation).
  2. out-of-plane deviation beyond +/- plane_margin -> corrective cue
     (above plane -> move_down, below -> move_up).
  3. returning inside plane_margin - margin_hysteresis from a corrective
     state -> one pause cue, then planar guidance resumes when it ends.
  4. otherwise planar guidance: a move_to pulse toward the target at the
     cadence of the current distance tier.

The hysteresis band keeps a noisy tip hovering near the margin from
chattering between states; setting it to ~0 recovers the hard threshold.
Sessions also splice every issued cue into one continuous tick-aligned
timeline, so a whole trial can be replayed or streamed to hardware.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .config import GuidanceConfig
from .cues import TICK_S, ActuatorFrame, CueCategory, CueTimeline, encode
from .geometry import (
    DegenerateDirection,
    OperatingPlane,
    ReferenceFrameMode,
    Tier,
    ToolState,
    distance_3d,
    map_to_ring_angle,
    out_of_plane_deviation,
    planar_direction,
)


class StaleTimestamp(ValueError):
    """Tool samples must arrive with non-decreasing timestamps."""


class Mode(Enum):
    IDLE = "idle"
    PLANAR = "planar"
    CORRECT_UP = "correct_up"
    CORRECT_DOWN = "correct_down"
    PAUSING = "pausing"
    ARRIVED = "arrived"
    DONE = "done"


@dataclass(frozen=True)
class GuidanceState:
    mode: Mode
    tier: Tier | None = None        # PLANAR only
    remaining_s: float | None = None  # PAUSING only, at entry

    def token(self) -> str:
        if self.mode is Mode.PLANAR and self.tier is not None:
            return f"planar_{self.tier.value}"
        return self.mode.value


IDLE = GuidanceState(Mode.IDLE)


@dataclass(frozen=True)
class GuidanceEvent:
    """Audit-log entry: a state change and/or cue issue."""

    t_s: float
    from_state: GuidanceState
    to_state: GuidanceState
    cue: CueCategory | None
    tool: ToolState


@dataclass(frozen=True)
class TrialEndpoint:
    final_distance_mm: float
    deviation_mm: float


EVENT_CSV_HEADER = "t_s,from,to,cue,tip_x_mm,tip_y_mm,tip_z_mm"


def events_to_csv(events: Iterable[GuidanceEvent]) -> str:
    lines = [EVENT_CSV_HEADER]
    for e in events:
        cue = e.cue.token() if e.cue is not None else ""
        x, y, z = e.tool.tip
        lines.append(
            f"{e.t_s:.4f},{e.from_state.token()},{e.to_state.token()},{cue},"
            f"{x:.3f},{y:.3f},{z:.3f}"
        )
    return "\n".join(lines) + "\n"


def confirm(tool: ToolState, target, cfg: GuidanceConfig) -> TrialEndpoint:
    """Score a confirmed final position (allowed in any state).

    Deviation is the final tip-target distance less the arrival radius,
    floored at zero: finishing anywhere inside the target counts as exact.
    """
    dist = distance_3d(tool.tip, target)
    return TrialEndpoint(
        final_distance_mm=dist,
        deviation_mm=max(0.0, dist - cfg.arrival_radius_mm),
    )


class GuidanceSession:
    """One target, one plane, one stream of tool samples.

    Sessions are single-threaded: step() calls must be strictly ordered.
    Distinct sessions are independent.
    """

    def __init__(self, target, plane: OperatingPlane, cfg: GuidanceConfig,
                 frame: ReferenceFrameMode = ReferenceFrameMode()):
        self.target = tuple(float(c) for c in target)
        self.plane = plane
        self.cfg = cfg
        self.frame = frame
        self.state: GuidanceState = IDLE
        self.events: list[GuidanceEvent] = []
        self._last_t: float | None = None
        self._pause_until = 0.0
        self._arrived_until = 0.0
        self._next_pulse_due = 0.0
        self._next_burst_due = 0.0
        self._pinned_tier: Tier | None = None
        # Spliced drive schedule: parallel (tick, drives) arrays, ticks strictly
        # increasing; a cue issued at tick T replaces anything scheduled at >= T.
        self._ticks: list[int] = []
        self._drives: list[tuple[float, ...]] = []

    # -- timeline splicing --------------------------------------------------

    def _splice(self, t_s: float, timeline: CueTimeline) -> None:
        base = round(t_s / TICK_S)
        while self._ticks and self._ticks[-1] >= base:
            self._ticks.pop()
            self._drives.pop()
        for f in timeline.frames:
            self._ticks.append(base + round(f.t_s / TICK_S))
            self._drives.append(f.drives)

    def _issue(self, t_s: float, cue: CueCategory, unit_duration_s: float) -> None:
        self._splice(t_s, encode(cue, unit_duration_s, self.cfg))

    # -- transitions ---------------------------------------------------------

    def _emit(self, t_s: float, to_state: GuidanceState,
              cue: CueCategory | None, tool: ToolState) -> None:
        self.events.append(GuidanceEvent(t_s, self.state, to_state, cue, tool))
        self.state = to_state

    # -- cue helpers ---------------------------------------------------------

    def _planar_cue(self, tool: ToolState, dist: float) -> CueCategory | None:
        """Build the move_to cue for the current geometry, or None when the
        direction is degenerate (tip directly over the target: hold)."""
        try:
            bearing = planar_direction(self.plane, tool.tip, self.target)
        except DegenerateDirection:
            return None
        ring_angle = map_to_ring_angle(bearing, self.frame)
        return CueCategory.move_to(ring_angle, self._tier_for(dist))

    def _tier_for(self, dist: float) -> Tier:
        if self.cfg.static_tier:
            if self._pinned_tier is None:
                self._pinned_tier = self.cfg.tier_of(dist)
            return self._pinned_tier
        return self.cfg.tier_of(dist)

    # -- the state machine ----------------------------------------------------

    def step(self, tool: ToolState) -> tuple[GuidanceState, CueCategory | None]:
        """Advance on one tool sample; returns (state, cue issued or None)."""
        if self._last_t is not None and tool.timestamp < self._last_t:
            raise StaleTimestamp(
                f"timestamp {tool.timestamp} < previous {self._last_t}"
            )
        self._last_t = tool.timestamp
        t = tool.timestamp
        cfg = self.cfg

        if self.state.mode is Mode.DONE:
            return self.state, None
        if self.state.mode is Mode.ARRIVED:
            if t >= self._arrived_until:
                self._emit(t, GuidanceState(Mode.DONE), None, tool)
            return self.state, None

        dist = distance_3d(tool.tip, self.target)
        if dist <= cfg.arrival_radius_mm:
            cue = CueCategory.arrived()
            self._arrived_until = t + cfg.arrived_duration_s
            self._issue(t, cue, cfg.arrived_duration_s)
            self._emit(t, GuidanceState(Mode.ARRIVED), cue, tool)
            return self.state, cue

        dev = out_of_plane_deviation(self.plane, tool.tip)
        if dev > cfg.plane_margin_mm or dev < -cfg.plane_margin_mm:
            mode = Mode.CORRECT_DOWN if dev > 0 else Mode.CORRECT_UP
            cue = CueCategory.move_down() if dev > 0 else CueCategory.move_up()
            if self.state.mode is not mode:
                self._issue(t, cue, cfg.correct_burst_s)
                self._next_burst_due = t + cfg.correct_period_s
                self._emit(t, GuidanceState(mode), cue, tool)
                return self.state, cue
            if t >= self._next_burst_due:
                self._issue(t, cue, cfg.correct_burst_s)
                self._next_burst_due = t + cfg.correct_period_s
                self._emit(t, self.state, cue, tool)
                return self.state, cue
            return self.state, None

        if self.state.mode in (Mode.CORRECT_UP, Mode.CORRECT_DOWN):
            if abs(dev) <= cfg.plane_margin_mm - cfg.margin_hysteresis_mm:
                cue = CueCategory.pause()
                self._pause_until = t + cfg.pause_duration_s
                self._issue(t, cue, cfg.pause_duration_s)
                self._emit(
                    t,
                    GuidanceState(Mode.PAUSING, remaining_s=cfg.pause_duration_s),
                    cue,
                    tool,
                )
                return self.state, cue
            # Inside the margin but not yet inside the hysteresis band:
            # keep correcting so the boundary cannot chatter.
            cue = (CueCategory.move_down()
                   if self.state.mode is Mode.CORRECT_DOWN
                   else CueCategory.move_up())
            if t >= self._next_burst_due:
                self._issue(t, cue, cfg.correct_burst_s)
                self._next_burst_due = t + cfg.correct_period_s
                self._emit(t, self.state, cue, tool)
                return self.state, cue
            return self.state, None

        if self.state.mode is Mode.PAUSING:
            if t < self._pause_until:
                return self.state, None
            # fall through into planar guidance

        tier = self._tier_for(dist)
        if self.state.mode is not Mode.PLANAR:
            cue = self._planar_cue(tool, dist)
            if cue is not None:
                self._issue(t, cue, cfg.pulse_on_s)
                self._next_pulse_due = t + cfg.tier_interval_s(cue.tier)
            self._emit(t, GuidanceState(Mode.PLANAR, tier=tier), cue, tool)
            return self.state, cue
        if tier is not self.state.tier:
            self._emit(t, GuidanceState(Mode.PLANAR, tier=tier), None, tool)
        if t >= self._next_pulse_due:
            cue = self._planar_cue(tool, dist)
            if cue is not None:
                self._issue(t, cue, cfg.pulse_on_s)
                self._next_pulse_due = t + cfg.tier_interval_s(cue.tier)
                self._emit(t, self.state, cue, tool)
                return self.state, cue
        return self.state, None

    # -- outputs ---------------------------------------------------------------

    def timeline(self) -> CueTimeline:
        frames = tuple(
            ActuatorFrame(t_s=tick * TICK_S, drives=d)
            for tick, d in zip(self._ticks, self._drives)
        )
        last_frame_t = frames[-1].t_s if frames else 0.0
        duration = max(last_frame_t, self._last_t or 0.0)
        return CueTimeline(frames=frames, duration_s=duration, category=None)

    def drives_at(self, t_s: float) -> tuple[float, ...]:
        """Drive state holding at time t (all-off before the first cue)."""
        i = bisect_right(self._ticks, round(t_s / TICK_S))
        if i == 0:
            return (0.0,) * 12
        return self._drives[i - 1]

    def confirm(self, tool: ToolState) -> TrialEndpoint:
        return confirm(tool, self.target, self.cfg)


def run_session(tool_stream: Iterable[ToolState], target,
                plane: OperatingPlane, cfg: GuidanceConfig,
                frame: ReferenceFrameMode = ReferenceFrameMode(),
                ) -> tuple[list[GuidanceEvent], CueTimeline]:
    """Replay a whole tool stream through one session.

    Deterministic: identical streams yield identical event logs and
    spliced timelines, byte-for-byte after serialization.
    """
    session = GuidanceSession(target, plane, cfg, frame)
    for tool in tool_stream:
        session.step(tool)
    return session.events, session.timeline()
