"""Desk-scale targeting experiment: target field, simulated agents, metrics.

Reproduces the targeting protocol around an origin O on the operating
plane: 36 directions in 10 deg steps x 3 radial zones = 108 targets, three
feedback conditions, 12 sampled targets per condition per participant.
The agents are explicitly synthetic stand-ins for people; the harness
reproduces the protocol and metrics, not human effect sizes.

All randomness flows from explicit seeds (numpy SeedSequence spawning),
so a run is byte-reproducible from its manifest.
"""

from __future__ import annotations

import math
import platform
from dataclasses import dataclass, field, replace
from enum import Enum
from itertools import permutations

import numpy as np

from . import __version__ as _pkg_version
from .actuators import command_direction, phantom_interpolate
from .config import GuidanceConfig, format_config
from .controller import GuidanceEvent, GuidanceSession
from .cues import CueCategory, CueKind
from .geometry import (
    DEFAULT_ZONES,
    OperatingPlane,
    TargetZone,
    Tier,
    ToolState,
    Zone,
    distance_3d,
)


class Condition(Enum):
    HAPTICS_ONLY = "haptics_only"
    AR_ONLY = "ar_only"
    AR_PLUS_HAPTICS = "ar_plus_haptics"

    @property
    def has_haptics(self) -> bool:
        return self is not Condition.AR_ONLY

    @property
    def has_visual(self) -> bool:
        return self is not Condition.HAPTICS_ONLY


CONDITIONS = (Condition.HAPTICS_ONLY, Condition.AR_ONLY, Condition.AR_PLUS_HAPTICS)


class AgentKind(Enum):
    CUE_FOLLOWER = "cue_follower"
    DIRECT_VISUAL = "direct_visual"
    COMBINED = "combined"


@dataclass(frozen=True)
class AgentSpec:
    """Synthetic participant parameters (free choices, not measured values)."""

    kind: AgentKind
    speed_mm_s: float = 30.0
    reaction_latency_s: float = 0.3
    angular_noise_sd_deg: float = 0.0
    visual_error_sd_mm: float = 4.0
    confirm_delay_s: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.speed_mm_s <= 0:
            raise ValueError("speed must be > 0")
        for name in ("reaction_latency_s", "angular_noise_sd_deg",
                     "visual_error_sd_mm", "confirm_delay_s"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


DEFAULT_AGENTS: dict[Condition, AgentSpec] = {
    Condition.HAPTICS_ONLY: AgentSpec(AgentKind.CUE_FOLLOWER),
    Condition.AR_ONLY: AgentSpec(AgentKind.DIRECT_VISUAL),
    Condition.AR_PLUS_HAPTICS: AgentSpec(AgentKind.COMBINED),
}


@dataclass(frozen=True)
class TrackingNoise:
    """Optional positional jitter + slow drift applied to the tool stream
    the controller sees (the true tip is unaffected).  Default off."""

    jitter_sd_mm: float = 0.0
    drift_mm_s: float = 0.0


@dataclass(frozen=True)
class Target:
    direction_deg: float
    zone: TargetZone
    point: tuple[float, float, float]


@dataclass(frozen=True)
class TargetField:
    plane: OperatingPlane
    zones: tuple[TargetZone, ...]
    directions: tuple[float, ...]
    targets: tuple[Target, ...]
    seed: int

    def target(self, direction_deg: float, zone: Zone) -> Target:
        for t in self.targets:
            if t.direction_deg == direction_deg and t.zone.zone is zone:
                return t
        raise KeyError((direction_deg, zone))


@dataclass(frozen=True)
class TrialRecord:
    participant_id: str
    condition: Condition
    target: Target
    trajectory: tuple[ToolState, ...]
    end_point_deviation_mm: float
    time_to_target_s: float
    event_log: tuple[GuidanceEvent, ...]
    status: str  # "ok" | "timeout"


# ---------------------------------------------------------------------------
# Field + plan generation
# ---------------------------------------------------------------------------

def generate_field(plane: OperatingPlane, zones=DEFAULT_ZONES,
                   seed: int = 0) -> TargetField:
    """The 36 x 3 target lattice, constructed exactly on the plane."""
    zones = tuple(sorted(zones, key=lambda z: z.radius_mm))
    directions = tuple(float(d) for d in range(0, 360, 10))
    targets = tuple(
        Target(direction_deg=d, zone=z, point=plane.point_at(d, z.radius_mm))
        for d in directions
        for z in zones
    )
    return TargetField(plane=plane, zones=zones, directions=directions,
                       targets=targets, seed=seed)


def sample_trial_plan(field: TargetField, conditions=CONDITIONS,
                      per_condition: int = 12, seed: int = 0,
                      participant_index: int = 0) -> list[tuple[Condition, Target]]:
    """Per-participant plan: `per_condition` distinct targets per condition.

    Targets are sampled without replacement within a condition and
    independently across conditions; the condition block order is
    counterbalanced by participant index (all 6 orders over indices 0..5).
    """
    if per_condition > len(field.targets):
        raise ValueError("per_condition exceeds the target count")
    orders = list(permutations(conditions))
    order = orders[participant_index % len(orders)]
    rng = np.random.default_rng(np.random.SeedSequence([seed, participant_index]))
    plan: list[tuple[Condition, Target]] = []
    for cond in order:
        picks = rng.choice(len(field.targets), size=per_condition, replace=False)
        plan.extend((cond, field.targets[int(i)]) for i in picks)
    return plan


def end_point_deviation(final_distance_mm: float,
                        arrival_radius_mm: float = 10.0) -> float:
    """Final tip-target distance less the target radius, floored at zero."""
    if final_distance_mm < 0:
        raise ValueError("distance must be >= 0")
    return max(0.0, final_distance_mm - arrival_radius_mm)


# ---------------------------------------------------------------------------
# Agent simulation
# ---------------------------------------------------------------------------

TRIAL_TIMEOUT_S = 120.0


def _unit_in_plane(plane: OperatingPlane, direction_deg: float):
    rad = math.radians(direction_deg)
    c, s = math.cos(rad), math.sin(rad)
    f, l = plane.forward, plane.lateral
    return (c * f[0] + s * l[0], c * f[1] + s * l[1], c * f[2] + s * l[2])


def _perceived_cue_direction(ring_angle_deg: float, cfg: GuidanceConfig,
                             rng: np.random.Generator, noise_sd: float) -> float:
    """What the wearer feels: the drive command's weighted direction, i.e.
    the ring's quantization of the true bearing, plus perceptual noise."""
    cmd = phantom_interpolate(ring_angle_deg, cfg.interp)
    perceived = command_direction(cmd)
    if noise_sd > 0.0:
        perceived = (perceived + rng.normal(0.0, noise_sd)) % 360.0
    return perceived


def simulate_trial(agent: AgentSpec, condition: Condition, target: Target,
                   plane: OperatingPlane, cfg: GuidanceConfig,
                   participant_id: str = "sim",
                   tracking_noise: TrackingNoise | None = None,
                   keep_trajectory: bool = True) -> TrialRecord:
    """Run one closed-loop targeting attempt from the origin.

    cue_follower   moves along the most recently felt planar cue direction,
                   holds during pauses, stops on arrival, confirms
                   confirm_delay later.
    direct_visual  moves straight to the target as perceived through
                   visual error, then confirms after confirm_delay.
    combined       direct_visual until the haptics signal the close tier,
                   then refines along cue directions.
    """
    rng = np.random.default_rng(np.random.SeedSequence([agent.seed]))
    dt = 1.0 / cfg.update_rate_hz
    speed = agent.speed_mm_s
    tip = plane.origin

    session = (GuidanceSession(target.point, plane, cfg)
               if condition.has_haptics else None)

    perceived_target = target.point
    if condition.has_visual and agent.visual_error_sd_mm > 0.0:
        err = rng.normal(0.0, agent.visual_error_sd_mm, size=3)
        perceived_target = (target.point[0] + err[0],
                            target.point[1] + err[1],
                            target.point[2] + err[2])

    drift_dir = None
    if tracking_noise is not None and tracking_noise.drift_mm_s > 0.0:
        v = rng.normal(size=3)
        v /= np.linalg.norm(v)
        drift_dir = tuple(v)

    heading: float | None = None
    pending: list[tuple[float, float]] = []  # (effective_t, plane heading deg)
    paused_until = -1.0
    vertical: float | None = None  # +1 raise, -1 lower while correcting
    arrived = False
    confirm_at: float | None = None
    cue_phase = agent.kind is AgentKind.CUE_FOLLOWER
    trajectory: list[ToolState] = []
    status = "ok"

    k = 0
    t = 0.0
    while True:
        t = k / cfg.update_rate_hz
        tool = ToolState(tip, t)
        if keep_trajectory:
            trajectory.append(tool)

        cue = None
        if session is not None:
            sensed = tip
            if tracking_noise is not None:
                jx = jy = jz = 0.0
                if tracking_noise.jitter_sd_mm > 0.0:
                    jx, jy, jz = rng.normal(0.0, tracking_noise.jitter_sd_mm, size=3)
                dx = dy = dz = 0.0
                if drift_dir is not None:
                    d = tracking_noise.drift_mm_s * t
                    dx, dy, dz = (drift_dir[0] * d, drift_dir[1] * d, drift_dir[2] * d)
                sensed = (tip[0] + jx + dx, tip[1] + jy + dy, tip[2] + jz + dz)
            _, cue = session.step(ToolState(sensed, t))

        if cue is not None:
            if cue.kind is CueKind.ARRIVED:
                arrived = True
                if confirm_at is None:
                    confirm_at = t + agent.confirm_delay_s
            elif cue.kind is CueKind.MOVE_TO:
                if agent.kind is AgentKind.COMBINED and cue.tier is Tier.CLOSE:
                    cue_phase = True
                if cue_phase:
                    felt = _perceived_cue_direction(
                        cue.angle_deg, cfg, rng, agent.angular_noise_sd_deg
                    )
                    pending.append((t + agent.reaction_latency_s, felt))
                    vertical = None
            elif cue.kind is CueKind.PAUSE:
                paused_until = t + cfg.pause_duration_s
                vertical = None  # pause ends the corrective motion
            elif cue.kind is CueKind.MOVE_UP:
                vertical = 1.0
            elif cue.kind is CueKind.MOVE_DOWN:
                vertical = -1.0

        while pending and t >= pending[0][0]:
            heading = pending.pop(0)[1]

        if confirm_at is not None and t >= confirm_at:
            break
        if t >= TRIAL_TIMEOUT_S:
            status = "timeout"
            break

        # -- displacement for this step --
        step_len = speed * dt
        if arrived:
            pass  # the unmistakable full-ring cue: stop and wait to confirm
        elif cue_phase:
            if t < paused_until:
                pass
            elif vertical is not None:  # corrective cues need no heading
                n = plane.normal
                tip = (tip[0] + vertical * step_len * n[0],
                       tip[1] + vertical * step_len * n[1],
                       tip[2] + vertical * step_len * n[2])
            elif heading is None:
                pass
            else:
                u = _unit_in_plane(plane, heading)
                tip = (tip[0] + step_len * u[0],
                       tip[1] + step_len * u[1],
                       tip[2] + step_len * u[2])
        else:
            d = distance_3d(tip, perceived_target)
            if d <= step_len:
                tip = perceived_target
                if agent.kind is AgentKind.DIRECT_VISUAL:
                    if confirm_at is None:
                        confirm_at = t + agent.confirm_delay_s
                else:
                    # combined: visual phase done, let the haptics finish
                    cue_phase = True
            else:
                tip = (tip[0] + step_len * (perceived_target[0] - tip[0]) / d,
                       tip[1] + step_len * (perceived_target[1] - tip[1]) / d,
                       tip[2] + step_len * (perceived_target[2] - tip[2]) / d)
        k += 1

    endpoint_dist = distance_3d(tip, target.point)
    return TrialRecord(
        participant_id=participant_id,
        condition=condition,
        target=target,
        trajectory=tuple(trajectory),
        end_point_deviation_mm=end_point_deviation(endpoint_dist, cfg.arrival_radius_mm),
        time_to_target_s=t,
        event_log=tuple(session.events) if session is not None else (),
        status=status,
    )


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AggregateRow:
    group: str
    mean: float
    sd: float  # sample (n-1) standard deviation; 0.0 when n == 1
    n: int


class EmptyInput(ValueError):
    pass


_GROUP_KEYS = {
    "condition": lambda r: r.condition.value,
    "zone": lambda r: r.target.zone.zone.value,
    "direction": lambda r: f"{r.target.direction_deg:.0f}",
}

_METRICS = {
    "deviation_mm": lambda r: r.end_point_deviation_mm,
    "time_s": lambda r: r.time_to_target_s,
}


def aggregate(records, group_by: str,
              metric: str = "deviation_mm") -> list[AggregateRow]:
    """Descriptive statistics per group (sample SD convention)."""
    records = list(records)
    if not records:
        raise EmptyInput("no records to aggregate")
    key = _GROUP_KEYS[group_by]
    value = _METRICS[metric]
    groups: dict[str, list[float]] = {}
    for r in records:
        groups.setdefault(key(r), []).append(value(r))
    rows = []
    for g in sorted(groups, key=lambda s: (len(s), s)):
        vals = np.asarray(groups[g], dtype=float)
        sd = float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0
        rows.append(AggregateRow(group=g, mean=float(vals.mean()), sd=sd, n=len(vals)))
    return rows


def aggregate_to_csv(records, group_by: str) -> str:
    """Fig-7-shaped table: both metrics per group, sample-SD columns."""
    dev = {r.group: r for r in aggregate(records, group_by, "deviation_mm")}
    tim = {r.group: r for r in aggregate(records, group_by, "time_s")}
    lines = [f"{group_by},n,deviation_mean_mm,deviation_sd_sample_mm,"
             "time_mean_s,time_sd_sample_s"]
    for g in dev:
        d, tm = dev[g], tim[g]
        lines.append(
            f"{g},{d.n},{d.mean:.3f},{d.sd:.3f},{tm.mean:.3f},{tm.sd:.3f}"
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Whole-experiment orchestration
# ---------------------------------------------------------------------------

RESULTS_CSV_HEADER = "participant,condition,direction_deg,zone,deviation_mm,time_s,status"


def results_to_csv(records) -> str:
    lines = [RESULTS_CSV_HEADER]
    for r in records:
        lines.append(
            f"{r.participant_id},{r.condition.value},{r.target.direction_deg:.0f},"
            f"{r.target.zone.zone.value},{r.end_point_deviation_mm:.3f},"
            f"{r.time_to_target_s:.3f},{r.status}"
        )
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ExperimentResult:
    records: tuple[TrialRecord, ...]
    results_csv: str
    manifest: str
    tables: dict[str, str]  # by_condition / by_zone / by_direction CSVs


def _derived_seed(master_seed: int, *key: int) -> int:
    return int(np.random.SeedSequence([master_seed, *key]).generate_state(1)[0])


def run_experiment(participants: int, seed: int,
                   cfg: GuidanceConfig = GuidanceConfig(),
                   agents: dict[Condition, AgentSpec] | None = None,
                   zones=DEFAULT_ZONES,
                   plane: OperatingPlane | None = None,
                   keep_trajectories: bool = False) -> ExperimentResult:
    """participants x 36 trials, fully seeded, with manifest for re-runs."""
    if participants < 1:
        raise ValueError("participants must be >= 1")
    agents = dict(DEFAULT_AGENTS if agents is None else agents)
    plane = plane or OperatingPlane.xy()
    field = generate_field(plane, zones, seed=seed)

    records: list[TrialRecord] = []
    for p in range(participants):
        pid = f"P{p:02d}"
        plan = sample_trial_plan(
            field, CONDITIONS, per_condition=12,
            seed=_derived_seed(seed, p), participant_index=p,
        )
        for ti, (condition, target) in enumerate(plan):
            spec = replace(agents[condition], seed=_derived_seed(seed, p, ti))
            records.append(simulate_trial(
                spec, condition, target, plane, cfg,
                participant_id=pid, keep_trajectory=keep_trajectories,
            ))

    manifest_lines = [
        "format=wristcue-experiment-1",
        f"wristcue_version={_pkg_version}",
        f"python={platform.python_version()}",
        f"numpy={np.__version__}",
        f"participants={participants}",
        f"master_seed={seed}",
        "trials_per_condition=12",
        "zone_radii_mm=" + ",".join(f"{z.zone.value}:{z.radius_mm:g}" for z in field.zones),
    ]
    for cond in CONDITIONS:
        a = agents[cond]
        manifest_lines.append(
            f"agent.{cond.value}={a.kind.value};speed={a.speed_mm_s:g};"
            f"reaction={a.reaction_latency_s:g};angular_sd={a.angular_noise_sd_deg:g};"
            f"visual_sd={a.visual_error_sd_mm:g};confirm={a.confirm_delay_s:g}"
        )
    manifest_lines.extend(
        "config." + line for line in format_config(cfg).strip().split("\n")
    )

    tables = {
        "by_condition": aggregate_to_csv(records, "condition"),
        "by_zone": aggregate_to_csv(records, "zone"),
        "by_direction": aggregate_to_csv(records, "direction"),
    }
    return ExperimentResult(
        records=tuple(records),
        results_csv=results_to_csv(records),
        manifest="\n".join(manifest_lines) + "\n",
        tables=tables,
    )
