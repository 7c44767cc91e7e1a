"""Five-way cue vocabulary encoded as tick-quantized actuator timelines.

Cues and their signatures:

  move_to(angle, tier)  1-2 adjacent motors (phantom command for the angle)
                        pulsed pulse_on seconds at the tier cadence
                        (far 1.0 s / medium 0.7 s / close 0.4 s)
  move_up               top arc {K,L,A,B,C} at v_max, 0.1 s on every 0.5 s
  move_down             bottom arc {I,H,G,F,E} at v_max, 0.1 s on every 0.5 s
  pause                 all 12 motors, two rapid 0.1 s bursts (0.1 s gap)
                        inside a 1.0 s window, window repeated pause_repeats
  arrived               all 12 motors continuously for exactly 3.0 s

Everything is aligned to a 10 ms tick, the coarsest grid that represents
all of the above durations exactly, so serialized timelines are
byte-stable.  decode() is the machine stand-in for a human wearer: it
reclassifies a timeline from motor sets and burst timing alone and never
guesses when no rule matches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from statistics import median

import numpy as np

from .actuators import (
    DEFAULT_RING,
    ActuatorRing,
    PhantomCommand,
    command_direction,
    phantom_interpolate,
    FIXED_FREQUENCY_HZ,
)
from .config import GuidanceConfig
from .geometry import Tier

TICK_S = 0.01

TOP_ARC = frozenset("KLABC")
BOTTOM_ARC = frozenset("IHGFE")
ALL_MOTORS = frozenset("ABCDEFGHIJKL")

#: A continuous all-motor vibration at least this long reads as arrival.
ARRIVED_MIN_CONTINUOUS_S = 2.5

TIMELINE_CSV_HEADER = "t_s,A,B,C,D,E,F,G,H,I,J,K,L"


class InvalidDuration(ValueError):
    pass


class Unclassifiable(ValueError):
    """No decode rule matched; reported rather than guessed."""


class CueKind(Enum):
    MOVE_TO = "move_to"
    MOVE_UP = "move_up"
    MOVE_DOWN = "move_down"
    PAUSE = "pause"
    ARRIVED = "arrived"


CUE_KINDS = tuple(CueKind)


@dataclass(frozen=True)
class CueCategory:
    kind: CueKind
    angle_deg: float | None = None  # move_to only, ring angle in [0, 360)
    tier: Tier | None = None        # move_to only

    def __post_init__(self):
        if self.kind is CueKind.MOVE_TO:
            if self.angle_deg is None or self.tier is None:
                raise ValueError("move_to needs an angle and a tier")
            if not 0.0 <= self.angle_deg < 360.0:
                raise ValueError("move_to angle must be in [0, 360)")
        elif self.angle_deg is not None or self.tier is not None:
            raise ValueError(f"{self.kind.value} takes no angle/tier")

    @staticmethod
    def move_to(angle_deg: float, tier: Tier) -> "CueCategory":
        return CueCategory(CueKind.MOVE_TO, angle_deg, tier)

    @staticmethod
    def move_up() -> "CueCategory":
        return CueCategory(CueKind.MOVE_UP)

    @staticmethod
    def move_down() -> "CueCategory":
        return CueCategory(CueKind.MOVE_DOWN)

    @staticmethod
    def pause() -> "CueCategory":
        return CueCategory(CueKind.PAUSE)

    @staticmethod
    def arrived() -> "CueCategory":
        return CueCategory(CueKind.ARRIVED)

    def token(self) -> str:
        """CSV-safe token, e.g. move_to:20.0:medium."""
        if self.kind is CueKind.MOVE_TO:
            return f"move_to:{self.angle_deg:.1f}:{self.tier.value}"
        return self.kind.value


@dataclass(frozen=True)
class ActuatorFrame:
    """Full 12-motor drive state taking effect at a tick-aligned time."""

    t_s: float
    drives: tuple[float, ...]

    def __post_init__(self):
        if len(self.drives) != 12:
            raise ValueError("a frame carries exactly 12 drive voltages")
        if abs(self.t_s / TICK_S - round(self.t_s / TICK_S)) > 1e-6:
            raise ValueError(f"frame time {self.t_s} is not tick-aligned")

    @property
    def active(self) -> frozenset[str]:
        return frozenset(
            lab for lab, v in zip("ABCDEFGHIJKL", self.drives) if v > 0.0
        )


@dataclass(frozen=True)
class CueTimeline:
    frames: tuple[ActuatorFrame, ...]
    duration_s: float
    category: CueCategory | None = None
    frequency_hz: float = FIXED_FREQUENCY_HZ

    def __post_init__(self):
        ts = [f.t_s for f in self.frames]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("frames must be strictly increasing in time")
        if self.frames and self.duration_s < self.frames[-1].t_s:
            raise ValueError("duration must cover the last frame")

    def without_category(self) -> "CueTimeline":
        return replace(self, category=None)

    def drives_at(self, t_s: float) -> tuple[float, ...]:
        """Drive state holding at time t (piecewise-constant between frames)."""
        current = (0.0,) * 12
        for f in self.frames:
            if f.t_s > t_s + 1e-9:
                break
            current = f.drives
        return current


# ---------------------------------------------------------------------------
# Encoding
# ---------------------------------------------------------------------------

_SILENCE = (0.0,) * 12


def _drives_for(labels, voltage: float) -> tuple[float, ...]:
    out = [0.0] * 12
    for lab in labels:
        out["ABCDEFGHIJKL".index(lab)] = voltage
    return tuple(out)


def _drives_for_command(cmd: PhantomCommand) -> tuple[float, ...]:
    out = [0.0] * 12
    for lab, v in cmd.drives:
        out["ABCDEFGHIJKL".index(lab)] = v
    return tuple(out)


def _ticks(seconds: float) -> int:
    return round(seconds / TICK_S)


def _pulse_train(drives: tuple[float, ...], on_ticks: int, period_ticks: int,
                 duration_ticks: int) -> list[tuple[int, tuple[float, ...]]]:
    """On/off frame events for pulses started while t < duration."""
    events: list[tuple[int, tuple[float, ...]]] = []
    k = 0
    while k * period_ticks < duration_ticks:
        start = k * period_ticks
        end = min(start + on_ticks, duration_ticks)
        events.append((start, drives))
        events.append((end, _SILENCE))
        k += 1
    return events


def encode(cue: CueCategory, duration_s: float = 2.1,
           cfg: GuidanceConfig = GuidanceConfig(),
           ring: ActuatorRing = DEFAULT_RING) -> CueTimeline:
    """Render a cue to its actuator timeline.

    `duration_s` bounds the repeating cues (move_to / move_up / move_down);
    pause and arrived have fixed intrinsic lengths and ignore it beyond
    validation.
    """
    if duration_s <= 0:
        raise InvalidDuration(f"duration must be > 0, got {duration_s}")
    dur_ticks = _ticks(duration_s)
    v_max = cfg.interp.v_max

    if cue.kind is CueKind.MOVE_TO:
        cmd = phantom_interpolate(cue.angle_deg, cfg.interp, ring)
        events = _pulse_train(
            _drives_for_command(cmd),
            _ticks(cfg.pulse_on_s),
            _ticks(cfg.tier_interval_s(cue.tier)),
            dur_ticks,
        )
        duration = duration_s
    elif cue.kind in (CueKind.MOVE_UP, CueKind.MOVE_DOWN):
        arc = TOP_ARC if cue.kind is CueKind.MOVE_UP else BOTTOM_ARC
        events = _pulse_train(
            _drives_for(arc, v_max),
            _ticks(cfg.correct_burst_s),
            _ticks(cfg.correct_period_s),
            dur_ticks,
        )
        duration = duration_s
    elif cue.kind is CueKind.PAUSE:
        on = _drives_for(ALL_MOTORS, v_max)
        burst = _ticks(0.1)
        group = _ticks(cfg.pause_group_s)
        events = []
        for g in range(cfg.pause_repeats):
            base = g * group
            events += [
                (base, on), (base + burst, _SILENCE),
                (base + 2 * burst, on), (base + 3 * burst, _SILENCE),
            ]
        duration = cfg.pause_duration_s
    elif cue.kind is CueKind.ARRIVED:
        events = [
            (0, _drives_for(ALL_MOTORS, v_max)),
            (_ticks(cfg.arrived_duration_s), _SILENCE),
        ]
        duration = cfg.arrived_duration_s
    else:  # pragma: no cover
        raise ValueError(f"unknown cue kind {cue.kind}")

    frames = tuple(
        ActuatorFrame(t_s=tick * TICK_S, drives=drives) for tick, drives in events
    )
    return CueTimeline(frames=frames, duration_s=duration, category=cue)


# ---------------------------------------------------------------------------
# Decoding
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Burst:
    start: float
    end: float
    labels: frozenset[str]
    drives: tuple[float, ...]

    @property
    def length(self) -> float:
        return self.end - self.start


def _bursts_of(timeline: CueTimeline) -> list[_Burst]:
    frames = timeline.frames
    end_of = [f.t_s for f in frames[1:]] + [max(timeline.duration_s, frames[-1].t_s)]
    bursts: list[_Burst] = []
    for frame, seg_end in zip(frames, end_of):
        labels = frame.active
        if not labels:
            continue
        prev = bursts[-1] if bursts else None
        if prev is not None and prev.labels == labels and abs(prev.end - frame.t_s) < TICK_S / 2:
            bursts[-1] = replace(prev, end=seg_end)
        else:
            bursts.append(_Burst(frame.t_s, seg_end, labels, frame.drives))
    return bursts


def _adjacent_on_ring(labels: frozenset[str], ring: ActuatorRing) -> bool:
    if len(labels) != 2:
        return False
    i, j = sorted(ring.index_of(lab) for lab in labels)
    return j - i == 1 or (i == 0 and j == 11)


def _nearest_tier(interval_s: float, cfg: GuidanceConfig) -> Tier:
    return min(
        (Tier.FAR, Tier.MEDIUM, Tier.CLOSE),
        key=lambda t: abs(cfg.tier_interval_s(t) - interval_s),
    )


def decode(timeline: CueTimeline, cfg: GuidanceConfig = GuidanceConfig(),
           ring: ActuatorRing = DEFAULT_RING) -> tuple[CueCategory, float]:
    """Classify a timeline back to its cue, with a diagnostic confidence.

    Classification uses only active motor sets and burst timing (never the
    carried category), so attenuated or slightly jittered timelines still
    decode.  Raises Unclassifiable when no rule matches.
    """
    if not timeline.frames:
        raise Unclassifiable("empty timeline")
    bursts = _bursts_of(timeline)
    if not bursts:
        raise Unclassifiable("timeline never drives a motor")

    n = len(bursts)
    all12 = [b for b in bursts if b.labels == ALL_MOTORS]

    long_all12 = [b for b in all12 if b.length >= ARRIVED_MIN_CONTINUOUS_S]
    if long_all12:
        return CueCategory.arrived(), len(long_all12) / n

    if len(all12) >= 2:
        return CueCategory.pause(), len(all12) / n

    top = [b for b in bursts if b.labels == TOP_ARC]
    if top:
        return CueCategory.move_up(), len(top) / n
    bottom = [b for b in bursts if b.labels == BOTTOM_ARC]
    if bottom:
        return CueCategory.move_down(), len(bottom) / n

    labels = bursts[0].labels
    same = [b for b in bursts if b.labels == labels]
    if len(same) == n and (len(labels) == 1 or _adjacent_on_ring(labels, ring)):
        if n < 2:
            raise Unclassifiable(
                "single planar pulse: cadence (and therefore tier) unrecoverable"
            )
        drives = tuple((lab, bursts[0].drives[ring.index_of(lab)]) for lab in sorted(labels))
        angle = command_direction(
            PhantomCommand(drives=drives, target_angle_deg=0.0), ring
        )
        intervals = [b2.start - b1.start for b1, b2 in zip(bursts, bursts[1:])]
        tier = _nearest_tier(median(intervals), cfg)
        return CueCategory.move_to(angle, tier), 1.0

    raise Unclassifiable(f"no rule matches motor sets {sorted(set(b.labels for b in bursts))}")


# ---------------------------------------------------------------------------
# Perturbation + confusion matrix
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NoiseSpec:
    """Timeline perturbations applied before decoding.

    drop_frame_p drops individual frames (the first is always kept);
    time_jitter_sd_s jitters frame times (re-quantized to the tick);
    attenuation scales voltages, floored at v_floor so active motors stay
    active.
    """

    drop_frame_p: float = 0.0
    time_jitter_sd_s: float = 0.0
    attenuation: float = 1.0
    v_floor: float = 0.1

    def apply(self, timeline: CueTimeline, rng: np.random.Generator) -> CueTimeline:
        frames = list(timeline.frames)
        if self.drop_frame_p > 0.0:
            kept = [frames[0]]
            for f in frames[1:]:
                if rng.random() >= self.drop_frame_p:
                    kept.append(f)
            frames = kept
        out: dict[int, tuple[float, ...]] = {}
        for f in frames:
            tick = round(f.t_s / TICK_S)
            if self.time_jitter_sd_s > 0.0:
                tick = max(0, tick + round(rng.normal(0.0, self.time_jitter_sd_s) / TICK_S))
            drives = f.drives
            if self.attenuation != 1.0:
                drives = tuple(
                    max(v * self.attenuation, self.v_floor) if v > 0.0 else 0.0
                    for v in drives
                )
            out[tick] = drives  # collisions: the later frame wins
        rebuilt = tuple(
            ActuatorFrame(t_s=tick * TICK_S, drives=d) for tick, d in sorted(out.items())
        )
        duration = max(timeline.duration_s, rebuilt[-1].t_s if rebuilt else 0.0)
        return CueTimeline(frames=rebuilt, duration_s=duration, category=None)


ZERO_NOISE = NoiseSpec()


@dataclass(frozen=True)
class ConfusionResult:
    """Row-stochastic 5x5 matrix over CUE_KINDS plus unclassified counts.

    Rows sum to 1 minus the corresponding unclassified fraction; with the
    spec'd benign noise regimes nothing is unclassified and rows sum to 1.
    """

    matrix: np.ndarray
    unclassified: np.ndarray
    trials_per_category: int

    @property
    def diagonal(self) -> np.ndarray:
        return np.diag(self.matrix)


def confusion_matrix(categories, trials_per_category: int,
                     noise: NoiseSpec = ZERO_NOISE, seed: int = 0,
                     cfg: GuidanceConfig = GuidanceConfig(),
                     duration_s: float = 2.1) -> ConfusionResult:
    """Encode -> perturb -> decode each category repeatedly and tally."""
    if trials_per_category < 1:
        raise ValueError("trials_per_category must be >= 1")
    kind_index = {k: i for i, k in enumerate(CUE_KINDS)}
    counts = np.zeros((5, 5), dtype=float)
    unclassified = np.zeros(5, dtype=float)
    rng = np.random.default_rng(seed)
    for cat in categories:
        row = kind_index[cat.kind]
        for _ in range(trials_per_category):
            timeline = encode(cat, duration_s, cfg).without_category()
            perturbed = noise.apply(timeline, rng)
            try:
                decoded, _ = decode(perturbed, cfg)
            except Unclassifiable:
                unclassified[row] += 1
            else:
                counts[row, kind_index[decoded.kind]] += 1
    per_row = counts.sum(axis=1) + unclassified
    per_row[per_row == 0] = 1.0
    return ConfusionResult(
        matrix=counts / per_row[:, None],
        unclassified=unclassified / per_row,
        trials_per_category=trials_per_category,
    )


# ---------------------------------------------------------------------------
# Cue-identification trial schedule
# ---------------------------------------------------------------------------

def experiment1_schedule(seed: int) -> list[CueCategory]:
    """64 deterministic-shuffled identification trials.

    24 planar cues covering 0..345 deg in 15 deg steps (tiers cycled for
    cadence coverage) plus 10 each of move_up / move_down / pause /
    arrived.
    """
    tiers = (Tier.FAR, Tier.MEDIUM, Tier.CLOSE)
    trials = [
        CueCategory.move_to(float(a), tiers[i % 3])
        for i, a in enumerate(range(0, 360, 15))
    ]
    for maker in (CueCategory.move_up, CueCategory.move_down,
                  CueCategory.pause, CueCategory.arrived):
        trials.extend(maker() for _ in range(10))
    order = np.random.default_rng(seed).permutation(len(trials))
    return [trials[i] for i in order]


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def timeline_to_csv(timeline: CueTimeline) -> str:
    """Exact interchange format: header line, one row per change tick,
    voltages to 3 decimals, LF endings."""
    lines = [TIMELINE_CSV_HEADER]
    for f in timeline.frames:
        lines.append(f"{f.t_s:.2f}," + ",".join(f"{v:.3f}" for v in f.drives))
    return "\n".join(lines) + "\n"


def timeline_from_csv(text: str) -> CueTimeline:
    lines = [ln for ln in text.split("\n") if ln.strip()]
    if not lines or lines[0] != TIMELINE_CSV_HEADER:
        raise ValueError(f"expected header {TIMELINE_CSV_HEADER!r}")
    frames = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 13:
            raise ValueError(f"expected 13 columns, got {len(parts)}: {ln!r}")
        frames.append(
            ActuatorFrame(t_s=float(parts[0]), drives=tuple(float(p) for p in parts[1:]))
        )
    duration = frames[-1].t_s if frames else 0.0
    return CueTimeline(frames=tuple(frames), duration_s=duration, category=None)
