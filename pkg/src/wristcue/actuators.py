"""The 12-motor wrist ring and phantom-sensation interpolation.

Motors are labelled A..L, evenly spaced every 30 deg with A at 0 deg on
the dorsal side of the wrist, proceeding in the positive angle direction
to L at 330 deg.  A drive command targets a ring angle; angles close to a
motor activate that single motor at full voltage, while angles in the gap
between two motors drive both neighbours with linearly interpolated
voltages so the wearer feels a single "virtual" vibration between them.

Interpolated voltages, with phi expressed so phi_L < phi < phi_R and g the
grid constant (degrees):

    V_left  = ((phi_R - phi - g) / (phi_R - phi_L - g)) * (v_max - v_min) + v_min
    V_right = ((phi - phi_L - g) / (phi_R - phi_L - g)) * (v_max - v_min) + v_min

The equations only stay inside [v_min, v_max] for phi at least g away from
both motors, which is why snapping is mandatory inside that band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

RING_LABELS = "ABCDEFGHIJKL"
RING_SPACING_DEG = 30.0

#: Motors vibrate at a fixed mechanical frequency; carried as metadata only,
#: there is no frequency control in the drive path.
FIXED_FREQUENCY_HZ = 150.0


class OutOfCalibrationRange(ValueError):
    """Voltage lookup outside the calibration table's span."""


class NegativeVoltage(ValueError):
    """Duty conversion given a voltage below zero."""


# ---------------------------------------------------------------------------
# Ring layout
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ActuatorRing:
    """Ordered (label, angle) layout of the wristband motors."""

    motors: tuple[tuple[str, float], ...] = tuple(
        (lab, i * RING_SPACING_DEG) for i, lab in enumerate(RING_LABELS)
    )

    def __post_init__(self):
        labels = [m[0] for m in self.motors]
        angles = [m[1] for m in self.motors]
        if len(self.motors) != 12 or len(set(labels)) != 12:
            raise ValueError("ring must have 12 uniquely labelled motors")
        if angles != [i * RING_SPACING_DEG for i in range(12)]:
            raise ValueError("motor angles must be 0, 30, ..., 330 in order")

    def label_at(self, index: int) -> str:
        return self.motors[index % 12][0]

    def angle_of(self, label: str) -> float:
        return self.motors[RING_LABELS.index(label)][1]

    def index_of(self, label: str) -> int:
        return RING_LABELS.index(label)


DEFAULT_RING = ActuatorRing()


# ---------------------------------------------------------------------------
# Interpolation config
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InterpolationConfig:
    """Voltage bounds and angular thresholds for phantom interpolation.

    snap_threshold is how close (deg) a target angle must be to a motor to
    activate that motor alone at v_max; grid_constant is the literal
    constant in the interpolation equations.  grid_constant may not exceed
    snap_threshold, otherwise the equations would be evaluated where they
    leave [v_min, v_max].
    """

    v_min: float = 1.3
    v_max: float = 3.0
    grid_constant_deg: float = 10.0
    snap_threshold_deg: float = 10.0

    def __post_init__(self):
        if not 0.0 < self.v_min < self.v_max <= 5.0:
            raise ValueError("need 0 < v_min < v_max <= 5.0")
        if not 0.0 < self.grid_constant_deg < 15.0:
            raise ValueError("grid_constant_deg must be in (0, 15)")
        # 15 inclusive: at half the motor spacing every angle snaps, the
        # documented way to disable interpolation entirely.
        if not 0.0 < self.snap_threshold_deg <= 15.0:
            raise ValueError("snap_threshold_deg must be in (0, 15]")
        if self.grid_constant_deg > self.snap_threshold_deg:
            raise ValueError(
                "grid_constant_deg > snap_threshold_deg would drive voltages "
                "outside [v_min, v_max]"
            )


@dataclass(frozen=True)
class PhantomCommand:
    """One or two motor drives realizing a target ring angle.

    Single-motor commands always carry exactly v_max.  Two-motor commands
    list the left sector motor first; `neighbors` gives the sector-local
    (phi_L, phi_R) with phi_R = phi_L + 30 (phi_R may read 360 for the
    L..A wraparound sector).
    """

    drives: tuple[tuple[str, float], ...]
    target_angle_deg: float
    neighbors: tuple[float, float] | None = None

    @property
    def labels(self) -> frozenset[str]:
        return frozenset(lab for lab, _ in self.drives)

    def voltage(self, label: str) -> float:
        for lab, v in self.drives:
            if lab == label:
                return v
        return 0.0


# ---------------------------------------------------------------------------
# Calibration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CalibrationTable:
    """Measured voltage -> (amplitude, frequency) rows, voltage ascending."""

    rows: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        if len(self.rows) < 2:
            raise ValueError("calibration table needs at least two rows")
        volts = [r[0] for r in self.rows]
        amps = [r[1] for r in self.rows]
        if any(b <= a for a, b in zip(volts, volts[1:])):
            raise ValueError("calibration voltages must be strictly increasing")
        if any(b < a for a, b in zip(amps, amps[1:])):
            raise ValueError("calibration amplitudes must be non-decreasing")

    @property
    def span(self) -> tuple[float, float]:
        return self.rows[0][0], self.rows[-1][0]


#: Two-anchor default: the measured lower/upper bounds of the usable range
#: (1.3 V -> 0.3 m/s^2, 3.0 V -> 1.3 m/s^2) at the fixed 150 Hz drive.
DEFAULT_CALIBRATION = CalibrationTable(
    rows=((1.3, 0.3, FIXED_FREQUENCY_HZ), (3.0, 1.3, FIXED_FREQUENCY_HZ))
)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def phantom_interpolate(ring_angle_deg: float,
                        cfg: InterpolationConfig = InterpolationConfig(),
                        ring: ActuatorRing = DEFAULT_RING) -> PhantomCommand:
    """Target ring angle -> motor drive command.

    Angles within snap_threshold of a motor (inclusive) activate that
    motor alone at v_max; otherwise the two flanking motors are driven
    with the interpolation equations.  Total over [0, 360) and periodic.
    """
    a = ring_angle_deg % 360.0
    sector = int(a // RING_SPACING_DEG)
    phi_l = sector * RING_SPACING_DEG
    phi_r = phi_l + RING_SPACING_DEG
    d_left = a - phi_l
    d_right = phi_r - a

    if min(d_left, d_right) <= cfg.snap_threshold_deg:
        # Ties (exact midpoint with a wide threshold) resolve to the lower
        # angle so the mapping stays deterministic.
        idx = sector if d_left <= d_right else sector + 1
        return PhantomCommand(
            drives=((ring.label_at(idx), cfg.v_max),),
            target_angle_deg=a,
        )

    g = cfg.grid_constant_deg
    dv = cfg.v_max - cfg.v_min
    denom = (phi_r - phi_l) - g
    v_left = ((phi_r - a - g) / denom) * dv + cfg.v_min
    v_right = ((a - phi_l - g) / denom) * dv + cfg.v_min
    return PhantomCommand(
        drives=(
            (ring.label_at(sector), v_left),
            (ring.label_at(sector + 1), v_right),
        ),
        target_angle_deg=a,
        neighbors=(phi_l, phi_r),
    )


def command_direction(cmd: PhantomCommand,
                      ring: ActuatorRing = DEFAULT_RING) -> float:
    """Voltage-weighted circular mean of a command's active motor angles.

    This is the direction an ideal wearer would perceive, and what the
    timeline decoder recovers.
    """
    sx = sy = 0.0
    for lab, v in cmd.drives:
        rad = math.radians(ring.angle_of(lab))
        # Wraparound sector pairs (L at 330, A at 0) need the true circle,
        # not sector-local angles.
        sx += v * math.cos(rad)
        sy += v * math.sin(rad)
    return math.degrees(math.atan2(sy, sx)) % 360.0


def voltage_to_amplitude(v: float,
                         table: CalibrationTable = DEFAULT_CALIBRATION) -> float:
    """Piecewise-linear amplitude (m/s^2) lookup over the calibration rows."""
    lo, hi = table.span
    if not lo <= v <= hi:
        raise OutOfCalibrationRange(f"{v} V outside calibrated span [{lo}, {hi}] V")
    rows = table.rows
    for (v0, a0, _), (v1, a1, _) in zip(rows, rows[1:]):
        if v <= v1:
            t = (v - v0) / (v1 - v0)
            return a0 + t * (a1 - a0)
    return rows[-1][1]


def voltage_to_duty(v: float) -> int:
    """Voltage -> 8-bit PWM duty for the microcontroller link.

    round(v / 5.0 * 255), clamped to [0, 255].
    """
    if v < 0:
        raise NegativeVoltage(f"{v} V")
    duty = round(v / 5.0 * 255.0)
    return min(duty, 255)


def effective_directions(cfg: InterpolationConfig = InterpolationConfig(),
                         ring: ActuatorRing = DEFAULT_RING) -> int:
    """Count distinct motor-sets over a 1 deg sweep of the ring angle.

    With defaults this is 12 single-motor states plus 12 interpolated
    sectors = 24 virtual directions.
    """
    seen: set[frozenset[str]] = set()
    for a in range(360):
        seen.add(phantom_interpolate(float(a), cfg, ring).labels)
    return len(seen)
