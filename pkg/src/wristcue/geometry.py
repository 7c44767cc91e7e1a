"""Plane-referenced geometry for guided tool motion.

All lengths are millimetres, all angles degrees.  A guidance session is
anchored to an operating plane: an origin point, a unit normal, and an
in-plane unit `forward` axis that defines the 0 deg direction.  In-plane
directions are measured from `forward` and increase clockwise when viewed
looking along -normal, so the 90 deg ("lateral") axis is forward x normal.
That convention is fixed here once and everything downstream (ring
mapping, target fields, agents) inherits it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

Vec3 = tuple[float, float, float]

#: Displacements with an in-plane projection shorter than this have no
#: meaningful direction and raise DegenerateDirection.
DEGENERATE_EPS_MM = 1e-6

_UNIT_TOL = 1e-9


class DegenerateDirection(ValueError):
    """Tip and target project to (almost) the same in-plane point."""


class EmptyZoneList(ValueError):
    """classify_zone called with no zones."""


# ---------------------------------------------------------------------------
# Small vector helpers (plain floats; hot paths avoid array overhead)
# ---------------------------------------------------------------------------

def _vec(p) -> Vec3:
    return (float(p[0]), float(p[1]), float(p[2]))


def _sub(a, b) -> Vec3:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def _dot(a, b) -> float:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _cross(a, b) -> Vec3:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def _norm(a) -> float:
    return math.sqrt(_dot(a, a))


def distance_3d(a, b) -> float:
    """Euclidean distance between two points in mm."""
    return _norm(_sub(_vec(a), _vec(b)))


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OperatingPlane:
    """The reference surface guidance is expressed against.

    `normal` and `forward` must be unit length and orthogonal (1e-9).
    The lateral (90 deg) axis is derived as forward x normal.
    """

    origin: Vec3
    normal: Vec3
    forward: Vec3

    def __post_init__(self):
        object.__setattr__(self, "origin", _vec(self.origin))
        object.__setattr__(self, "normal", _vec(self.normal))
        object.__setattr__(self, "forward", _vec(self.forward))
        if abs(_norm(self.normal) - 1.0) > _UNIT_TOL:
            raise ValueError("plane normal must be unit length")
        if abs(_norm(self.forward) - 1.0) > _UNIT_TOL:
            raise ValueError("plane forward must be unit length")
        if abs(_dot(self.normal, self.forward)) > _UNIT_TOL:
            raise ValueError("plane forward must be orthogonal to normal")

    @property
    def lateral(self) -> Vec3:
        """In-plane 90 deg axis (forward rotated clockwise viewed along -normal)."""
        return _cross(self.forward, self.normal)

    @classmethod
    def xy(cls, origin=(0.0, 0.0, 0.0)) -> "OperatingPlane":
        """Convenience horizontal plane: normal +Z, forward +X (lateral -Y)."""
        return cls(origin=_vec(origin), normal=(0.0, 0.0, 1.0), forward=(1.0, 0.0, 0.0))

    def point_at(self, direction_deg: float, radius_mm: float) -> Vec3:
        """In-plane point at `radius_mm` from the origin along `direction_deg`."""
        rad = math.radians(direction_deg)
        c, s = math.cos(rad), math.sin(rad)
        f, l, o = self.forward, self.lateral, self.origin
        return (
            o[0] + radius_mm * (c * f[0] + s * l[0]),
            o[1] + radius_mm * (c * f[1] + s * l[1]),
            o[2] + radius_mm * (c * f[2] + s * l[2]),
        )


@dataclass(frozen=True)
class ToolState:
    """One tracked sample of the tool tip."""

    tip: Vec3
    timestamp: float  # seconds from trial onset

    def __post_init__(self):
        object.__setattr__(self, "tip", _vec(self.tip))
        if self.timestamp < 0:
            raise ValueError("timestamp must be >= 0")


class FrameMode(Enum):
    WRIST_UP = "wrist_up"
    TOOL_ORIENTED = "tool_oriented"


@dataclass(frozen=True)
class ReferenceFrameMode:
    """How plane directions map onto the wristband ring.

    WRIST_UP is the fixed anatomical mapping (forward -> dorsal motor, the
    default).  TOOL_ORIENTED rotates by a calibration offset captured once
    at session start; the offset is ignored in WRIST_UP.
    """

    mode: FrameMode = FrameMode.WRIST_UP
    calibration_offset_deg: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.calibration_offset_deg < 360.0:
            raise ValueError("calibration_offset_deg must be in [0, 360)")


class Zone(Enum):
    T1 = "T1"  # farthest
    T2 = "T2"
    T3 = "T3"  # nearest


@dataclass(frozen=True)
class TargetZone:
    zone: Zone
    radius_mm: float

    def __post_init__(self):
        if self.radius_mm <= 0:
            raise ValueError("zone radius must be > 0")


#: Default radial zones: T3 nearest, T1 farthest, straddling the three
#: distance tiers (close / medium / far).
DEFAULT_ZONES = (
    TargetZone(Zone.T3, 30.0),
    TargetZone(Zone.T2, 60.0),
    TargetZone(Zone.T1, 90.0),
)


class Tier(Enum):
    """Distance band controlling pulse cadence: nearer pulses faster."""

    FAR = "far"
    MEDIUM = "medium"
    CLOSE = "close"


_TIER_ORDER = {Tier.CLOSE: 0, Tier.MEDIUM: 1, Tier.FAR: 2}


def tier_rank(tier: Tier) -> int:
    """Ordering close < medium < far, for monotonicity checks."""
    return _TIER_ORDER[tier]


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def planar_direction(plane: OperatingPlane, tip, target) -> float:
    """Direction from tip to target projected into the plane, in [0, 360).

    Measured from `forward`, clockwise when viewed along -normal.  Raises
    DegenerateDirection when the projected displacement is shorter than
    DEGENERATE_EPS_MM (caller should treat as arrived/undefined).
    """
    d = _sub(_vec(target), _vec(tip))
    df = _dot(d, plane.forward)
    dl = _dot(d, plane.lateral)
    if math.hypot(df, dl) < DEGENERATE_EPS_MM:
        raise DegenerateDirection(
            f"projected displacement < {DEGENERATE_EPS_MM} mm"
        )
    return math.degrees(math.atan2(dl, df)) % 360.0


def out_of_plane_deviation(plane: OperatingPlane, tip) -> float:
    """Signed distance from the plane in mm; positive along +normal."""
    return _dot(_sub(_vec(tip), plane.origin), plane.normal)


def distance_tier(distance_mm: float, close_max_mm: float = 20.0,
                  far_min_mm: float = 50.0) -> Tier:
    """Band a target distance: far > far_min, close < close_max, else medium.

    Both boundary values belong to MEDIUM so the tiers partition [0, inf).
    """
    if distance_mm < 0:
        raise ValueError("distance must be >= 0")
    if distance_mm > far_min_mm:
        return Tier.FAR
    if distance_mm < close_max_mm:
        return Tier.CLOSE
    return Tier.MEDIUM


def map_to_ring_angle(planar_angle_deg: float, frame: ReferenceFrameMode) -> float:
    """Plane direction -> ring angle (0 deg = dorsal motor A).

    WRIST_UP is the identity; TOOL_ORIENTED adds the session calibration
    offset modulo 360.
    """
    if not 0.0 <= planar_angle_deg < 360.0:
        raise ValueError("planar_angle must be in [0, 360)")
    if frame.mode is FrameMode.WRIST_UP:
        return planar_angle_deg
    return (planar_angle_deg + frame.calibration_offset_deg) % 360.0


def classify_zone(distance_mm: float, zones) -> TargetZone:
    """Zone whose radius is nearest to the given distance.

    Targets are generated exactly on zone radii; this is used when
    aggregating results back into zones.  Ties resolve to the smaller
    radius.  `zones` must be sorted ascending by radius.
    """
    zones = list(zones)
    if not zones:
        raise EmptyZoneList("no zones given")
    return min(zones, key=lambda z: (abs(distance_mm - z.radius_mm), z.radius_mm))
