"""wristcue: closed-loop vibrotactile wristband guidance.

A 12-motor wrist ring renders directional and maneuver cues for a tracked
handheld tool: phantom-sensation interpolation maps any in-plane bearing
onto one or two motors, five timeline patterns encode the maneuver
vocabulary, and a plane-referenced state machine drives them from live
tool positions.  A deterministic trial harness reproduces the desk-scale
targeting experiment, a serial codec talks to real hardware, and a
session service runs live human-in-the-loop trials.
"""

__version__ = "0.1.0"

from .actuators import (
    ActuatorRing,
    CalibrationTable,
    DEFAULT_CALIBRATION,
    DEFAULT_RING,
    InterpolationConfig,
    PhantomCommand,
    effective_directions,
    phantom_interpolate,
    voltage_to_amplitude,
    voltage_to_duty,
)
from .config import GuidanceConfig, format_config, parse_config
from .controller import (
    GuidanceEvent,
    GuidanceSession,
    GuidanceState,
    Mode,
    TrialEndpoint,
    confirm,
    run_session,
)
from .cues import (
    ActuatorFrame,
    CueCategory,
    CueKind,
    CueTimeline,
    NoiseSpec,
    confusion_matrix,
    decode,
    encode,
    experiment1_schedule,
    timeline_from_csv,
    timeline_to_csv,
)
from .geometry import (
    DEFAULT_ZONES,
    FrameMode,
    OperatingPlane,
    ReferenceFrameMode,
    TargetZone,
    Tier,
    ToolState,
    Zone,
    classify_zone,
    distance_tier,
    map_to_ring_angle,
    out_of_plane_deviation,
    planar_direction,
)
from .harness import (
    AgentKind,
    AgentSpec,
    Condition,
    TargetField,
    TrialRecord,
    aggregate,
    end_point_deviation,
    generate_field,
    run_experiment,
    sample_trial_plan,
    simulate_trial,
)
