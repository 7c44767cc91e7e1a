"""Every numeric guidance constant in one validated place.

Margins, distance tiers, radii, pulse timing and the interpolation voltage
bounds all live here so a session, the cue encoder and the trial harness
are guaranteed to agree.  The flat key=value config-file format used by
the CLI mirrors these field names exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace

from .actuators import InterpolationConfig
from .geometry import Tier, distance_tier


@dataclass(frozen=True)
class GuidanceConfig:
    plane_margin_mm: float = 5.0        # in-plane tolerance band is +/- this
    margin_hysteresis_mm: float = 1.0   # re-entry must come this far inside
    arrival_radius_mm: float = 10.0
    close_max_mm: float = 20.0          # tier bounds; both boundaries are MEDIUM
    far_min_mm: float = 50.0
    far_interval_s: float = 1.0         # planar pulse cadence per tier
    medium_interval_s: float = 0.7
    close_interval_s: float = 0.4
    pulse_on_s: float = 0.2             # planar pulse width
    correct_burst_s: float = 0.1        # up/down burst width
    correct_period_s: float = 0.5       # up/down burst period
    pause_repeats: int = 1              # two-burst pause groups emitted
    arrived_duration_s: float = 3.0
    update_rate_hz: float = 60.0
    static_tier: bool = False           # pin the tier to the trial's start distance
    interp: InterpolationConfig = field(default_factory=InterpolationConfig)

    def __post_init__(self):
        if not 0.0 < self.margin_hysteresis_mm < self.plane_margin_mm:
            raise ValueError("need 0 < margin_hysteresis < plane_margin")
        if self.arrival_radius_mm <= 0:
            raise ValueError("arrival_radius must be > 0")
        if not 0.0 < self.close_max_mm < self.far_min_mm:
            raise ValueError("need 0 < close_max < far_min")
        if not self.far_interval_s > self.medium_interval_s > self.close_interval_s > 0:
            raise ValueError("tier intervals must decrease with proximity")
        if self.pulse_on_s <= 0 or self.correct_burst_s <= 0:
            raise ValueError("pulse widths must be > 0")
        if self.correct_period_s <= self.correct_burst_s:
            raise ValueError("correct_period must exceed the burst width")
        if self.pause_repeats < 1:
            raise ValueError("pause_repeats must be >= 1")
        if self.arrived_duration_s <= 0 or self.update_rate_hz <= 0:
            raise ValueError("arrived_duration and update_rate must be > 0")

    def tier_of(self, distance_mm: float) -> Tier:
        return distance_tier(distance_mm, self.close_max_mm, self.far_min_mm)

    def tier_interval_s(self, tier: Tier) -> float:
        return {
            Tier.FAR: self.far_interval_s,
            Tier.MEDIUM: self.medium_interval_s,
            Tier.CLOSE: self.close_interval_s,
        }[tier]

    @property
    def pause_group_s(self) -> float:
        """One pause group spans a fixed 1.0 s window."""
        return 1.0

    @property
    def pause_duration_s(self) -> float:
        return self.pause_group_s * self.pause_repeats


_SCALAR_FIELDS = {
    "plane_margin_mm", "margin_hysteresis_mm", "arrival_radius_mm",
    "close_max_mm", "far_min_mm", "far_interval_s", "medium_interval_s",
    "close_interval_s", "pulse_on_s", "correct_burst_s", "correct_period_s",
    "pause_repeats", "arrived_duration_s", "update_rate_hz", "static_tier",
}
_INTERP_FIELDS = {"v_min", "v_max", "grid_constant_deg", "snap_threshold_deg"}


def format_config(cfg: GuidanceConfig) -> str:
    """Render a config as the flat key=value file format (one key per line)."""
    lines = []
    for f in fields(cfg):
        if f.name in _SCALAR_FIELDS:
            lines.append(f"{f.name}={getattr(cfg, f.name)}")
    for name in sorted(_INTERP_FIELDS):
        lines.append(f"{name}={getattr(cfg.interp, name)}")
    return "\n".join(lines) + "\n"


def parse_config(text: str, base: GuidanceConfig | None = None) -> GuidanceConfig:
    """Parse the flat key=value format; unknown keys are rejected.

    Blank lines and lines starting with '#' are ignored.  Keys not present
    keep the values from `base` (defaults when base is None).
    """
    cfg = base or GuidanceConfig()
    scalar: dict[str, object] = {}
    interp: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key in _INTERP_FIELDS:
            interp[key] = float(value)
        elif key == "pause_repeats":
            scalar[key] = int(value)
        elif key == "static_tier":
            scalar[key] = value.lower() in ("1", "true", "yes")
        elif key in _SCALAR_FIELDS:
            scalar[key] = float(value)
        else:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
    if interp:
        scalar["interp"] = replace(cfg.interp, **interp)
    return replace(cfg, **scalar) if scalar else cfg
