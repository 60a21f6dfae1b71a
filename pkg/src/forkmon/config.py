"""Analysis configuration: every tunable threshold, with paper-default values.

Thresholds were tuned on one forklift; all of them are exposed here (file
keys and CLI flags share these names) so other vehicles can be accommodated
without code changes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .errors import InvalidValue


class BrakingAxis(enum.Enum):
    """Axis whose net area signs the braking-vs-acceleration test.

    X (longitudinal, the default) is the physically coherent choice; Y keeps
    the literal lateral-axis reading selectable.
    """

    X = "x"
    Y = "y"


_FLOAT_KEYS = (
    "trigger_threshold",
    "release_threshold",
    "merge_gap",
    "min_segment",
    "short_max",
    "long_min",
    "ratio_long",
    "vibration_severe",
    "harsh_braking_threshold",
    "crossing_rate_braking_max",
    "sample_rate",
    "gravity",
)
_STR_KEYS = ("braking_axis", "front_node_id", "back_node_id")


@dataclass(frozen=True)
class AnalysisConfig:
    trigger_threshold: float = 5.0  # m/s², on a_total_mean
    release_threshold: float = 1.0  # m/s², segment extension stops below this
    merge_gap: float = 0.5  # s, segments at most this far apart are merged
    min_segment: float = 0.005  # s, shorter segments are dropped
    short_max: float = 0.75  # s, at most this duration is a short segment
    long_min: float = 1.25  # s, at least this duration is a long segment
    ratio_long: float = 0.75  # net/total area ratio routing intermediates long
    vibration_severe: float = 22.0  # m/s², AT!/BT vibration split
    harsh_braking_threshold: float = 5.0  # m/s², peak above which braking is harsh
    crossing_rate_braking_max: float = 4.0  # crossings/s, at most this is braking
    braking_axis: BrakingAxis = BrakingAxis.X
    sample_rate: float = 100.0  # Hz
    gravity: float = 9.81  # m/s²
    front_node_id: str = "front"
    back_node_id: str = "back"
    overrides: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        for key in _FLOAT_KEYS:
            if not getattr(self, key) > 0.0:
                raise InvalidValue(f"{key} must be positive")
        if not 0.0 < self.ratio_long < 1.0:
            raise InvalidValue("ratio_long must lie strictly between 0 and 1")
        if not self.short_max < self.long_min:
            raise InvalidValue("short_max must be smaller than long_min")
        if self.front_node_id == self.back_node_id:
            raise InvalidValue("front_node_id and back_node_id must differ")

    def with_overrides(self, values: dict[str, str]) -> "AnalysisConfig":
        """Apply raw ``key -> value`` overrides, recording which keys changed."""
        parsed: dict[str, object] = {}
        for key, raw in values.items():
            if key in _FLOAT_KEYS:
                try:
                    parsed[key] = float(raw)
                except ValueError:
                    raise InvalidValue(f"{key}: not a number: {raw!r}") from None
            elif key == "braking_axis":
                try:
                    parsed[key] = BrakingAxis(raw.strip().lower())
                except ValueError:
                    raise InvalidValue(f"braking_axis must be 'x' or 'y', got {raw!r}") from None
            elif key in _STR_KEYS:
                parsed[key] = raw.strip()
            else:
                raise InvalidValue(f"unknown config key {key!r}")
        new_overrides = self.overrides + tuple(k for k in parsed if k not in self.overrides)
        return replace(self, overrides=new_overrides, **parsed)

    def echo_lines(self) -> list[str]:
        """Effective values, one ``key = value`` line each, overrides marked."""
        lines = []
        for f in fields(self):
            if f.name == "overrides":
                continue
            value = getattr(self, f.name)
            if isinstance(value, BrakingAxis):
                value = value.value
            marker = "  (override)" if f.name in self.overrides else ""
            lines.append(f"{f.name} = {value}{marker}")
        return lines


def load_config(path: str | Path | None) -> AnalysisConfig:
    """Read a flat ``key = value`` config file; ``None`` means defaults.

    Lines starting with ``#`` (and blank lines) are skipped; inline comments
    after a value are allowed. A path that does not exist raises InvalidValue
    (a typo'd --config must not silently fall back to defaults), as do
    unknown keys, non-positive thresholds, a ratio outside (0, 1) and
    short_max >= long_min.
    """
    if path is None:
        return AnalysisConfig()
    path = Path(path)
    if not path.exists():
        raise InvalidValue(f"config file not found: {path}")
    values: dict[str, str] = {}
    for lineno, raw_line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidValue(f"{path}:{lineno}: expected 'key = value', got {raw_line!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return AnalysisConfig().with_overrides(values)
