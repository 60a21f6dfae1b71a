"""Node energy budget and battery-autonomy estimation.

The sensor node sleeps in a wake-on-motion state and switches to active
sampling + radio for a short burst per trigger. Daily energy is the
two-state weighted sum; autonomy is the battery capacity divided by it.
The per-trigger active duration is not directly observable, so
``solve_active_time`` recovers it from a target autonomy by bisection
(daily energy is strictly increasing in active time, so the solution is
unique when it exists).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable

from .errors import DutyOverflow, InvalidValue, Unachievable

SECONDS_PER_DAY = 86400.0
HOURS_PER_DAY = 24.0
DAYS_PER_YEAR = 365.25

DEFAULT_P_SLEEP_W = 82.4e-6
DEFAULT_P_ACTIVE_W = 27.2e-3
DEFAULT_BATTERY_WH = 15.0
DEFAULT_WAKE_LATENCY_S = 0.02


@dataclass(frozen=True)
class PowerProfile:
    """Two-state power model parameters (watts, watt-hours, seconds)."""

    p_sleep: float = DEFAULT_P_SLEEP_W
    p_active: float = DEFAULT_P_ACTIVE_W
    battery_wh: float = DEFAULT_BATTERY_WH
    triggers_per_day: float = 0.0
    active_s_per_trigger: float = 0.0
    wake_latency_s: float = DEFAULT_WAKE_LATENCY_S

    def __post_init__(self) -> None:
        for name in ("p_sleep", "p_active", "battery_wh", "wake_latency_s"):
            if getattr(self, name) <= 0.0:
                raise InvalidValue(f"{name} must be positive")
        if self.triggers_per_day < 0.0 or self.active_s_per_trigger < 0.0:
            raise InvalidValue("trigger rate and active time must be non-negative")

    @property
    def active_s_per_day(self) -> float:
        return self.triggers_per_day * self.active_s_per_trigger


def daily_energy(p: PowerProfile) -> float:
    """Energy drawn per day, in watt-hours."""
    active_s = p.active_s_per_day
    if active_s > SECONDS_PER_DAY:
        raise DutyOverflow(
            f"{active_s:.0f} s of active time per day exceeds {SECONDS_PER_DAY:.0f} s"
        )
    active_h = active_s / 3600.0
    return p.p_sleep * (HOURS_PER_DAY - active_h) + p.p_active * active_h


def autonomy_years(p: PowerProfile) -> float:
    """Battery lifetime in years at the profile's duty cycle."""
    return p.battery_wh / daily_energy(p) / DAYS_PER_YEAR


def solve_active_time(
    target_years: float,
    triggers_per_day: float,
    p: PowerProfile = PowerProfile(),
    *,
    tol_s: float = 1e-6,
) -> float:
    """Per-trigger active seconds that make autonomy hit ``target_years``.

    Bisection on active_s_per_trigger over [0, 86400/triggers]; autonomy is
    strictly decreasing in active time so the root is unique. Raises
    Unachievable when the target lies outside the attainable range (above
    the sleep-only ceiling, or below the always-active floor).
    """
    if target_years <= 0.0:
        raise InvalidValue("target_years must be positive")
    if triggers_per_day <= 0.0:
        raise InvalidValue("triggers_per_day must be positive")

    def years_at(active_s: float) -> float:
        return autonomy_years(
            replace(p, triggers_per_day=triggers_per_day, active_s_per_trigger=active_s)
        )

    lo, hi = 0.0, SECONDS_PER_DAY / triggers_per_day
    ceiling, floor = years_at(lo), years_at(hi)
    if target_years > ceiling:
        raise Unachievable(
            f"{target_years} years exceeds the sleep-only ceiling of {ceiling:.2f} years"
        )
    if target_years < floor:
        raise Unachievable(
            f"{target_years} years is below the always-active floor of {floor:.2f} years"
        )
    while hi - lo > tol_s:
        mid = 0.5 * (lo + hi)
        if years_at(mid) >= target_years:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def missed_peak_fraction(wake_latency_s: float, onset_to_peak: Iterable[float]) -> float:
    """Fraction of events whose peak lands inside the wake latency window.

    A wake-on-motion sensor sleeps until onset and takes ``wake_latency_s``
    to start sampling, so any peak arriving strictly earlier is unobserved.
    Returns 0.0 for an empty event list.
    """
    if wake_latency_s < 0.0:
        raise InvalidValue("wake_latency_s must be non-negative")
    times = list(onset_to_peak)
    if not times:
        return 0.0
    missed = sum(1 for dt in times if dt < wake_latency_s)
    return missed / len(times)
