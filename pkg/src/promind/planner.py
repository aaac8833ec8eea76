"""Reminder planning: how many reminders, when, and in what form.

Three pure computations produce a plan from a task's factor profile:

* the reminder count is a weighted average of per-factor counts, rounded
  half away from zero and clamped to ``[1, max_count]``;
* the schedule spreads that many reminders evenly over the window from
  the requested first reminder to the execution time, pulling the window
  start earlier when travel to the task location costs more time than the
  window allows;
* the modality is the weighted average of per-factor score vectors,
  decoded axis by axis at the 0.5 threshold.

Weighted averages are evaluated in exact rational arithmetic, so scaling
every weight by the same positive constant can never change a decision.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from datetime import datetime, timedelta
from fractions import Fraction
from typing import TYPE_CHECKING, Optional

from .config import SystemConfig
from .factors import (
    CountTable,
    FactorProfile,
    ModalityScore,
    ModalityTable,
    TaskKind,
    Weights,
    count_contribution,
    modality_contribution,
)
from .timeutil import from_epoch, to_epoch

if TYPE_CHECKING:
    from .agent import ProMTask

EARTH_RADIUS_KM = 6371.0

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class GeoPoint:
    latitude: float
    longitude: float

    def __post_init__(self) -> None:
        if not -90.0 <= self.latitude <= 90.0:
            raise ValueError(f"latitude {self.latitude} outside [-90, 90]")
        if not -180.0 <= self.longitude <= 180.0:
            raise ValueError(f"longitude {self.longitude} outside [-180, 180]")


class TravelMode(enum.Enum):
    WALK = "walk"
    CAR = "car"

    @property
    def speed_kmh(self) -> float:
        return 5.0 if self is TravelMode.WALK else 60.0

    @classmethod
    def parse(cls, text: str) -> "TravelMode":
        key = text.strip().lower()
        for member in cls:
            if member.value == key:
                return member
        raise ValueError(f"unknown travel mode: {text!r}")


class Channel(enum.Enum):
    VISUAL = "visual"
    AUDIO = "audio"


class Duration(enum.Enum):
    SHORT = "short"
    LONG = "long"


class Sound(enum.Enum):
    RING = "ring"
    MUSIC = "music"


@dataclass(frozen=True)
class ReminderModality:
    """Decoded delivery form. ``sound`` is carried but only meaningful for audio."""

    channel: Channel
    duration: Duration
    sound: Sound


@dataclass(frozen=True)
class ReminderPlan:
    """The planner's product: count, fire times, and delivery form.

    Time-based plans carry absolute ``schedule`` entries.  Event-based
    plans carry relative ``offsets`` until their trigger fires, at which
    point the agent materializes the schedule.
    """

    count: int
    schedule: tuple[datetime, ...]
    offsets: tuple[timedelta, ...]
    modality: ReminderModality
    raw_modality_score: ModalityScore
    warning: Optional[str] = None

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValueError("plan count must be at least 1")
        if self.schedule:
            if len(self.schedule) != self.count:
                raise ValueError("schedule length must equal count")
            if any(b <= a for a, b in zip(self.schedule, self.schedule[1:])):
                raise ValueError("schedule must be strictly increasing")
        elif self.offsets:
            if len(self.offsets) != self.count:
                raise ValueError("offsets length must equal count")
        else:
            raise ValueError("plan needs a schedule or relative offsets")

    @property
    def is_relative(self) -> bool:
        return not self.schedule


def haversine_km(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance over a sphere of radius 6371 km."""
    lat1, lon1, lat2, lon2 = map(
        math.radians, (a.latitude, a.longitude, b.latitude, b.longitude)
    )
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    h = math.sin(dlat / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2) ** 2
    return 2 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


def compute_time_cost(origin: GeoPoint, destination: GeoPoint, mode: TravelMode) -> timedelta:
    """Travel time between two points at the mode's fixed speed."""
    hours = haversine_km(origin, destination) / mode.speed_kmh
    return timedelta(hours=hours)


def _round_half_away(value: Fraction) -> int:
    if value >= 0:
        return math.floor(value + HALF)
    return math.ceil(value - HALF)


def _weighted_average(values, weights) -> Fraction:
    total = sum(Fraction(w) for w in weights)
    if total <= 0:
        raise ValueError("weights sum to zero")
    return sum(Fraction(w) * Fraction(v) for w, v in zip(weights, values)) / total


def compute_reminder_count(
    profile: FactorProfile, table: CountTable, weights: Weights
) -> int:
    """Weighted average of the per-factor counts, clamped to [1, max_count]."""
    contributions = count_contribution(profile, table)
    average = _weighted_average(contributions, weights.count)
    return max(1, min(table.max_count, _round_half_away(average)))


def adjust_first_reminder(
    rem: datetime,
    whe: datetime,
    time_cost: timedelta,
    now: Optional[datetime] = None,
) -> tuple[datetime, Optional[str]]:
    """Pull the first reminder earlier when travel costs more than the window.

    Returns the (possibly unchanged) first-reminder time and an advisory
    warning when even the adjusted time is already in the past relative
    to ``now``.  The result is never later than the requested ``rem`` and,
    whenever the adjustment fires, satisfies ``whe - result >= time_cost``.
    """
    if rem >= whe:
        raise ValueError("first reminder must precede the execution time")
    if time_cost < timedelta(0):
        raise ValueError("time cost must be non-negative")
    if time_cost <= whe - rem:
        return rem, None
    target = from_epoch(math.floor(to_epoch(whe) - time_cost.total_seconds()))
    warning = None
    if now is not None and target < now:
        warning = (
            "infeasible travel: reaching the task location needs "
            f"{time_cost}, but the adjusted first reminder {target:%H:%M:%S} is already past"
        )
    return target, warning


def distribute_schedule(rem: datetime, whe: datetime, count: int) -> list[datetime]:
    """Spread ``count`` fire times evenly over [rem, whe], endpoints included.

    Times are rounded to whole seconds; when the window is too short to
    keep the rounded entries distinct, duplicates collapse and the list
    comes back shorter than requested.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if rem > whe:
        raise ValueError("window start must not follow its end")
    if count == 1:
        return [rem]
    start = to_epoch(rem)
    span = to_epoch(whe) - start
    entries: list[datetime] = []
    for i in range(count):
        numerator = span * i
        denominator = count - 1
        offset = (2 * numerator + denominator) // (2 * denominator)
        stamp = from_epoch(start + offset)
        if not entries or stamp > entries[-1]:
            entries.append(stamp)
    return entries


def decode_modality(channel, duration, sound) -> ReminderModality:
    """Threshold decode: an axis at or above 0.5 picks the salient option."""
    return ReminderModality(
        channel=Channel.AUDIO if channel >= HALF else Channel.VISUAL,
        duration=Duration.LONG if duration >= HALF else Duration.SHORT,
        sound=Sound.MUSIC if sound >= HALF else Sound.RING,
    )


def compute_modality(
    profile: FactorProfile, table: ModalityTable, weights: Weights
) -> tuple[ReminderModality, ModalityScore]:
    """Weighted average of the factor score vectors plus its decoded form."""
    contributions = modality_contribution(profile, table)
    axes = [
        _weighted_average([c.axes()[i] for c in contributions], weights.modality)
        for i in range(3)
    ]
    decoded = decode_modality(*axes)
    raw = ModalityScore(channel=float(axes[0]), duration=float(axes[1]), sound=float(axes[2]))
    return decoded, raw


def build_plan(
    task: "ProMTask",
    config: SystemConfig,
    current_location: Optional[GeoPoint] = None,
    mode: Optional[TravelMode] = None,
    now: Optional[datetime] = None,
) -> ReminderPlan:
    """Compose count, schedule, and modality into one plan for a task."""
    count = compute_reminder_count(task.profile, config.count_table, config.weights)
    modality, raw = compute_modality(task.profile, config.modality_table, config.weights)

    if task.kind is TaskKind.EVENT_BASED:
        offsets = tuple(config.event_spacing * i for i in range(count))
        return ReminderPlan(
            count=count, schedule=(), offsets=offsets, modality=modality, raw_modality_score=raw
        )

    first = task.first_reminder_at
    warning = None
    if current_location is not None and task.location is not None:
        cost = compute_time_cost(
            current_location, task.location.point, mode or task.travel_mode
        )
        first, warning = adjust_first_reminder(first, task.execute_at, cost, now=now)
    entries = distribute_schedule(first, task.execute_at, count)
    if len(entries) < count:
        collapse = f"window too short for {count} reminders, collapsed to {len(entries)}"
        warning = f"{warning}; {collapse}" if warning else collapse
    return ReminderPlan(
        count=len(entries),
        schedule=tuple(entries),
        offsets=(),
        modality=modality,
        raw_modality_score=raw,
        warning=warning,
    )
