"""Task-factor vocabulary and the configurable response tables.

Five factors describe a prospective task and its surroundings: the
complexity of whatever the user is doing when the reminder arrives, the
importance and motivation of the task itself, the user's age group, and
the task category.  Two lookup tables translate factor levels into raw
material for the planner: per-factor reminder counts and per-factor
modality score vectors.  All cell values are configuration, not code.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, fields


class FactorLevel(enum.Enum):
    """Three-step intensity scale, totally ordered LOW < MEDIUM < HIGH."""

    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"

    @property
    def rank(self) -> int:
        return _LEVEL_RANK[self]

    def __lt__(self, other: "FactorLevel") -> bool:
        if not isinstance(other, FactorLevel):
            return NotImplemented
        return self.rank < other.rank

    @classmethod
    def parse(cls, text: str) -> "FactorLevel":
        return _parse_enum(cls, text, {"l": cls.LOW, "m": cls.MEDIUM, "h": cls.HIGH})


_LEVEL_RANK = {FactorLevel.LOW: 0, FactorLevel.MEDIUM: 1, FactorLevel.HIGH: 2}


class AgeGroup(enum.Enum):
    YOUNG = "young"
    OLD = "old"

    @classmethod
    def parse(cls, text: str) -> "AgeGroup":
        return _parse_enum(cls, text, {"y": cls.YOUNG, "o": cls.OLD})


class TaskCategory(enum.Enum):
    PERSONAL = "personal"
    FINANCIAL = "financial"
    SOCIAL = "social"
    WORK = "work"

    @classmethod
    def parse(cls, text: str) -> "TaskCategory":
        return _parse_enum(
            cls,
            text,
            {
                "per": cls.PERSONAL,
                "fin": cls.FINANCIAL,
                "soc": cls.SOCIAL,
                "wor": cls.WORK,
                "w": cls.WORK,
            },
        )


class TaskKind(enum.Enum):
    """How a task is triggered: at a clock time, or by an external cue."""

    TIME_BASED = "time"
    EVENT_BASED = "event"


def _parse_enum(cls, text, aliases):
    key = text.strip().lower()
    if key in aliases:
        return aliases[key]
    for member in cls:
        if member.value == key:
            return member
    raise ValueError(f"unknown {cls.__name__} value: {text!r}")


@dataclass(frozen=True)
class FactorProfile:
    """The five factors of one task; no field may be missing."""

    complexity: FactorLevel
    importance: FactorLevel
    motivation: FactorLevel
    age: AgeGroup
    category: TaskCategory


@dataclass(frozen=True)
class CountTable:
    """Per-level reminder counts plus the hard ceiling on any plan.

    Levels map with an inversion: a LOW factor level looks up ``n_high``
    and a HIGH level looks up ``n_low``.
    """

    n_low: int = 1
    n_medium: int = 2
    n_high: int = 3
    a_young: int = 1
    a_old: int = 3
    max_count: int = 5


@dataclass(frozen=True)
class ModalityScore:
    """Point in the reminding-way cube.

    Axes run 0..1: channel (0 visual, 1 audio), duration (0 short,
    1 long), sound (0 ring, 1 music).
    """

    channel: float
    duration: float
    sound: float

    def axes(self) -> tuple[float, float, float]:
        return (self.channel, self.duration, self.sound)


@dataclass(frozen=True)
class ModalityTable:
    """One modality score per factor level, age group, and task category."""

    h_low: ModalityScore
    h_medium: ModalityScore
    h_high: ModalityScore
    a_young: ModalityScore
    a_old: ModalityScore
    t_personal: ModalityScore
    t_financial: ModalityScore
    t_social: ModalityScore
    t_work: ModalityScore


@dataclass(frozen=True)
class Weights:
    """Relative influence of each factor; only ratios matter."""

    count: tuple[float, float, float, float] = (1.0, 1.0, 1.0, 1.0)
    modality: tuple[float, float, float, float, float] = (1.0, 1.0, 1.0, 1.0, 1.0)


def _count_for_level(level: FactorLevel, table: CountTable) -> int:
    # Level inversion: easy/unimportant contexts get the large count cell.
    if level is FactorLevel.LOW:
        return table.n_high
    if level is FactorLevel.MEDIUM:
        return table.n_medium
    return table.n_low


def count_contribution(profile: FactorProfile, table: CountTable) -> tuple[int, int, int, int]:
    """Per-factor reminder counts (complexity, importance, motivation, age)."""
    return (
        _count_for_level(profile.complexity, table),
        _count_for_level(profile.importance, table),
        _count_for_level(profile.motivation, table),
        table.a_young if profile.age is AgeGroup.YOUNG else table.a_old,
    )


def _modality_for_level(level: FactorLevel, table: ModalityTable) -> ModalityScore:
    if level is FactorLevel.LOW:
        return table.h_high
    if level is FactorLevel.MEDIUM:
        return table.h_medium
    return table.h_low


_CATEGORY_CELL = {
    TaskCategory.PERSONAL: "t_personal",
    TaskCategory.FINANCIAL: "t_financial",
    TaskCategory.SOCIAL: "t_social",
    TaskCategory.WORK: "t_work",
}


def modality_contribution(
    profile: FactorProfile, table: ModalityTable
) -> tuple[ModalityScore, ModalityScore, ModalityScore, ModalityScore, ModalityScore]:
    """Per-factor modality scores, mirroring the count lookup's level inversion."""
    return (
        _modality_for_level(profile.complexity, table),
        _modality_for_level(profile.importance, table),
        _modality_for_level(profile.motivation, table),
        table.a_young if profile.age is AgeGroup.YOUNG else table.a_old,
        getattr(table, _CATEGORY_CELL[profile.category]),
    )


def validate_tables(
    count_table: CountTable, modality_table: ModalityTable, weights: Weights
) -> list[str]:
    """Collect every invariant violation; an empty list means the tables are usable."""
    problems: list[str] = []
    ct = count_table
    if not (1 <= ct.n_low <= ct.n_medium <= ct.n_high <= ct.max_count):
        problems.append(
            "count table not monotone: need 1 <= n_low <= n_medium <= n_high <= max_count, "
            f"got ({ct.n_low}, {ct.n_medium}, {ct.n_high}, max {ct.max_count})"
        )
    for name in ("a_young", "a_old"):
        value = getattr(ct, name)
        if not (1 <= value <= ct.max_count):
            problems.append(f"count table {name}={value} outside [1, max_count={ct.max_count}]")

    for field in fields(modality_table):
        score: ModalityScore = getattr(modality_table, field.name)
        for axis, value in zip(("channel", "duration", "sound"), score.axes()):
            if not (0.0 <= value <= 1.0):
                problems.append(f"modality table {field.name}.{axis}={value} outside [0, 1]")

    for label, values, size in (("count", weights.count, 4), ("modality", weights.modality, 5)):
        if len(values) != size:
            problems.append(f"{label} weights must have {size} entries, got {len(values)}")
            continue
        if any(w < 0 for w in values):
            problems.append(f"{label} weights contain a negative entry")
        if sum(values) <= 0:
            problems.append(f"{label} weights sum to zero")
    return problems
