"""The reminder agent: per-task lifecycle from encoding to completion.

A task moves through retention (held, waiting), initiation (reminders
firing), and execution; it ends completed, expired, or cancelled.  All
transitions are pure functions from an old state to a new state plus the
actions to deliver, which keeps replays deterministic.
"""
from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Callable, Mapping, Optional

from .factors import FactorProfile, TaskKind
from .planner import GeoPoint, ReminderModality, ReminderPlan, TravelMode, haversine_km

DEFAULT_GRACE = timedelta(minutes=15)


class AgentError(Exception):
    """Base for rejected agent commands."""


class InvalidStageError(AgentError):
    """Command not allowed in the task's current stage."""


class StaleResponseError(AgentError):
    """Response references a reminder that never fired."""


class TaskValidationError(ValueError):
    """A task or plan violates its structural invariants."""

    def __init__(self, field: str, message: str):
        super().__init__(message)
        self.field = field
        self.message = message


class Stage(enum.Enum):
    ENCODED = "encoded"
    RETENTION = "retention"
    INITIATING = "initiating"
    EXECUTING = "executing"
    COMPLETED = "completed"
    EXPIRED = "expired"
    CANCELLED = "cancelled"


TERMINAL_STAGES = frozenset({Stage.COMPLETED, Stage.EXPIRED, Stage.CANCELLED})

# Legal stage moves; EXECUTING is a transient step inside an accept.
ALLOWED_TRANSITIONS = frozenset(
    {
        (Stage.ENCODED, Stage.RETENTION),
        (Stage.RETENTION, Stage.INITIATING),
        (Stage.INITIATING, Stage.RETENTION),
        (Stage.RETENTION, Stage.EXECUTING),
        (Stage.INITIATING, Stage.EXECUTING),
        (Stage.EXECUTING, Stage.COMPLETED),
        (Stage.RETENTION, Stage.EXPIRED),
        (Stage.INITIATING, Stage.EXPIRED),
        (Stage.ENCODED, Stage.CANCELLED),
        (Stage.RETENTION, Stage.CANCELLED),
        (Stage.INITIATING, Stage.CANCELLED),
        (Stage.EXECUTING, Stage.CANCELLED),
    }
)


@dataclass(frozen=True)
class Place:
    point: GeoPoint
    label: str = ""


@dataclass(frozen=True)
class ProMTask:
    """One intention: what to do, when or upon which cue, and its factors."""

    id: str
    title: str
    kind: TaskKind
    profile: FactorProfile
    execute_at: Optional[datetime] = None
    first_reminder_at: Optional[datetime] = None
    location: Optional[Place] = None
    person: Optional[str] = None
    travel_mode: TravelMode = TravelMode.WALK
    note: Optional[str] = None  # reserved for step-by-step guidance, never rendered

    def validate(self) -> None:
        if not self.title:
            raise TaskValidationError("title", "title must not be empty")
        if self.kind is TaskKind.TIME_BASED:
            if self.execute_at is None:
                raise TaskValidationError("execute_at", "time-based task needs an execution time")
            if self.first_reminder_at is None:
                raise TaskValidationError(
                    "first_reminder_at", "time-based task needs a first-reminder time"
                )
            if self.first_reminder_at >= self.execute_at:
                raise TaskValidationError(
                    "first_reminder_at", "first reminder must be before the execution time"
                )
        else:
            if self.location is None and self.person is None:
                raise TaskValidationError(
                    "location", "event-based task needs a place or a person trigger"
                )


class ResponseKind(enum.Enum):
    ACCEPT = "accept"
    POSTPONE = "postpone"
    IGNORE = "ignore"


@dataclass(frozen=True)
class UserResponse:
    kind: ResponseKind
    at: datetime
    reminder_index: int
    delay: Optional[timedelta] = None

    def __post_init__(self) -> None:
        if self.kind is ResponseKind.POSTPONE:
            if self.delay is None or self.delay <= timedelta(0):
                raise ValueError("postpone needs a strictly positive delay")


class TriggerKind(enum.Enum):
    LOCATION_ENTER = "location_enter"
    CALLING_PERSON = "calling_person"


@dataclass(frozen=True)
class TriggerEvent:
    kind: TriggerKind
    at: datetime
    point: Optional[GeoPoint] = None
    person: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind is TriggerKind.LOCATION_ENTER and self.point is None:
            raise ValueError("location trigger needs a point")
        if self.kind is TriggerKind.CALLING_PERSON and not self.person:
            raise ValueError("calling trigger needs a person name")


class ActionKind(enum.Enum):
    FIRE_REMINDER = "fire_reminder"
    MARK_COMPLETED = "mark_completed"
    MARK_EXPIRED = "mark_expired"
    NOOP = "noop"


@dataclass(frozen=True)
class AgentAction:
    kind: ActionKind
    task_id: str
    at: datetime
    index: Optional[int] = None
    modality: Optional[ReminderModality] = None


@dataclass(frozen=True)
class AgentState:
    """Lifecycle snapshot of one task under agent control."""

    task: ProMTask
    stage: Stage
    plan: ReminderPlan
    fired_at: tuple[datetime, ...] = ()
    postpone_total: timedelta = timedelta(0)
    trigger_latched: bool = False

    @property
    def task_id(self) -> str:
        return self.task.id

    @property
    def next_index(self) -> int:
        return len(self.fired_at)

    @property
    def fired_count(self) -> int:
        return len(self.fired_at)

    @property
    def is_terminal(self) -> bool:
        return self.stage in TERMINAL_STAGES


def _noop(state: AgentState, now: datetime) -> list[AgentAction]:
    return [AgentAction(ActionKind.NOOP, state.task_id, now)]


def encode(task: ProMTask, plan: ReminderPlan) -> AgentState:
    """Take a task and its plan into retention, cursor at the start."""
    task.validate()
    if task.kind is TaskKind.TIME_BASED:
        if plan.is_relative:
            raise TaskValidationError("plan", "time-based task needs an absolute schedule")
        if plan.schedule[-1] > task.execute_at:
            raise TaskValidationError("plan", "plan schedules a reminder after the execution time")
    elif not plan.is_relative:
        raise TaskValidationError("plan", "event-based task needs a relative schedule")
    return AgentState(task=task, stage=Stage.RETENTION, plan=plan)


def tick(
    state: AgentState, now: datetime, grace: timedelta = DEFAULT_GRACE
) -> tuple[AgentState, list[AgentAction]]:
    """Fire every due, not-yet-fired reminder; expire once whe + grace passes.

    Event-based tasks stay silent until their trigger latches.  Terminal
    stages only ever produce a no-op.
    """
    if state.is_terminal:
        return state, _noop(state, now)

    actions: list[AgentAction] = []
    stage = state.stage
    fired = state.fired_at
    schedule = state.plan.schedule
    can_fire = state.task.kind is TaskKind.TIME_BASED or state.trigger_latched
    if can_fire:
        index = len(fired)
        while index < len(schedule) and schedule[index] <= now:
            actions.append(
                AgentAction(
                    ActionKind.FIRE_REMINDER,
                    state.task_id,
                    now,
                    index=index,
                    modality=state.plan.modality,
                )
            )
            fired = fired + (now,)
            index += 1
            stage = Stage.INITIATING

    whe = state.task.execute_at
    if whe is not None and now > whe + grace and stage not in (Stage.EXECUTING, Stage.COMPLETED):
        actions.append(AgentAction(ActionKind.MARK_EXPIRED, state.task_id, now))
        stage = Stage.EXPIRED

    if not actions:
        return state, _noop(state, now)
    return dataclasses.replace(state, stage=stage, fired_at=fired), actions


def _shift_unfired(plan: ReminderPlan, fired_count: int, delay: timedelta, whe) -> ReminderPlan:
    kept = list(plan.schedule[:fired_count])
    shifted: list[datetime] = []
    for entry in plan.schedule[fired_count:]:
        moved = entry + delay
        if whe is not None and moved > whe:
            moved = whe
        if not shifted or moved > shifted[-1]:
            shifted.append(moved)
    merged = kept + shifted
    return dataclasses.replace(plan, schedule=tuple(merged), count=len(merged))


def handle_response(
    state: AgentState, response: UserResponse
) -> tuple[AgentState, list[AgentAction]]:
    """Apply accept (finish), postpone (shift the unfired tail), or ignore."""
    if state.stage not in (Stage.INITIATING, Stage.RETENTION):
        raise InvalidStageError(f"no response accepted in stage {state.stage.value}")
    if not 0 <= response.reminder_index < state.fired_count:
        raise StaleResponseError(
            f"stale response: reminder {response.reminder_index} has not fired"
        )

    if response.kind is ResponseKind.ACCEPT:
        # Through the transient executing step; no reminder ever fires again.
        done = dataclasses.replace(state, stage=Stage.COMPLETED)
        return done, [AgentAction(ActionKind.MARK_COMPLETED, state.task_id, response.at)]

    if response.kind is ResponseKind.POSTPONE:
        plan = _shift_unfired(
            state.plan, state.fired_count, response.delay, state.task.execute_at
        )
        shifted = dataclasses.replace(
            state,
            plan=plan,
            stage=Stage.RETENTION,
            postpone_total=state.postpone_total + response.delay,
        )
        return shifted, []

    return state, []


def _matches(task: ProMTask, event: TriggerEvent, proximity_radius_m: float) -> bool:
    if event.kind is TriggerKind.LOCATION_ENTER:
        if task.location is None:
            return False
        distance_m = haversine_km(event.point, task.location.point) * 1000.0
        return distance_m <= proximity_radius_m
    if task.person is None:
        return False
    return event.person.strip().casefold() == task.person.strip().casefold()


def apply_trigger(
    state: AgentState, event: TriggerEvent, proximity_radius_m: float = 100.0
) -> tuple[AgentState, list[AgentAction]]:
    """Latch a matching cue once, anchor the schedule at it, fire immediately.

    Repeat cues while latched are debounced to a no-op.
    """
    if state.task.kind is not TaskKind.EVENT_BASED:
        raise AgentError("triggers only apply to event-based tasks")
    if state.is_terminal or state.trigger_latched:
        return state, _noop(state, event.at)
    if not _matches(state.task, event, proximity_radius_m):
        return state, _noop(state, event.at)

    whe = state.task.execute_at
    entries: list[datetime] = []
    for offset in state.plan.offsets:
        stamp = event.at + offset
        if whe is not None and stamp > whe:
            stamp = whe
        if not entries or stamp > entries[-1]:
            entries.append(stamp)
    plan = dataclasses.replace(
        state.plan, schedule=tuple(entries), offsets=(), count=len(entries)
    )
    latched = dataclasses.replace(
        state,
        plan=plan,
        stage=Stage.INITIATING,
        fired_at=(event.at,),
        trigger_latched=True,
    )
    fire = AgentAction(
        ActionKind.FIRE_REMINDER, state.task_id, event.at, index=0, modality=plan.modality
    )
    return latched, [fire]


def update_task(
    state: AgentState,
    edits: Mapping[str, object],
    replanner: Callable[[ProMTask], ReminderPlan],
) -> AgentState:
    """Apply edits atomically and rebuild the plan for the unfired tail only."""
    if state.is_terminal:
        raise InvalidStageError("terminal stage")
    if state.stage not in (Stage.RETENTION, Stage.INITIATING):
        raise InvalidStageError(f"no edits accepted in stage {state.stage.value}")

    task = dataclasses.replace(state.task, **edits)
    task.validate()
    fresh = replanner(task)

    if state.fired_count == 0 and not state.trigger_latched:
        plan = fresh
    else:
        if fresh.is_relative:
            # Latched event task: re-anchor the fresh offsets at the original trigger.
            anchor = state.fired_at[0]
            whe = task.execute_at
            materialized: list[datetime] = []
            for offset in fresh.offsets:
                stamp = anchor + offset
                if whe is not None and stamp > whe:
                    stamp = whe
                if not materialized or stamp > materialized[-1]:
                    materialized.append(stamp)
            fresh = dataclasses.replace(
                fresh, schedule=tuple(materialized), offsets=(), count=len(materialized)
            )
        kept = list(state.plan.schedule[: state.fired_count])
        tail = [entry for entry in fresh.schedule if entry > kept[-1]]
        merged = kept + tail
        plan = dataclasses.replace(fresh, schedule=tuple(merged), offsets=(), count=len(merged))

    return dataclasses.replace(state, task=task, plan=plan, stage=Stage.RETENTION)


def cancel(state: AgentState) -> AgentState:
    """Retire the task; nothing fires afterwards."""
    if state.is_terminal:
        raise InvalidStageError("terminal stage")
    return dataclasses.replace(state, stage=Stage.CANCELLED)
