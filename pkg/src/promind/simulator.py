"""Deterministic virtual-clock harness for whole-system runs.

A scenario is a set of tasks, one response policy per task, and optional
trigger events on a timeline.  The run advances a virtual clock in fixed
steps, delivers due events and reminders, routes the policies' answers
back into the engine, and tallies completions against fired reminders,
which is the reliability-versus-annoyance trade-off made measurable.
Identical (scenario, seed, tick step) inputs produce byte-identical
event traces; the wall clock is never consulted.
"""
from __future__ import annotations

import csv
import dataclasses
import enum
import io
import json
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Optional, Sequence

from .agent import (
    ActionKind,
    ProMTask,
    ResponseKind,
    Stage,
    TriggerEvent,
    TriggerKind,
    UserResponse,
)
from .config import SystemConfig
from .engine import Engine
from .factors import TaskKind
from .rng import SplitMix64, derive_seed
from .store import Journal
from .timeutil import format_ts, parse_ts
from . import wire


class ScenarioError(ValueError):
    """Scenario rejected before execution."""


class PolicyKind(enum.Enum):
    ALWAYS_ACCEPT_FIRST = "always_accept_first"
    ACCEPT_WITH_PROBABILITY = "accept_with_probability"
    BUSY_UNTIL = "busy_until"
    ALWAYS_IGNORE = "always_ignore"
    POSTPONE_ONCE_THEN_ACCEPT = "postpone_once_then_accept"


@dataclass(frozen=True)
class UserPolicy:
    """Scripted or seeded-stochastic stand-in for the human side."""

    kind: PolicyKind
    p: Optional[float] = None
    until: Optional[datetime] = None
    then_accept: bool = True
    delay: Optional[timedelta] = None
    seed: int = 0

    def validate(self) -> None:
        if self.kind is PolicyKind.ACCEPT_WITH_PROBABILITY:
            if self.p is None or not 0.0 <= self.p <= 1.0:
                raise ScenarioError("accept_with_probability needs p in [0, 1]")
        if self.kind is PolicyKind.BUSY_UNTIL and self.until is None:
            raise ScenarioError("busy_until needs an 'until' timestamp")
        if self.kind is PolicyKind.POSTPONE_ONCE_THEN_ACCEPT:
            if self.delay is None or self.delay <= timedelta(0):
                raise ScenarioError("postpone_once_then_accept needs a positive delay")


class _PolicyRuntime:
    """Per-task policy state; stochastic draws come only from its own stream."""

    def __init__(self, policy: UserPolicy, rng: SplitMix64):
        self.policy = policy
        self.rng = rng
        self.responded_once = False

    def react(self, index: int, now: datetime) -> Optional[UserResponse]:
        kind = self.policy.kind
        if kind is PolicyKind.ALWAYS_IGNORE:
            return UserResponse(ResponseKind.IGNORE, now, index)
        if kind is PolicyKind.ALWAYS_ACCEPT_FIRST:
            if self.responded_once:
                return UserResponse(ResponseKind.IGNORE, now, index)
            self.responded_once = True
            return UserResponse(ResponseKind.ACCEPT, now, index)
        if kind is PolicyKind.ACCEPT_WITH_PROBABILITY:
            draw = self.rng.random()
            accepted = draw < self.policy.p
            return UserResponse(
                ResponseKind.ACCEPT if accepted else ResponseKind.IGNORE, now, index
            )
        if kind is PolicyKind.BUSY_UNTIL:
            if now < self.policy.until:
                return UserResponse(ResponseKind.IGNORE, now, index)
            accepted = self.policy.then_accept
            return UserResponse(
                ResponseKind.ACCEPT if accepted else ResponseKind.IGNORE, now, index
            )
        # postpone once, then accept
        if not self.responded_once:
            self.responded_once = True
            return UserResponse(ResponseKind.POSTPONE, now, index, delay=self.policy.delay)
        return UserResponse(ResponseKind.ACCEPT, now, index)


@dataclass(frozen=True)
class ScenarioItem:
    task: ProMTask
    policy: UserPolicy


@dataclass(frozen=True)
class Scenario:
    items: tuple[ScenarioItem, ...]
    events: tuple[TriggerEvent, ...] = ()
    label: str = "scenario"
    start: Optional[datetime] = None
    end: Optional[datetime] = None

    def validate(self) -> None:
        for item in self.items:
            item.task.validate()
            item.policy.validate()
        anchors = [
            item.task.first_reminder_at
            for item in self.items
            if item.task.first_reminder_at is not None
        ]
        anchors.extend(event.at for event in self.events)
        if self.start is not None and any(anchor < self.start for anchor in anchors):
            raise ScenarioError("scenario start lies after a reminder or event time")
        if self.start is not None and self.end is not None and self.end < self.start:
            raise ScenarioError("scenario end precedes its start")


@dataclass(frozen=True)
class SimReport:
    label: str
    tasks_total: int
    tasks_completed: int
    reminders_fired: int
    expired_count: int
    cancelled_count: int
    mean_time_to_accept: Optional[timedelta]
    event_trace: tuple[tuple[datetime, str], ...]

    def trace_text(self) -> str:
        return "".join(f"{format_ts(at)} {line}\n" for at, line in self.event_trace)

    def to_row(self) -> dict:
        mean = self.mean_time_to_accept
        return {
            "label": self.label,
            "tasks_total": self.tasks_total,
            "tasks_completed": self.tasks_completed,
            "reminders_fired": self.reminders_fired,
            "expired_count": self.expired_count,
            "cancelled_count": self.cancelled_count,
            "mean_time_to_accept_seconds": "" if mean is None else mean.total_seconds(),
        }


def _derive_window(
    scenario: Scenario, engine: Engine, tick_step: timedelta, grace: timedelta
) -> tuple[Optional[datetime], Optional[datetime]]:
    starts = [
        item.task.first_reminder_at
        for item in scenario.items
        if item.task.first_reminder_at is not None
    ]
    starts.extend(event.at for event in scenario.events)
    start = scenario.start or (min(starts) if starts else None)
    if start is None:
        return None, None

    ends = []
    for state in engine.list_states():
        task = state.task
        if task.execute_at is not None:
            ends.append(task.execute_at + grace)
        elif task.kind is TaskKind.EVENT_BASED and scenario.events:
            span = state.plan.offsets[-1] if state.plan.offsets else timedelta(0)
            ends.append(max(event.at for event in scenario.events) + span)
    end = scenario.end or (max(ends) + tick_step if ends else start)
    return start, end


def run(
    scenario: Scenario,
    config: Optional[SystemConfig] = None,
    seed: int = 0,
    tick_step: timedelta = timedelta(seconds=1),
) -> SimReport:
    """Run one scenario to its horizon and account for everything that happened."""
    if tick_step <= timedelta(0):
        raise ScenarioError("tick_step must be positive")
    scenario.validate()
    config = config or SystemConfig()
    engine = Engine(config, Journal())

    trace: list[tuple[datetime, str]] = []
    first_fire: dict[str, datetime] = {}
    accepted_at: dict[str, datetime] = {}
    runtimes: dict[str, _PolicyRuntime] = {}

    start_hint = scenario.start or min(
        (
            anchor
            for anchor in (
                [i.task.first_reminder_at for i in scenario.items if i.task.first_reminder_at]
                + [e.at for e in scenario.events]
            )
        ),
        default=None,
    )
    creation_epoch = datetime(1970, 1, 1, tzinfo=timezone.utc)
    for index, item in enumerate(scenario.items):
        created_at = start_hint or item.task.execute_at or creation_epoch
        state = engine.create_task(item.task, at=created_at)
        rng = SplitMix64(derive_seed(seed, index, item.policy.seed))
        runtimes[state.task_id] = _PolicyRuntime(item.policy, rng)

    start, end = _derive_window(scenario, engine, tick_step, config.grace)
    if start is None:
        return _tally(scenario.label, engine, trace, first_fire, accepted_at)

    pending = sorted(scenario.events, key=lambda e: e.at)
    cursor = 0
    now = start
    while now <= end:
        actions = []
        while cursor < len(pending) and pending[cursor].at <= now:
            actions.extend(engine.deliver_trigger(pending[cursor]))
            cursor += 1
        actions.extend(engine.tick(now))
        for action in actions:
            if action.kind is ActionKind.FIRE_REMINDER:
                task_id = action.task_id
                trace.append((action.at, f"fire {task_id} {action.index}"))
                first_fire.setdefault(task_id, action.at)
                response = runtimes[task_id].react(action.index, action.at)
                if response is None:
                    continue
                new_state = engine.respond(task_id, response)
                trace.append(
                    (response.at, f"respond {task_id} {action.index} {response.kind.value}")
                )
                if new_state.stage is Stage.COMPLETED:
                    accepted_at[task_id] = response.at
                    trace.append((response.at, f"complete {task_id}"))
            elif action.kind is ActionKind.MARK_EXPIRED:
                trace.append((action.at, f"expire {action.task_id}"))
        now = now + tick_step

    return _tally(scenario.label, engine, trace, first_fire, accepted_at)


def _tally(label, engine, trace, first_fire, accepted_at) -> SimReport:
    states = engine.list_states()
    waits = [accepted_at[tid] - first_fire[tid] for tid in accepted_at]
    mean = sum(waits, timedelta(0)) / len(waits) if waits else None
    return SimReport(
        label=label,
        tasks_total=len(states),
        tasks_completed=sum(1 for s in states if s.stage is Stage.COMPLETED),
        reminders_fired=sum(1 for _, line in trace if line.startswith("fire ")),
        expired_count=sum(1 for s in states if s.stage is Stage.EXPIRED),
        cancelled_count=sum(1 for s in states if s.stage is Stage.CANCELLED),
        mean_time_to_accept=mean,
        event_trace=tuple(trace),
    )


def compare(
    scenario: Scenario,
    configs: Sequence[tuple[str, SystemConfig]],
    seed: int = 0,
    tick_step: timedelta = timedelta(seconds=1),
) -> list[SimReport]:
    """Run the same scenario under each config; one report per config."""
    reports = []
    for label, config in configs:
        report = run(scenario, config=config, seed=seed, tick_step=tick_step)
        reports.append(dataclasses.replace(report, label=label))
    return reports


CSV_COLUMNS = [
    "label",
    "tasks_total",
    "tasks_completed",
    "reminders_fired",
    "expired_count",
    "cancelled_count",
    "mean_time_to_accept_seconds",
]


def reports_to_csv(reports: Sequence[SimReport]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for report in reports:
        writer.writerow(report.to_row())
    return buffer.getvalue()


def format_report_table(reports: Sequence[SimReport]) -> str:
    rows = [CSV_COLUMNS] + [
        [str(report.to_row()[column]) for column in CSV_COLUMNS] for report in reports
    ]
    widths = [max(len(row[i]) for row in rows) for i in range(len(CSV_COLUMNS))]
    lines = ["  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)) for row in rows]
    return "\n".join(lines) + "\n"


def inject_event(scenario: Scenario, event: TriggerEvent) -> Scenario:
    """Add a trigger event; rejected when no task could ever consume it."""
    event_tasks = [i.task for i in scenario.items if i.task.kind is TaskKind.EVENT_BASED]
    if not event_tasks:
        raise ScenarioError("scenario has no event-based task to trigger")
    if event.kind is TriggerKind.LOCATION_ENTER:
        if not any(task.location is not None for task in event_tasks):
            raise ScenarioError("no event-based task carries a location")
    else:
        if not any(task.person is not None for task in event_tasks):
            raise ScenarioError("no event-based task carries a person")
    return dataclasses.replace(scenario, events=scenario.events + (event,))


def policy_from_wire(data: dict) -> UserPolicy:
    delay = data.get("delay_seconds")
    return UserPolicy(
        kind=PolicyKind(data["kind"]),
        p=float(data["p"]) if data.get("p") is not None else None,
        until=parse_ts(data["until"]) if data.get("until") else None,
        then_accept=bool(data.get("then_accept", True)),
        delay=timedelta(seconds=delay) if delay is not None else None,
        seed=int(data.get("seed", 0)),
    )


def policy_to_wire(policy: UserPolicy) -> dict:
    return {
        "kind": policy.kind.value,
        "p": policy.p,
        "until": format_ts(policy.until) if policy.until else None,
        "then_accept": policy.then_accept,
        "delay_seconds": policy.delay.total_seconds() if policy.delay else None,
        "seed": policy.seed,
    }


def scenario_from_dict(data: dict) -> Scenario:
    try:
        items = []
        for entry in data.get("tasks", []):
            task_data = dict(entry["task"])
            task_data.setdefault("id", "")
            items.append(
                ScenarioItem(
                    task=wire.task_from_wire(task_data),
                    policy=policy_from_wire(entry["policy"]),
                )
            )
        events = tuple(wire.trigger_from_wire(e) for e in data.get("events", []))
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"malformed scenario: {exc}") from exc
    scenario = Scenario(
        items=tuple(items),
        events=events,
        label=str(data.get("label", "scenario")),
        start=parse_ts(data["start"]) if data.get("start") else None,
        end=parse_ts(data["end"]) if data.get("end") else None,
    )
    scenario.validate()
    return scenario


def load_scenario(path: str | Path) -> Scenario:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
    return scenario_from_dict(data)
