"""Command surface tying planner, agent, learner, and journal together.

Every mutation enters through one of the command methods, is validated,
journaled, then committed, all under a single lock, so the journal is a
faithful, replayable record of the engine's life.  The HTTP service, the
CLI, and the simulator all drive this same surface, which is what makes
their behaviours comparable entry for entry.
"""
from __future__ import annotations

import dataclasses
import logging
import re
import threading
from datetime import datetime, timedelta
from pathlib import Path
from typing import Callable, Mapping, Optional

from . import agent as agent_ops
from .agent import (
    ActionKind,
    AgentAction,
    AgentState,
    ProMTask,
    ResponseKind,
    Stage,
    TriggerEvent,
    TriggerKind,
    UserResponse,
)
from .config import SystemConfig
from .factors import TaskKind
from .planner import (
    GeoPoint,
    adjust_first_reminder,
    build_plan,
    compute_time_cost,
    distribute_schedule,
)
from .store import (
    CONFIG_FILE,
    JOURNAL_FILE,
    SNAPSHOT_FILE,
    FileJournal,
    Journal,
    JournalEntry,
    JournalKind,
    load_snapshot,
    save_snapshot,
)
from .timeutil import format_ts, parse_ts, to_utc, utc_now
from .user_model import (
    InteractionRecord,
    PreferenceState,
    adapt_plan,
    export_preferences,
    import_preferences,
    record_interaction,
)
from . import wire

logger = logging.getLogger(__name__)

_TASK_ID_PATTERN = re.compile(r"^t(\d+)$")


class UnknownTaskError(KeyError):
    """No task with the given id."""


class Engine:
    def __init__(
        self,
        config: Optional[SystemConfig] = None,
        journal: Optional[Journal] = None,
        *,
        clock: Callable[[], datetime] = utc_now,
        data_dir: Optional[Path] = None,
    ):
        self.config = config or SystemConfig()
        self.journal = journal if journal is not None else Journal()
        self.clock = clock
        self.data_dir = data_dir
        self._lock = threading.RLock()
        self._states: dict[str, AgentState] = {}
        self._staging: dict[str, ProMTask] = {}
        self._preference = PreferenceState()
        self._location: Optional[GeoPoint] = None
        self._next_task_number = 1

    # ------------------------------------------------------------------ setup

    @classmethod
    def open(
        cls,
        data_dir: str | Path,
        config: Optional[SystemConfig] = None,
        *,
        clock: Callable[[], datetime] = utc_now,
    ) -> "Engine":
        """Recover an engine from a data directory: snapshot plus journal tail."""
        root = Path(data_dir)
        journal = FileJournal(root / JOURNAL_FILE)
        engine = cls(config, journal, clock=clock, data_dir=root)
        snap = load_snapshot(root / SNAPSHOT_FILE)
        replay_from = 0
        if snap is not None:
            engine._restore_snapshot(snap)
            replay_from = int(snap["sequence"])
        for entry in journal.entries_after(replay_from):
            engine._apply(entry)
        engine._recompute_task_counter()
        return engine

    def _now(self, at: Optional[datetime]) -> datetime:
        return to_utc(at) if at is not None else self.clock()

    def _recompute_task_counter(self) -> None:
        highest = 0
        for task_id in self._states:
            match = _TASK_ID_PATTERN.match(task_id)
            if match:
                highest = max(highest, int(match.group(1)))
        self._next_task_number = highest + 1

    # --------------------------------------------------------------- commands

    def create_task(self, task: ProMTask, *, at: Optional[datetime] = None) -> AgentState:
        with self._lock:
            stamp = self._now(at)
            if not task.id:
                task = dataclasses.replace(task, id=f"t{self._next_task_number}")
            task.validate()
            if task.id in self._states:
                raise ValueError(f"task id {task.id} already exists")
            plan = self._plan_for(task, stamp)
            state = agent_ops.encode(task, plan)
            self.journal.append(JournalKind.TASK_CREATED, {"task": wire.task_to_wire(task)}, stamp)
            self.journal.append(
                JournalKind.PLAN_BUILT,
                {"task_id": task.id, "plan": wire.plan_to_wire(plan)},
                stamp,
            )
            self._states[task.id] = state
            match = _TASK_ID_PATTERN.match(task.id)
            if match:
                self._next_task_number = max(self._next_task_number, int(match.group(1)) + 1)
            return state

    def _plan_for(self, task: ProMTask, at: datetime):
        plan = build_plan(task, self.config, current_location=self._location, now=at)
        return adapt_plan(plan, self._preference, self.config.preference_blend)

    def get_state(self, task_id: str) -> AgentState:
        with self._lock:
            try:
                return self._states[task_id]
            except KeyError:
                raise UnknownTaskError(task_id) from None

    def list_states(self) -> list[AgentState]:
        with self._lock:
            return list(self._states.values())

    def update_task(
        self, task_id: str, edits: Mapping[str, object], *, at: Optional[datetime] = None
    ) -> AgentState:
        with self._lock:
            stamp = self._now(at)
            state = self.get_state(task_id)
            replanner = lambda task: self._plan_for(task, stamp)  # noqa: E731
            new_state = agent_ops.update_task(state, edits, replanner)
            self.journal.append(
                JournalKind.TASK_UPDATED,
                {
                    "task_id": task_id,
                    "task": wire.task_to_wire(new_state.task),
                    "plan": wire.plan_to_wire(new_state.plan),
                },
                stamp,
            )
            if new_state.stage != state.stage:
                self._journal_stage(task_id, new_state.stage, stamp)
            self._states[task_id] = new_state
            return new_state

    def cancel_task(self, task_id: str, *, at: Optional[datetime] = None) -> AgentState:
        with self._lock:
            stamp = self._now(at)
            state = self.get_state(task_id)
            new_state = agent_ops.cancel(state)
            self._journal_stage(task_id, new_state.stage, stamp)
            self._states[task_id] = new_state
            return new_state

    def respond(self, task_id: str, response: UserResponse) -> AgentState:
        with self._lock:
            state = self.get_state(task_id)
            new_state, _actions = agent_ops.handle_response(state, response)
            latency: Optional[timedelta] = None
            if response.kind is not ResponseKind.IGNORE:
                latency = response.at - state.fired_at[response.reminder_index]
            record = InteractionRecord(
                task_id=task_id,
                reminder_index=response.reminder_index,
                modality_used=state.plan.modality,
                response=response.kind,
                latency=latency,
            )
            new_pref = record_interaction(self._preference, record, self.config.learning_rate)
            self.journal.append(
                JournalKind.RESPONSE_RECEIVED,
                {"task_id": task_id, "response": wire.response_to_wire(response)},
                response.at,
            )
            self.journal.append(
                JournalKind.PREFERENCE_UPDATED,
                {
                    "record": wire.interaction_to_wire(record),
                    "alpha": self.config.learning_rate,
                },
                response.at,
            )
            if new_state.stage != state.stage:
                self._journal_stage(task_id, new_state.stage, response.at)
            self._states[task_id] = new_state
            self._preference = new_pref
            return new_state

    def tick(self, now: Optional[datetime] = None) -> list[AgentAction]:
        """Advance every live task to ``now``; returns the delivered actions."""
        with self._lock:
            stamp = self._now(now)
            delivered: list[AgentAction] = []
            for task_id in list(self._states):
                state = self._states[task_id]
                if state.is_terminal:
                    continue
                new_state, actions = agent_ops.tick(state, stamp, grace=self.config.grace)
                real = [a for a in actions if a.kind is not ActionKind.NOOP]
                if not real:
                    continue
                for action in real:
                    if action.kind is ActionKind.FIRE_REMINDER:
                        self._journal_fire(action)
                if new_state.stage != state.stage:
                    self._journal_stage(task_id, new_state.stage, stamp)
                self._states[task_id] = new_state
                delivered.extend(real)
            return delivered

    def set_location(
        self, point: GeoPoint, *, at: Optional[datetime] = None
    ) -> list[AgentAction]:
        """Record the user's position; latch location triggers and re-fit travel time."""
        with self._lock:
            stamp = self._now(at)
            self._location = point
            delivered: list[AgentAction] = []
            for task_id in list(self._states):
                state = self._states[task_id]
                if state.is_terminal:
                    continue
                task = state.task
                if task.kind is TaskKind.EVENT_BASED:
                    event = TriggerEvent(TriggerKind.LOCATION_ENTER, stamp, point=point)
                    delivered.extend(self._latch_if_matching(state, event))
                elif task.location is not None and state.fired_count == 0:
                    self._refit_travel(state, point, stamp)
            return delivered

    def person_call(self, name: str, *, at: Optional[datetime] = None) -> list[AgentAction]:
        """A call to ``name`` begins; latch any matching person triggers."""
        with self._lock:
            stamp = self._now(at)
            delivered: list[AgentAction] = []
            for task_id in list(self._states):
                state = self._states[task_id]
                if state.is_terminal or state.task.kind is not TaskKind.EVENT_BASED:
                    continue
                event = TriggerEvent(TriggerKind.CALLING_PERSON, stamp, person=name)
                delivered.extend(self._latch_if_matching(state, event))
            return delivered

    def deliver_trigger(self, event: TriggerEvent) -> list[AgentAction]:
        if event.kind is TriggerKind.LOCATION_ENTER:
            return self.set_location(event.point, at=event.at)
        return self.person_call(event.person, at=event.at)

    def _latch_if_matching(self, state: AgentState, event: TriggerEvent) -> list[AgentAction]:
        new_state, actions = agent_ops.apply_trigger(
            state, event, self.config.proximity_radius_m
        )
        if not new_state.trigger_latched or state.trigger_latched:
            return []
        self.journal.append(
            JournalKind.TRIGGER_LATCHED,
            {
                "task_id": state.task_id,
                "event": wire.trigger_to_wire(event),
                "schedule": [format_ts(entry) for entry in new_state.plan.schedule],
            },
            event.at,
        )
        real = [a for a in actions if a.kind is not ActionKind.NOOP]
        for action in real:
            if action.kind is ActionKind.FIRE_REMINDER:
                self._journal_fire(action)
        self._journal_stage(state.task_id, new_state.stage, event.at)
        self._states[state.task_id] = new_state
        return real

    def _refit_travel(self, state: AgentState, point: GeoPoint, stamp: datetime) -> None:
        task = state.task
        cost = compute_time_cost(point, task.location.point, task.travel_mode)
        new_first, warning = adjust_first_reminder(
            task.first_reminder_at, task.execute_at, cost, now=stamp
        )
        if new_first == state.plan.schedule[0]:
            return
        entries = distribute_schedule(new_first, task.execute_at, state.plan.count)
        plan = dataclasses.replace(
            state.plan, schedule=tuple(entries), count=len(entries), warning=warning
        )
        new_state = dataclasses.replace(state, plan=plan)
        self.journal.append(
            JournalKind.TASK_UPDATED,
            {
                "task_id": task.id,
                "task": wire.task_to_wire(task),
                "plan": wire.plan_to_wire(plan),
            },
            stamp,
        )
        self._states[task.id] = new_state

    # ------------------------------------------------------------- journaling

    def _journal_fire(self, action: AgentAction) -> None:
        self.journal.append(
            JournalKind.REMINDER_FIRED,
            {
                "task_id": action.task_id,
                "index": action.index,
                "modality": wire.modality_to_wire(action.modality),
            },
            action.at,
        )

    def _journal_stage(self, task_id: str, stage: Stage, at: datetime) -> None:
        self.journal.append(
            JournalKind.STAGE_CHANGED, {"task_id": task_id, "stage": stage.value}, at
        )

    # ------------------------------------------------------ snapshot & replay

    @property
    def preference(self) -> PreferenceState:
        with self._lock:
            return self._preference

    @property
    def location(self) -> Optional[GeoPoint]:
        with self._lock:
            return self._location

    def state_fingerprint(self) -> dict:
        """Canonical structural view of everything the journal governs."""
        with self._lock:
            return {
                "states": {tid: wire.state_to_wire(s) for tid, s in sorted(self._states.items())},
                "preference": export_preferences(self._preference),
            }

    def snapshot_payload(self) -> dict:
        with self._lock:
            return {
                "sequence": self.journal.last_sequence,
                "states": [wire.state_to_wire(s) for s in self._states.values()],
                "preference": export_preferences(self._preference),
            }

    def write_snapshot(self, path: Optional[str | Path] = None) -> Path:
        if path is None:
            if self.data_dir is None:
                raise ValueError("no snapshot path: engine has no data directory")
            path = self.data_dir / SNAPSHOT_FILE
        save_snapshot(path, self.snapshot_payload())
        return Path(path)

    def _restore_snapshot(self, snap: dict) -> None:
        for data in snap["states"]:
            state = wire.state_from_wire(data)
            self._states[state.task_id] = state
        self._preference = import_preferences(snap["preference"])

    def _apply(self, entry: JournalEntry) -> None:
        """Re-apply one journal entry during recovery."""
        kind, payload = entry.kind, entry.payload
        if kind is JournalKind.TASK_CREATED:
            task = wire.task_from_wire(payload["task"])
            self._staging[task.id] = task
        elif kind is JournalKind.PLAN_BUILT:
            task = self._staging.pop(payload["task_id"])
            plan = wire.plan_from_wire(payload["plan"])
            self._states[task.id] = AgentState(task=task, stage=Stage.RETENTION, plan=plan)
        elif kind is JournalKind.TASK_UPDATED:
            state = self._states[payload["task_id"]]
            self._states[payload["task_id"]] = dataclasses.replace(
                state,
                task=wire.task_from_wire(payload["task"]),
                plan=wire.plan_from_wire(payload["plan"]),
                stage=Stage.RETENTION if state.stage is Stage.INITIATING else state.stage,
            )
        elif kind is JournalKind.REMINDER_FIRED:
            state = self._states[payload["task_id"]]
            self._states[payload["task_id"]] = dataclasses.replace(
                state, fired_at=state.fired_at + (entry.at,), stage=Stage.INITIATING
            )
        elif kind is JournalKind.TRIGGER_LATCHED:
            state = self._states[payload["task_id"]]
            schedule = tuple(parse_ts(t) for t in payload["schedule"])
            plan = dataclasses.replace(
                state.plan, schedule=schedule, offsets=(), count=len(schedule)
            )
            self._states[payload["task_id"]] = dataclasses.replace(
                state, plan=plan, trigger_latched=True
            )
        elif kind is JournalKind.RESPONSE_RECEIVED:
            state = self._states[payload["task_id"]]
            response = wire.response_from_wire(payload["response"])
            new_state, _ = agent_ops.handle_response(state, response)
            self._states[payload["task_id"]] = new_state
        elif kind is JournalKind.PREFERENCE_UPDATED:
            record = wire.interaction_from_wire(payload["record"])
            self._preference = record_interaction(
                self._preference, record, float(payload["alpha"])
            )
        elif kind is JournalKind.STAGE_CHANGED:
            state = self._states[payload["task_id"]]
            self._states[payload["task_id"]] = dataclasses.replace(
                state, stage=Stage(payload["stage"])
            )
        else:  # pragma: no cover
            logger.warning("unknown journal kind %s ignored", kind)

    def write_config_copy(self) -> None:
        if self.data_dir is not None:
            from .config import save_config

            save_config(self.config, self.data_dir / CONFIG_FILE)
