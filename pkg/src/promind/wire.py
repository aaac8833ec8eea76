"""JSON wire forms for every domain record.

One dialect everywhere: journal payloads, snapshots, the HTTP API, and
scenario files all share these converters, so a record round-trips
losslessly between any two of them.  Timestamps are RFC 3339 UTC text,
durations are numbers of seconds.
"""
from __future__ import annotations

from datetime import timedelta

from .agent import (
    AgentAction,
    AgentState,
    Place,
    ProMTask,
    ResponseKind,
    Stage,
    TriggerEvent,
    TriggerKind,
    UserResponse,
)
from .factors import AgeGroup, FactorLevel, FactorProfile, ModalityScore, TaskCategory, TaskKind
from .planner import Channel, Duration, GeoPoint, ReminderModality, ReminderPlan, Sound, TravelMode
from .timeutil import format_ts, parse_ts
from .user_model import InteractionRecord


def geo_point_to_wire(point: GeoPoint) -> dict:
    return {"latitude": point.latitude, "longitude": point.longitude}


def geo_point_from_wire(data: dict) -> GeoPoint:
    return GeoPoint(latitude=float(data["latitude"]), longitude=float(data["longitude"]))


def place_to_wire(place: Place) -> dict:
    return {**geo_point_to_wire(place.point), "label": place.label}


def place_from_wire(data: dict) -> Place:
    return Place(point=geo_point_from_wire(data), label=str(data.get("label", "")))


def profile_to_wire(profile: FactorProfile) -> dict:
    return {
        "complexity": profile.complexity.value,
        "importance": profile.importance.value,
        "motivation": profile.motivation.value,
        "age": profile.age.value,
        "category": profile.category.value,
    }


def profile_from_wire(data: dict) -> FactorProfile:
    return FactorProfile(
        complexity=FactorLevel.parse(data.get("complexity", "medium")),
        importance=FactorLevel.parse(data.get("importance", "medium")),
        motivation=FactorLevel.parse(data.get("motivation", "medium")),
        age=AgeGroup.parse(data.get("age", "young")),
        category=TaskCategory.parse(data.get("category", "personal")),
    )


def modality_to_wire(modality: ReminderModality) -> dict:
    return {
        "channel": modality.channel.value,
        "duration": modality.duration.value,
        "sound": modality.sound.value,
    }


def modality_from_wire(data: dict) -> ReminderModality:
    return ReminderModality(
        channel=Channel(data["channel"]),
        duration=Duration(data["duration"]),
        sound=Sound(data["sound"]),
    )


def score_to_wire(score: ModalityScore) -> dict:
    return {"channel": score.channel, "duration": score.duration, "sound": score.sound}


def score_from_wire(data: dict) -> ModalityScore:
    return ModalityScore(
        channel=float(data["channel"]),
        duration=float(data["duration"]),
        sound=float(data["sound"]),
    )


def plan_to_wire(plan: ReminderPlan) -> dict:
    return {
        "count": plan.count,
        "schedule": [format_ts(entry) for entry in plan.schedule],
        "offsets_seconds": [offset.total_seconds() for offset in plan.offsets],
        "modality": modality_to_wire(plan.modality),
        "raw_modality_score": score_to_wire(plan.raw_modality_score),
        "warning": plan.warning,
    }


def plan_from_wire(data: dict) -> ReminderPlan:
    return ReminderPlan(
        count=int(data["count"]),
        schedule=tuple(parse_ts(entry) for entry in data["schedule"]),
        offsets=tuple(timedelta(seconds=s) for s in data["offsets_seconds"]),
        modality=modality_from_wire(data["modality"]),
        raw_modality_score=score_from_wire(data["raw_modality_score"]),
        warning=data.get("warning"),
    )


def task_to_wire(task: ProMTask) -> dict:
    return {
        "id": task.id,
        "title": task.title,
        "kind": task.kind.value,
        "factors": profile_to_wire(task.profile),
        "execute_at": format_ts(task.execute_at) if task.execute_at else None,
        "first_reminder_at": (
            format_ts(task.first_reminder_at) if task.first_reminder_at else None
        ),
        "location": place_to_wire(task.location) if task.location else None,
        "person": task.person,
        "travel_mode": task.travel_mode.value,
        "note": task.note,
    }


def task_from_wire(data: dict) -> ProMTask:
    return ProMTask(
        id=str(data["id"]),
        title=str(data["title"]),
        kind=TaskKind(data["kind"]),
        profile=profile_from_wire(data.get("factors") or {}),
        execute_at=parse_ts(data["execute_at"]) if data.get("execute_at") else None,
        first_reminder_at=(
            parse_ts(data["first_reminder_at"]) if data.get("first_reminder_at") else None
        ),
        location=place_from_wire(data["location"]) if data.get("location") else None,
        person=data.get("person"),
        travel_mode=TravelMode.parse(data.get("travel_mode", "walk")),
        note=data.get("note"),
    )


def response_to_wire(response: UserResponse) -> dict:
    return {
        "kind": response.kind.value,
        "at": format_ts(response.at),
        "reminder_index": response.reminder_index,
        "delay_seconds": response.delay.total_seconds() if response.delay else None,
    }


def response_from_wire(data: dict) -> UserResponse:
    delay = data.get("delay_seconds")
    return UserResponse(
        kind=ResponseKind(data["kind"]),
        at=parse_ts(data["at"]),
        reminder_index=int(data["reminder_index"]),
        delay=timedelta(seconds=delay) if delay is not None else None,
    )


def trigger_to_wire(event: TriggerEvent) -> dict:
    out: dict = {"kind": event.kind.value, "at": format_ts(event.at)}
    if event.point is not None:
        out.update(geo_point_to_wire(event.point))
    if event.person is not None:
        out["person"] = event.person
    return out


def trigger_from_wire(data: dict) -> TriggerEvent:
    kind = TriggerKind(data["kind"])
    point = None
    if kind is TriggerKind.LOCATION_ENTER:
        point = geo_point_from_wire(data)
    return TriggerEvent(kind=kind, at=parse_ts(data["at"]), point=point, person=data.get("person"))


def state_to_wire(state: AgentState) -> dict:
    return {
        "task": task_to_wire(state.task),
        "stage": state.stage.value,
        "plan": plan_to_wire(state.plan),
        "fired_at": [format_ts(stamp) for stamp in state.fired_at],
        "postpone_total_seconds": state.postpone_total.total_seconds(),
        "trigger_latched": state.trigger_latched,
    }


def state_from_wire(data: dict) -> AgentState:
    return AgentState(
        task=task_from_wire(data["task"]),
        stage=Stage(data["stage"]),
        plan=plan_from_wire(data["plan"]),
        fired_at=tuple(parse_ts(stamp) for stamp in data["fired_at"]),
        postpone_total=timedelta(seconds=data["postpone_total_seconds"]),
        trigger_latched=bool(data["trigger_latched"]),
    )


def interaction_to_wire(record: InteractionRecord) -> dict:
    return {
        "task_id": record.task_id,
        "reminder_index": record.reminder_index,
        "modality_used": modality_to_wire(record.modality_used),
        "response": record.response.value,
        "latency_seconds": record.latency.total_seconds() if record.latency else None,
    }


def interaction_from_wire(data: dict) -> InteractionRecord:
    latency = data.get("latency_seconds")
    return InteractionRecord(
        task_id=str(data["task_id"]),
        reminder_index=int(data["reminder_index"]),
        modality_used=modality_from_wire(data["modality_used"]),
        response=ResponseKind(data["response"]),
        latency=timedelta(seconds=latency) if latency is not None else None,
    )


def action_to_wire(action: AgentAction) -> dict:
    return {
        "kind": action.kind.value,
        "task_id": action.task_id,
        "at": format_ts(action.at),
        "index": action.index,
        "modality": modality_to_wire(action.modality) if action.modality else None,
    }
