"""HTTP daemon exposing the engine: task CRUD, responses, context, events.

The API is JSON over HTTP/1.1 with a Server-Sent Events stream for fired
reminders.  All mutations funnel through the engine's serialized command
surface; the stream fans out straight from the journal, so a client that
reconnects with ``Last-Event-ID`` sees every fire exactly once.
"""
from __future__ import annotations

import asyncio
import contextlib
import json
import logging
import os
from datetime import datetime, timedelta
from pathlib import Path
from typing import Literal, Optional

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import BaseModel, Field

from . import __version__, wire
from .agent import (
    AgentState,
    InvalidStageError,
    Place,
    ProMTask,
    ResponseKind,
    StaleResponseError,
    TaskValidationError,
    UserResponse,
)
from .config import SystemConfig, load_config
from .engine import Engine, UnknownTaskError
from .factors import TaskKind
from .planner import GeoPoint, TravelMode
from .store import JournalKind
from .timeutil import format_ts, to_utc
from .user_model import export_preferences

logger = logging.getLogger(__name__)

DEFAULT_ADDR = "127.0.0.1:7468"
DEFAULT_TICK_MS = 1000


class LocationIn(BaseModel):
    latitude: float = Field(ge=-90.0, le=90.0)
    longitude: float = Field(ge=-180.0, le=180.0)
    label: str = ""


class FactorsIn(BaseModel):
    complexity: Literal["low", "medium", "high"] = "medium"
    importance: Literal["low", "medium", "high"] = "medium"
    motivation: Literal["low", "medium", "high"] = "medium"
    age: Literal["young", "old"] = "young"
    category: Literal["personal", "financial", "social", "work"] = "personal"


class TaskIn(BaseModel):
    title: str
    kind: Literal["time", "event"] = "time"
    execute_at: Optional[datetime] = None
    first_reminder_at: Optional[datetime] = None
    location: Optional[LocationIn] = None
    person: Optional[str] = None
    travel_mode: Literal["walk", "car"] = "walk"
    factors: FactorsIn = FactorsIn()
    note: Optional[str] = None


class TaskPatch(BaseModel):
    title: Optional[str] = None
    execute_at: Optional[datetime] = None
    first_reminder_at: Optional[datetime] = None
    location: Optional[LocationIn] = None
    person: Optional[str] = None
    travel_mode: Optional[Literal["walk", "car"]] = None
    factors: Optional[FactorsIn] = None
    note: Optional[str] = None


class ResponseIn(BaseModel):
    kind: Literal["accept", "postpone", "ignore"]
    reminder_index: int = Field(ge=0)
    delay_seconds: Optional[float] = Field(default=None, gt=0)
    at: Optional[datetime] = None


def _place_from(body: Optional[LocationIn]) -> Optional[Place]:
    if body is None:
        return None
    return Place(point=GeoPoint(body.latitude, body.longitude), label=body.label)


def _task_from(body: TaskIn) -> ProMTask:
    return ProMTask(
        id="",
        title=body.title,
        kind=TaskKind(body.kind),
        profile=wire.profile_from_wire(body.factors.model_dump()),
        execute_at=to_utc(body.execute_at) if body.execute_at else None,
        first_reminder_at=to_utc(body.first_reminder_at) if body.first_reminder_at else None,
        location=_place_from(body.location),
        person=body.person,
        travel_mode=TravelMode(body.travel_mode),
        note=body.note,
    )


def api_task(state: AgentState) -> dict:
    data = wire.state_to_wire(state)
    return {"id": state.task_id, **data}


def _field_error(field: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=422,
        content={"detail": [{"loc": ["body", field], "msg": message, "type": "value_error"}]},
    )


def create_app(
    engine: Engine,
    *,
    tick_ms: Optional[int] = None,
    poll_interval: float = 0.25,
    heartbeat_seconds: float = 10.0,
) -> FastAPI:
    """Build the API application; ``tick_ms=None`` disables the wall-clock driver."""

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        ticker = None
        if tick_ms:
            ticker = asyncio.create_task(_drive())
        yield
        if ticker is not None:
            ticker.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await ticker

    async def _drive() -> None:
        while True:
            try:
                engine.tick()
            except Exception:  # pragma: no cover - defensive
                logger.exception("tick failed")
            await asyncio.sleep(tick_ms / 1000.0)

    app = FastAPI(title="promind", version=__version__, lifespan=lifespan)
    app.state.engine = engine

    @app.exception_handler(TaskValidationError)
    async def _validation(request: Request, exc: TaskValidationError):
        return _field_error(exc.field, exc.message)

    @app.exception_handler(UnknownTaskError)
    async def _unknown(request: Request, exc: UnknownTaskError):
        return JSONResponse(status_code=404, content={"detail": f"unknown task {exc.args[0]}"})

    @app.exception_handler(InvalidStageError)
    async def _stage(request: Request, exc: InvalidStageError):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(StaleResponseError)
    async def _stale(request: Request, exc: StaleResponseError):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.post("/tasks", status_code=201)
    def create_task(body: TaskIn):
        """Plan, encode, and journal a new task; the response carries its plan."""
        state = engine.create_task(_task_from(body))
        return api_task(state)

    @app.get("/tasks")
    def list_tasks():
        return [api_task(state) for state in engine.list_states()]

    @app.get("/tasks/{task_id}")
    def get_task(task_id: str):
        return api_task(engine.get_state(task_id))

    @app.patch("/tasks/{task_id}")
    def patch_task(task_id: str, body: TaskPatch):
        """Edit task fields; unfired reminders are re-planned."""
        provided = body.model_dump(exclude_unset=True)
        edits: dict = {}
        if "title" in provided:
            edits["title"] = body.title
        if "execute_at" in provided:
            edits["execute_at"] = to_utc(body.execute_at) if body.execute_at else None
        if "first_reminder_at" in provided:
            edits["first_reminder_at"] = (
                to_utc(body.first_reminder_at) if body.first_reminder_at else None
            )
        if "location" in provided:
            edits["location"] = _place_from(body.location)
        if "person" in provided:
            edits["person"] = body.person
        if "travel_mode" in provided:
            edits["travel_mode"] = TravelMode(body.travel_mode)
        if "factors" in provided:
            edits["profile"] = wire.profile_from_wire(body.factors.model_dump())
        if "note" in provided:
            edits["note"] = body.note
        return api_task(engine.update_task(task_id, edits))

    @app.delete("/tasks/{task_id}")
    def delete_task(task_id: str):
        """Cancel the task; it stays visible with stage cancelled."""
        return api_task(engine.cancel_task(task_id))

    @app.post("/tasks/{task_id}/response")
    def respond(task_id: str, body: ResponseIn):
        """Route an accept, postpone, or ignore back into the agent."""
        if body.kind == "postpone" and body.delay_seconds is None:
            return _field_error("delay_seconds", "postpone needs a positive delay")
        response = UserResponse(
            kind=ResponseKind(body.kind),
            at=to_utc(body.at) if body.at else engine.clock(),
            reminder_index=body.reminder_index,
            delay=timedelta(seconds=body.delay_seconds) if body.delay_seconds else None,
        )
        return api_task(engine.respond(task_id, response))

    @app.post("/context/location", status_code=202)
    def set_location(body: LocationIn):
        """Update the user's position; may latch triggers or pull reminders earlier."""
        actions = engine.set_location(GeoPoint(body.latitude, body.longitude))
        return {"accepted": True, "fired": len(actions)}

    @app.get("/preferences")
    def preferences():
        return export_preferences(engine.preference)

    @app.get("/health")
    def health():
        return {"version": __version__, "sequence": engine.journal.last_sequence}

    def _reminder_event(entry) -> str:
        payload = dict(entry.payload)
        task_id = payload["task_id"]
        try:
            state = engine.get_state(task_id)
            title, person = state.task.title, state.task.person
        except UnknownTaskError:  # pragma: no cover - journal outlives state only in tests
            title, person = None, None
        data = json.dumps(
            {
                "task_id": task_id,
                "index": payload["index"],
                "modality": payload["modality"],
                "title": title,
                "person": person,
                "at": format_ts(entry.at),
            },
            separators=(",", ":"),
        )
        return f"id: {entry.sequence}\nevent: reminder\ndata: {data}\n\n"

    @app.get("/events")
    async def events(request: Request, last_event_id: int = Query(default=None, ge=0)):
        """Server-Sent Events stream of fired reminders, resumable by sequence id."""
        header_id = request.headers.get("last-event-id")
        cursor = 0
        if last_event_id is not None:
            cursor = last_event_id
        elif header_id is not None and header_id.isdigit():
            cursor = int(header_id)

        async def stream():
            nonlocal cursor
            yield ": connected\n\n"
            idle = 0.0
            while True:
                if await request.is_disconnected():
                    return
                batch = engine.journal.entries_after(cursor, JournalKind.REMINDER_FIRED)
                for entry in batch:
                    cursor = entry.sequence
                    yield _reminder_event(entry)
                if batch:
                    idle = 0.0
                else:
                    idle += poll_interval
                    if idle >= heartbeat_seconds:
                        idle = 0.0
                        yield ": heartbeat\n\n"
                await asyncio.sleep(poll_interval)

        return StreamingResponse(stream(), media_type="text/event-stream")

    return app


def build_engine_from_env(
    data_dir: Optional[str] = None, config_path: Optional[str] = None
) -> Engine:
    """Construct a durable engine from environment defaults."""
    root = Path(data_dir or os.environ.get("PROMIND_DATA_DIR", "./data"))
    cfg_path = config_path or os.environ.get("PROMIND_CONFIG")
    if cfg_path:
        config = load_config(cfg_path)
    elif (root / "config.json").exists():
        config = load_config(root / "config.json")
    else:
        config = SystemConfig()
    engine = Engine.open(root, config)
    engine.write_config_copy()
    return engine


def serve(
    addr: Optional[str] = None,
    data_dir: Optional[str] = None,
    config_path: Optional[str] = None,
    tick_ms: Optional[int] = None,
) -> None:
    """Run the daemon until interrupted."""
    import uvicorn

    address = addr or os.environ.get("PROMIND_ADDR", DEFAULT_ADDR)
    host, _, port = address.partition(":")
    if tick_ms is None:
        tick_ms = int(os.environ.get("PROMIND_TICK_MS", DEFAULT_TICK_MS))
    engine = build_engine_from_env(data_dir, config_path)
    app = create_app(engine, tick_ms=tick_ms)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 7468), log_level="warning")
