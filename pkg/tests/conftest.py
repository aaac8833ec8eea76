from __future__ import annotations

import socket
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone

import httpx
import pytest
import uvicorn

from promind.config import SystemConfig
from promind.engine import Engine
from promind.factors import AgeGroup, CountTable, FactorLevel, FactorProfile, TaskCategory, TaskKind
from promind.agent import Place, ProMTask
from promind.planner import GeoPoint
from promind.service import create_app
from promind.store import Journal


def ts(hour: int, minute: int = 0, second: int = 0, day: int = 1) -> datetime:
    return datetime(2026, 1, day, hour, minute, second, tzinfo=timezone.utc)


def profile(
    com: str = "medium",
    imp: str = "medium",
    mot: str = "medium",
    age: str = "young",
    typ: str = "personal",
) -> FactorProfile:
    return FactorProfile(
        complexity=FactorLevel.parse(com),
        importance=FactorLevel.parse(imp),
        motivation=FactorLevel.parse(mot),
        age=AgeGroup.parse(age),
        category=TaskCategory.parse(typ),
    )


def time_task(
    task_id: str = "t1",
    title: str = "meeting",
    whe: datetime | None = None,
    rem: datetime | None = None,
    factors: FactorProfile | None = None,
    location: Place | None = None,
) -> ProMTask:
    return ProMTask(
        id=task_id,
        title=title,
        kind=TaskKind.TIME_BASED,
        profile=factors or profile(),
        execute_at=whe or ts(14),
        first_reminder_at=rem or ts(12),
        location=location,
    )


def event_task(
    task_id: str = "e1",
    title: str = "buy milk",
    location: Place | None = None,
    person: str | None = None,
    whe: datetime | None = None,
    factors: FactorProfile | None = None,
) -> ProMTask:
    if location is None and person is None:
        location = Place(point=GeoPoint(1.0, 1.0), label="store")
    return ProMTask(
        id=task_id,
        title=title,
        kind=TaskKind.EVENT_BASED,
        profile=factors or profile(),
        execute_at=whe,
        location=location,
        person=person,
    )


def config_with_max_count(max_count: int) -> SystemConfig:
    """Default tables with every cell clamped to a plan-size ceiling."""
    base = CountTable()
    return SystemConfig(
        count_table=CountTable(
            n_low=min(base.n_low, max_count),
            n_medium=min(base.n_medium, max_count),
            n_high=min(base.n_high, max_count),
            a_young=min(base.a_young, max_count),
            a_old=min(base.a_old, max_count),
            max_count=max_count,
        )
    )


@pytest.fixture
def config() -> SystemConfig:
    return SystemConfig()


@pytest.fixture
def grace() -> timedelta:
    return SystemConfig().grace


class ManualClock:
    """Injectable clock; tests move time explicitly."""

    def __init__(self, now: datetime):
        self.now = now

    def __call__(self) -> datetime:
        return self.now


@dataclass
class LiveServer:
    base_url: str
    addr: str
    engine: Engine
    clock: ManualClock
    client: httpx.Client


def _free_port() -> int:
    sock = socket.socket()
    sock.bind(("127.0.0.1", 0))
    port = sock.getsockname()[1]
    sock.close()
    return port


@pytest.fixture
def live_server():
    """A real daemon on localhost with a manually driven clock and no ticker."""
    clock = ManualClock(ts(8))
    engine = Engine(SystemConfig(), Journal(), clock=clock)
    app = create_app(engine, tick_ms=None, poll_interval=0.02, heartbeat_seconds=0.05)
    port = _free_port()
    server = uvicorn.Server(
        uvicorn.Config(app, host="127.0.0.1", port=port, log_level="error")
    )
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    base_url = f"http://127.0.0.1:{port}"
    client = httpx.Client(base_url=base_url, timeout=5.0)
    for _ in range(200):
        try:
            client.get("/health")
            break
        except httpx.HTTPError:
            time.sleep(0.02)
    else:
        raise RuntimeError("daemon did not come up")
    yield LiveServer(base_url=base_url, addr=f"127.0.0.1:{port}", engine=engine, clock=clock, client=client)
    client.close()
    server.should_exit = True
    thread.join(timeout=5)
