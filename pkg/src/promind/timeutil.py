"""UTC timestamp helpers.

Every timestamp the engine touches is timezone-aware UTC truncated to whole
seconds; durations are :class:`datetime.timedelta`.
"""
from __future__ import annotations

from datetime import datetime, timedelta, timezone


def utc_now() -> datetime:
    """Current UTC time at whole-second granularity."""
    return datetime.now(timezone.utc).replace(microsecond=0)


def to_utc(value: datetime) -> datetime:
    """Normalize a datetime to aware UTC, whole seconds. Naive input is taken as UTC."""
    if value.tzinfo is None:
        value = value.replace(tzinfo=timezone.utc)
    return value.astimezone(timezone.utc).replace(microsecond=0)


def format_ts(value: datetime) -> str:
    """RFC 3339 text (Z suffix)."""
    return to_utc(value).strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_ts(text: str) -> datetime:
    """Parse RFC 3339 text; accepts both 'Z' and numeric offsets."""
    return to_utc(datetime.fromisoformat(text.replace("Z", "+00:00")))


def from_epoch(seconds: int) -> datetime:
    return datetime.fromtimestamp(seconds, tz=timezone.utc)


def to_epoch(value: datetime) -> int:
    return int(to_utc(value).timestamp())


def seconds(value: timedelta) -> float:
    return value.total_seconds()
