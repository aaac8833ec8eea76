"""Append-only journal and snapshot persistence.

The journal is newline-delimited JSON, one entry per line, each line
carrying a format-version field first.  Appends are durable (flushed and
fsynced) before they return.  A corrupt trailing line is truncated away
on open and reported; everything before it survives.
"""
from __future__ import annotations

import enum
import json
import logging
import os
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Optional

from .timeutil import format_ts, parse_ts

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1

JOURNAL_FILE = "journal.ndjson"
SNAPSHOT_FILE = "snapshot.json"
CONFIG_FILE = "config.json"


class StoreError(Exception):
    """Storage failure; safe to retry, no partial entry is visible."""


class JournalKind(enum.Enum):
    TASK_CREATED = "task_created"
    TASK_UPDATED = "task_updated"
    PLAN_BUILT = "plan_built"
    REMINDER_FIRED = "reminder_fired"
    RESPONSE_RECEIVED = "response_received"
    TRIGGER_LATCHED = "trigger_latched"
    STAGE_CHANGED = "stage_changed"
    PREFERENCE_UPDATED = "preference_updated"


@dataclass(frozen=True)
class JournalEntry:
    sequence: int
    at: datetime
    kind: JournalKind
    payload: dict

    def to_line(self) -> str:
        return json.dumps(
            {
                "v": FORMAT_VERSION,
                "seq": self.sequence,
                "at": format_ts(self.at),
                "kind": self.kind.value,
                "payload": self.payload,
            },
            separators=(",", ":"),
            sort_keys=False,
        )

    @classmethod
    def from_line(cls, line: str) -> "JournalEntry":
        data = json.loads(line)
        if data.get("v") != FORMAT_VERSION:
            raise ValueError(f"unsupported journal format version {data.get('v')!r}")
        return cls(
            sequence=int(data["seq"]),
            at=parse_ts(data["at"]),
            kind=JournalKind(data["kind"]),
            payload=data["payload"],
        )


class Journal:
    """In-memory journal; base class for the durable variant."""

    def __init__(self) -> None:
        self._entries: list[JournalEntry] = []

    @property
    def last_sequence(self) -> int:
        return self._entries[-1].sequence if self._entries else 0

    def append(self, kind: JournalKind, payload: dict, at: datetime) -> int:
        entry = JournalEntry(self.last_sequence + 1, at, kind, payload)
        self._persist(entry)
        self._entries.append(entry)
        return entry.sequence

    def entries(self, from_sequence: int = 1) -> list[JournalEntry]:
        if from_sequence < 1:
            raise ValueError("from_sequence starts at 1")
        return [e for e in self._entries if e.sequence >= from_sequence]

    def entries_after(self, sequence: int, kind: Optional[JournalKind] = None) -> list[JournalEntry]:
        return [
            e
            for e in self._entries
            if e.sequence > sequence and (kind is None or e.kind is kind)
        ]

    def _persist(self, entry: JournalEntry) -> None:  # overridden by FileJournal
        del entry


class FileJournal(Journal):
    """Durable journal backed by one NDJSON file."""

    def __init__(self, path: str | Path):
        super().__init__()
        self.path = Path(path)
        self.truncated_tail = False
        self.path.parent.mkdir(parents=True, exist_ok=True)
        if self.path.exists():
            self._recover()
        self._handle = open(self.path, "a", encoding="utf-8")

    def _recover(self) -> None:
        good_bytes = 0
        with open(self.path, "rb") as fh:
            raw = fh.read()
        for line in raw.splitlines(keepends=True):
            try:
                entry = JournalEntry.from_line(line.decode("utf-8"))
            except (ValueError, KeyError, UnicodeDecodeError):
                self.truncated_tail = True
                break
            if not line.endswith(b"\n"):
                # Torn write: the bytes parsed but the line never completed.
                self.truncated_tail = True
                break
            self._entries.append(entry)
            good_bytes += len(line)
        if self.truncated_tail:
            logger.warning(
                "journal %s has a corrupt tail; truncating to %d entries",
                self.path,
                len(self._entries),
            )
            with open(self.path, "r+b") as fh:
                fh.truncate(good_bytes)

    def _persist(self, entry: JournalEntry) -> None:
        try:
            self._handle.write(entry.to_line() + "\n")
            self._handle.flush()
            os.fsync(self._handle.fileno())
        except OSError as exc:
            raise StoreError(f"journal append failed: {exc}") from exc

    def close(self) -> None:
        self._handle.close()


def save_snapshot(path: str | Path, payload: dict) -> None:
    """Atomically write a snapshot (write-then-rename)."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    tmp = target.with_suffix(target.suffix + ".tmp")
    body = json.dumps({"v": FORMAT_VERSION, **payload}, indent=2)
    try:
        tmp.write_text(body + "\n", encoding="utf-8")
        os.replace(tmp, target)
    except OSError as exc:
        raise StoreError(f"snapshot write failed: {exc}") from exc


def load_snapshot(path: str | Path) -> Optional[dict]:
    """Read a snapshot, or None when there is none (full replay fallback)."""
    target = Path(path)
    if not target.exists():
        return None
    try:
        data = json.loads(target.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        logger.warning("snapshot %s unreadable (%s); falling back to full replay", target, exc)
        return None
    if data.get("v") != FORMAT_VERSION:
        logger.warning("snapshot %s has unsupported version; falling back to full replay", target)
        return None
    return data
