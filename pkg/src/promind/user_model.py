"""Preference learning from reminder responses.

Every response to a fired reminder nudges three per-axis scores with an
exponential moving average: accepting a reminder pulls each axis toward
the value that was used, any other response pushes it away.  Plans are
adapted by blending their raw modality score with the learned scores and
re-decoding; counts and schedules are never touched.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from datetime import timedelta
from fractions import Fraction
from typing import Optional

from .agent import ResponseKind
from .planner import Channel, Duration, ReminderModality, ReminderPlan, Sound, decode_modality


@dataclass(frozen=True)
class InteractionRecord:
    """One response to one fired reminder; the learner's training datum."""

    task_id: str
    reminder_index: int
    modality_used: ReminderModality
    response: ResponseKind
    latency: Optional[timedelta] = None


@dataclass(frozen=True)
class PreferenceState:
    """Per-axis acceptance scores in [0, 1]; 0.5 means indifferent."""

    channel: float = 0.5
    duration: float = 0.5
    sound: float = 0.5
    sample_count: int = 0

    def axes(self) -> tuple[float, float, float]:
        return (self.channel, self.duration, self.sound)


def _axis_values(modality: ReminderModality) -> tuple[float, float, float]:
    return (
        1.0 if modality.channel is Channel.AUDIO else 0.0,
        1.0 if modality.duration is Duration.LONG else 0.0,
        1.0 if modality.sound is Sound.MUSIC else 0.0,
    )


def record_interaction(
    pref: PreferenceState, record: InteractionRecord, alpha: float = 0.2
) -> PreferenceState:
    """Fold one interaction into the scores.

    An accept moves each axis toward the value used for that reminder; a
    postpone or ignore moves it toward the opposite value.  With
    ``alpha`` in (0, 1] every score stays inside [0, 1].
    """
    if not 0 < alpha <= 1:
        raise ValueError("alpha must be in (0, 1]")
    accepted = record.response is ResponseKind.ACCEPT
    used = _axis_values(record.modality_used)

    def nudge(score: float, axis_value: float) -> float:
        directed = axis_value if accepted else 1.0 - axis_value
        return (1.0 - alpha) * score + alpha * directed

    return PreferenceState(
        channel=nudge(pref.channel, used[0]),
        duration=nudge(pref.duration, used[1]),
        sound=nudge(pref.sound, used[2]),
        sample_count=pref.sample_count + 1,
    )


def adapt_plan(plan: ReminderPlan, pref: PreferenceState, blend: float = 0.3) -> ReminderPlan:
    """Re-decode the modality after blending in learned preferences.

    ``blend`` = 0 keeps the plan's own score, 1 follows the preferences
    outright.  Count and schedule pass through untouched.
    """
    if not 0 <= blend <= 1:
        raise ValueError("blend must be in [0, 1]")
    raw = plan.raw_modality_score
    lam = Fraction(blend)
    keep = 1 - lam
    blended = [
        keep * Fraction(raw_axis) + lam * Fraction(pref_axis)
        for raw_axis, pref_axis in zip(raw.axes(), pref.axes())
    ]
    modality = decode_modality(*blended)
    return dataclasses.replace(plan, modality=modality)


def export_preferences(pref: PreferenceState) -> dict:
    """Round-trippable snapshot of a preference state."""
    return {
        "channel": pref.channel,
        "duration": pref.duration,
        "sound": pref.sound,
        "sample_count": pref.sample_count,
    }


def import_preferences(data: dict) -> PreferenceState:
    return PreferenceState(
        channel=float(data["channel"]),
        duration=float(data["duration"]),
        sound=float(data["sound"]),
        sample_count=int(data["sample_count"]),
    )
