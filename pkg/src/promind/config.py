"""Loadable system configuration with shipped defaults.

The JSON file has sections ``count_table``, ``modality_table`` and
``weights`` plus optional ``agent`` and ``adaptation`` knobs; see the
README for the full schema.  Configurations are immutable after load and
safe to share between threads.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import timedelta
from pathlib import Path

from .factors import CountTable, ModalityScore, ModalityTable, Weights, validate_tables


class ConfigError(ValueError):
    """Raised when a configuration file is malformed or violates table invariants."""


def default_modality_table() -> ModalityTable:
    # Shipped defaults: demanding contexts (HIGH levels look up h_low) get
    # unobtrusive visual/short reminders, old users get audio/long, work
    # tasks lean to silent pop-ups.
    return ModalityTable(
        h_low=ModalityScore(0.15, 0.2, 0.4),
        h_medium=ModalityScore(0.5, 0.5, 0.5),
        h_high=ModalityScore(0.85, 0.8, 0.6),
        a_young=ModalityScore(0.3, 0.25, 0.7),
        a_old=ModalityScore(0.9, 0.85, 0.2),
        t_personal=ModalityScore(0.5, 0.4, 0.8),
        t_financial=ModalityScore(0.6, 0.7, 0.2),
        t_social=ModalityScore(0.7, 0.4, 0.9),
        t_work=ModalityScore(0.2, 0.3, 0.1),
    )


@dataclass(frozen=True)
class SystemConfig:
    count_table: CountTable = field(default_factory=CountTable)
    modality_table: ModalityTable = field(default_factory=default_modality_table)
    weights: Weights = field(default_factory=Weights)
    grace: timedelta = timedelta(minutes=15)
    event_spacing: timedelta = timedelta(minutes=5)
    proximity_radius_m: float = 100.0
    learning_rate: float = 0.2
    preference_blend: float = 0.3

    def validation_errors(self) -> list[str]:
        problems = validate_tables(self.count_table, self.modality_table, self.weights)
        if not 0 < self.learning_rate <= 1:
            problems.append(f"learning_rate={self.learning_rate} outside (0, 1]")
        if not 0 <= self.preference_blend <= 1:
            problems.append(f"preference_blend={self.preference_blend} outside [0, 1]")
        if self.grace < timedelta(0):
            problems.append("grace must be non-negative")
        if self.event_spacing <= timedelta(0):
            problems.append("event_spacing must be positive")
        if self.proximity_radius_m <= 0:
            problems.append("proximity_radius_m must be positive")
        return problems

    def to_dict(self) -> dict:
        ct = self.count_table
        return {
            "count_table": {
                "n_low": ct.n_low,
                "n_medium": ct.n_medium,
                "n_high": ct.n_high,
                "a_young": ct.a_young,
                "a_old": ct.a_old,
                "max_count": ct.max_count,
            },
            "modality_table": {
                name: _score_to_dict(getattr(self.modality_table, name))
                for name in (
                    "h_low",
                    "h_medium",
                    "h_high",
                    "a_young",
                    "a_old",
                    "t_personal",
                    "t_financial",
                    "t_social",
                    "t_work",
                )
            },
            "weights": {"count": list(self.weights.count), "modality": list(self.weights.modality)},
            "agent": {
                "grace_minutes": self.grace.total_seconds() / 60,
                "event_spacing_minutes": self.event_spacing.total_seconds() / 60,
                "proximity_radius_m": self.proximity_radius_m,
            },
            "adaptation": {
                "learning_rate": self.learning_rate,
                "preference_blend": self.preference_blend,
            },
        }


def _score_to_dict(score: ModalityScore) -> dict:
    return {"channel": score.channel, "duration": score.duration, "sound": score.sound}


def _score_from_dict(data: dict, where: str) -> ModalityScore:
    try:
        return ModalityScore(
            channel=float(data["channel"]),
            duration=float(data["duration"]),
            sound=float(data["sound"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad modality score at {where}: {exc}") from exc


def config_from_dict(data: dict) -> SystemConfig:
    """Build a validated SystemConfig; missing sections fall back to defaults."""
    defaults = SystemConfig()
    try:
        ct_in = data.get("count_table", {})
        count_table = CountTable(
            n_low=int(ct_in.get("n_low", defaults.count_table.n_low)),
            n_medium=int(ct_in.get("n_medium", defaults.count_table.n_medium)),
            n_high=int(ct_in.get("n_high", defaults.count_table.n_high)),
            a_young=int(ct_in.get("a_young", defaults.count_table.a_young)),
            a_old=int(ct_in.get("a_old", defaults.count_table.a_old)),
            max_count=int(ct_in.get("max_count", defaults.count_table.max_count)),
        )
        mt_in = data.get("modality_table")
        if mt_in is None:
            modality_table = defaults.modality_table
        else:
            modality_table = ModalityTable(
                **{name: _score_from_dict(mt_in[name], name) for name in mt_in}
            )
        w_in = data.get("weights", {})
        weights = Weights(
            count=tuple(float(w) for w in w_in.get("count", defaults.weights.count)),
            modality=tuple(float(w) for w in w_in.get("modality", defaults.weights.modality)),
        )
        agent = data.get("agent", {})
        adaptation = data.get("adaptation", {})
        config = SystemConfig(
            count_table=count_table,
            modality_table=modality_table,
            weights=weights,
            grace=timedelta(minutes=float(agent.get("grace_minutes", 15))),
            event_spacing=timedelta(minutes=float(agent.get("event_spacing_minutes", 5))),
            proximity_radius_m=float(agent.get("proximity_radius_m", 100.0)),
            learning_rate=float(adaptation.get("learning_rate", defaults.learning_rate)),
            preference_blend=float(
                adaptation.get("preference_blend", defaults.preference_blend)
            ),
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed configuration: {exc}") from exc

    problems = config.validation_errors()
    if problems:
        raise ConfigError("; ".join(problems))
    return config


def load_config(path: str | Path) -> SystemConfig:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc}") from exc
    return config_from_dict(data)


def save_config(config: SystemConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(config.to_dict(), indent=2) + "\n", encoding="utf-8")
