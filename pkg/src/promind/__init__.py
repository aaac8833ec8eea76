"""promind: a prospective-memory reminder engine.

Plans reminder count, schedule, and delivery form from task factors,
runs each task through a reminder lifecycle with accept/postpone/ignore
handling and event triggers, learns delivery-form preferences from the
responses, and persists everything in a replayable journal.  Ships with
a deterministic simulator, an HTTP service, and a CLI.
"""
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
from .config import SystemConfig, load_config, save_config
from .engine import Engine, UnknownTaskError
from .factors import (
    AgeGroup,
    CountTable,
    FactorLevel,
    FactorProfile,
    ModalityScore,
    ModalityTable,
    TaskCategory,
    TaskKind,
    Weights,
)
from .planner import (
    Channel,
    Duration,
    GeoPoint,
    ReminderModality,
    ReminderPlan,
    Sound,
    TravelMode,
    build_plan,
)
from .user_model import InteractionRecord, PreferenceState, adapt_plan, record_interaction

__version__ = "0.1.0"

__all__ = [
    "AgentAction",
    "AgentState",
    "AgeGroup",
    "Channel",
    "CountTable",
    "Duration",
    "Engine",
    "FactorLevel",
    "FactorProfile",
    "GeoPoint",
    "InteractionRecord",
    "ModalityScore",
    "ModalityTable",
    "Place",
    "PreferenceState",
    "ProMTask",
    "ReminderModality",
    "ReminderPlan",
    "ResponseKind",
    "Sound",
    "Stage",
    "SystemConfig",
    "TaskCategory",
    "TaskKind",
    "TravelMode",
    "TriggerEvent",
    "TriggerKind",
    "UnknownTaskError",
    "UserResponse",
    "Weights",
    "adapt_plan",
    "build_plan",
    "load_config",
    "record_interaction",
    "save_config",
    "__version__",
]
