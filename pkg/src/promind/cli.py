"""Operator command line: plan previews, daemon control, simulations.

``plan`` runs the planner locally; ``add``, ``list`` and ``respond``
talk to a running daemon over its HTTP API; ``simulate`` replays
scenario files deterministically; ``serve`` starts the daemon; ``export``
dumps the journal.  Exit codes: 0 ok, 2 usage, 3 API error, 4 simulation
failure.
"""
from __future__ import annotations

import json
import os
import re
import sys
from datetime import datetime, timedelta
from pathlib import Path
from typing import Optional

import click
import httpx

from . import __version__, wire
from .agent import Place, ProMTask
from .config import ConfigError, SystemConfig, load_config
from .factors import (
    AgeGroup,
    FactorLevel,
    FactorProfile,
    TaskCategory,
    TaskKind,
    count_contribution,
    modality_contribution,
)
from .planner import GeoPoint, TravelMode, build_plan
from .simulator import (
    ScenarioError,
    compare,
    format_report_table,
    load_scenario,
    reports_to_csv,
    run,
)
from .store import JOURNAL_FILE
from .timeutil import format_ts, parse_ts, utc_now

API_ERROR_EXIT = 3
SIMULATION_ERROR_EXIT = 4

_CLOCK_RE = re.compile(r"^\d{1,2}:\d{2}(:\d{2})?$")


def parse_when(text: str) -> datetime:
    """Accept RFC 3339 text or a bare HH:MM[:SS] meaning today (UTC)."""
    text = text.strip()
    if _CLOCK_RE.match(text):
        today = utc_now().date()
        parts = [int(p) for p in text.split(":")]
        while len(parts) < 3:
            parts.append(0)
        return parse_ts(f"{today.isoformat()}T{parts[0]:02d}:{parts[1]:02d}:{parts[2]:02d}Z")
    try:
        return parse_ts(text)
    except ValueError as exc:
        raise click.BadParameter(f"cannot parse time {text!r}: {exc}")


def parse_point(text: str) -> tuple[GeoPoint, str]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) < 2:
        raise click.BadParameter(f"expected 'lat,lon[,label]', got {text!r}")
    try:
        point = GeoPoint(float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise click.BadParameter(str(exc))
    return point, ",".join(parts[2:]) if len(parts) > 2 else ""


def _load_cli_config(path: Optional[str]) -> SystemConfig:
    source = path or os.environ.get("PROMIND_CONFIG")
    if not source:
        return SystemConfig()
    try:
        return load_config(source)
    except ConfigError as exc:
        raise click.UsageError(str(exc))


def _addr(value: Optional[str]) -> str:
    return value or os.environ.get("PROMIND_ADDR", "127.0.0.1:7468")


def _client(addr: str) -> httpx.Client:
    return httpx.Client(base_url=f"http://{addr}", timeout=10.0)


def _api(ctx_client: httpx.Client, method: str, path: str, **kwargs) -> dict | list:
    try:
        response = ctx_client.request(method, path, **kwargs)
    except httpx.HTTPError as exc:
        click.echo(f"API unreachable: {exc}", err=True)
        sys.exit(API_ERROR_EXIT)
    if response.status_code >= 400:
        click.echo(f"API error {response.status_code}: {response.text}", err=True)
        sys.exit(API_ERROR_EXIT)
    return response.json()


_factor_options = [
    click.option("--com", default="M", show_default=True, help="Ongoing-task complexity (L/M/H)."),
    click.option("--imp", default="M", show_default=True, help="Task importance (L/M/H)."),
    click.option("--mot", default="M", show_default=True, help="Task motivation (L/M/H)."),
    click.option("--age", default="y", show_default=True, help="Age group (y/o)."),
    click.option("--typ", default="per", show_default=True, help="Category (per/fin/soc/wor)."),
]


def factor_options(fn):
    for option in reversed(_factor_options):
        fn = option(fn)
    return fn


def _profile(com: str, imp: str, mot: str, age: str, typ: str) -> FactorProfile:
    try:
        return FactorProfile(
            complexity=FactorLevel.parse(com),
            importance=FactorLevel.parse(imp),
            motivation=FactorLevel.parse(mot),
            age=AgeGroup.parse(age),
            category=TaskCategory.parse(typ),
        )
    except ValueError as exc:
        raise click.BadParameter(str(exc))


@click.group()
@click.version_option(version=__version__, prog_name="promind")
def main() -> None:
    """Reminder planning and delivery from the terminal."""


@main.command()
@click.option("--wha", required=True, help="Task title.")
@click.option("--whe", default=None, help="Execution time (RFC 3339 or HH:MM).")
@click.option("--rem", default=None, help="First-reminder time (RFC 3339 or HH:MM).")
@click.option("--event", is_flag=True, help="Event-based task (needs --loc or --per).")
@click.option("--loc", default=None, help="Task place as 'lat,lon[,label]'.")
@click.option("--per", default=None, help="Person tied to the task.")
@click.option("--curr-loc", default=None, help="Current position as 'lat,lon'.")
@click.option("--mode", default="walk", show_default=True, help="Travel mode (walk/car).")
@factor_options
@click.option("--config", "config_path", default=None, help="Factor-table configuration file.")
@click.option("--explain", is_flag=True, help="Show per-factor contributions and weights.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def plan(wha, whe, rem, event, loc, per, curr_loc, mode, com, imp, mot, age, typ, config_path, explain, as_json):
    """Preview the reminder plan for a task without creating it."""
    config = _load_cli_config(config_path)
    profile = _profile(com, imp, mot, age, typ)
    place = None
    if loc:
        point, label = parse_point(loc)
        place = Place(point=point, label=label)
    task = ProMTask(
        id="preview",
        title=wha,
        kind=TaskKind.EVENT_BASED if event else TaskKind.TIME_BASED,
        profile=profile,
        execute_at=parse_when(whe) if whe else None,
        first_reminder_at=parse_when(rem) if rem else None,
        location=place,
        person=per,
        travel_mode=TravelMode.parse(mode),
    )
    try:
        task.validate()
        current = parse_point(curr_loc)[0] if curr_loc else None
        built = build_plan(task, config, current_location=current, now=utc_now())
    except ValueError as exc:
        raise click.UsageError(str(exc))

    if as_json:
        click.echo(json.dumps(wire.plan_to_wire(built), indent=2))
        return
    modality = built.modality
    click.echo(f"count     {built.count}")
    click.echo(f"modality  {modality.channel.value} {modality.duration.value} {modality.sound.value}")
    for i, entry in enumerate(built.schedule):
        click.echo(f"schedule  {format_ts(entry)}" if i == 0 else f"          {format_ts(entry)}")
    for i, offset in enumerate(built.offsets):
        head = "offsets   " if i == 0 else "          "
        click.echo(f"{head}+{int(offset.total_seconds())}s after trigger")
    if built.warning:
        click.echo(f"warning   {built.warning}")
    if explain:
        click.echo("")
        counts = count_contribution(profile, config.count_table)
        names = ("complexity", "importance", "motivation", "age")
        click.echo("factor contributions (count):")
        for name, value, weight in zip(names, counts, config.weights.count):
            click.echo(f"  {name:<11} t={value}  w={weight}")
        click.echo("factor contributions (modality):")
        scores = modality_contribution(profile, config.modality_table)
        for name, score, weight in zip(names + ("category",), scores, config.weights.modality):
            click.echo(
                f"  {name:<11} h=({score.channel}, {score.duration}, {score.sound})  w={weight}"
            )
        raw = built.raw_modality_score
        click.echo(f"weighted score: ({raw.channel:.4f}, {raw.duration:.4f}, {raw.sound:.4f})")


@main.command()
@click.option("--wha", required=True, help="Task title.")
@click.option("--whe", default=None, help="Execution time (RFC 3339 or HH:MM).")
@click.option("--rem", default=None, help="First-reminder time (RFC 3339 or HH:MM).")
@click.option("--event", is_flag=True, help="Event-based task (needs --loc or --per).")
@click.option("--loc", default=None, help="Task place as 'lat,lon[,label]'.")
@click.option("--per", default=None, help="Person tied to the task.")
@click.option("--mode", default="walk", show_default=True, help="Travel mode (walk/car).")
@factor_options
@click.option("--addr", default=None, help="Daemon address (host:port).")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def add(wha, whe, rem, event, loc, per, mode, com, imp, mot, age, typ, addr, as_json):
    """Create a task on the running daemon."""
    profile = _profile(com, imp, mot, age, typ)
    body: dict = {
        "title": wha,
        "kind": "event" if event else "time",
        "person": per,
        "travel_mode": TravelMode.parse(mode).value,
        "factors": wire.profile_to_wire(profile),
    }
    if whe:
        body["execute_at"] = format_ts(parse_when(whe))
    if rem:
        body["first_reminder_at"] = format_ts(parse_when(rem))
    if loc:
        point, label = parse_point(loc)
        body["location"] = {"latitude": point.latitude, "longitude": point.longitude, "label": label}
    with _client(_addr(addr)) as client:
        created = _api(client, "POST", "/tasks", json=body)
    if as_json:
        click.echo(json.dumps(created, indent=2))
        return
    plan_data = created["plan"]
    click.echo(f"created {created['id']} ({created['stage']})")
    click.echo(f"count {plan_data['count']}; modality "
               f"{plan_data['modality']['channel']}/{plan_data['modality']['duration']}/{plan_data['modality']['sound']}")
    for entry in plan_data["schedule"]:
        click.echo(f"  {entry}")


@main.command(name="list")
@click.option("--addr", default=None, help="Daemon address (host:port).")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def list_tasks(addr, as_json):
    """List the daemon's tasks."""
    with _client(_addr(addr)) as client:
        tasks = _api(client, "GET", "/tasks")
    if as_json:
        click.echo(json.dumps(tasks, indent=2))
        return
    if not tasks:
        click.echo("no tasks")
        return
    for item in tasks:
        task = item["task"]
        when = task.get("execute_at") or "(event)"
        click.echo(
            f"{item['id']:<6} {item['stage']:<10} {when:<22} "
            f"fired {item['fired_at'] and len(item['fired_at']) or 0}/{item['plan']['count']}  {task['title']}"
        )


@main.command()
@click.argument("task_id")
@click.option("--index", type=int, required=True, help="Which fired reminder is being answered.")
@click.option("--accept", "kind", flag_value="accept", help="Accept the reminder.")
@click.option("--postpone", type=float, default=None, help="Postpone by this many minutes.")
@click.option("--ignore", "kind", flag_value="ignore", help="Ignore the reminder.")
@click.option("--addr", default=None, help="Daemon address (host:port).")
def respond(task_id, index, kind, postpone, addr):
    """Answer a fired reminder: accept, postpone, or ignore."""
    if postpone is not None:
        kind = "postpone"
    if kind is None:
        raise click.UsageError("choose one of --accept, --postpone MINUTES, --ignore")
    body = {"kind": kind, "reminder_index": index}
    if kind == "postpone":
        body["delay_seconds"] = postpone * 60.0
    with _client(_addr(addr)) as client:
        updated = _api(client, "POST", f"/tasks/{task_id}/response", json=body)
    click.echo(f"{updated['id']} -> {updated['stage']}")
    for entry in updated["plan"]["schedule"]:
        click.echo(f"  {entry}")


@main.command()
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=True))
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--tick-step", type=float, default=1.0, show_default=True, help="Seconds per tick.")
@click.option("--config", "config_path", default=None, help="Configuration file.")
@click.option(
    "--compare",
    "compare_specs",
    multiple=True,
    help="label=config.json; may repeat to run one report per configuration.",
)
@click.option("--csv", "csv_path", default=None, type=click.Path(), help="Write the CSV here.")
@click.option("--trace", is_flag=True, help="Print the full event trace.")
def simulate(scenario_path, seed, tick_step, config_path, compare_specs, csv_path, trace):
    """Run a scenario file deterministically and report the tallies."""
    try:
        scenario = load_scenario(scenario_path)
        step = timedelta(seconds=tick_step)
        if compare_specs:
            configs = []
            for spec_text in compare_specs:
                label, _, path = spec_text.partition("=")
                if not path:
                    raise ScenarioError(f"--compare wants label=path, got {spec_text!r}")
                configs.append((label, load_config(path)))
            reports = compare(scenario, configs, seed=seed, tick_step=step)
        else:
            config = _load_cli_config(config_path)
            reports = [run(scenario, config=config, seed=seed, tick_step=step)]
    except (ScenarioError, ConfigError) as exc:
        click.echo(f"simulation failed: {exc}", err=True)
        sys.exit(SIMULATION_ERROR_EXIT)

    click.echo(format_report_table(reports), nl=False)
    csv_text = reports_to_csv(reports)
    if csv_path:
        Path(csv_path).write_text(csv_text, encoding="utf-8")
        click.echo(f"csv written to {csv_path}")
    if trace:
        for report in reports:
            click.echo(f"--- trace {report.label}")
            click.echo(report.trace_text(), nl=False)


@main.command()
@click.option("--addr", default=None, help="Listen address (host:port).")
@click.option("--data-dir", default=None, help="Data directory (journal, snapshot, config).")
@click.option("--config", "config_path", default=None, help="Configuration file.")
@click.option("--tick-ms", type=int, default=None, help="Scheduler tick period in milliseconds.")
def serve(addr, data_dir, config_path, tick_ms):
    """Run the reminder daemon."""
    from .service import serve as run_service

    try:
        run_service(addr=addr, data_dir=data_dir, config_path=config_path, tick_ms=tick_ms)
    except ConfigError as exc:
        raise click.ClickException(str(exc))


@main.command()
@click.option("--data-dir", default=None, help="Data directory to read the journal from.")
def export(data_dir):
    """Dump the journal, one JSON entry per line."""
    root = Path(data_dir or os.environ.get("PROMIND_DATA_DIR", "./data"))
    journal_path = root / JOURNAL_FILE
    if not journal_path.exists():
        click.echo(f"no journal at {journal_path}", err=True)
        sys.exit(API_ERROR_EXIT)
    with open(journal_path, encoding="utf-8") as handle:
        for line in handle:
            click.echo(line.rstrip("\n"))


if __name__ == "__main__":
    main()
