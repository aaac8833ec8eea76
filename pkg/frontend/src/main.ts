// Page wiring: composer form, live reminder feed, history and preferences.

import { ApiError, Client } from "./api.js";
import { emptyDraft, toTaskBody, validateDraft, type Draft } from "./composer.js";
import { historyRows, preferenceBars } from "./history.js";
import { EventFeed } from "./sse.js";
import { formatTime, modalityBadge, scheduleMarkers } from "./timeline.js";
import { renderToast } from "./toast.js";
import type { ApiTask } from "./types.js";

const API_BASE = (window as unknown as { PROMIND_API?: string }).PROMIND_API ?? "";
const client = new Client(API_BASE);

const must = <T extends HTMLElement>(id: string): T => {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing #${id}`);
  return node as T;
};

const form = must<HTMLFormElement>("composer");
const toastHost = must<HTMLDivElement>("toasts");
const taskHost = must<HTMLDivElement>("tasks");
const prefsHost = must<HTMLDivElement>("preferences");
const statusBadge = must<HTMLSpanElement>("feed-status");
const planPreview = must<HTMLDivElement>("plan-preview");

function readDraft(): Draft {
  const value = (id: string) => must<HTMLInputElement>(id).value;
  return {
    title: value("f-title"),
    kind: must<HTMLSelectElement>("f-kind").value as Draft["kind"],
    executeAt: value("f-whe"),
    firstReminderAt: value("f-rem"),
    locationText: value("f-loc"),
    person: value("f-per"),
    travelMode: must<HTMLSelectElement>("f-mode").value as Draft["travelMode"],
    factors: {
      complexity: must<HTMLSelectElement>("f-com").value as Draft["factors"]["complexity"],
      importance: must<HTMLSelectElement>("f-imp").value as Draft["factors"]["importance"],
      motivation: must<HTMLSelectElement>("f-mot").value as Draft["factors"]["motivation"],
      age: must<HTMLSelectElement>("f-age").value as Draft["factors"]["age"],
      category: must<HTMLSelectElement>("f-typ").value as Draft["factors"]["category"],
    },
  };
}

function showFieldErrors(errors: Record<string, string>): void {
  for (const node of form.querySelectorAll(".field-error")) node.textContent = "";
  for (const [field, message] of Object.entries(errors)) {
    const slot = form.querySelector(`[data-error-for="${field}"]`);
    if (slot !== null) slot.textContent = message;
  }
}

const WIRE_FIELD_TO_INPUT: Record<string, string> = {
  execute_at: "executeAt",
  first_reminder_at: "firstReminderAt",
  location: "locationText",
  person: "person",
  title: "title",
};

function renderPlanPreview(task: ApiTask): void {
  const markers = scheduleMarkers(task.plan, task.fired_at.length);
  const bar = markers
    .map(
      (marker) =>
        `<span class="marker${marker.fired ? " fired" : ""}" style="left:${marker.positionPct}%" title="${marker.at}">${marker.label}</span>`,
    )
    .join("");
  const entries = markers
    .map((marker) => `<li>${marker.label}: ${marker.at.startsWith("trigger") ? marker.at : formatTime(marker.at)}</li>`)
    .join("");
  planPreview.innerHTML = `
    <p>created <code>${task.id}</code>: ${task.plan.count} reminder(s),
       <span class="badge">${modalityBadge(task.plan)}</span>
       ${task.plan.warning ? `<em class="warning">${task.plan.warning}</em>` : ""}</p>
    <div class="timeline">${bar}</div>
    <ul>${entries}</ul>`;
}

async function refresh(): Promise<void> {
  const [tasks, preferences] = await Promise.all([client.listTasks(), client.preferences()]);
  taskHost.innerHTML = historyRows(tasks)
    .map(
      (row) => `
      <div class="task-row${row.struck ? " struck" : ""}">
        <code>${row.id}</code>
        <span class="stage stage-${row.stage}">${row.stage}</span>
        <span class="title">${row.title}</span>
        <span class="when">${row.when === "(on trigger)" ? row.when : formatTime(row.when)}</span>
        <span class="fired">${row.firedCount}/${row.plannedCount} fired</span>
      </div>`,
    )
    .join("");
  prefsHost.innerHTML = preferenceBars(preferences)
    .map(
      (bar) => `
      <div class="pref">
        <span class="low">${bar.lowLabel}</span>
        <div class="pref-track"><div class="pref-fill" style="width:${bar.widthPct}%"></div></div>
        <span class="high">${bar.highLabel}</span>
      </div>`,
    )
    .join("");
}

form.addEventListener("submit", (event) => {
  event.preventDefault();
  const draft = readDraft();
  const errors = validateDraft(draft);
  showFieldErrors(errors);
  if (Object.keys(errors).length > 0) return;
  client
    .createTask(toTaskBody(draft))
    .then((task) => {
      renderPlanPreview(task);
      form.reset();
      return refresh();
    })
    .catch((error: unknown) => {
      if (error instanceof ApiError && error.status === 422) {
        const mapped: Record<string, string> = {};
        for (const [wireField, message] of Object.entries(error.fields)) {
          mapped[WIRE_FIELD_TO_INPUT[wireField] ?? wireField] = message;
        }
        showFieldErrors(mapped);
      } else {
        showFieldErrors({ title: String(error) });
      }
    });
});

must<HTMLSelectElement>("f-kind").addEventListener("change", (event) => {
  const isEvent = (event.target as HTMLSelectElement).value === "event";
  must<HTMLDivElement>("time-fields").classList.toggle("hidden", isEvent);
});

const feed = new EventFeed(
  API_BASE,
  (reminder) => {
    renderToast(toastHost, reminder, async (taskId, kind, index, delaySeconds) => {
      await client.respond(taskId, kind, index, delaySeconds);
      await refresh();
    });
  },
  (status) => {
    statusBadge.textContent = status;
    statusBadge.className = `feed-${status}`;
  },
);
feed.start();

void refresh();
setInterval(() => void refresh(), 5000);
