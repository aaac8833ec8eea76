// Typed client for the daemon's HTTP API. The UI only ever talks to the
// daemon through these calls; all scheduling decisions stay server-side.

import type { ApiTask, FieldErrors, Preferences, ResponseKind, TaskBody } from "./types.js";

export class ApiError extends Error {
  status: number;
  fields: FieldErrors;

  constructor(status: number, message: string, fields: FieldErrors = {}) {
    super(message);
    this.status = status;
    this.fields = fields;
  }
}

type FetchLike = typeof fetch;

export class Client {
  baseUrl: string;
  private fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl: FetchLike = fetch) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchImpl = fetchImpl;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? {} : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      throw new ApiError(response.status, await response.text().catch(() => response.statusText), {});
    }
    return (await response.json()) as T;
  }

  async createTask(body: TaskBody): Promise<ApiTask> {
    const response = await this.fetchImpl(`${this.baseUrl}/tasks`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (response.status === 422) {
      const payload = await response.json();
      throw new ApiError(422, "validation failed", fieldErrorsFromDetail(payload.detail));
    }
    if (!response.ok) {
      throw new ApiError(response.status, await response.text());
    }
    return (await response.json()) as ApiTask;
  }

  listTasks(): Promise<ApiTask[]> {
    return this.request("GET", "/tasks");
  }

  getTask(id: string): Promise<ApiTask> {
    return this.request("GET", `/tasks/${id}`);
  }

  cancelTask(id: string): Promise<ApiTask> {
    return this.request("DELETE", `/tasks/${id}`);
  }

  respond(
    id: string,
    kind: ResponseKind,
    reminderIndex: number,
    delaySeconds?: number,
  ): Promise<ApiTask> {
    const body: Record<string, unknown> = { kind, reminder_index: reminderIndex };
    if (kind === "postpone") body.delay_seconds = delaySeconds;
    return this.request("POST", `/tasks/${id}/response`, body);
  }

  preferences(): Promise<Preferences> {
    return this.request("GET", "/preferences");
  }

  health(): Promise<{ version: string; sequence: number }> {
    return this.request("GET", "/health");
  }
}

// The daemon's 422 bodies carry fastapi-style {loc: ["body", field], msg} items.
export function fieldErrorsFromDetail(detail: unknown): FieldErrors {
  const fields: FieldErrors = {};
  if (!Array.isArray(detail)) return fields;
  for (const item of detail) {
    if (item && typeof item === "object" && "loc" in item && "msg" in item) {
      const loc = (item as { loc: unknown[] }).loc;
      const name = String(loc[loc.length - 1] ?? "body");
      fields[name] = String((item as { msg: unknown }).msg);
    }
  }
  return fields;
}
