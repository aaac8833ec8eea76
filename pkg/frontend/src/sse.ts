// Reminder event feed over Server-Sent Events, built on fetch streaming so
// reconnects can send Last-Event-ID explicitly. Events are deduplicated by
// id, so a replayed history never double-renders.

import type { ReminderEvent } from "./types.js";

export interface RawSseEvent {
  id?: number;
  event?: string;
  data?: string;
}

// Incremental parser: feed text chunks, get completed events + remainder.
export function parseSseChunk(buffer: string): { events: RawSseEvent[]; rest: string } {
  const events: RawSseEvent[] = [];
  const normalized = buffer.replace(/\r\n/g, "\n");
  const parts = normalized.split("\n\n");
  const rest = parts.pop() ?? "";
  for (const block of parts) {
    const event: RawSseEvent = {};
    for (const line of block.split("\n")) {
      if (line.startsWith(":") || line.trim() === "") continue;
      const colon = line.indexOf(":");
      const field = colon === -1 ? line : line.slice(0, colon);
      const value = colon === -1 ? "" : line.slice(colon + 1).trimStart();
      if (field === "id") event.id = Number(value);
      else if (field === "event") event.event = value;
      else if (field === "data") event.data = event.data === undefined ? value : `${event.data}\n${value}`;
    }
    if (event.id !== undefined || event.event !== undefined || event.data !== undefined) {
      events.push(event);
    }
  }
  return { events, rest };
}

export function decodeReminder(raw: RawSseEvent): ReminderEvent | null {
  if (raw.event !== "reminder" || raw.data === undefined || raw.id === undefined) return null;
  try {
    const data = JSON.parse(raw.data);
    return { id: raw.id, ...data } as ReminderEvent;
  } catch {
    return null;
  }
}

export interface FeedOptions {
  fetchImpl?: typeof fetch;
  retryMs?: number;
  maxRetryMs?: number;
  lastEventId?: number;
}

export type FeedStatus = "connecting" | "open" | "retrying" | "stopped";

// Reconnecting subscription. `onReminder` sees each reminder exactly once,
// in id order, across any number of reconnects.
export class EventFeed {
  lastEventId: number;
  private seen = new Set<number>();
  private stopped = false;
  private fetchImpl: typeof fetch;
  private retryMs: number;
  private readonly baseRetryMs: number;
  private readonly maxRetryMs: number;

  constructor(
    private baseUrl: string,
    private onReminder: (event: ReminderEvent) => void,
    private onStatus: (status: FeedStatus) => void = () => {},
    options: FeedOptions = {},
  ) {
    this.fetchImpl = options.fetchImpl ?? fetch;
    this.baseRetryMs = options.retryMs ?? 500;
    this.maxRetryMs = options.maxRetryMs ?? 15_000;
    this.retryMs = this.baseRetryMs;
    this.lastEventId = options.lastEventId ?? 0;
  }

  start(): () => void {
    void this.loop();
    return () => {
      this.stopped = true;
    };
  }

  handleRaw(raw: RawSseEvent): void {
    if (raw.id !== undefined) this.lastEventId = Math.max(this.lastEventId, raw.id);
    const reminder = decodeReminder(raw);
    if (reminder === null) return;
    if (this.seen.has(reminder.id)) return;
    this.seen.add(reminder.id);
    this.onReminder(reminder);
  }

  private async loop(): Promise<void> {
    while (!this.stopped) {
      this.onStatus("connecting");
      try {
        const response = await this.fetchImpl(
          `${this.baseUrl}/events?last_event_id=${this.lastEventId}`,
          { headers: { accept: "text/event-stream" } },
        );
        if (!response.ok || response.body === null) throw new Error(`stream ${response.status}`);
        this.onStatus("open");
        this.retryMs = this.baseRetryMs;
        const reader = response.body.getReader();
        const decoder = new TextDecoder();
        let buffer = "";
        while (!this.stopped) {
          const { done, value } = await reader.read();
          if (done) break;
          buffer += decoder.decode(value, { stream: true });
          const { events, rest } = parseSseChunk(buffer);
          buffer = rest;
          for (const raw of events) this.handleRaw(raw);
        }
        await reader.cancel().catch(() => {});
      } catch {
        // fall through to retry
      }
      if (this.stopped) break;
      this.onStatus("retrying");
      await sleep(this.retryMs);
      this.retryMs = Math.min(this.retryMs * 2, this.maxRetryMs);
    }
    this.onStatus("stopped");
  }
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
