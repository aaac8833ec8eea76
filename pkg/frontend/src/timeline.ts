// View model for a plan's schedule: relative marker positions for the
// timeline bar plus human-readable labels. Pure; rendering stays thin.

import type { Plan } from "./types.js";

export interface Marker {
  index: number;
  at: string;
  label: string;
  fired: boolean;
  positionPct: number; // 0..100 across the window
}

export function scheduleMarkers(plan: Plan, firedCount: number): Marker[] {
  const entries = plan.schedule;
  if (entries.length === 0) {
    return plan.offsets_seconds.map((seconds, index) => ({
      index,
      at: `trigger +${Math.round(seconds / 60)}m`,
      label: `R${index + 1}`,
      fired: index < firedCount,
      positionPct: plan.offsets_seconds.length === 1
        ? 0
        : (index / (plan.offsets_seconds.length - 1)) * 100,
    }));
  }
  const first = new Date(entries[0]!).getTime();
  const last = new Date(entries[entries.length - 1]!).getTime();
  const span = Math.max(1, last - first);
  return entries.map((at, index) => ({
    index,
    at,
    label: `R${index + 1}`,
    fired: index < firedCount,
    positionPct: entries.length === 1 ? 0 : ((new Date(at).getTime() - first) / span) * 100,
  }));
}

export function modalityBadge(plan: Plan): string {
  const m = plan.modality;
  const soundPart = m.channel === "audio" ? ` ${m.sound}` : "";
  return `${m.channel} ${m.duration}${soundPart}`;
}

export function formatTime(iso: string): string {
  const date = new Date(iso);
  if (Number.isNaN(date.getTime())) return iso;
  return date.toLocaleString(undefined, {
    month: "short",
    day: "numeric",
    hour: "2-digit",
    minute: "2-digit",
    second: "2-digit",
  });
}
