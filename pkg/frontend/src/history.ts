// View models for the read-only history and preferences panel.

import type { ApiTask, Preferences } from "./types.js";

export interface HistoryRow {
  id: string;
  title: string;
  stage: string;
  when: string;
  struck: boolean;
  firedCount: number;
  plannedCount: number;
}

const STAGE_ORDER = ["initiating", "retention", "completed", "expired", "cancelled"];

export function historyRows(tasks: ApiTask[]): HistoryRow[] {
  const rows = tasks.map((task) => ({
    id: task.id,
    title: task.task.title,
    stage: task.stage,
    when: task.task.execute_at ?? "(on trigger)",
    struck: task.stage === "cancelled",
    firedCount: task.fired_at.length,
    plannedCount: task.plan.count,
  }));
  rows.sort((a, b) => {
    const byStage = STAGE_ORDER.indexOf(a.stage) - STAGE_ORDER.indexOf(b.stage);
    return byStage !== 0 ? byStage : a.id.localeCompare(b.id);
  });
  return rows;
}

export interface PreferenceBar {
  axis: "channel" | "duration" | "sound";
  lowLabel: string;
  highLabel: string;
  score: number;
  widthPct: number;
}

export function preferenceBars(preferences: Preferences): PreferenceBar[] {
  const axes: [PreferenceBar["axis"], string, string][] = [
    ["channel", "visual", "audio"],
    ["duration", "short", "long"],
    ["sound", "ring", "music"],
  ];
  return axes.map(([axis, lowLabel, highLabel]) => ({
    axis,
    lowLabel,
    highLabel,
    score: preferences[axis],
    widthPct: Math.round(preferences[axis] * 100),
  }));
}
