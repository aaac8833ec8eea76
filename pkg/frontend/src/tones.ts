// Audio rendering of reminder modalities. The mapping is a fixed shipped
// asset pair: ring = repeated single pitch, music = a small arpeggio;
// short and long modalities scale the whole envelope.

import type { Modality } from "./types.js";

export interface TonePlan {
  notesHz: number[];
  noteMs: number;
  gapMs: number;
  totalMs: number;
}

export function tonePlanFor(modality: Modality): TonePlan | null {
  if (modality.channel !== "audio") return null;
  const long = modality.duration === "long";
  if (modality.sound === "ring") {
    const notes = long ? [880, 880, 880, 880] : [880, 880];
    const noteMs = long ? 320 : 220;
    const gapMs = 120;
    return { notesHz: notes, noteMs, gapMs, totalMs: notes.length * (noteMs + gapMs) };
  }
  const notes = long
    ? [523.25, 659.25, 783.99, 1046.5, 783.99, 659.25]
    : [523.25, 659.25, 783.99];
  const noteMs = long ? 260 : 180;
  const gapMs = 40;
  return { notesHz: notes, noteMs, gapMs, totalMs: notes.length * (noteMs + gapMs) };
}

type AudioContextCtor = new () => AudioContext;

export function playTone(plan: TonePlan, ctor?: AudioContextCtor): void {
  const AudioCtor =
    ctor ??
    (typeof window !== "undefined"
      ? (window.AudioContext ??
        (window as unknown as { webkitAudioContext?: AudioContextCtor }).webkitAudioContext)
      : undefined);
  if (AudioCtor === undefined) return; // no audio environment; toast already shown
  const context = new AudioCtor();
  let at = context.currentTime;
  for (const hz of plan.notesHz) {
    const oscillator = context.createOscillator();
    const gain = context.createGain();
    oscillator.type = "sine";
    oscillator.frequency.value = hz;
    gain.gain.setValueAtTime(0.0001, at);
    gain.gain.exponentialRampToValueAtTime(0.2, at + 0.02);
    gain.gain.exponentialRampToValueAtTime(0.0001, at + plan.noteMs / 1000);
    oscillator.connect(gain).connect(context.destination);
    oscillator.start(at);
    oscillator.stop(at + plan.noteMs / 1000);
    at += (plan.noteMs + plan.gapMs) / 1000;
  }
  setTimeout(() => void context.close(), plan.totalMs + 200);
}
