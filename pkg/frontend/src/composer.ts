// Task composer: draft validation and conversion to the POST /tasks body.
// Validation mirrors the daemon's invariants so obvious mistakes surface
// before a round trip; the daemon remains the authority.

import type { Factors, FieldErrors, Kind, TaskBody } from "./types.js";

export interface Draft {
  title: string;
  kind: Kind;
  executeAt: string; // datetime-local value, may be ""
  firstReminderAt: string;
  locationText: string; // "lat,lon[,label]" or ""
  person: string;
  travelMode: "walk" | "car";
  factors: Factors;
}

export function emptyDraft(): Draft {
  return {
    title: "",
    kind: "time",
    executeAt: "",
    firstReminderAt: "",
    locationText: "",
    person: "",
    travelMode: "walk",
    factors: {
      complexity: "medium",
      importance: "medium",
      motivation: "medium",
      age: "young",
      category: "personal",
    },
  };
}

export interface ParsedLocation {
  latitude: number;
  longitude: number;
  label: string;
}

export function parseLocation(text: string): ParsedLocation | null {
  const parts = text.split(",").map((part) => part.trim());
  if (parts.length < 2) return null;
  const latitude = Number(parts[0]);
  const longitude = Number(parts[1]);
  if (!Number.isFinite(latitude) || !Number.isFinite(longitude)) return null;
  if (latitude < -90 || latitude > 90 || longitude < -180 || longitude > 180) return null;
  return { latitude, longitude, label: parts.slice(2).join(",") };
}

export function validateDraft(draft: Draft): FieldErrors {
  const errors: FieldErrors = {};
  if (draft.title.trim() === "") errors.title = "give the task a title";

  if (draft.kind === "time") {
    if (draft.executeAt === "") errors.executeAt = "execution time is required";
    if (draft.firstReminderAt === "") errors.firstReminderAt = "first reminder time is required";
    if (draft.executeAt !== "" && draft.firstReminderAt !== "") {
      if (new Date(draft.firstReminderAt) >= new Date(draft.executeAt)) {
        errors.firstReminderAt = "first reminder must be before the execution time";
      }
    }
  } else {
    const hasPlace = draft.locationText.trim() !== "";
    const hasPerson = draft.person.trim() !== "";
    if (!hasPlace && !hasPerson) {
      errors.locationText = "an event task needs a where or a who";
    }
  }
  if (draft.locationText.trim() !== "" && parseLocation(draft.locationText) === null) {
    errors.locationText = "expected lat,lon[,label] with lat in [-90,90], lon in [-180,180]";
  }
  return errors;
}

function toIso(local: string): string {
  return new Date(local).toISOString().replace(/\.\d{3}Z$/, "Z");
}

export function toTaskBody(draft: Draft): TaskBody {
  const location = draft.locationText.trim() === "" ? null : parseLocation(draft.locationText);
  return {
    title: draft.title.trim(),
    kind: draft.kind,
    execute_at: draft.executeAt === "" ? null : toIso(draft.executeAt),
    first_reminder_at: draft.firstReminderAt === "" ? null : toIso(draft.firstReminderAt),
    location: location === null ? null : {
      latitude: location.latitude,
      longitude: location.longitude,
      label: location.label,
    },
    person: draft.person.trim() === "" ? null : draft.person.trim(),
    travel_mode: draft.travelMode,
    factors: draft.factors,
  };
}
