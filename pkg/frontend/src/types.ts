// Wire types mirroring the daemon's JSON schemas.

export type Level = "low" | "medium" | "high";
export type Age = "young" | "old";
export type Category = "personal" | "financial" | "social" | "work";
export type Kind = "time" | "event";

export interface Factors {
  complexity: Level;
  importance: Level;
  motivation: Level;
  age: Age;
  category: Category;
}

export interface Modality {
  channel: "visual" | "audio";
  duration: "short" | "long";
  sound: "ring" | "music";
}

export interface LocationBody {
  latitude: number;
  longitude: number;
  label?: string;
}

export interface TaskBody {
  title: string;
  kind: Kind;
  execute_at?: string | null;
  first_reminder_at?: string | null;
  location?: LocationBody | null;
  person?: string | null;
  travel_mode?: "walk" | "car";
  factors?: Factors;
  note?: string | null;
}

export interface Plan {
  count: number;
  schedule: string[];
  offsets_seconds: number[];
  modality: Modality;
  raw_modality_score: { channel: number; duration: number; sound: number };
  warning: string | null;
}

export interface ApiTask {
  id: string;
  stage: string;
  task: TaskBody & { id: string };
  plan: Plan;
  fired_at: string[];
  postpone_total_seconds: number;
  trigger_latched: boolean;
}

export interface Preferences {
  channel: number;
  duration: number;
  sound: number;
  sample_count: number;
}

export interface ReminderEvent {
  id: number;
  task_id: string;
  index: number;
  modality: Modality;
  title: string | null;
  person: string | null;
  at: string;
}

export type ResponseKind = "accept" | "postpone" | "ignore";

export interface FieldErrors {
  [field: string]: string;
}
