// Reminder toasts with Accept / Postpone / Ignore controls. A visual
// modality renders the card alone; an audio one also plays its tone.

import type { ReminderEvent, ResponseKind } from "./types.js";
import { playTone, tonePlanFor } from "./tones.js";

export type RespondFn = (
  taskId: string,
  kind: ResponseKind,
  reminderIndex: number,
  delaySeconds?: number,
) => Promise<void>;

export const POSTPONE_CHOICES_MIN = [5, 10, 30, 60];

export function renderToast(
  container: HTMLElement,
  event: ReminderEvent,
  respond: RespondFn,
  document_: Document = document,
): HTMLElement {
  const card = document_.createElement("div");
  card.className = `toast toast-${event.modality.channel}`;
  card.dataset.eventId = String(event.id);

  const heading = document_.createElement("strong");
  heading.textContent = event.title ?? event.task_id;
  card.appendChild(heading);

  const detail = document_.createElement("span");
  detail.className = "toast-detail";
  const who = event.person ? ` with ${event.person}` : "";
  detail.textContent = `reminder ${event.index + 1}${who} (${event.modality.channel} ${event.modality.duration})`;
  card.appendChild(detail);

  const actions = document_.createElement("div");
  actions.className = "toast-actions";

  const dismiss = () => card.remove();
  const wire = (label: string, onClick: () => Promise<void>) => {
    const button = document_.createElement("button");
    button.textContent = label;
    button.addEventListener("click", () => {
      void onClick().then(dismiss).catch(() => {
        button.classList.add("failed");
      });
    });
    actions.appendChild(button);
    return button;
  };

  wire("Accept", () => respond(event.task_id, "accept", event.index));

  const delayPicker = document_.createElement("select");
  for (const minutes of POSTPONE_CHOICES_MIN) {
    const option = document_.createElement("option");
    option.value = String(minutes * 60);
    option.textContent = `${minutes} min`;
    delayPicker.appendChild(option);
  }
  wire("Postpone", () =>
    respond(event.task_id, "postpone", event.index, Number(delayPicker.value)),
  );
  actions.appendChild(delayPicker);

  wire("Ignore", () => respond(event.task_id, "ignore", event.index));

  card.appendChild(actions);
  container.appendChild(card);

  const plan = tonePlanFor(event.modality);
  if (plan !== null) playTone(plan);
  return card;
}
