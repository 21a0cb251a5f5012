/** Review queue view: a verbatim rendering of GET /review/queue. */

import type { QueueEntry } from "./types.js";

export interface QueueCallbacks {
  onOpen: (claimId: string) => void;
  onRetry: () => void;
}

export function renderQueue(
  container: HTMLElement,
  entries: QueueEntry[],
  callbacks: QueueCallbacks,
): void {
  container.innerHTML = "";
  const heading = document.createElement("h2");
  heading.textContent = `Review queue (${entries.length})`;
  container.appendChild(heading);

  if (entries.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "Nothing to review.";
    container.appendChild(empty);
    return;
  }

  const list = document.createElement("ol");
  list.className = "queue";
  for (const entry of entries) {
    const item = document.createElement("li");
    item.className = "queue-row";
    item.dataset.claimId = entry.claim_id;

    const link = document.createElement("a");
    link.href = `#/claim/${entry.claim_id}`;
    link.textContent = entry.claim_id;
    link.addEventListener("click", (event) => {
      event.preventDefault();
      callbacks.onOpen(entry.claim_id);
    });
    item.appendChild(link);

    const priority = document.createElement("span");
    priority.className = "priority";
    priority.textContent = `priority ${entry.priority}`;
    item.appendChild(priority);

    for (const reason of entry.reasons) {
      const badge = document.createElement("span");
      badge.className = "badge";
      badge.textContent = reason;
      item.appendChild(badge);
    }
    list.appendChild(item);
  }
  container.appendChild(list);
}

export function renderQueueError(
  container: HTMLElement,
  message: string,
  callbacks: QueueCallbacks,
): void {
  container.innerHTML = "";
  const error = document.createElement("div");
  error.className = "error-state";
  const text = document.createElement("p");
  text.textContent = `Could not load the review queue: ${message}`;
  error.appendChild(text);
  const retry = document.createElement("button");
  retry.textContent = "Retry";
  retry.addEventListener("click", () => callbacks.onRetry());
  error.appendChild(retry);
  container.appendChild(error);
}
