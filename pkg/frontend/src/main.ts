/** Hash-routed single-page review app over the service's JSON API. */

import { ApiClient, ServiceError } from "./api.js";
import { renderClaimDetail, showFieldError, type DecisionSubmission } from "./detail.js";
import { optimistic } from "./optimistic.js";
import { renderQueue, renderQueueError } from "./queue.js";
import { renderStats } from "./stats.js";
import type { QueueEntry } from "./types.js";

const api = new ApiClient("");

interface AppState {
  queue: QueueEntry[];
  currentClaim: string | null;
}

const state: AppState = { queue: [], currentClaim: null };

function app(): HTMLElement {
  const element = document.querySelector<HTMLElement>("#app");
  if (!element) {
    throw new Error("missing #app container");
  }
  return element;
}

async function showQueue(): Promise<void> {
  const container = app();
  try {
    const response = await api.getQueue();
    state.queue = response.entries;
    renderQueue(container, state.queue, {
      onOpen: (claimId) => navigate(`#/claim/${claimId}`),
      onRetry: () => void showQueue(),
    });
  } catch (error) {
    renderQueueError(container, error instanceof Error ? error.message : String(error), {
      onOpen: () => undefined,
      onRetry: () => void showQueue(),
    });
  }
}

async function showClaim(claimId: string): Promise<void> {
  const container = app();
  state.currentClaim = claimId;
  try {
    const detail = await api.getClaim(claimId);
    renderClaimDetail(container, detail, {
      onBack: () => navigate("#/queue"),
      onSubmit: (submission) => void submitDecision(claimId, submission),
    });
  } catch (error) {
    container.innerHTML = "";
    const message = document.createElement("p");
    message.className = "error-state";
    message.textContent = error instanceof Error ? error.message : String(error);
    container.appendChild(message);
  }
}

async function submitDecision(claimId: string, submission: DecisionSubmission): Promise<void> {
  // Optimistically drop the entry from the local queue copy; the service
  // response (or a reload) is the source of truth afterwards.
  const container = app();
  await optimistic({
    apply: () => {
      const index = state.queue.findIndex((entry) => entry.claim_id === claimId);
      return index >= 0 ? state.queue.splice(index, 1)[0] : null;
    },
    remote: async () => {
      const response = await api.submitReview(claimId, {
        action: submission.action,
        reviewer: submission.reviewer,
        edited_fields: submission.edited_fields,
        note: submission.note,
      });
      if (submission.action === "edit") {
        // reflect the reconciled claim, then stay on the detail view
        renderClaimDetail(
          container,
          await api.getClaim(response.claim.id),
          {
            onBack: () => navigate("#/queue"),
            onSubmit: (next) => void submitDecision(claimId, next),
          },
        );
      } else {
        advanceToNext();
      }
    },
    revert: (snapshot) => {
      if (snapshot) {
        state.queue.unshift(snapshot);
      }
    },
    onError: (error) => {
      if (error instanceof ServiceError && error.field) {
        showFieldError(container, error.field, error.message);
      } else {
        showFieldError(
          container,
          "__decision__",
          error instanceof Error ? error.message : String(error),
        );
      }
    },
  });
}

function advanceToNext(): void {
  const next = state.queue[0];
  if (next) {
    navigate(`#/claim/${next.claim_id}`);
  } else {
    navigate("#/queue");
  }
}

function navigate(hash: string): void {
  if (location.hash === hash) {
    void route();
  } else {
    location.hash = hash;
  }
}

async function showStatsPage(): Promise<void> {
  const container = app();
  try {
    renderStats(container, await api.getStats());
  } catch (error) {
    container.innerHTML = "";
    const message = document.createElement("p");
    message.className = "error-state";
    message.textContent = error instanceof Error ? error.message : String(error);
    container.appendChild(message);
  }
}

async function route(): Promise<void> {
  const hash = location.hash || "#/queue";
  const claimMatch = hash.match(/^#\/claim\/(.+)$/);
  if (claimMatch) {
    await showClaim(claimMatch[1]);
  } else if (hash === "#/stats") {
    await showStatsPage();
  } else {
    await showQueue();
  }
}

window.addEventListener("hashchange", () => void route());
window.addEventListener("DOMContentLoaded", () => void route());
