/** Claim detail: highlighted snippet, editable grammar form, evidence. */

import type { ClaimDetail, ClaimRecord, ValidationRecord } from "./types.js";
import {
  CLAIM_INTENTS,
  CLAIM_TYPE_TAGS,
  EDITABLE_FIELDS,
  VALIDITY_STATUSES,
} from "./types.js";

const STANCE_ICONS: Record<string, string> = {
  support: "✔",
  challenge: "✖",
  request_evidence: "📄",
  question: "？",
  clarify: "≈",
};

const LOCKED_FIELDS: [keyof ClaimRecord, string][] = [
  ["claim_text", "claim text"],
  ["raw_snippet", "raw snippet"],
  ["source_id", "source"],
  ["extraction_backend", "extraction backend"],
  ["extracted_at", "extracted at"],
];

export interface DecisionSubmission {
  action: "accept" | "reject" | "edit";
  edited_fields?: Record<string, unknown>;
  note?: string;
  reviewer: string;
}

export interface DetailCallbacks {
  onSubmit: (submission: DecisionSubmission) => void;
  onBack: () => void;
}

/** Client-side mirror of the service's immutability rule: reject any
 * edited field outside the editable set before any network call. */
export function validateEdits(fields: Record<string, unknown>): string | null {
  for (const name of Object.keys(fields)) {
    if (!EDITABLE_FIELDS.has(name)) {
      return `${name} is immutable and cannot be edited`;
    }
  }
  return null;
}

/** Diff the form against the claim; only changed editable fields count. */
export function collectEditedFields(
  form: HTMLElement,
  claim: ClaimRecord,
): Record<string, unknown> {
  const edited: Record<string, unknown> = {};
  const text = (name: string) =>
    (form.querySelector(`[name="${name}"]`) as HTMLInputElement | null)?.value?.trim() ?? "";

  const textFields: [string, string | undefined][] = [
    ["claim_property", claim.claim_property],
    ["claim_effect", claim.claim_effect],
    ["claim_mechanism", claim.claim_mechanism],
    ["claim_condition", claim.claim_condition],
  ];
  for (const [name, current] of textFields) {
    const value = text(name);
    if (value !== (current ?? "")) {
      edited[name] = value === "" ? null : value;
    }
  }

  const effectTypes = text("claim_effect_type")
    .split(",")
    .map((t) => t.trim())
    .filter(Boolean);
  if (effectTypes.join(",") !== claim.claim_effect_type.join(",")) {
    edited["claim_effect_type"] = effectTypes;
  }

  const intent = text("claim_intent");
  if (intent && intent !== claim.claim_intent) {
    edited["claim_intent"] = intent;
  }
  const validity = text("claim_validity_status");
  if (validity && validity !== claim.claim_validity_status) {
    edited["claim_validity_status"] = validity;
  }

  const tags: string[] = [];
  form.querySelectorAll<HTMLInputElement>('input[name="claim_type"]:checked').forEach((box) => {
    tags.push(box.value);
  });
  if (tags.slice().sort().join(",") !== claim.claim_type.slice().sort().join(",")) {
    edited["claim_type"] = tags;
  }
  return edited;
}

export function renderClaimDetail(
  container: HTMLElement,
  detail: ClaimDetail,
  callbacks: DetailCallbacks,
): void {
  container.innerHTML = "";
  const claim = detail.claim;

  const back = document.createElement("button");
  back.className = "back";
  back.textContent = "← queue";
  back.addEventListener("click", () => callbacks.onBack());
  container.appendChild(back);

  const heading = document.createElement("h2");
  heading.textContent = claim.id;
  container.appendChild(heading);

  const state = document.createElement("span");
  state.className = `review-state state-${claim.review_state}`;
  state.textContent = claim.review_state;
  container.appendChild(state);

  container.appendChild(renderSnippet(claim));
  container.appendChild(renderLockedFields(claim, detail, container));

  const form = renderEditForm(claim);
  container.appendChild(form);

  const evidence = document.createElement("section");
  evidence.className = "evidence";
  const evidenceHeading = document.createElement("h3");
  evidenceHeading.textContent = `Validating sources (${detail.validations.length})`;
  evidence.appendChild(evidenceHeading);
  for (const validation of detail.validations) {
    evidence.appendChild(renderEvidenceCard(validation));
  }
  container.appendChild(evidence);

  if (detail.audit.length > 0) {
    const audit = document.createElement("section");
    audit.className = "audit";
    const auditHeading = document.createElement("h3");
    auditHeading.textContent = "Audit trail";
    audit.appendChild(auditHeading);
    const list = document.createElement("ul");
    for (const entry of detail.audit) {
      const item = document.createElement("li");
      const changes = entry.changes.map((c) => `${c.field}: ${c.old} → ${c.new}`).join("; ");
      item.textContent = `${entry.decided_at} ${entry.reviewer} ${entry.action}` +
        (changes ? ` (${changes})` : "");
      list.appendChild(item);
    }
    audit.appendChild(list);
    container.appendChild(audit);
  }

  container.appendChild(renderDecisionBar(claim, form, callbacks));
}

function renderSnippet(claim: ClaimRecord): HTMLElement {
  const section = document.createElement("section");
  section.className = "snippet";
  const heading = document.createElement("h3");
  heading.textContent = "Snippet";
  section.appendChild(heading);

  const block = document.createElement("blockquote");
  const index = claim.raw_snippet.indexOf(claim.claim_text);
  if (index >= 0) {
    block.appendChild(
      document.createTextNode(claim.raw_snippet.slice(0, index)),
    );
    const mark = document.createElement("mark");
    mark.textContent = claim.claim_text;
    block.appendChild(mark);
    block.appendChild(
      document.createTextNode(claim.raw_snippet.slice(index + claim.claim_text.length)),
    );
  } else {
    // remote-backend paraphrase: no span to highlight
    block.textContent = claim.raw_snippet;
    const warning = document.createElement("span");
    warning.className = "badge warning";
    warning.textContent = "claim text not found in snippet";
    section.appendChild(warning);
  }
  section.appendChild(block);
  return section;
}

function renderLockedFields(
  claim: ClaimRecord,
  detail: ClaimDetail,
  container: HTMLElement,
): HTMLElement {
  const section = document.createElement("section");
  section.className = "locked-fields";
  const heading = document.createElement("h3");
  heading.textContent = "Provenance (immutable)";
  section.appendChild(heading);
  for (const [field, label] of LOCKED_FIELDS) {
    const row = document.createElement("div");
    row.className = "field locked";
    const caption = document.createElement("label");
    caption.textContent = `🔒 ${label}`;
    row.appendChild(caption);
    const input = document.createElement("input");
    input.value = String(claim[field] ?? "");
    input.readOnly = true;
    input.dataset.locked = "true";
    input.name = field;
    const complain = () =>
      showFieldError(container, field, `${field} is immutable and cannot be edited`);
    input.addEventListener("beforeinput", (event) => {
      event.preventDefault();
      complain();
    });
    input.addEventListener("click", complain);
    row.appendChild(input);
    const errorSlot = document.createElement("p");
    errorSlot.className = "field-error";
    errorSlot.dataset.errorFor = field;
    row.appendChild(errorSlot);
    section.appendChild(row);
  }
  if (detail.source?.origin_url) {
    const origin = document.createElement("a");
    origin.href = detail.source.origin_url;
    origin.target = "_blank";
    origin.rel = "noopener";
    origin.textContent = `source: ${detail.source.origin_url}`;
    section.appendChild(origin);
  }
  return section;
}

function renderEditForm(claim: ClaimRecord): HTMLElement {
  const form = document.createElement("form");
  form.className = "edit-form";
  form.addEventListener("submit", (event) => event.preventDefault());
  const heading = document.createElement("h3");
  heading.textContent = "Claim grammar (editable)";
  form.appendChild(heading);

  const textField = (name: string, label: string, value: string | undefined) => {
    const row = document.createElement("div");
    row.className = "field";
    const caption = document.createElement("label");
    caption.textContent = label;
    caption.htmlFor = name;
    row.appendChild(caption);
    const input = document.createElement("input");
    input.name = name;
    input.id = name;
    input.value = value ?? "";
    row.appendChild(input);
    const errorSlot = document.createElement("p");
    errorSlot.className = "field-error";
    errorSlot.dataset.errorFor = name;
    row.appendChild(errorSlot);
    form.appendChild(row);
  };

  textField("claim_property", "property", claim.claim_property);
  textField("claim_effect", "effect", claim.claim_effect);
  textField("claim_effect_type", "effect types (comma separated)", claim.claim_effect_type.join(", "));
  textField("claim_mechanism", "mechanism", claim.claim_mechanism);
  textField("claim_condition", "condition", claim.claim_condition);

  const selectField = (name: string, label: string, options: string[], current: string) => {
    const row = document.createElement("div");
    row.className = "field";
    const caption = document.createElement("label");
    caption.textContent = label;
    caption.htmlFor = name;
    row.appendChild(caption);
    const select = document.createElement("select");
    select.name = name;
    select.id = name;
    for (const option of options) {
      const el = document.createElement("option");
      el.value = option;
      el.textContent = option;
      select.appendChild(el);
    }
    select.value = current;
    row.appendChild(select);
    const errorSlot = document.createElement("p");
    errorSlot.className = "field-error";
    errorSlot.dataset.errorFor = name;
    row.appendChild(errorSlot);
    form.appendChild(row);
  };

  selectField("claim_intent", "intent", CLAIM_INTENTS, claim.claim_intent);
  selectField("claim_validity_status", "validity", VALIDITY_STATUSES, claim.claim_validity_status);

  const tagRow = document.createElement("div");
  tagRow.className = "field claim-types";
  const tagCaption = document.createElement("label");
  tagCaption.textContent = "claim types";
  tagRow.appendChild(tagCaption);
  for (const tag of CLAIM_TYPE_TAGS) {
    const wrap = document.createElement("label");
    wrap.className = "tag-option";
    const box = document.createElement("input");
    box.type = "checkbox";
    box.name = "claim_type";
    box.value = tag;
    box.checked = claim.claim_type.includes(tag);
    wrap.appendChild(box);
    wrap.appendChild(document.createTextNode(tag));
    tagRow.appendChild(wrap);
  }
  const tagError = document.createElement("p");
  tagError.className = "field-error";
  tagError.dataset.errorFor = "claim_type";
  tagRow.appendChild(tagError);
  form.appendChild(tagRow);

  return form;
}

function renderEvidenceCard(validation: ValidationRecord): HTMLElement {
  const card = document.createElement("article");
  card.className = `evidence-card stance-${validation.stance}`;
  const header = document.createElement("header");
  const icon = document.createElement("span");
  icon.className = "stance-icon";
  icon.title = validation.stance;
  icon.textContent = STANCE_ICONS[validation.stance] ?? "•";
  header.appendChild(icon);
  const meta = document.createElement("span");
  const confidence = validation.confidence === undefined ? "" : ` · confidence ${validation.confidence}`;
  meta.textContent = `${validation.stance} · ${validation.medium}${confidence}`;
  header.appendChild(meta);
  card.appendChild(header);

  const text = document.createElement("p");
  text.textContent = validation.validity_text;
  card.appendChild(text);

  const footer = document.createElement("footer");
  if (validation.speaker) {
    footer.appendChild(document.createTextNode(`${validation.speaker} `));
  }
  if (validation.organization) {
    footer.appendChild(document.createTextNode(`(${validation.organization}) `));
  }
  if (validation.source_url) {
    const link = document.createElement("a");
    link.href = validation.source_url;
    link.target = "_blank";
    link.rel = "noopener";
    link.textContent = validation.source_url;
    footer.appendChild(link);
  }
  card.appendChild(footer);
  return card;
}

function renderDecisionBar(
  claim: ClaimRecord,
  form: HTMLElement,
  callbacks: DetailCallbacks,
): HTMLElement {
  const bar = document.createElement("div");
  bar.className = "decision-bar";

  const reviewer = document.createElement("input");
  reviewer.name = "reviewer";
  reviewer.placeholder = "reviewer";
  reviewer.value = "annotator";
  bar.appendChild(reviewer);

  const note = document.createElement("input");
  note.name = "note";
  note.placeholder = "note (optional)";
  bar.appendChild(note);

  const message = document.createElement("p");
  message.className = "decision-message";
  bar.appendChild(message);

  const submit = (action: "accept" | "reject" | "edit") => {
    clearFieldErrors(bar.parentElement ?? bar);
    const submission: DecisionSubmission = {
      action,
      reviewer: reviewer.value.trim() || "annotator",
    };
    if (note.value.trim()) {
      submission.note = note.value.trim();
    }
    if (action === "edit") {
      const edited = collectEditedFields(form, claim);
      if (Object.keys(edited).length === 0) {
        message.textContent = "No field changes to save.";
        return;
      }
      const problem = validateEdits(edited);
      if (problem !== null) {
        // blocked client-side: no network call happens
        message.textContent = problem;
        return;
      }
      submission.edited_fields = edited;
    }
    callbacks.onSubmit(submission);
  };

  const buttons: ["accept" | "edit" | "reject", string][] = [
    ["accept", "Accept"],
    ["edit", "Save edits"],
    ["reject", "Reject"],
  ];
  for (const [action, label] of buttons) {
    const button = document.createElement("button");
    button.dataset.action = action;
    button.textContent = label;
    button.addEventListener("click", () => submit(action));
    bar.appendChild(button);
  }
  return bar;
}

export function showFieldError(root: HTMLElement, field: string, message: string): void {
  const slot = root.querySelector<HTMLElement>(`[data-error-for="${field}"]`);
  if (slot) {
    slot.textContent = message;
  } else {
    const fallback = root.querySelector<HTMLElement>(".decision-message");
    if (fallback) {
      fallback.textContent = message;
    }
  }
}

export function clearFieldErrors(root: HTMLElement): void {
  root.querySelectorAll<HTMLElement>(".field-error").forEach((slot) => {
    slot.textContent = "";
  });
}
