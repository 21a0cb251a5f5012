/** Wire types mirroring the service's JSON contract (snake_case). */

export interface ClaimSubject {
  entity_id: string;
  surface: string;
}

export interface ClaimRecord {
  id: string;
  claim_text: string;
  claim_subject?: ClaimSubject;
  claim_property?: string;
  claim_effect?: string;
  claim_effect_type: string[];
  claim_mechanism?: string;
  claim_condition?: string;
  claim_intent: string;
  claim_type: string[];
  claim_validity_status: string;
  source_id: string;
  merged_source_ids?: string[];
  context_id?: string;
  raw_snippet: string;
  extraction_backend: string;
  extracted_at: string;
  review_state: string;
}

export interface ValidationRecord {
  id: string;
  claim_id: string;
  stance: string;
  validity_text: string;
  medium: string;
  speaker?: string;
  organization?: string;
  source_url?: string;
  confidence?: number;
}

export interface SourceRecord {
  id: string;
  platform: string;
  origin_url?: string;
  title?: string;
  author?: string;
  credibility_tier: string;
  retrieved_at: string;
}

export interface ContextRecord {
  id: string;
  geography?: string[];
  culture?: string[];
  temporal?: string;
  epistemic_frame?: string;
}

export interface AuditEntry {
  decision_id: string;
  claim_id: string;
  action: string;
  reviewer: string;
  decided_at: string;
  extraction_backend: string;
  changes: { field: string; old: string; new: string }[];
  note?: string;
}

export interface ClaimDetail {
  claim: ClaimRecord;
  validations: ValidationRecord[];
  source: SourceRecord | null;
  context: ContextRecord | null;
  audit: AuditEntry[];
}

export interface QueueEntry {
  claim_id: string;
  priority: number;
  reasons: string[];
}

export interface ReviewDecisionBody {
  action: "accept" | "reject" | "edit";
  reviewer: string;
  edited_fields?: Record<string, unknown>;
  note?: string;
  decision_id?: string;
}

export interface ReviewResponse {
  claim: ClaimRecord;
  audit: AuditEntry | null;
  replayed: boolean;
}

export interface CountRow {
  count: number;
  [key: string]: unknown;
}

export interface StatsReport {
  graph: {
    node_count: number;
    edge_count: number;
    per_class: Record<string, number>;
    per_predicate: Record<string, number>;
  };
  pipeline?: Record<string, unknown>;
  distributions: {
    effect_types: { effect_type: string; count: number }[];
    subject_effect_types: { subject: string; effect_type: string; count: number }[];
    categories: { category: string; count: number }[];
    validation_mediums: { medium: string; count: number }[];
    top_terms: { term: string; count: number }[];
  };
}

/** Fields a reviewer may edit; everything else is immutable provenance. */
export const EDITABLE_FIELDS = new Set([
  "claim_property",
  "claim_effect",
  "claim_effect_type",
  "claim_mechanism",
  "claim_condition",
  "claim_intent",
  "claim_type",
  "claim_validity_status",
]);

export const CLAIM_INTENTS = [
  "fact",
  "myth",
  "misrepresentation",
  "misinformation",
  "disinformation",
  "malinformation",
];

export const CLAIM_TYPE_TAGS = [
  "scientific_medical",
  "cultural_traditional",
  "moral_political",
  "sustainability_regulatory",
  "aesthetic_sensory",
  "religious_ritualistic",
  "social_symbolic",
  "origin_authenticity",
  "marketing_advertising",
  "digital_influencer",
];

export const VALIDITY_STATUSES = ["true", "false", "unverified"];
