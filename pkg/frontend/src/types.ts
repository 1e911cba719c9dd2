/** Payload shapes of the /api/v1 surface. The dashboard never derives
 * numbers client-side; these types mirror the server responses verbatim. */

export interface Coverage {
  total: number;
  classified: number;
  r_c: number;
  r_m: number;
  empty_input: boolean;
  per_category: Record<string, number>;
  per_category_module: Record<string, Record<string, number>>;
  unclassified_type_counts: Record<string, number>;
  unclassified_count: number;
  no_module_count: number;
  unclassified_ids: string[];
  no_module_ids: string[];
  resolution_misses: number;
  skipped_lines: number;
}

export interface Failures {
  unclassified: string[];
  no_module: string[];
  r_c: number;
  r_m: number;
}

export interface Candidate {
  type_id: string;
  label: string | null;
  unclassified_count: number;
  inbound_reference_count: number;
  samples: [string, string, string][];
}

export type ReviewState = "pending" | "accepted" | "rejected" | "annotated";

export interface Decision {
  decision_id: string;
  subject: string;
  verdict: string;
  category: string | null;
  module: string | null;
  new_module: Record<string, unknown> | null;
  rationale: string;
  review_state: ReviewState;
  note: string;
  invalid_reason: string | null;
  evidence: {
    label?: string | null;
    unclassified_count?: number;
    inbound_reference_count?: number;
    samples?: [string, string, string][];
  };
  round_index: number;
  version: number;
}

export interface FailureSetsView {
  unclassified: string[];
  no_module: string[];
  r_c: number;
  r_m: number;
}

export interface RoundDiff {
  added_gates: { category: string; type_id: string; module: string | null }[];
  indicator_edits: {
    category: string;
    module: string;
    property: string;
    added_values: string[];
  }[];
  module_edits: { action: string; category: string; module: string }[];
}

export interface Round {
  index: number;
  before: FailureSetsView | null;
  after: FailureSetsView | null;
  candidates: Candidate[];
  decisions: Omit<Decision, "round_index" | "version">[];
  diff: RoundDiff | null;
  theta_c: number;
  theta_m: number;
  aborted: string | null;
}

export interface SpanModule {
  kind: "intrinsic" | "relational";
  span: number;
  categories: string[];
}

export interface Span {
  intrinsic_groupings: number;
  relational_groupings: number;
  modules: Record<string, SpanModule>;
}

export interface Violation {
  kind: string;
  severity: "error" | "warning";
  context: string[];
  message: string;
}

export interface ValidationView {
  valid: boolean;
  violations: Violation[];
}

export interface JournalEntry {
  decision_id: string;
  review_state: ReviewState;
  note: string;
  version: number;
  timestamp: number;
}

export interface JobStatus {
  job_id: string;
  status: "running" | "done" | "failed";
  detail: string;
}
