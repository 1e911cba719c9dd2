/** Pure view-model helpers. Everything here transforms API payloads for
 * display; no number shown in the UI is computed from raw entities —
 * rates and counts come from the service verbatim. */

import type { Coverage, Decision, JournalEntry, Round, Span } from "./types.js";

/** Render a rate exactly as the API reported it: full precision, no
 * rounding, so the displayed value round-trips back to the same number. */
export function formatRate(value: number): string {
  return String(value);
}

export function formatPercent(value: number): string {
  return `${(value * 100).toFixed(1)}%`;
}

/** A decision the apply step would actually turn into a schema edit. */
export function isActionable(decision: Decision): boolean {
  return (
    decision.invalid_reason === null &&
    (decision.verdict === "assign" || decision.verdict === "module-edit") &&
    (decision.review_state === "accepted" || decision.review_state === "annotated")
  );
}

/** Apply is enabled only when at least one decision would produce an edit;
 * rejecting everything disables it. */
export function canApply(decisions: Decision[]): boolean {
  return decisions.some(isActionable);
}

export interface DiffPreviewLine {
  subject: string;
  label: string;
  category: string;
  module: string | null;
  kind: "gate" | "module";
}

/** Preview of the schema diff the accepted decisions will produce, shown
 * before "apply accepted + reclassify". Mirrors the server's diff builder
 * for display only; the server recomputes the real diff on apply. */
export function diffPreview(decisions: Decision[]): DiffPreviewLine[] {
  const lines: DiffPreviewLine[] = [];
  const seenModules = new Set<string>();
  for (const decision of decisions.filter(isActionable)) {
    if (decision.new_module) {
      const name = String((decision.new_module as { name?: unknown }).name ?? "");
      const key = `${decision.category}/${name}`;
      if (!seenModules.has(key)) {
        seenModules.add(key);
        lines.push({
          subject: decision.subject,
          label: decision.evidence.label ?? decision.subject,
          category: decision.category ?? "",
          module: name,
          kind: "module",
        });
      }
    }
    lines.push({
      subject: decision.subject,
      label: decision.evidence.label ?? decision.subject,
      category: decision.category ?? "",
      module: decision.module,
      kind: "gate",
    });
  }
  return lines;
}

/** Merge a review response into the local decision list. The journal is
 * the authority: when the server's version is not the expected local
 * version + 1 (or an idempotent repeat), someone else wrote in between and
 * the caller must reload the item with the server state. */
export function mergeReviewResult(
  decision: Decision,
  entry: JournalEntry,
): { decision: Decision; conflict: boolean } {
  const merged: Decision = {
    ...decision,
    review_state: entry.review_state,
    note: entry.note,
    version: entry.version,
  };
  const idempotentRepeat = entry.version === decision.version;
  const cleanAdvance = entry.version === decision.version + 1;
  return { decision: merged, conflict: !idempotentRepeat && !cleanAdvance };
}

export interface TrendPoint {
  round: number;
  r_c: number;
  r_m: number;
}

/** Round-over-round coverage trend. The current stats contribute the last
 * point so a zero-round run still charts a single point. */
export function trendPoints(rounds: Round[], current: Coverage): TrendPoint[] {
  const points: TrendPoint[] = [];
  for (const round of rounds) {
    points.push({ round: round.index, r_c: round.before?.r_c ?? 0, r_m: round.before?.r_m ?? 0 });
  }
  const last = rounds.length > 0 ? rounds[rounds.length - 1] : null;
  points.push({
    round: last ? last.index + 1 : 0,
    r_c: last?.after ? last.after.r_c : current.r_c,
    r_m: last?.after ? last.after.r_m : current.r_m,
  });
  return points;
}

export interface BipartiteEdge {
  category: string;
  module: string;
  kind: "intrinsic" | "relational";
}

/** Category <-> module adjacency of the span report, modules ordered by
 * descending span so the widest-reaching groupings chart first. */
export function bipartiteEdges(span: Span): BipartiteEdge[] {
  const names = Object.keys(span.modules).sort((a, b) => {
    const d = span.modules[b].span - span.modules[a].span;
    return d !== 0 ? d : a.localeCompare(b);
  });
  const edges: BipartiteEdge[] = [];
  for (const name of names) {
    const mod = span.modules[name];
    for (const category of mod.categories) {
      edges.push({ category, module: name, kind: mod.kind });
    }
  }
  return edges;
}

export function categoryRows(coverage: Coverage): { category: string; count: number }[] {
  return Object.entries(coverage.per_category)
    .map(([category, count]) => ({ category, count }))
    .sort((a, b) => b.count - a.count || a.category.localeCompare(b.category));
}
