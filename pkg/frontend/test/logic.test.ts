import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, OfflineError, type FetchLike } from "../src/api.js";
import { bipartiteChart, trendChart } from "../src/charts.js";
import {
  bipartiteEdges,
  canApply,
  categoryRows,
  diffPreview,
  formatRate,
  isActionable,
  mergeReviewResult,
  trendPoints,
} from "../src/logic.js";
import type { Coverage, Decision, Round, Span } from "../src/types.js";

function decision(overrides: Partial<Decision> = {}): Decision {
  return {
    decision_id: "r0-Q801",
    subject: "Q801",
    verdict: "assign",
    category: "people",
    module: null,
    new_module: null,
    rationale: "",
    review_state: "pending",
    note: "",
    invalid_reason: null,
    evidence: { label: "stray type", samples: [] },
    round_index: 0,
    version: 0,
    ...overrides,
  };
}

const coverage = (r_c: number, r_m: number): Coverage => ({
  total: 10,
  classified: Math.round(r_c * 10),
  r_c,
  r_m,
  empty_input: false,
  per_category: { people: 6, places: 2 },
  per_category_module: {},
  unclassified_type_counts: {},
  unclassified_count: 10 - Math.round(r_c * 10),
  no_module_count: 0,
  unclassified_ids: [],
  no_module_ids: [],
  resolution_misses: 0,
  skipped_lines: 0,
});

describe("rate formatting", () => {
  it("shows the API value at full precision", () => {
    // numbers must round-trip: what is displayed parses back to the same value
    for (const value of [0.6, 0.9333333333333333, 1, 0.8333333333333334]) {
      expect(Number(formatRate(value))).toBe(value);
    }
    expect(formatRate(0.9333333333333333)).toBe("0.9333333333333333");
  });
});

describe("review gating", () => {
  it("apply stays disabled when everything is rejected", () => {
    const all = [
      decision({ review_state: "rejected" }),
      decision({ decision_id: "r0-Q802", subject: "Q802", review_state: "rejected" }),
    ];
    expect(canApply(all)).toBe(false);
    expect(diffPreview(all)).toEqual([]);
  });

  it("accepted and annotated decisions are actionable; invalid ones are not", () => {
    expect(isActionable(decision({ review_state: "accepted" }))).toBe(true);
    expect(isActionable(decision({ review_state: "annotated" }))).toBe(true);
    expect(isActionable(decision({ review_state: "pending" }))).toBe(false);
    expect(
      isActionable(
        decision({ review_state: "accepted", invalid_reason: "invalid-identifier:P90001" }),
      ),
    ).toBe(false);
    expect(isActionable(decision({ review_state: "accepted", verdict: "decline" }))).toBe(false);
  });

  it("previews one gate line per accepted decision and modules once", () => {
    const newModule = { name: "facet", kind: "relational" };
    const lines = diffPreview([
      decision({ review_state: "accepted" }),
      decision({
        decision_id: "r0-Q802",
        subject: "Q802",
        review_state: "accepted",
        new_module: newModule,
      }),
      decision({
        decision_id: "r0-Q803",
        subject: "Q803",
        review_state: "accepted",
        new_module: newModule,
      }),
    ]);
    expect(lines.filter((l) => l.kind === "gate")).toHaveLength(3);
    expect(lines.filter((l) => l.kind === "module")).toHaveLength(1);
  });
});

describe("journal merge", () => {
  it("clean advance updates state without conflict", () => {
    const { decision: merged, conflict } = mergeReviewResult(decision(), {
      decision_id: "r0-Q801",
      review_state: "accepted",
      note: "",
      version: 1,
      timestamp: 0,
    });
    expect(conflict).toBe(false);
    expect(merged.review_state).toBe("accepted");
    expect(merged.version).toBe(1);
  });

  it("idempotent repeat is not a conflict", () => {
    const local = decision({ review_state: "accepted", version: 2 });
    const { conflict } = mergeReviewResult(local, {
      decision_id: "r0-Q801",
      review_state: "accepted",
      note: "",
      version: 2,
      timestamp: 0,
    });
    expect(conflict).toBe(false);
  });

  it("a skipped version means a concurrent edit happened", () => {
    const { conflict } = mergeReviewResult(decision({ version: 0 }), {
      decision_id: "r0-Q801",
      review_state: "rejected",
      note: "",
      version: 3,
      timestamp: 0,
    });
    expect(conflict).toBe(true);
  });
});

describe("coverage trend", () => {
  it("zero-round run charts a single point from current stats", () => {
    const points = trendPoints([], coverage(0.6, 1));
    expect(points).toEqual([{ round: 0, r_c: 0.6, r_m: 1 }]);
    expect(trendChart(points)).toContain("<circle");
  });

  it("rounds chart before values plus the final after value", () => {
    const rounds = [
      {
        index: 0,
        before: { unclassified: [], no_module: [], r_c: 0.6, r_m: 1 },
        after: { unclassified: [], no_module: [], r_c: 1, r_m: 1 },
        candidates: [],
        decisions: [],
        diff: null,
        theta_c: 0.9,
        theta_m: 0.9,
        aborted: null,
      },
    ] satisfies Round[];
    const points = trendPoints(rounds, coverage(1, 1));
    expect(points.map((p) => p.r_c)).toEqual([0.6, 1]);
    const svg = trendChart(points);
    expect(svg).toContain("line-rc");
    expect(svg).toContain("line-rm");
  });
});

describe("span view", () => {
  const span: Span = {
    intrinsic_groupings: 1,
    relational_groupings: 2,
    modules: {
      religion: { kind: "relational", span: 2, categories: ["people", "places"] },
      biography: { kind: "intrinsic", span: 1, categories: ["people"] },
    },
  };

  it("orders adjacency by descending span", () => {
    const edges = bipartiteEdges(span);
    expect(edges.map((e) => e.module)).toEqual(["religion", "religion", "biography"]);
    const svg = bipartiteChart(edges);
    expect(svg).toContain("religion");
    expect(svg).toContain("edge-intrinsic");
  });

  it("sorts per-category counts descending", () => {
    expect(categoryRows(coverage(0.8, 1)).map((r) => r.category)).toEqual([
      "people",
      "places",
    ]);
  });
});

describe("api client", () => {
  it("raises ApiError with status and body on non-2xx", async () => {
    const fetchImpl: FetchLike = async () => ({
      ok: false,
      status: 409,
      json: async () => ({ error: "no accepted decisions to apply" }),
    });
    const client = new ApiClient("", fetchImpl);
    const error = await client.reclassify().catch((e) => e);
    expect(error).toBeInstanceOf(ApiError);
    expect(error.status).toBe(409);
    expect(error.body.error).toMatch(/no accepted decisions/);
  });

  it("maps network failure to OfflineError", async () => {
    const fetchImpl: FetchLike = async () => {
      throw new Error("connection refused");
    };
    const client = new ApiClient("", fetchImpl);
    await expect(client.coverage()).rejects.toBeInstanceOf(OfflineError);
  });

  it("sends review state to the journal endpoint", async () => {
    const calls: { url: string; body: unknown }[] = [];
    const fetchImpl: FetchLike = async (url, init) => {
      calls.push({ url, body: init?.body ? JSON.parse(init.body) : null });
      return {
        ok: true,
        status: 200,
        json: async () => ({
          decision_id: "r0-Q801",
          review_state: "accepted",
          note: "",
          version: 1,
          timestamp: 0,
        }),
      };
    };
    const client = new ApiClient("http://svc", fetchImpl);
    const entry = await client.review("r0-Q801", "accepted");
    expect(entry.version).toBe(1);
    expect(calls[0].url).toBe("http://svc/api/v1/decisions/r0-Q801/review");
    expect(calls[0].body).toEqual({ state: "accepted", note: "" });
  });
});
