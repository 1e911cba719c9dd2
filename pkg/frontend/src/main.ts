/** DOM wiring for the review dashboard. All data comes from the typed API
 * client; this file only renders and forwards user actions. */

import { ApiClient, ApiError, OfflineError } from "./api.js";
import { bipartiteChart, trendChart } from "./charts.js";
import {
  bipartiteEdges,
  canApply,
  categoryRows,
  diffPreview,
  formatPercent,
  formatRate,
  isActionable,
  mergeReviewResult,
  trendPoints,
} from "./logic.js";
import type { Decision, JobStatus, ReviewState } from "./types.js";

const api = new ApiClient("");
const $ = (id: string) => document.getElementById(id) as HTMLElement;

let decisions: Decision[] = [];
let offline = false;

function setOffline(value: boolean) {
  offline = value;
  $("offline-banner").hidden = !value;
  for (const button of document.querySelectorAll<HTMLButtonElement>("button[data-mutates]")) {
    button.disabled = value;
  }
}

async function guarded<T>(work: () => Promise<T>): Promise<T | null> {
  try {
    const result = await work();
    setOffline(false);
    return result;
  } catch (error) {
    if (error instanceof OfflineError) {
      setOffline(true);
      return null;
    }
    throw error;
  }
}

// ---------------------------------------------------------------- coverage

async function renderCoverage() {
  const data = await guarded(async () => ({
    coverage: await api.coverage(),
    rounds: await api.rounds(),
  }));
  if (!data) return;
  const { coverage, rounds } = data;
  $("rc-value").textContent = formatRate(coverage.r_c);
  $("rm-value").textContent = formatRate(coverage.r_m);
  $("rc-pct").textContent = formatPercent(coverage.r_c);
  $("rm-pct").textContent = formatPercent(coverage.r_m);
  $("totals").textContent =
    `${coverage.classified} of ${coverage.total} entities classified · ` +
    `${coverage.no_module_count} without modules · ` +
    `${coverage.resolution_misses} label misses`;
  $("category-table").innerHTML =
    "<tr><th>category</th><th>entities</th></tr>" +
    categoryRows(coverage)
      .map((row) => `<tr><td>${row.category}</td><td>${row.count}</td></tr>`)
      .join("");
  $("trend").innerHTML = trendChart(trendPoints(rounds, coverage));
}

// ------------------------------------------------------------------ review

function decisionCard(decision: Decision): string {
  const samples = (decision.evidence.samples ?? [])
    .map(([id, label, description]) => `<li><code>${id}</code> ${label} — ${description}</li>`)
    .join("");
  const invalid = decision.invalid_reason
    ? `<p class="invalid">rejected by grounding: ${decision.invalid_reason}</p>`
    : "";
  return `
    <article class="decision state-${decision.review_state}" data-id="${decision.decision_id}">
      <header>
        <code>${decision.subject}</code>
        <strong>${decision.evidence.label ?? decision.subject}</strong>
        <span class="badge">${decision.review_state} · v${decision.version}</span>
      </header>
      <p>oracle: <b>${decision.verdict}</b>
         ${decision.category ? `→ category <b>${decision.category}</b>` : ""}
         ${decision.module ? `(module ${decision.module})` : ""}</p>
      <p class="rationale">${decision.rationale || ""}</p>
      ${invalid}
      <ul class="samples">${samples}</ul>
      <footer>
        <button data-mutates data-action="accepted">accept</button>
        <button data-mutates data-action="rejected">reject</button>
        <input type="text" placeholder="annotation note" class="note">
        <button data-mutates data-action="annotated">annotate</button>
      </footer>
    </article>`;
}

async function renderReview() {
  const fetched = await guarded(() => api.decisions());
  if (!fetched) return;
  decisions = fetched;
  $("decision-list").innerHTML = decisions.length
    ? decisions.map(decisionCard).join("")
    : "<p>No pending decisions: run a refinement round first.</p>";
  renderDiffPreview();
  for (const button of document.querySelectorAll<HTMLButtonElement>("#decision-list button")) {
    button.addEventListener("click", () => onReview(button));
    button.disabled = offline;
  }
}

function renderDiffPreview() {
  const lines = diffPreview(decisions);
  $("diff-preview").innerHTML = lines.length
    ? "<h3>Schema diff on apply</h3><ul>" +
      lines
        .map((l) =>
          l.kind === "module"
            ? `<li>create module <b>${l.module}</b> in <b>${l.category}</b></li>`
            : `<li>gate <code>${l.subject}</code> (${l.label}) into <b>${l.category}</b>` +
              `${l.module ? ` via ${l.module}` : ""}</li>`,
        )
        .join("") +
      "</ul>"
    : "<p>No accepted decisions; apply is disabled.</p>";
  ($("apply-button") as HTMLButtonElement).disabled = offline || !canApply(decisions);
  $("accepted-count").textContent = String(decisions.filter(isActionable).length);
}

async function onReview(button: HTMLButtonElement) {
  const card = button.closest("article") as HTMLElement;
  const id = card.dataset.id as string;
  const state = button.dataset.action as ReviewState;
  const note = state === "annotated"
    ? (card.querySelector(".note") as HTMLInputElement).value
    : "";
  const local = decisions.find((d) => d.decision_id === id);
  if (!local) return;
  const entry = await guarded(() => api.review(id, state, note));
  if (!entry) return;
  const { decision, conflict } = mergeReviewResult(local, entry);
  decisions = decisions.map((d) => (d.decision_id === id ? decision : d));
  if (conflict) {
    // a concurrent edit advanced the journal: reload the authoritative list
    await renderReview();
    return;
  }
  card.outerHTML = decisionCard(decision);
  renderDiffPreview();
  await renderReview();
}

async function onApply() {
  const started = await guarded(async () => {
    try {
      return await api.reclassify();
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        $("job-status").textContent = `not started: ${JSON.stringify(error.body)}`;
        return null;
      }
      throw error;
    }
  });
  if (!started) return;
  $("job-status").textContent = `job ${started.job_id} running…`;
  const final = await guarded(() =>
    api.waitForJob(started.job_id, {
      onTick: (s: JobStatus) => {
        $("job-status").textContent = `job ${s.job_id}: ${s.status} ${s.detail}`;
      },
    }),
  );
  if (!final) return;
  $("job-status").textContent = `job ${final.job_id}: ${final.status} — ${final.detail}`;
  await Promise.all([renderCoverage(), renderReview(), renderSpan(), renderValidation()]);
}

// -------------------------------------------------------------------- span

async function renderSpan() {
  const span = await guarded(() => api.span());
  if (!span) return;
  $("span-summary").textContent =
    `${span.intrinsic_groupings} intrinsic, ${span.relational_groupings} relational groupings`;
  $("bipartite").innerHTML = bipartiteChart(bipartiteEdges(span));
}

async function renderValidation() {
  const report = await guarded(() => api.validation());
  if (!report) return;
  $("validation-summary").textContent = report.valid
    ? "schema valid"
    : "schema has errors";
  $("validation-list").innerHTML = report.violations
    .map((v) => `<li class="sev-${v.severity}">[${v.severity}] ${v.kind}: ${v.message}</li>`)
    .join("");
}

// -------------------------------------------------------------------- tabs

function initTabs() {
  for (const tab of document.querySelectorAll<HTMLButtonElement>("nav button")) {
    tab.addEventListener("click", () => {
      for (const other of document.querySelectorAll("nav button")) {
        other.classList.toggle("active", other === tab);
      }
      for (const panel of document.querySelectorAll<HTMLElement>("main > section")) {
        panel.hidden = panel.id !== `tab-${tab.dataset.tab}`;
      }
    });
  }
}

export async function boot() {
  initTabs();
  $("apply-button").addEventListener("click", onApply);
  await Promise.all([renderCoverage(), renderReview(), renderSpan(), renderValidation()]);
}

if (typeof document !== "undefined" && document.getElementById("tab-coverage")) {
  void boot();
}
