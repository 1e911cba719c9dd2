/** Thin typed client over the /api/v1 HTTP surface — the dashboard's only
 * data source. Every mutation goes through these endpoints; nothing touches
 * run-dir files directly. */

import type {
  Candidate,
  Coverage,
  Decision,
  Failures,
  JobStatus,
  JournalEntry,
  ReviewState,
  Round,
  Span,
  ValidationView,
} from "./types.js";

export type FetchLike = (
  input: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ ok: boolean; status: number; json(): Promise<unknown> }>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: unknown,
  ) {
    super(`API error ${status}: ${JSON.stringify(body)}`);
  }
}

/** Raised instead of ApiError when the service itself is unreachable, so
 * the UI can show the offline banner rather than an endpoint error. */
export class OfflineError extends Error {
  constructor(cause: unknown) {
    super(`service unreachable: ${String(cause)}`);
  }
}

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: FetchLike = fetch as unknown as FetchLike,
  ) {}

  private async request<T>(path: string, init?: Parameters<FetchLike>[1]): Promise<T> {
    let response: Awaited<ReturnType<FetchLike>>;
    try {
      response = await this.fetchImpl(`${this.base}/api/v1${path}`, init);
    } catch (cause) {
      throw new OfflineError(cause);
    }
    const body = await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, body);
    }
    return body as T;
  }

  coverage(): Promise<Coverage> {
    return this.request("/coverage");
  }

  failures(): Promise<Failures> {
    return this.request("/failures");
  }

  candidates(): Promise<Candidate[]> {
    return this.request("/candidates");
  }

  rounds(): Promise<Round[]> {
    return this.request("/rounds");
  }

  span(): Promise<Span> {
    return this.request("/span");
  }

  validation(): Promise<ValidationView> {
    return this.request("/validation");
  }

  decisions(): Promise<Decision[]> {
    return this.request("/decisions");
  }

  review(decisionId: string, state: ReviewState, note = ""): Promise<JournalEntry> {
    return this.request(`/decisions/${encodeURIComponent(decisionId)}/review`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ state, note }),
    });
  }

  reclassify(): Promise<{ job_id: string; status: string }> {
    return this.request("/reclassify", { method: "POST" });
  }

  job(jobId: string): Promise<JobStatus> {
    return this.request(`/jobs/${encodeURIComponent(jobId)}`);
  }

  /** Poll a reclassification job until it leaves the running state. */
  async waitForJob(
    jobId: string,
    opts: { intervalMs?: number; timeoutMs?: number; onTick?: (s: JobStatus) => void } = {},
  ): Promise<JobStatus> {
    const interval = opts.intervalMs ?? 250;
    const deadline = Date.now() + (opts.timeoutMs ?? 60_000);
    for (;;) {
      const status = await this.job(jobId);
      opts.onTick?.(status);
      if (status.status !== "running") {
        return status;
      }
      if (Date.now() > deadline) {
        throw new Error(`job ${jobId} still running after timeout`);
      }
      await new Promise((resolve) => setTimeout(resolve, interval));
    }
  }
}
