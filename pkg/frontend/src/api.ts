/** Thin typed client over the /v1 HTTP API. The dashboard never computes
 * analytics client-side; everything it shows comes through this client. */

import type {
  AnalysisKind,
  AnalysisResult,
  Annotation,
  DatasetRecord,
  Job,
  Post,
  SourceDescriptor,
  ValidationReport,
} from "./types.js";

export interface ApiConfig {
  baseUrl: string;
  token: string;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function parseError(resp: Response): Promise<ApiError> {
  let code = `HTTP_${resp.status}`;
  let message = resp.statusText;
  try {
    const body = (await resp.json()) as { error?: { code?: string; message?: string } };
    if (body.error) {
      code = body.error.code ?? code;
      message = body.error.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(resp.status, code, message);
}

export class ApiClient {
  constructor(private cfg: ApiConfig) {}

  private headers(json = false): Record<string, string> {
    const h: Record<string, string> = { Authorization: `Bearer ${this.cfg.token}` };
    if (json) h["Content-Type"] = "application/json";
    return h;
  }

  private async request<T>(path: string, init: RequestInit = {}): Promise<T> {
    const resp = await fetch(`${this.cfg.baseUrl}${path}`, init);
    if (!resp.ok) throw await parseError(resp);
    return (await resp.json()) as T;
  }

  health(): Promise<{ status: string; kinds: AnalysisKind[] }> {
    return this.request("/v1/health");
  }

  async uploadDataset(
    file: Blob,
    filename: string,
    format: string,
    name = "",
  ): Promise<{ dataset_id: string; validation_report: ValidationReport }> {
    const form = new FormData();
    form.append("file", file, filename);
    form.append("format", format);
    if (name) form.append("name", name);
    return this.request("/v1/datasets", { method: "POST", headers: this.headers(), body: form });
  }

  async listDatasets(): Promise<DatasetRecord[]> {
    const body = await this.request<{ datasets: DatasetRecord[] }>("/v1/datasets", {
      headers: this.headers(),
    });
    return body.datasets;
  }

  getDataset(id: string): Promise<DatasetRecord> {
    return this.request(`/v1/datasets/${id}`, { headers: this.headers() });
  }

  async getPosts(id: string, limit = 200): Promise<Post[]> {
    const body = await this.request<{ posts: Post[] }>(`/v1/datasets/${id}/posts?limit=${limit}`, {
      headers: this.headers(),
    });
    return body.posts;
  }

  submitJob(req: {
    dataset_id: string;
    kind: AnalysisKind;
    priority?: number;
    seed?: number;
    webhook?: string;
  }): Promise<{ job_id: string }> {
    return this.request("/v1/jobs", {
      method: "POST",
      headers: this.headers(true),
      body: JSON.stringify(req),
    });
  }

  getJob(jobId: string): Promise<Job> {
    return this.request(`/v1/jobs/${jobId}`, { headers: this.headers() });
  }

  async listJobs(datasetId?: string): Promise<Job[]> {
    const suffix = datasetId ? `?dataset_id=${datasetId}` : "";
    const body = await this.request<{ jobs: Job[] }>(`/v1/jobs${suffix}`, {
      headers: this.headers(),
    });
    return body.jobs;
  }

  cancelJob(jobId: string): Promise<{ job_id: string; state: string }> {
    return this.request(`/v1/jobs/${jobId}`, { method: "DELETE", headers: this.headers() });
  }

  async getResults(datasetId: string, kind?: AnalysisKind): Promise<AnalysisResult[]> {
    const suffix = kind ? `?kind=${kind}` : "";
    const body = await this.request<{ results: AnalysisResult[] }>(
      `/v1/datasets/${datasetId}/results${suffix}`,
      { headers: this.headers() },
    );
    return body.results;
  }

  annotate(req: {
    dataset_id: string;
    post_id: string;
    kind: string;
    old_label: string;
    new_label: string;
    annotator?: string;
  }): Promise<Annotation> {
    return this.request("/v1/annotations", {
      method: "POST",
      headers: this.headers(true),
      body: JSON.stringify(req),
    });
  }

  async listAnnotations(datasetId: string): Promise<Annotation[]> {
    const body = await this.request<{ annotations: Annotation[] }>(
      `/v1/datasets/${datasetId}/annotations`,
      { headers: this.headers() },
    );
    return body.annotations;
  }

  applyFeedback(datasetId: string): Promise<{
    previous_version: number;
    lexicon_version: number;
    added_positive: string[];
    added_negative: string[];
  }> {
    return this.request("/v1/feedback/apply", {
      method: "POST",
      headers: this.headers(true),
      body: JSON.stringify({ dataset_id: datasetId }),
    });
  }

  exportUrl(jobId: string, format: "csv" | "json"): string {
    return `${this.cfg.baseUrl}/v1/export/${jobId}?format=${format}`;
  }

  async fetchExport(jobId: string, format: "csv" | "json"): Promise<Blob> {
    const resp = await fetch(this.exportUrl(jobId, format), { headers: this.headers() });
    if (!resp.ok) throw await parseError(resp);
    return resp.blob();
  }

  async listSources(): Promise<SourceDescriptor[]> {
    const body = await this.request<{ sources: SourceDescriptor[] }>("/v1/sources", {
      headers: this.headers(),
    });
    return body.sources;
  }

  searchSource(
    sourceId: string,
    req: { query: string; limit?: number; credentials?: Record<string, string>; save_as?: string },
  ): Promise<Record<string, unknown>> {
    return this.request(`/v1/sources/${sourceId}/search`, {
      method: "POST",
      headers: this.headers(true),
      body: JSON.stringify(req),
    });
  }
}

export interface PollOptions {
  intervalMs?: number;
  timeoutMs?: number;
  onUpdate?: (job: Job) => void;
}

const TERMINAL: ReadonlySet<string> = new Set(["done", "failed", "cancelled"]);

/** Poll a job until it reaches a terminal state; backs off on server errors. */
export async function pollJob(client: ApiClient, jobId: string, opts: PollOptions = {}): Promise<Job> {
  const interval = opts.intervalMs ?? 2000;
  const deadline = Date.now() + (opts.timeoutMs ?? 10 * 60 * 1000);
  let backoff = interval;
  for (;;) {
    try {
      const job = await client.getJob(jobId);
      opts.onUpdate?.(job);
      if (TERMINAL.has(job.state)) return job;
      backoff = interval;
    } catch (err) {
      if (err instanceof ApiError && err.status < 500) throw err;
      backoff = Math.min(backoff * 2, 30_000); // transient backend trouble
    }
    if (Date.now() > deadline) throw new Error(`timed out waiting for job ${jobId}`);
    await new Promise((resolve) => setTimeout(resolve, backoff));
  }
}
