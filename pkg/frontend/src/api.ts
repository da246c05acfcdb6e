/** Thin typed client over the gateway's JSON API (see the server's API.md). */

export interface JobSummary {
  job_id: number;
  phase: string;
  round: number;
  zk_mode: boolean;
  reward_pool: number;
  samples_open: number;
}

export interface JobDetail extends JobSummary {
  dataset_ref: string;
  num_classes: number;
  batch_size: number;
  num_rounds: number;
  labels_per_sample: number;
  truth_posted: boolean;
  distributed: boolean;
}

export interface NextSample {
  sample_id: number;
  feature_vector: number[];
  votes_so_far: number;
}

export interface ReceiptModel {
  status: string;
  reason: string | null;
  gas_used: number;
  tx_hash: string;
}

export interface TreeState {
  depth: number;
  root: string;
  leaves: string[];
  recent_roots: string[];
}

export interface TruthState {
  posted: boolean;
  entries: Array<{ sample_id: number; label: number }>;
}

export interface Rewards {
  truth_posted: boolean;
  payouts: Array<{ address: string; amount: number }>;
  refund: number;
}

export class ApiError extends Error {
  readonly status: number;
  readonly reason: string | null;

  constructor(status: number, reason: string | null, message: string) {
    super(message);
    this.status = status;
    this.reason = reason;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class GatewayClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (response.status === 204) return null as T;
    const body = await response.json().catch(() => null);
    if (!response.ok) {
      const reason =
        body && typeof body.detail === "object" && body.detail
          ? (body.detail.reason ?? null)
          : null;
      const message =
        reason ?? (typeof body?.detail === "string" ? body.detail : `HTTP ${response.status}`);
      throw new ApiError(response.status, reason, message);
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  listJobs(): Promise<JobSummary[]> {
    return this.request("/jobs");
  }

  jobDetail(jobId: number): Promise<JobDetail> {
    return this.request(`/jobs/${jobId}`);
  }

  nextSample(jobId: number, sessionId?: string): Promise<NextSample | null> {
    const query = sessionId ? `?session=${encodeURIComponent(sessionId)}` : "";
    return this.request(`/jobs/${jobId}/next-sample${query}`);
  }

  createSession(): Promise<{ session_id: string; address: string }> {
    return this.post("/sessions", {});
  }

  join(jobId: number, sessionId: string, commitmentHex?: string): Promise<{ receipt: ReceiptModel; leaf_index: number | null }> {
    return this.post(`/jobs/${jobId}/join`, {
      session_id: sessionId,
      commitment: commitmentHex ?? null,
    });
  }

  submitPlain(jobId: number, sessionId: string, sampleId: number, label: number): Promise<{ receipt: ReceiptModel }> {
    return this.post(`/jobs/${jobId}/labels`, {
      sample_id: sampleId,
      label,
      mode: "plain",
      session_id: sessionId,
    });
  }

  submitZk(jobId: number, body: unknown): Promise<{ receipt: ReceiptModel }> {
    return this.post(`/jobs/${jobId}/labels`, body);
  }

  tree(jobId: number): Promise<TreeState> {
    return this.request(`/jobs/${jobId}/tree`);
  }

  truth(jobId: number): Promise<TruthState> {
    return this.request(`/jobs/${jobId}/truth`);
  }

  commitments(jobId: number): Promise<{ recorded: string[] }> {
    return this.request(`/jobs/${jobId}/commitments`);
  }

  claim(jobId: number, body: unknown): Promise<{ receipt: ReceiptModel }> {
    return this.post(`/jobs/${jobId}/claims`, body);
  }

  rewards(jobId: number): Promise<Rewards> {
    return this.request(`/jobs/${jobId}/rewards`);
  }

  finalize(jobId: number): Promise<ReceiptModel> {
    return this.post(`/jobs/${jobId}/finalize`, {});
  }
}
