/**
 * Typed client over the documented HTTP+JSON API. Nothing else: the client
 * consumes only the published endpoints.
 */

import type { FeedbackReport, StatementDoc } from "./model.js";

export interface ApiErrorBody {
  code: string;
  message: string;
  detail?: unknown;
}

export class ApiError extends Error {
  constructor(public status: number, public body: ApiErrorBody) {
    super(`${body.code}: ${body.message}`);
  }
}

export interface SubmissionResult {
  report: FeedbackReport;
  submissionId: string;
  mode: string;
  remainingAttempts: number;
}

export interface PlaygroundResult {
  stdout?: string;
  "exit-code"?: number;
  steps?: number;
  error?: { code: string; message: string };
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class Client {
  constructor(
    private baseUrl: string,
    private token: string,
    private fetchImpl: FetchLike = fetch,
  ) {}

  private async request(path: string, init: RequestInit = {}): Promise<Response> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      ...init,
      headers: {
        Authorization: `Bearer ${this.token}`,
        "Content-Type": "application/json",
        ...(init.headers ?? {}),
      },
    });
    if (!response.ok) {
      const body = (await response.json().catch(() => null)) as ApiErrorBody | null;
      throw new ApiError(
        response.status,
        body ?? { code: "UNKNOWN", message: `http ${response.status}` },
      );
    }
    return response;
  }

  async getStatement(id: string): Promise<StatementDoc> {
    const response = await this.request(`/api/statements/${id}`);
    return (await response.json()) as StatementDoc;
  }

  async encodeStatement(doc: StatementDoc): Promise<{ id: string; version: number }> {
    const response = await this.request("/api/statements", {
      method: "POST",
      body: JSON.stringify(doc),
    });
    return (await response.json()) as { id: string; version: number };
  }

  async submit(statementId: string, payloads: Record<string, unknown>): Promise<SubmissionResult> {
    const response = await this.request(`/api/statements/${statementId}/submissions`, {
      method: "POST",
      body: JSON.stringify({ payloads }),
    });
    return {
      report: (await response.json()) as FeedbackReport,
      submissionId: response.headers.get("X-Submission-Id") ?? "",
      mode: response.headers.get("X-Mode") ?? "",
      remainingAttempts: Number(response.headers.get("X-Remaining-Attempts") ?? "-1"),
    };
  }

  async playground(statementId: string, source: string, stdin: string): Promise<PlaygroundResult> {
    const response = await this.request(`/api/playground/${statementId}`, {
      method: "POST",
      body: JSON.stringify({ source, stdin }),
    });
    return (await response.json()) as PlaygroundResult;
  }

  async playTrump(statementId: string): Promise<void> {
    await this.request(`/api/trump/${statementId}`, { method: "POST", body: "{}" });
  }

  async progress(): Promise<unknown> {
    const response = await this.request("/api/progress/me");
    return response.json();
  }
}
