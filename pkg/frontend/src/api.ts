/** Thin typed client over the service HTTP API. */

import type { AssignmentView, OutboxView, PostView, SettingsView } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface NoAssignment {
  kind: "none";
  reason: string | null;
  retryAt: string | null;
}

export interface ApiErrorInfo {
  status: number;
  detail: string;
}

export class ApiError extends Error {
  readonly status: number;
  readonly detail: string;

  constructor(info: ApiErrorInfo) {
    super(`HTTP ${info.status}: ${info.detail}`);
    this.status = info.status;
    this.detail = info.detail;
  }

  get conflict(): boolean {
    return this.status === 409;
  }
}

async function parseError(response: Response): Promise<never> {
  let detail = response.statusText;
  try {
    const body = await response.json();
    if (body && typeof body.detail === "string") detail = body.detail;
    else if (body) detail = JSON.stringify(body.detail ?? body);
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError({ status: response.status, detail });
}

export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(base = "", fetchFn: FetchLike = (...args) => fetch(...args)) {
    this.base = base.replace(/\/$/, "");
    this.fetchFn = fetchFn;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.base + path, init);
    if (!response.ok) await parseError(response);
    return (await response.json()) as T;
  }

  async getAssignment(): Promise<AssignmentView | NoAssignment> {
    const response = await this.fetchFn(this.base + "/assignment", { method: "GET" });
    if (response.status === 204) {
      return {
        kind: "none",
        reason: response.headers.get("X-No-Candidate-Reason"),
        retryAt: response.headers.get("X-Retry-At"),
      };
    }
    if (!response.ok) await parseError(response);
    return (await response.json()) as AssignmentView;
  }

  getPost(questionId: number): Promise<PostView> {
    return this.request("GET", `/posts/${questionId}`);
  }

  putAnswer(sessionId: string, body: string): Promise<AssignmentView> {
    return this.request("PUT", `/assignment/${sessionId}/answer`, { body });
  }

  regenerateDraft(sessionId: string): Promise<AssignmentView> {
    return this.request("POST", `/assignment/${sessionId}/draft`);
  }

  approve(sessionId: string): Promise<OutboxView> {
    return this.request("POST", `/assignment/${sessionId}/approve`);
  }

  decline(sessionId: string): Promise<AssignmentView> {
    return this.request("POST", `/assignment/${sessionId}/decline`);
  }

  getSettings(): Promise<SettingsView> {
    return this.request("GET", "/settings");
  }

  putSettings(update: Partial<SettingsView>): Promise<SettingsView> {
    return this.request("PUT", "/settings", update);
  }
}

export function isNoAssignment(
  value: AssignmentView | NoAssignment,
): value is NoAssignment {
  return (value as NoAssignment).kind === "none";
}
