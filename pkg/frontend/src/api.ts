/** Thin fetch wrapper over the service's JSON endpoints.
 *
 * The UI computes nothing about claims itself — every number and every
 * ordering on screen comes from these responses.
 */

import type {
  ClaimDetail,
  QueueEntry,
  ReviewDecisionBody,
  ReviewResponse,
  StatsReport,
} from "./types.js";

export class ServiceError extends Error {
  code: string;
  field?: string;
  status: number;

  constructor(status: number, code: string, message: string, field?: string) {
    super(message);
    this.status = status;
    this.code = code;
    this.field = field;
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(url, init);
  } catch (err) {
    throw new ServiceError(0, "unreachable", `service unreachable: ${String(err)}`);
  }
  let body: unknown = null;
  try {
    body = await response.json();
  } catch {
    // non-JSON body; fall through to the status check
  }
  if (!response.ok) {
    const error = (body ?? {}) as { code?: string; message?: string; field?: string };
    throw new ServiceError(
      response.status,
      error.code ?? "error",
      error.message ?? `request failed with ${response.status}`,
      error.field,
    );
  }
  return body as T;
}

export class ApiClient {
  constructor(private base: string = "") {}

  getQueue(limit?: number): Promise<{ entries: QueueEntry[] }> {
    const query = limit === undefined ? "" : `?limit=${limit}`;
    return request(`${this.base}/review/queue${query}`);
  }

  getClaim(id: string): Promise<ClaimDetail> {
    return request(`${this.base}/claims/${id}`);
  }

  getStats(): Promise<StatsReport> {
    return request(`${this.base}/stats`);
  }

  submitReview(claimId: string, body: ReviewDecisionBody): Promise<ReviewResponse> {
    return request(`${this.base}/claims/${claimId}/review`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }
}
