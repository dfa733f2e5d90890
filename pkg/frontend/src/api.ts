/**
 * Typed client for the rating service.
 *
 * Status codes are part of the server contract: 404 unknown assessor or
 * unassigned item, 400 invalid enum value, 409 duplicate rating. Anything
 * the server rejected surfaces as ApiError with that status; a request
 * that never reached the server surfaces as NetworkError so the caller
 * can offer a retry without losing the draft.
 */

import type {
  Progress,
  RatingPayload,
  Stats,
  SubmitResult,
  TaskQueue,
} from "./types.js";

export class ApiError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
    this.name = "ApiError";
  }
}

export class NetworkError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "NetworkError";
  }
}

// The slice of the API a rating session needs; fakes in tests implement
// just this.
export interface TaskBackend {
  fetchTasks(assessor: string): Promise<TaskQueue>;
  submitRating(payload: RatingPayload): Promise<SubmitResult>;
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(base + path, init);
  } catch (err) {
    throw new NetworkError(`cannot reach ${path}: ${err}`);
  }
  const body = await response.json().catch(() => ({}));
  if (!response.ok) {
    const message = (body as { error?: string }).error ?? `request failed with status ${response.status}`;
    throw new ApiError(message, response.status);
  }
  return body as T;
}

export class Api implements TaskBackend {
  constructor(readonly base: string = "") {}

  fetchTasks(assessor: string): Promise<TaskQueue> {
    return request(this.base, `/api/tasks/${encodeURIComponent(assessor)}`);
  }

  submitRating(payload: RatingPayload): Promise<SubmitResult> {
    return request(this.base, "/api/ratings", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  fetchStats(): Promise<Stats> {
    return request(this.base, "/api/stats");
  }

  fetchProgress(): Promise<Progress> {
    return request(this.base, "/api/progress");
  }
}
