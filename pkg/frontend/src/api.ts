/** Thin fetch client for the reconstruction service JSON API. Request bodies
 * are passed through as pre-serialized strings so that retries and history
 * replays are byte-identical. */

import type { ReconstructResponse } from "./state.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly statusText: string,
    detail: string
  ) {
    super(`${status} ${statusText}: ${detail}`);
  }
}

async function post<T>(base: string, path: string, body: string): Promise<T> {
  const response = await fetch(base + path, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body,
  });
  if (!response.ok) {
    let detail = "";
    try {
      const payload = await response.json();
      detail = typeof payload?.error === "string" ? payload.error : JSON.stringify(payload);
    } catch {
      detail = await response.text().catch(() => "");
    }
    throw new ApiError(response.status, response.statusText, detail);
  }
  return (await response.json()) as T;
}

export function postReconstruct(base: string, body: string): Promise<ReconstructResponse> {
  return post<ReconstructResponse>(base, "/api/reconstruct", body);
}

export function postSample(
  base: string,
  k: number,
  iterations: number,
  seed: number
): Promise<{ theta: number[] }> {
  return post<{ theta: number[] }>(base, "/api/sample", JSON.stringify({ k, iterations, seed }));
}

export async function health(base: string): Promise<boolean> {
  try {
    const response = await fetch(base + "/healthz");
    return response.ok;
  } catch {
    return false;
  }
}
