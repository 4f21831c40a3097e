/** Thin client for the segmentation/annotation API. */

import type { CandidateSpan, SegmentResponse } from "./types.js";
import { isSegmentResponse } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message?: string,
  ) {
    super(message ?? `${status}: ${code}`);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function errorOf(response: Response): Promise<ApiError> {
  let code = "error";
  try {
    const body = (await response.json()) as { error?: { code?: string } };
    code = body.error?.code ?? code;
  } catch {
    /* non-JSON error body */
  }
  return new ApiError(response.status, code);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (u, i) => fetch(u, i),
  ) {}

  private async post(path: string, body: unknown): Promise<unknown> {
    const response = await this.fetchFn(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) throw await errorOf(response);
    return response.json();
  }

  async segment(text: string): Promise<SegmentResponse> {
    const body = await this.post("/api/segment", { text });
    if (!isSegmentResponse(body)) {
      throw new ApiError(200, "schema_mismatch", "unexpected segment payload");
    }
    return body;
  }

  async createAnnotation(
    input: string,
    selections: CandidateSpan[][],
  ): Promise<{ id: string; status: string }> {
    return (await this.post("/api/annotations", { input, selections })) as {
      id: string;
      status: string;
    };
  }

  async putAnnotation(
    id: string,
    input: string,
    selections: CandidateSpan[][],
  ): Promise<{ id: string; status: string }> {
    const response = await this.fetchFn(
      `${this.baseUrl}/api/annotations/${id}`,
      {
        method: "PUT",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ input, selections }),
      },
    );
    if (!response.ok) throw await errorOf(response);
    return (await response.json()) as { id: string; status: string };
  }

  async exportAnnotation(id: string): Promise<string> {
    const response = await this.fetchFn(
      `${this.baseUrl}/api/annotations/${id}/export`,
    );
    if (!response.ok) throw await errorOf(response);
    return response.text();
  }
}
