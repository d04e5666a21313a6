/** Typed client for the completion service's JSON API. */

export interface Completion {
  completion: string;
  interpretation: string;
  dtype: string;
  grade: "HIGH" | "MEDIUM" | "LOW";
  score: number;
  source: string;
}

export interface CompleteResponse {
  prefix: string;
  domain: string;
  completions: Completion[];
}

export interface CompletabilityResponse {
  prefix: string;
  completable: boolean;
  dead_at: number | null;
}

/** Injectable fetch so tests can substitute a controllable double. */
export type FetchLike = (url: string) => Promise<{
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}>;

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url) => fetch(url),
  ) {}

  private async get<T>(path: string, params: Record<string, string>): Promise<T> {
    const query = new URLSearchParams(params).toString();
    const res = await this.fetchFn(`${this.baseUrl}${path}?${query}`);
    if (!res.ok) {
      throw new ApiError(res.status, `${path} failed with status ${res.status}`);
    }
    return (await res.json()) as T;
  }

  complete(prefix: string, k = 10): Promise<CompleteResponse> {
    return this.get<CompleteResponse>("/complete", { prefix, k: String(k) });
  }

  completability(prefix: string): Promise<CompletabilityResponse> {
    return this.get<CompletabilityResponse>("/completability", { prefix });
  }
}
