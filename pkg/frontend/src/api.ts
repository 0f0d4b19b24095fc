/** Typed client for the advisor service. All math stays on the server:
 * probabilities travel as canonical rational strings and the console only
 * ever formats them. */

export type TreeNode = string | { l: TreeNode; r: TreeNode };

export interface SessionState {
  id: string;
  round: number;
  finished: boolean;
  winner: string | null;
  favorite: string;
  coalition: string[];
  tree: TreeNode;
  pairings: [string, string][];
  eliminated: string[];
  t_opt: string;
}

export interface BestResponsePayload {
  profile: Record<string, "PLAY" | "THROW">;
  value: string;
}

export interface ValidationReport {
  detail: string;
  report?: { code: string; detail: string }[];
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public payload: ValidationReport,
  ) {
    super(payload.detail ?? `request failed with ${status}`);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class AdvisorClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      let payload: ValidationReport;
      try {
        payload = (await response.json()) as ValidationReport;
      } catch {
        payload = { detail: `request failed with ${response.status}` };
      }
      throw new ApiError(response.status, payload);
    }
    if (response.status === 204) {
      return undefined as T;
    }
    return (await response.json()) as T;
  }

  async createSession(instanceDocument: string): Promise<string> {
    const { id } = await this.request<{ id: string }>("/api/instances", {
      method: "POST",
      body: instanceDocument,
      headers: { "content-type": "application/json" },
    });
    return id;
  }

  getState(id: string): Promise<SessionState> {
    return this.request<SessionState>(`/api/instances/${id}`);
  }

  getBestResponse(id: string): Promise<BestResponsePayload> {
    return this.request<BestResponsePayload>(`/api/instances/${id}/best-response`);
  }

  postOutcomes(id: string, winners: string[]): Promise<SessionState> {
    return this.request<SessionState>(`/api/instances/${id}/outcomes`, {
      method: "POST",
      body: JSON.stringify({ winners }),
      headers: { "content-type": "application/json" },
    });
  }

  deleteSession(id: string): Promise<void> {
    return this.request<void>(`/api/instances/${id}`, { method: "DELETE" });
  }
}
