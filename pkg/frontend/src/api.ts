// Typed client for the five session endpoints. The UI never interprets
// server state beyond these shapes; all localization logic stays server-side.

export interface LabelJson {
  kind: "data" | "control";
  var?: string;
  value?: number | string | boolean;
}

export interface AtomJson {
  edge_key: string;
  label: LabelJson;
}

export interface CutJson {
  downset: number[];
}

export interface Progress {
  between_count: number;
  step: number;
  bound: number;
}

export interface QueryPayload {
  cut: CutJson;
  atoms: AtomJson[];
  progress: Progress;
  bounds?: { clean: number[]; anomalous: number[] };
}

export interface ResultJson {
  kind: "missing_operation" | "faulty_vertices" | "missing_critical_sections";
  at?: CutJson;
  vertices?: number[];
  evidence?: string[];
  atoms?: AtomJson[];
}

export interface SessionSummary {
  id: string;
  status: "awaiting_verdict" | "finished";
  pending?: CutJson;
  result?: ResultJson;
  created?: string;
}

export interface AnswerBody {
  per_edge: Record<string, string>;
  global: "ok" | "violated";
}

export interface AnswerResponse {
  status: "awaiting_verdict" | "finished";
  next?: CutJson;
  result?: ResultJson;
}

export interface GraphVertex {
  id: number;
  desc: string;
  level: number;
}

export interface GraphEdge {
  src: number;
  dst: number;
  kind: "data" | "control";
  var?: string;
  value?: unknown;
  key: string;
}

export interface GraphJson {
  root: number;
  deterministic: boolean;
  vertices: GraphVertex[];
  edges: GraphEdge[];
}

export interface ResultPayload {
  result: ResultJson;
  transcript: TranscriptEntry[];
}

export interface TranscriptEntry {
  step: number;
  cut: CutJson;
  verdict: {
    per_edge: Record<string, string>;
    global: "ok" | { violated: string[] };
  };
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(`HTTP ${status}: ${typeof detail === "string" ? detail : JSON.stringify(detail)}`);
    this.name = "ApiError";
  }
}

export class SessionApi {
  constructor(private readonly base: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.base + path, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    let body: unknown = null;
    const text = await response.text();
    if (text) {
      try {
        body = JSON.parse(text);
      } catch {
        body = text;
      }
    }
    if (!response.ok) {
      const detail =
        body && typeof body === "object" && "detail" in body
          ? (body as { detail: unknown }).detail
          : body;
      throw new ApiError(response.status, detail);
    }
    return body as T;
  }

  createSession(body: {
    graph: string;
    anomaly: string;
    predicates?: string;
  }): Promise<SessionSummary> {
    return this.request("/sessions", { method: "POST", body: JSON.stringify(body) });
  }

  listSessions(): Promise<SessionSummary[]> {
    return this.request("/sessions");
  }

  getQuery(id: string): Promise<QueryPayload> {
    return this.request(`/sessions/${id}/query`);
  }

  postAnswer(id: string, body: AnswerBody): Promise<AnswerResponse> {
    return this.request(`/sessions/${id}/answer`, {
      method: "POST",
      body: JSON.stringify(body),
    });
  }

  getResult(id: string): Promise<ResultPayload> {
    return this.request(`/sessions/${id}/result`);
  }

  getGraph(id: string): Promise<GraphJson> {
    return this.request(`/sessions/${id}/graph`);
  }
}
