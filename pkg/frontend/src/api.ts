// Typed client for the recommendation service. Paths are relative so the
// bundle works when the service hosts it on the same origin.

export interface Hit {
  doc_id: string;
  title: string;
  score: number;
  link: string;
}

export interface ContextResponse {
  recommendations: Hit[];
  predictions: string[][];
  fallback: boolean;
}

export interface DocumentRecord {
  id: string;
  title: string;
  text: string;
  topics: string[];
}

export interface SessionParams {
  window?: number;
  n_exp?: number;
  top_k?: number;
  b?: number;
  k?: number;
  d?: number;
  mu?: number;
  c?: number;
  tau?: number;
}

export class ServiceError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string
  ) {
    super(message);
    this.name = "ServiceError";
  }
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(base + path, init);
  let body: unknown = null;
  try {
    body = await response.json();
  } catch {
    // non-JSON bodies fall through to the status check below
  }
  if (!response.ok) {
    const err = (body ?? {}) as { code?: string; message?: string };
    throw new ServiceError(
      response.status,
      err.code ?? `http_${response.status}`,
      err.message ?? `request failed with status ${response.status}`
    );
  }
  return body as T;
}

function post(payload: unknown): RequestInit {
  return {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(payload),
  };
}

export class ApiClient {
  constructor(private base: string = "") {}

  async createSession(expander: string, params: SessionParams = {}): Promise<string> {
    const body = await request<{ id: string }>(this.base, "/sessions",
      post({ expander, params }));
    return body.id;
  }

  updateContext(id: string, word: string, completed: boolean): Promise<ContextResponse> {
    return request<ContextResponse>(this.base, `/sessions/${id}/context`,
      post({ word, completed }));
  }

  getDocument(docId: string): Promise<DocumentRecord> {
    return request<DocumentRecord>(this.base, `/documents/${encodeURIComponent(docId)}`);
  }

  async deleteSession(id: string): Promise<void> {
    await request<{ ok: boolean }>(this.base, `/sessions/${id}`, { method: "DELETE" });
  }
}
