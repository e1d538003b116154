// Typed client for the wisardlab service. The studio never computes
// scores itself: every number it displays comes out of these responses.

export interface ModelSummary {
  id: string;
  name: string;
  width: number;
  height: number;
  tuple_size: number;
  labels: Record<string, number>;
}

export interface ModelDetail extends ModelSummary {
  seed: number;
  threshold: number;
  created_at: string;
  num_tuples: number;
}

export interface TraceStep {
  bleach: number;
  scores: Record<string, number>;
}

export interface Outcome {
  decision: string;
  unknown: boolean;
  final_bleach: number;
  scores: Record<string, number>;
  tie_broken: boolean;
  trace: TraceStep[];
}

export interface MentalImageDoc {
  label: string;
  width: number;
  height: number;
  counts: number[];
  max_count: number;
  pgm_base64: string;
}

export interface NeuronDump {
  label: string;
  examples_trained: number;
  tuples: number[][];
  neurons: Record<string, number>[];
}

export interface CreateModelRequest {
  name: string;
  width?: number;
  height?: number;
  tuple_size?: number;
  seed?: number;
  threshold?: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function fail(response: Response): Promise<never> {
  let code = "http_error";
  let message = `${response.status} ${response.statusText}`;
  try {
    const body = await response.json();
    if (body && typeof body.code === "string") code = body.code;
    if (body && typeof body.message === "string") message = body.message;
  } catch {
    // non-JSON error body; keep the status line
  }
  throw new ApiError(response.status, code, message);
}

export class StudioApi {
  constructor(readonly baseUrl: string) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    if (!response.ok) await fail(response);
    if (response.status === 204) return undefined as T;
    return (await response.json()) as T;
  }

  listModels(): Promise<ModelSummary[]> {
    return this.request("/models");
  }

  createModel(body: CreateModelRequest): Promise<ModelDetail> {
    return this.request("/models", { method: "POST", body: JSON.stringify(body) });
  }

  getModel(id: string): Promise<ModelDetail> {
    return this.request(`/models/${id}`);
  }

  deleteModel(id: string): Promise<void> {
    return this.request(`/models/${id}`, { method: "DELETE" });
  }

  train(id: string, label: string, bits: number[], width: number, height: number): Promise<Record<string, number>> {
    return this.request(`/models/${id}/train`, {
      method: "POST",
      body: JSON.stringify({ label, image: { bits, width, height } }),
    });
  }

  classify(id: string, bits: number[], width: number, height: number): Promise<Outcome> {
    return this.request(`/models/${id}/classify`, {
      method: "POST",
      body: JSON.stringify({ image: { bits, width, height } }),
    });
  }

  labels(id: string): Promise<Record<string, number>> {
    return this.request(`/models/${id}/labels`);
  }

  mentalImage(id: string, label: string): Promise<MentalImageDoc> {
    return this.request(`/models/${id}/mental-image/${encodeURIComponent(label)}`);
  }

  neurons(id: string, label: string): Promise<NeuronDump> {
    return this.request(`/models/${id}/neurons/${encodeURIComponent(label)}`);
  }

  saveModel(id: string): Promise<{ file: string }> {
    return this.request(`/models/${id}/save`, { method: "POST" });
  }
}
