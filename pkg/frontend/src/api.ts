/**
 * Typed client over the five documented service endpoints.
 *
 * Every request goes through one `request()` helper so tests can record
 * the traffic and assert no undocumented endpoint is ever touched.
 */

export interface EntityOut {
  id: string;
  name: string;
  kind: string;
}

export interface ModelOut {
  kind: string;
  center: string;
  trained: boolean;
  version: string | null;
  explanation: "paths" | "similarity";
}

export interface EntityListResponse {
  items: EntityOut[];
  total: number;
  page: number;
  page_size: number;
}

export interface RankedDrugOut {
  rank: number;
  id: string;
  name: string;
  score: number;
  detail_url: string;
}

export interface PredictResponse {
  entity: EntityOut;
  model: string;
  version: string;
  explanation: "paths" | "similarity";
  results: RankedDrugOut[];
}

export interface SimilarDrugOut {
  id: string;
  name: string;
  weight: number;
}

export interface DrugDetailResponse {
  id: string;
  name: string;
  atc_codes: string[];
  background: string;
  indication: string;
  structure: string;
  similar: Record<string, SimilarDrugOut[]>;
}

export interface ExplainResponse {
  shape: "paths" | "similarity";
  drug: string;
  entity: string;
  nodes: EntityOut[];
  edges: { head: string; relation: string; tail: string }[];
  paths: number[][];
  path_directions: boolean[][];
  similar: Record<string, SimilarDrugOut[]>;
}

export interface ErrorBody {
  code: string;
  message: string;
  candidates: EntityOut[];
}

export class ApiError extends Error {
  constructor(public status: number, public body: ErrorBody) {
    super(body.message);
  }
}

export class NetworkError extends Error {}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(private fetchFn: FetchLike, private base = "") {}

  private async request<T>(url: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.base + url, init);
    } catch (err) {
      throw new NetworkError(String(err));
    }
    const text = await response.text();
    const body = text ? JSON.parse(text) : {};
    if (!response.ok) {
      throw new ApiError(response.status, body as ErrorBody);
    }
    return body as T;
  }

  listModels(): Promise<{ models: ModelOut[] }> {
    return this.request("/api/models");
  }

  listEntities(kind: string, prefix: string, page = 0, pageSize = 12):
      Promise<EntityListResponse> {
    const params = new URLSearchParams({
      kind, prefix, page: String(page), page_size: String(pageSize),
    });
    return this.request(`/api/entities?${params}`);
  }

  predict(center: string, model: string, query: string, topN: number):
      Promise<PredictResponse> {
    return this.request("/api/predict", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ center, model, query, top_n: topN }),
    });
  }

  drugDetail(drugId: string): Promise<DrugDetailResponse> {
    return this.request(`/api/drugs/${encodeURIComponent(drugId)}`);
  }

  explain(model: string, drug: string, entity: string, maxHops = 3):
      Promise<ExplainResponse> {
    const params = new URLSearchParams({
      model, drug, entity, max_hops: String(maxHops),
    });
    return this.request(`/api/explain?${params}`);
  }
}
