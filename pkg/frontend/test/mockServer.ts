/**
 * Test double built from traffic recorded against the real fixture
 * service (scripts/record_traffic.py).  Entity listing re-implements the
 * documented prefix/pagination semantics over the recorded entity table;
 * everything else replays recorded bodies keyed by request.  Every call
 * is logged so tests can assert only documented endpoints are touched.
 */

import fixtures from "./fixtures.json";
import type { FetchLike } from "../src/api.js";

interface Recorded {
  tag: string;
  method: string;
  url: string;
  payload: Record<string, unknown> | null;
  status: number;
  body: unknown;
}

interface EntityRow {
  id: string;
  name: string;
  kind: string;
}

const RESPONSES = fixtures.responses as Recorded[];
const ENTITIES = fixtures.entities as Record<string, EntityRow[]>;

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export class MockServer {
  traffic: { method: string; url: string }[] = [];
  failNextEntities = false;
  /** when set, predict responses wait on the provided gate */
  predictGate: Map<string, Promise<void>> = new Map();

  readonly fetch: FetchLike = async (url, init) => {
    const method = (init?.method ?? "GET").toUpperCase();
    this.traffic.push({ method, url });
    const parsed = new URL(url, "http://testhost");
    const path = parsed.pathname;

    if (path === "/api/entities") {
      if (this.failNextEntities) {
        this.failNextEntities = false;
        throw new TypeError("connection refused");
      }
      return this.entities(parsed);
    }
    if (path === "/api/predict" && method === "POST") {
      const payload = JSON.parse(String(init?.body ?? "{}"));
      const gate = this.predictGate.get(payload.query);
      if (gate) await gate;
      const match = RESPONSES.find(
        (r) => r.method === "POST" && r.url === "/api/predict"
          && JSON.stringify(r.payload) === JSON.stringify(payload));
      if (match) return jsonResponse(match.status, match.body);
      return jsonResponse(404, { code: "unknown_entity",
                                 message: `unrecorded predict ${payload.query}`,
                                 candidates: [] });
    }
    const recorded = RESPONSES.find((r) => {
      if (r.method !== method) return false;
      const want = new URL(r.url, "http://testhost");
      if (want.pathname !== path) return false;
      for (const [key, value] of want.searchParams) {
        if (parsed.searchParams.get(key) !== value) return false;
      }
      return true;
    });
    if (recorded) return jsonResponse(recorded.status, recorded.body);
    return jsonResponse(404, { code: "unrecorded",
                               message: `no recorded response for ${method} ${url}`,
                               candidates: [] });
  };

  private entities(parsed: URL): Response {
    const kind = parsed.searchParams.get("kind") ?? "";
    if (kind !== "disease" && kind !== "target") {
      return jsonResponse(400, { code: "bad_kind", message: `bad kind ${kind}`,
                                 candidates: [] });
    }
    const prefix = (parsed.searchParams.get("prefix") ?? "").toLowerCase();
    const page = Number(parsed.searchParams.get("page") ?? "0");
    const pageSize = Number(parsed.searchParams.get("page_size") ?? "50");
    const matches = ENTITIES[kind]
      .filter((e) => !prefix || e.id.toLowerCase().startsWith(prefix)
        || e.name.toLowerCase().startsWith(prefix))
      .sort((a, b) => (a.id < b.id ? -1 : a.id > b.id ? 1 : 0));
    const window = matches.slice(page * pageSize, (page + 1) * pageSize);
    return jsonResponse(200, { items: window, total: matches.length,
                               page, page_size: pageSize });
  }

  recordedBody(tag: string): unknown {
    const match = RESPONSES.find((r) => r.tag === tag);
    if (!match) throw new Error(`no recorded response tagged ${tag}`);
    return match.body;
  }
}

export const DOCUMENTED = /^\/api\/(models$|entities$|predict$|drugs\/|explain$)/;
