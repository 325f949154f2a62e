/**
 * The same explorer flow against a live fixture service.
 *
 * Skipped unless RE_LIVE_BASE points at a running server, e.g.
 *   repositioner serve --manifest data/manifest.ini --artifacts arts --port 8000 &
 *   RE_LIVE_BASE=http://127.0.0.1:8000 npx vitest run test/live.test.ts
 */

import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";

const BASE = process.env.RE_LIVE_BASE ?? "";

describe.skipIf(!BASE)("live service flow", () => {
  const client = new ApiClient((url, init) => fetch(url, init), BASE);

  it("autocomplete -> predict -> detail -> explanation", async () => {
    const models = (await client.listModels()).models;
    const diseaseModels = models.filter(
      (m) => m.center === "disease-centric" && m.trained);
    expect(diseaseModels.length).toBeGreaterThan(0);
    const model = diseaseModels.find((m) => m.explanation === "paths")
      ?? diseaseModels[0];

    const sugg = await client.listEntities("disease", "Defic");
    expect(sugg.items.length).toBeGreaterThan(0);
    const entity = sugg.items[0];

    const prediction = await client.predict("disease-centric", model.kind,
                                            entity.id, 10);
    expect(prediction.entity.id).toBe(entity.id);
    expect(prediction.results.length).toBeGreaterThan(0);
    const scores = prediction.results.map((r) => r.score);
    expect([...scores].sort((a, b) => b - a)).toEqual(scores);

    const top = prediction.results[0];
    const detail = await client.drugDetail(top.id);
    expect(detail.id).toBe(top.id);
    expect(Object.keys(detail.similar).length).toBe(5);

    const explanation = await client.explain(model.kind, top.id, entity.id, 3);
    expect(["paths", "similarity"]).toContain(explanation.shape);
    if (explanation.shape === "paths") {
      const nodeIds = new Set(explanation.nodes.map((n) => n.id));
      for (const edge of explanation.edges) {
        expect(nodeIds.has(edge.head) && nodeIds.has(edge.tail)).toBe(true);
      }
    }
  });
});
