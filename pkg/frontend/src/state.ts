/**
 * The explorer's session state and predict-request sequencing.
 *
 * One predict request may be in flight per session; every submit bumps a
 * sequence number and responses carrying a stale number are discarded,
 * so a slow earlier response can never overwrite a newer one.
 */

import { EntityOut, ModelOut, PredictResponse } from "./api.js";

export type Center = "disease-centric" | "target-centric";

export interface UiSession {
  center: Center;
  model: string | null;
  queryText: string;
  resolved: EntityOut | null;
  topN: number;
  lastResponse: PredictResponse | null;
  view: "search" | "detail" | "explain" | "about";
}

export function newSession(): UiSession {
  return {
    center: "disease-centric",
    model: null,
    queryText: "",
    resolved: null,
    topN: 20,
    lastResponse: null,
    view: "search",
  };
}

export function entityKind(center: Center): "disease" | "target" {
  return center === "disease-centric" ? "disease" : "target";
}

/** Models the picker may show: exactly the server's list for the center. */
export function modelChoices(models: ModelOut[], center: Center): ModelOut[] {
  return models.filter((m) => m.center === center);
}

/** Predict stays disabled until an entity is picked and top_n >= 1. */
export function canPredict(session: UiSession): boolean {
  return session.model !== null && session.resolved !== null && session.topN >= 1;
}

export class RequestSequencer {
  private current = 0;

  next(): number {
    this.current += 1;
    return this.current;
  }

  isCurrent(sequence: number): boolean {
    return sequence === this.current;
  }
}
