/**
 * Ranked-results table, rendered strictly in server order.
 *
 * Rows are never re-sorted client-side; each row carries Detail and
 * Explain actions.  Error responses render as distinct states: field
 * messages for 400/404, a candidate chooser for 422, a banner naming
 * the missing artifact for 409.
 */

import { ApiError, EntityOut, PredictResponse } from "./api.js";
import { clear, el } from "./dom.js";

export interface ResultActions {
  onDetail: (drugId: string) => void;
  onExplain: (drugId: string, entity: EntityOut) => void;
  onPickCandidate: (candidate: EntityOut) => void;
}

export class ResultsView {
  readonly root: HTMLElement;

  constructor(private actions: ResultActions) {
    this.root = el("div", { class: "results", "data-testid": "results" });
  }

  clear(): void {
    clear(this.root);
  }

  renderResponse(body: PredictResponse): void {
    this.clear();
    this.root.append(el("h3", {}, [
      `${body.results.length} candidates for ${body.entity.id} / ${body.entity.name}`,
    ]));
    const table = el("table", { class: "ranked", "data-testid": "ranked-table" });
    const head = el("tr", {}, []);
    for (const column of ["#", "id", "name", "score", ""]) {
      head.append(el("th", {}, [column]));
    }
    table.append(head);
    for (const row of body.results) {
      const tr = el("tr", { "data-testid": "result-row", "data-drug-id": row.id });
      tr.append(el("td", {}, [String(row.rank)]));
      tr.append(el("td", {}, [row.id]));
      tr.append(el("td", {}, [row.name]));
      tr.append(el("td", {}, [row.score.toFixed(4)]));
      const detail = el("button", { class: "detail", "data-testid": "detail-button" },
        ["Detail"]);
      detail.addEventListener("click", () => this.actions.onDetail(row.id));
      const explain = el("button", { class: "explain", "data-testid": "explain-button" },
        ["Explain"]);
      explain.addEventListener("click", () => this.actions.onExplain(row.id, body.entity));
      const cell = el("td", {});
      cell.append(detail, explain);
      tr.append(cell);
      table.append(tr);
    }
    this.root.append(table);
  }

  renderError(error: ApiError): void {
    this.clear();
    if (error.status === 422 && error.body.code === "ambiguous_name") {
      const box = el("div", { class: "error-state ambiguous", "data-testid": "ambiguous" },
        [el("p", {}, ["That name matches several entities - pick one:"])]);
      for (const candidate of error.body.candidates) {
        const pick = el("button", {
          class: "candidate",
          "data-testid": "candidate",
          "data-entity-id": candidate.id,
        }, [`${candidate.id} / ${candidate.name}`]);
        pick.addEventListener("click", () => this.actions.onPickCandidate(candidate));
        box.append(pick);
      }
      this.root.append(box);
      return;
    }
    if (error.status === 409) {
      this.root.append(el("div",
        { class: "error-state banner", "data-testid": "not-trained" },
        [`model not available: ${error.body.message}`]));
      return;
    }
    if (error.status === 404) {
      this.root.append(el("div",
        { class: "error-state field", "data-testid": "unknown-entity" },
        [error.body.message]));
      return;
    }
    this.root.append(el("div",
      { class: "error-state field", "data-testid": "bad-request" },
      [`${error.body.code}: ${error.body.message}`]));
  }
}
