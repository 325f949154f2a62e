/** Drug detail page: full record plus five similar-drug lists. */

import { DrugDetailResponse } from "./api.js";
import { clear, el } from "./dom.js";

export class DetailView {
  readonly root: HTMLElement;

  constructor() {
    this.root = el("div", { class: "detail-view", "data-testid": "drug-detail" });
  }

  render(body: DrugDetailResponse, onBack: () => void): void {
    clear(this.root);
    const back = el("button", { class: "back", "data-testid": "back" }, ["< results"]);
    back.addEventListener("click", onBack);
    this.root.append(back);
    this.root.append(el("h2", {}, [`${body.id} / ${body.name}`]));
    const facts = el("dl", { class: "facts" });
    const rows: [string, string][] = [
      ["ATC codes", body.atc_codes.join(", ") || "-"],
      ["Background", body.background],
      ["Indication", body.indication],
      ["Structure", body.structure],
    ];
    for (const [label, value] of rows) {
      facts.append(el("dt", {}, [label]));
      facts.append(el("dd", { "data-testid": `fact-${label.toLowerCase().replace(/ /g, "-")}` },
        [value]));
    }
    this.root.append(facts);
    this.root.append(el("h3", {}, ["most similar drugs"]));
    for (const [layer, entries] of Object.entries(body.similar)) {
      const section = el("div", { class: "similar-layer", "data-testid": "similar-layer",
                                  "data-layer": layer });
      section.append(el("h4", {}, [layer]));
      if (entries.length === 0) {
        section.append(el("p", { class: "notice" }, ["no neighbours in this layer"]));
      } else {
        const list = el("ol", {});
        for (const entry of entries) {
          list.append(el("li", {}, [`${entry.id} / ${entry.name} (${entry.weight.toFixed(3)})`]));
        }
        section.append(list);
      }
      this.root.append(section);
    }
  }
}
