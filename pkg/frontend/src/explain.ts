/**
 * Prediction explanations.
 *
 * Path-style responses render as an interactive SVG graph (deterministic
 * force layout, query entity and drug pinned at opposite sides); clicking
 * a node shows its kind and name, clicking an edge shows the relation
 * type.  Similarity-style responses render as five tabbed top-20 lists.
 * An empty subgraph shows a "no connecting paths" notice.
 */

import { ExplainResponse } from "./api.js";
import { clear, el, svgEl } from "./dom.js";
import { forceLayout } from "./layout.js";

const WIDTH = 640;
const HEIGHT = 400;

export class ExplainView {
  readonly root: HTMLElement;

  constructor() {
    this.root = el("div", { class: "explain-view", "data-testid": "explanation" });
  }

  render(body: ExplainResponse, maxHops: number, onBack: () => void): void {
    clear(this.root);
    const back = el("button", { class: "back", "data-testid": "back" }, ["< results"]);
    back.addEventListener("click", onBack);
    this.root.append(back);
    if (body.shape === "similarity") {
      this.renderSimilarity(body);
    } else if (body.paths.length === 0) {
      this.root.append(el("div", { class: "notice", "data-testid": "no-paths" },
        [`no connecting paths within ${maxHops} hops`]));
    } else {
      this.renderGraph(body);
    }
  }

  private renderGraph(body: ExplainResponse): void {
    this.root.append(el("h3", {},
      [`${body.paths.length} paths between ${body.drug} and ${body.entity}`]));
    const nodes = body.nodes.map((n) => ({
      id: n.id,
      pinned: n.id === body.drug ? { x: 60, y: HEIGHT / 2 }
        : n.id === body.entity ? { x: WIDTH - 60, y: HEIGHT / 2 } : undefined,
    }));
    const links = body.edges.map((e) => ({ source: e.head, target: e.tail }));
    const positions = forceLayout(nodes, links, WIDTH, HEIGHT, 42);

    const panel = el("div", { class: "info-panel", "data-testid": "info-panel" },
      ["click a node or edge"]);
    const svg = svgEl("svg", {
      viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
      width: String(WIDTH),
      height: String(HEIGHT),
      "data-testid": "path-graph",
    });

    body.edges.forEach((edge, i) => {
      const a = positions.get(edge.head)!;
      const b = positions.get(edge.tail)!;
      const line = svgEl("line", {
        x1: String(a.x), y1: String(a.y), x2: String(b.x), y2: String(b.y),
        class: "edge", "data-testid": "graph-edge", "data-relation": edge.relation,
        "data-edge-index": String(i),
      });
      line.addEventListener("click", () => {
        panel.textContent = `relation: ${edge.relation} (${edge.head} -> ${edge.tail})`;
      });
      svg.append(line);
    });
    for (const node of body.nodes) {
      const p = positions.get(node.id)!;
      const dot = svgEl("circle", {
        cx: String(p.x), cy: String(p.y), r: "14",
        class: `node kind-${node.kind}`, "data-testid": "graph-node",
        "data-node-id": node.id,
      });
      dot.addEventListener("click", () => {
        panel.textContent = `${node.kind}: ${node.name} (${node.id})`;
      });
      svg.append(dot);
      const label = svgEl("text", {
        x: String(p.x), y: String(p.y - 18), "text-anchor": "middle", class: "node-label",
      });
      label.textContent = node.id;
      svg.append(label);
    }
    this.root.append(svg, panel);
  }

  private renderSimilarity(body: ExplainResponse): void {
    this.root.append(el("h3", {}, [`drugs most similar to ${body.drug}`]));
    const layers = Object.keys(body.similar);
    const tabs = el("div", { class: "tabs", "data-testid": "similarity-tabs" });
    const pane = el("div", { class: "tab-pane", "data-testid": "similarity-pane" });

    const show = (layer: string) => {
      clear(pane);
      for (const button of Array.from(tabs.children)) {
        button.classList.toggle("active",
          (button as HTMLElement).dataset.layer === layer);
      }
      const entries = body.similar[layer];
      if (entries.length === 0) {
        pane.append(el("p", { class: "notice" }, ["no neighbours in this layer"]));
        return;
      }
      const list = el("ol", {});
      for (const entry of entries) {
        list.append(el("li", {}, [`${entry.id} / ${entry.name} (${entry.weight.toFixed(3)})`]));
      }
      pane.append(list);
    };

    for (const layer of layers) {
      const tab = el("button", { class: "tab", "data-testid": "similarity-tab",
                                 "data-layer": layer }, [layer]);
      tab.addEventListener("click", () => show(layer));
      tabs.append(tab);
    }
    this.root.append(tabs, pane);
    if (layers.length) show(layers[0]);
  }
}
