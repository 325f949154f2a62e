/**
 * Debounced entity autocomplete bound to the entity-list endpoint.
 *
 * Suggestions render as "id / name"; choosing one resolves the session
 * entity.  Empty input issues no request; zero matches show a notice;
 * a network failure shows an inline retry notice and keeps the typed
 * state intact.
 */

import { ApiClient, EntityOut, NetworkError } from "./api.js";
import { clear, el } from "./dom.js";

export interface AutocompleteOptions {
  debounceMs?: number;
  onResolve: (entity: EntityOut | null) => void;
}

export class Autocomplete {
  readonly input: HTMLInputElement;
  readonly dropdown: HTMLElement;
  private kind = "disease";
  private timer: ReturnType<typeof setTimeout> | null = null;
  private generation = 0;

  constructor(private client: ApiClient, private options: AutocompleteOptions) {
    this.input = el("input", {
      class: "entity-input",
      placeholder: "disease or target id \\ name",
      "data-testid": "entity-input",
    });
    this.dropdown = el("div", { class: "suggestions", "data-testid": "suggestions" });
    this.input.addEventListener("input", () => this.onType());
  }

  setKind(kind: string): void {
    this.kind = kind;
    this.reset();
  }

  reset(): void {
    this.input.value = "";
    clear(this.dropdown);
    this.options.onResolve(null);
  }

  private onType(): void {
    this.options.onResolve(null);
    if (this.timer) clearTimeout(this.timer);
    const text = this.input.value.trim();
    if (!text) {
      clear(this.dropdown);
      return;
    }
    this.timer = setTimeout(() => void this.lookup(text), this.options.debounceMs ?? 150);
  }

  private async lookup(prefix: string): Promise<void> {
    const generation = ++this.generation;
    let body;
    try {
      body = await this.client.listEntities(this.kind, prefix);
    } catch (err) {
      if (generation !== this.generation) return;
      clear(this.dropdown);
      const notice = el("div", { class: "notice error", "data-testid": "network-notice" },
        ["network problem - "]);
      const retry = el("button", { class: "retry", "data-testid": "retry" }, ["retry"]);
      retry.addEventListener("click", () => void this.lookup(prefix));
      notice.append(retry);
      this.dropdown.append(notice);
      if (!(err instanceof NetworkError)) throw err;
      return;
    }
    if (generation !== this.generation) return;
    clear(this.dropdown);
    if (body.items.length === 0) {
      this.dropdown.append(
        el("div", { class: "notice", "data-testid": "no-matches" },
          ["no predictable entities"]));
      return;
    }
    for (const item of body.items) {
      const row = el("div", {
        class: "suggestion",
        "data-testid": "suggestion",
        "data-entity-id": item.id,
      }, [`${item.id} / ${item.name}`]);
      row.addEventListener("click", () => {
        this.input.value = `${item.id} / ${item.name}`;
        clear(this.dropdown);
        this.options.onResolve(item);
      });
      this.dropdown.append(row);
    }
  }
}
