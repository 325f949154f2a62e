/**
 * The explorer shell: center choice, model options, entity picker, top-N,
 * predict/reset, results, drug detail and explanation views.
 */

import { ApiClient, ApiError, EntityOut, FetchLike, ModelOut, NetworkError } from "./api.js";
import { Autocomplete } from "./autocomplete.js";
import { DetailView } from "./detail.js";
import { clear, el } from "./dom.js";
import { ExplainView } from "./explain.js";
import { ResultsView } from "./results.js";
import {
  Center,
  RequestSequencer,
  UiSession,
  canPredict,
  entityKind,
  modelChoices,
  newSession,
} from "./state.js";

const MAX_HOPS = 3;

export class App {
  readonly session: UiSession = newSession();
  private client: ApiClient;
  private models: ModelOut[] = [];
  private sequencer = new RequestSequencer();

  private centerSelect!: HTMLSelectElement;
  private modelSelect!: HTMLSelectElement;
  private topNInput!: HTMLInputElement;
  private predictButton!: HTMLButtonElement;
  private resetButton!: HTMLButtonElement;
  private statusLine!: HTMLElement;
  private autocomplete!: Autocomplete;
  private results!: ResultsView;
  private detail = new DetailView();
  private explain = new ExplainView();
  private pages!: Record<string, HTMLElement>;

  constructor(private rootElement: HTMLElement, fetchFn: FetchLike) {
    this.client = new ApiClient(fetchFn);
  }

  async start(): Promise<void> {
    this.buildShell();
    const body = await this.client.listModels();
    this.models = body.models;
    this.refreshModelOptions();
    this.refreshControls();
  }

  private buildShell(): void {
    clear(this.rootElement);
    const header = el("header", {}, [el("h1", {}, ["drug repositioning explorer"])]);
    const nav = el("nav", {});
    const aboutLink = el("button", { class: "nav", "data-testid": "nav-about" }, ["About"]);
    aboutLink.addEventListener("click", () => this.show("about"));
    const searchLink = el("button", { class: "nav", "data-testid": "nav-search" }, ["Predict"]);
    searchLink.addEventListener("click", () => this.show("search"));
    nav.append(searchLink, aboutLink);
    header.append(nav);

    this.centerSelect = el("select", { "data-testid": "center-select" });
    for (const center of ["disease-centric", "target-centric"]) {
      this.centerSelect.append(el("option", { value: center }, [center]));
    }
    this.centerSelect.addEventListener("change", () => {
      this.session.center = this.centerSelect.value as Center;
      this.autocomplete.setKind(entityKind(this.session.center));
      this.refreshModelOptions();
      this.refreshControls();
    });

    this.modelSelect = el("select", { "data-testid": "model-select" });
    this.modelSelect.addEventListener("change", () => {
      this.session.model = this.modelSelect.value || null;
      this.refreshControls();
    });

    this.autocomplete = new Autocomplete(this.client, {
      onResolve: (entity) => {
        this.session.resolved = entity;
        this.refreshControls();
      },
    });

    this.topNInput = el("input", {
      type: "number", value: "20", min: "1", max: "100",
      "data-testid": "top-n",
    });
    this.topNInput.addEventListener("input", () => {
      this.session.topN = Number(this.topNInput.value);
      this.refreshControls();
    });

    this.predictButton = el("button", { class: "predict", "data-testid": "predict" },
      ["Predict"]);
    this.predictButton.addEventListener("click", () => void this.submitPredict());
    this.resetButton = el("button", { class: "reset", "data-testid": "reset" }, ["Reset"]);
    this.resetButton.addEventListener("click", () => this.reset());

    this.statusLine = el("div", { class: "status", "data-testid": "status" });
    this.results = new ResultsView({
      onDetail: (drugId) => void this.openDetail(drugId),
      onExplain: (drugId, entity) => void this.openExplanation(drugId, entity),
      onPickCandidate: (candidate) => {
        this.autocomplete.input.value = `${candidate.id} / ${candidate.name}`;
        this.session.resolved = candidate;
        this.refreshControls();
        void this.submitPredict();
      },
    });

    const form = el("div", { class: "controls" }, [
      el("label", {}, ["service center "]), this.centerSelect,
      el("label", {}, [" model "]), this.modelSelect,
      el("label", {}, [" entity "]), this.autocomplete.input,
      el("label", {}, [" top "]), this.topNInput,
      this.predictButton, this.resetButton,
    ]);

    const searchPage = el("section", { class: "page", "data-testid": "page-search" },
      [form, this.autocomplete.dropdown, this.statusLine, this.results.root]);
    const detailPage = el("section", { class: "page hidden", "data-testid": "page-detail" },
      [this.detail.root]);
    const explainPage = el("section", { class: "page hidden", "data-testid": "page-explain" },
      [this.explain.root]);
    const aboutPage = el("section", { class: "page hidden", "data-testid": "page-about" }, [
      el("h2", {}, ["About"]),
      el("p", {}, [
        "Pick a service center, a model and a disease or target, and the ",
        "platform ranks approved drugs by predicted relevance. Knowledge-graph ",
        "models explain a prediction with the paths connecting the drug to your ",
        "query; network models show the most similar drugs across five ",
        "similarity relationships.",
      ]),
    ]);
    this.pages = { search: searchPage, detail: detailPage,
                   explain: explainPage, about: aboutPage };
    this.rootElement.append(header, searchPage, detailPage, explainPage, aboutPage);
  }

  private show(view: UiSession["view"]): void {
    this.session.view = view;
    for (const [name, page] of Object.entries(this.pages)) {
      page.classList.toggle("hidden", name !== view);
    }
  }

  private refreshModelOptions(): void {
    clear(this.modelSelect);
    const choices = modelChoices(this.models, this.session.center);
    for (const model of choices) {
      this.modelSelect.append(el("option", { value: model.kind },
        [`${model.kind} (${model.explanation})`]));
    }
    this.session.model = choices.length ? choices[0].kind : null;
    if (this.session.model) this.modelSelect.value = this.session.model;
  }

  private refreshControls(): void {
    this.predictButton.disabled = !canPredict(this.session);
  }

  private reset(): void {
    this.autocomplete.reset();
    this.topNInput.value = "20";
    this.session.topN = 20;
    this.session.lastResponse = null;
    this.results.clear();
    this.statusLine.textContent = "";
    this.refreshControls();
    this.show("search");
  }

  async submitPredict(): Promise<void> {
    if (!canPredict(this.session)) return;
    const sequence = this.sequencer.next();
    this.statusLine.textContent = "predicting...";
    try {
      const body = await this.client.predict(
        this.session.center, this.session.model!,
        this.session.resolved!.id, this.session.topN);
      if (!this.sequencer.isCurrent(sequence)) return;  // superseded
      this.session.lastResponse = body;
      this.statusLine.textContent = "";
      this.results.renderResponse(body);
    } catch (err) {
      if (!this.sequencer.isCurrent(sequence)) return;
      this.statusLine.textContent = "";
      if (err instanceof ApiError) {
        this.results.renderError(err);
      } else if (err instanceof NetworkError) {
        this.statusLine.textContent = "network problem - try again";
      } else {
        throw err;
      }
    }
  }

  async openDetail(drugId: string): Promise<void> {
    const body = await this.client.drugDetail(drugId);
    this.detail.render(body, () => this.show("search"));
    this.show("detail");
  }

  async openExplanation(drugId: string, entity: EntityOut): Promise<void> {
    const model = this.session.lastResponse?.model ?? this.session.model!;
    const body = await this.client.explain(model, drugId, entity.id, MAX_HOPS);
    this.explain.render(body, MAX_HOPS, () => this.show("search"));
    this.show("explain");
  }
}

export function boot(): void {
  const root = document.getElementById("app");
  if (root) {
    const app = new App(root, (url, init) => fetch(url, init));
    void app.start();
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  boot();
}
