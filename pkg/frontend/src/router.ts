// History-based router: URL -> state -> fetch -> render. Responses resolve
// latest-wins (a stale response never overwrites a newer view), and all
// navigation is GET-shaped so back/forward replays cleanly.

import { ApiClient, ApiRequestError } from "./api.js";
import { renderMap } from "./map.js";
import {
  renderEntry,
  renderErrorBanner,
  renderHits,
  renderNotFound,
  renderPrompt,
  renderSearchForm,
  renderShell,
} from "./render.js";
import { initialState, parseHref, stateToUrl, type ViewState } from "./state.js";

export class Router {
  private sequence = 0;
  private state: ViewState = initialState();

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly history: Pick<History, "pushState"> = window.history,
  ) {}

  start(): void {
    window.addEventListener("popstate", () => {
      void this.render(parseHref(window.location.href), false);
    });
    this.root.addEventListener("click", (event) => this.onClick(event));
    this.root.addEventListener("submit", (event) => this.onSubmit(event));
    void this.render(parseHref(window.location.href), false);
  }

  async navigate(state: ViewState): Promise<void> {
    await this.render(state, true);
  }

  private onClick(event: Event): void {
    const target = event.target as HTMLElement | null;
    const link = target?.closest?.("a[data-nav]") as HTMLAnchorElement | null;
    if (link) {
      event.preventDefault();
      void this.navigate(parseHref(link.href));
      return;
    }
    const marker = target?.closest?.("[data-lang]") as HTMLElement | null;
    if (marker?.dataset.lang) {
      void this.navigate({ ...initialState(), lang: marker.dataset.lang });
      return;
    }
    const legend = target?.closest?.("[data-clade]") as HTMLElement | null;
    if (legend !== null && legend !== undefined) {
      void this.navigate({ ...this.state, view: "map", clade: legend.dataset.clade ?? "" });
      return;
    }
    const retry = target?.closest?.("[data-action='retry']");
    if (retry) {
      void this.render(this.state, false);
    }
  }

  private onSubmit(event: Event): void {
    const form = event.target as HTMLFormElement | null;
    if (form?.id !== "search-form") return;
    event.preventDefault();
    const data = new FormData(form);
    void this.navigate({
      ...initialState(),
      query: String(data.get("q") ?? ""),
      field: (String(data.get("field") ?? "form") as ViewState["field"]) || "form",
      lang: String(data.get("lang") ?? ""),
      fold: data.get("fold") !== null,
    });
  }

  private async render(state: ViewState, push: boolean): Promise<void> {
    this.state = state;
    const ticket = ++this.sequence;
    if (push) {
      this.history.pushState(null, "", stateToUrl(state));
    }
    let body: string;
    try {
      body = await this.bodyFor(state);
    } catch (error) {
      if (error instanceof ApiRequestError && error.status === 404 && state.view === "entry") {
        body = renderNotFound(state.entryId);
      } else {
        const message = error instanceof Error ? error.message : String(error);
        body = (state.view === "search" ? renderSearchForm(state) : "") + renderErrorBanner(message);
      }
    }
    if (ticket !== this.sequence) {
      return;                                    // a newer navigation already rendered
    }
    this.root.innerHTML = renderShell(state, body);
  }

  private async bodyFor(state: ViewState): Promise<string> {
    if (state.view === "entry") {
      return renderEntry(await this.api.entry(state.entryId));
    }
    if (state.view === "map") {
      return renderMap(await this.api.geo(), state.clade);
    }
    if (!state.query) {
      return renderSearchForm(state) + renderPrompt();   // no request for an empty query
    }
    const page = await this.api.search(state);
    return renderSearchForm(state) + renderHits(state, page);
  }
}
