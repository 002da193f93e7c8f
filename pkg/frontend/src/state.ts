// View state and its URL encoding. Every view is deep-linkable: state
// serializes into the location, and parsing the location reconstructs an
// identical state, so back/forward navigation just replays parse+render.

export type SearchField = "form" | "gloss" | "headword";

export interface ViewState {
  view: "search" | "entry" | "map";
  query: string;
  field: SearchField;
  lang: string;
  fold: boolean;
  page: number;          // 0-based search page
  entryId: string;       // set when view === "entry"
  clade: string;         // map family/clade filter
}

export const PAGE_SIZE = 50;

export function initialState(): ViewState {
  return {
    view: "search",
    query: "",
    field: "form",
    lang: "",
    fold: false,
    page: 0,
    entryId: "",
    clade: "",
  };
}

const FIELDS: readonly SearchField[] = ["form", "gloss", "headword"];

export function stateToUrl(state: ViewState): string {
  if (state.view === "entry") {
    return `/entries/${encodeURIComponent(state.entryId)}`;
  }
  const params = new URLSearchParams();
  if (state.view === "map") {
    if (state.clade) params.set("clade", state.clade);
    const tail = params.toString();
    return tail ? `/map?${tail}` : "/map";
  }
  if (state.query) params.set("q", state.query);
  if (state.field !== "form") params.set("field", state.field);
  if (state.lang) params.set("lang", state.lang);
  if (state.fold) params.set("fold", "1");
  if (state.page > 0) params.set("page", String(state.page));
  const tail = params.toString();
  return tail ? `/?${tail}` : "/";
}

export function urlToState(pathname: string, search: string): ViewState {
  const state = initialState();
  const params = new URLSearchParams(search);
  if (pathname.startsWith("/entries/")) {
    state.view = "entry";
    state.entryId = decodeURIComponent(pathname.slice("/entries/".length));
    return state;
  }
  if (pathname === "/map") {
    state.view = "map";
    state.clade = params.get("clade") ?? "";
    return state;
  }
  state.query = params.get("q") ?? "";
  const field = params.get("field") ?? "form";
  state.field = (FIELDS as readonly string[]).includes(field) ? (field as SearchField) : "form";
  state.lang = params.get("lang") ?? "";
  state.fold = params.get("fold") === "1";
  const page = Number.parseInt(params.get("page") ?? "0", 10);
  state.page = Number.isFinite(page) && page > 0 ? page : 0;
  return state;
}

export function parseHref(href: string): ViewState {
  const url = new URL(href, "http://local");
  return urlToState(url.pathname, url.search);
}
