// Pure HTML renderers. Everything returns a string so views are trivially
// testable; the router owns the DOM. Text is escaped for HTML's reserved
// characters only, so diacritics reach the page byte-for-byte.

import type { EntryResponse, Page, SearchHit } from "./types.js";
import { PAGE_SIZE, stateToUrl, type ViewState } from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

export function unescapeHtml(text: string): string {
  return text
    .replace(/&#39;/g, "'")
    .replace(/&quot;/g, '"')
    .replace(/&gt;/g, ">")
    .replace(/&lt;/g, "<")
    .replace(/&amp;/g, "&");
}

function navLink(href: string, label: string, cls = ""): string {
  const classAttr = cls ? ` class="${cls}"` : "";
  return `<a data-nav href="${escapeHtml(href)}"${classAttr}>${escapeHtml(label)}</a>`;
}

export function renderShell(state: ViewState, body: string): string {
  const tabs = [
    navLink("/", "Search", state.view === "search" ? "tab active" : "tab"),
    navLink("/map", "Map", state.view === "map" ? "tab active" : "tab"),
  ].join("");
  return `<header class="top"><h1>${navLink("/", "Jambu")}</h1><nav>${tabs}</nav></header>
<main>${body}</main>`;
}

export function renderSearchForm(state: ViewState): string {
  const fields = (["form", "gloss", "headword"] as const)
    .map(
      (f) =>
        `<option value="${f}"${f === state.field ? " selected" : ""}>${f}</option>`,
    )
    .join("");
  return `<form id="search-form" class="search-form">
  <input name="q" type="search" placeholder="Search forms, glosses, headwords" value="${escapeHtml(state.query)}">
  <select name="field">${fields}</select>
  <input name="lang" placeholder="language id" value="${escapeHtml(state.lang)}">
  <label class="fold"><input name="fold" type="checkbox"${state.fold ? " checked" : ""}> ignore diacritics</label>
  <button type="submit">Search</button>
</form>`;
}

export function renderHits(state: ViewState, page: Page<SearchHit>): string {
  if (page.total === 0) {
    return `<p class="empty">No matches.</p>`;
  }
  const rows = page.items
    .map(
      (hit) => `<tr class="hit">
  <td class="form-cell">${navLink(`/entries/${encodeURIComponent(hit.cognateset_id)}`, hit.form)}</td>
  <td>${escapeHtml(hit.gloss)}</td>
  <td>${escapeHtml(hit.language_name || hit.language_id)}</td>
  <td class="headword-cell">${navLink(`/entries/${encodeURIComponent(hit.cognateset_id)}`, hit.headword)}</td>
</tr>`,
    )
    .join("\n");
  const pages = Math.max(1, Math.ceil(page.total / PAGE_SIZE));
  const pager: string[] = [];
  if (state.page > 0) {
    pager.push(navLink(stateToUrl({ ...state, page: state.page - 1 }), "← previous", "pager"));
  }
  pager.push(`<span class="pager-info">page ${state.page + 1} of ${pages}</span>`);
  if ((state.page + 1) * PAGE_SIZE < page.total) {
    pager.push(navLink(stateToUrl({ ...state, page: state.page + 1 }), "next →", "pager"));
  }
  return `<p class="total">${page.total} match${page.total === 1 ? "" : "es"}</p>
<table class="hits"><thead><tr><th>form</th><th>gloss</th><th>language</th><th>headword</th></tr></thead>
<tbody>${rows}</tbody></table>
<div class="pager-row">${pager.join(" ")}</div>`;
}

export function renderPrompt(): string {
  return `<p class="empty">Type a query to search the database.</p>`;
}

export function renderErrorBanner(message: string): string {
  return `<div class="banner error">Request failed: ${escapeHtml(message)} <button data-action="retry">retry</button></div>`;
}

export function renderEntry(data: EntryResponse): string {
  const cs = data.cognateset;
  const groups = data.languages
    .map((group) => {
      const lang = group.language;
      const forms = group.forms
        .map(
          (f) => `<tr class="form-row">
  <td class="form-cell">${escapeHtml(f.form)}</td>
  <td>${escapeHtml(f.gloss)}</td>
  <td>${escapeHtml(f.notes)}</td>
  <td class="subset">${escapeHtml(f.subset_id)}</td>
</tr>`,
        )
        .join("\n");
      return `<section class="language-group">
<h3>${navLink(stateToUrl({ view: "search", query: "", field: "form", lang: lang.id, fold: false, page: 0, entryId: "", clade: "" }), lang.name || lang.id)}
<span class="clade">${escapeHtml(lang.clade.join(" › "))}</span></h3>
<table class="forms"><tbody>${forms}</tbody></table>
</section>`;
    })
    .join("\n");
  const notes = cs.notes ? `<p class="notes">${escapeHtml(cs.notes)}</p>` : "";
  const description = cs.description ? ` <span class="gloss">‘${escapeHtml(cs.description)}’</span>` : "";
  return `<article class="entry">
<h2 class="headword">${escapeHtml(cs.headword)}${description}</h2>
<p class="meta">set ${escapeHtml(cs.id)} · ${data.form_count} forms in ${data.languages.length} lects</p>
${notes}
${groups}
</article>`;
}

export function renderNotFound(entryId: string): string {
  return `<article class="entry missing"><h2>Not found</h2>
<p>No cognate set with id <code>${escapeHtml(entryId)}</code>.</p>
<p>${navLink("/", "Back to search")}</p></article>`;
}
