// Language map: an equirectangular SVG of the region with one marker per
// located lect, sized by lemma count and colored by family. No tile
// service is involved, so the view works offline and in tests.

import type { GeoFeature, GeoResponse } from "./types.js";
import { escapeHtml } from "./render.js";

export interface MapBounds {
  minLat: number;
  maxLat: number;
  minLon: number;
  maxLon: number;
}

// the subcontinent; lects outside (e.g. diaspora lects) are counted, not drawn
export const DEFAULT_BOUNDS: MapBounds = { minLat: 5, maxLat: 40, minLon: 55, maxLon: 100 };

export const WIDTH = 840;
export const HEIGHT = 620;

const PALETTE = [
  "#2f6cc4",
  "#c44f2f",
  "#3d9943",
  "#8a52b8",
  "#c4a02f",
  "#38a3a5",
  "#b8527e",
  "#6b7280",
];

export function familyColor(family: string, families: string[]): string {
  const idx = families.indexOf(family);
  return PALETTE[(idx >= 0 ? idx : families.length) % PALETTE.length] ?? "#6b7280";
}

export function project(lat: number, lon: number, bounds: MapBounds = DEFAULT_BOUNDS): [number, number] {
  const x = ((lon - bounds.minLon) / (bounds.maxLon - bounds.minLon)) * WIDTH;
  const y = ((bounds.maxLat - lat) / (bounds.maxLat - bounds.minLat)) * HEIGHT;
  return [x, y];
}

export function inBounds(feature: GeoFeature, bounds: MapBounds = DEFAULT_BOUNDS): boolean {
  return (
    feature.latitude >= bounds.minLat &&
    feature.latitude <= bounds.maxLat &&
    feature.longitude >= bounds.minLon &&
    feature.longitude <= bounds.maxLon
  );
}

export function markerRadius(formCount: number): number {
  return 2.2 + Math.sqrt(Math.max(formCount, 1)) * 0.22;
}

export function renderMap(geo: GeoResponse, clade = "", bounds: MapBounds = DEFAULT_BOUNDS): string {
  const filtered = clade ? geo.features.filter((f) => f.family === clade) : geo.features;
  const families = [...new Set(geo.features.map((f) => f.family))].sort();
  const drawn = filtered.filter((f) => inBounds(f, bounds));
  const offMap = filtered.length - drawn.length;

  const markers = drawn
    .map((f) => {
      const [x, y] = project(f.latitude, f.longitude, bounds);
      const color = familyColor(f.family, families);
      const title = `${f.name} (${f.family}, ${f.form_count} lemmata)`;
      return `<circle class="marker" data-lang="${escapeHtml(f.id)}" cx="${x.toFixed(1)}" cy="${y.toFixed(1)}" r="${markerRadius(f.form_count).toFixed(1)}" fill="${color}" fill-opacity="0.75"><title>${escapeHtml(title)}</title></circle>`;
    })
    .join("\n");

  const legend = families
    .map(
      (family) =>
        `<button class="legend-item${clade === family ? " active" : ""}" data-clade="${escapeHtml(family)}">
<span class="swatch" style="background:${familyColor(family, families)}"></span>${escapeHtml(family)}</button>`,
    )
    .join("");

  const hidden = geo.omitted + offMap;
  return `<div class="map-view">
<div class="legend">${legend}${clade ? `<button class="legend-item" data-clade="">all families</button>` : ""}</div>
<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img" aria-label="language map">
<rect width="${WIDTH}" height="${HEIGHT}" fill="#eef3f8"></rect>
${markers}
</svg>
<p class="map-note">${drawn.length} lects shown; ${hidden} not on this map (${geo.omitted} without coordinates, ${offMap} outside the frame).</p>
</div>`;
}
