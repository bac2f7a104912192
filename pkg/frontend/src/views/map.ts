/** Region map: labeled bubbles at gazetteer centroids on an
 * equirectangular plane (no polygon data shipped). */

import { attr, esc } from "../html.js";
import type { SpatialPayload } from "../types.js";

const W = 720;
const H = 360;

function project(lat: number, lon: number): [number, number] {
  const x = ((lon + 180) / 360) * W;
  const y = ((90 - lat) / 180) * H;
  return [Math.round(x * 10) / 10, Math.round(y * 10) / 10];
}

export function renderRegionMap(payload: SpatialPayload): string {
  if (payload.regions.length === 0) return `<div class="map empty">No resolvable locations</div>`;
  const maxCount = Math.max(...payload.regions.map((r) => r.post_count));
  const bubbles = payload.regions.map((r) => {
    const [x, y] = project(r.lat, r.lon);
    const radius = 4 + Math.round(14 * Math.sqrt(r.post_count / maxCount));
    return (
      `<g class="region" transform="translate(${x},${y})">` +
      `<circle r="${radius}"><title>${esc(`${r.region}: ${r.post_count}`)}</title></circle>` +
      `<text class="region-label" y="${radius + 11}" text-anchor="middle" dir="auto">` +
      `${esc(r.region)} (${r.post_count})</text></g>`
    );
  });
  const note =
    payload.unresolved_geotags > 0
      ? `<text class="axis" x="6" y="${H - 6}">unresolved geotags: ${payload.unresolved_geotags}</text>`
      : "";
  return (
    `<svg class="map" viewBox="0 0 ${W} ${H}" role="img" aria-label=${attr("posts per region")}>` +
    `\n<rect class="map-bg" width="${W}" height="${H}"/>` +
    `\n${bubbles.join("\n")}` +
    `\n${note}` +
    `\n</svg>`
  );
}
