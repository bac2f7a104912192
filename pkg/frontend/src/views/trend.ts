/** Daily-trends chart: SVG bars per bucket, spike buckets highlighted. */

import { attr, esc } from "../html.js";
import type { TrendsPayload } from "../types.js";

const W = 720;
const H = 220;
const PAD = 28;

export function renderTrendChart(payload: TrendsPayload): string {
  const buckets = payload.buckets;
  if (buckets.length === 0) return `<div class="trend empty">No buckets</div>`;
  const spikes = new Set(payload.spikes.map((s) => s.bucket_start));
  const maxCount = Math.max(1, ...buckets.map((b) => b.post_count));
  const innerW = W - 2 * PAD;
  const innerH = H - 2 * PAD;
  const barW = Math.max(1, Math.floor(innerW / buckets.length) - 2);

  const bars = buckets.map((b, i) => {
    const h = Math.round((b.post_count / maxCount) * innerH);
    const x = PAD + Math.round((i / buckets.length) * innerW);
    const y = H - PAD - h;
    const cls = spikes.has(b.start) ? "bar spike" : "bar";
    const title = `${b.start}: ${b.post_count} posts, engagement ${b.engagement}`;
    return (
      `<rect class="${cls}" x="${x}" y="${y}" width="${barW}" height="${h}">` +
      `<title>${esc(title)}</title></rect>`
    );
  });

  const spikeLabels = payload.spikes.map((s) => {
    const i = buckets.findIndex((b) => b.start === s.bucket_start);
    if (i < 0) return "";
    const x = PAD + Math.round((i / buckets.length) * innerW);
    const terms = s.top_terms.join(", ");
    return (
      `<text class="spike-label" x="${x}" y="${PAD - 8}" dir="auto"` +
      ` data-z=${attr(s.z_score.toFixed(2))}>${esc(terms)}</text>`
    );
  });

  const first = buckets[0].start.slice(0, 10);
  const last = buckets[buckets.length - 1].start.slice(0, 10);
  return (
    `<svg class="trend" viewBox="0 0 ${W} ${H}" role="img" aria-label="posts per ${esc(payload.granularity)}">` +
    `\n<g>${bars.join("\n")}</g>` +
    `\n${spikeLabels.filter(Boolean).join("\n")}` +
    `\n<text class="axis" x="${PAD}" y="${H - 8}">${esc(first)}</text>` +
    `\n<text class="axis end" x="${W - PAD}" y="${H - 8}" text-anchor="end">${esc(last)}</text>` +
    `\n<text class="axis" x="${PAD}" y="${PAD + 2}" text-anchor="end">${maxCount}</text>` +
    `\n</svg>`
  );
}
