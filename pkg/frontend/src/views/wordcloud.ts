/** Word cloud: term spans scaled between min and max font size. */

import { attr, esc } from "../html.js";
import type { WordCloudPayload } from "../types.js";

const MIN_PX = 12;
const MAX_PX = 42;

export function renderWordCloud(payload: WordCloudPayload, maxTerms = 60): string {
  const terms = payload.terms.slice(0, maxTerms);
  if (terms.length === 0) return `<div class="wordcloud empty">No terms</div>`;
  const counts = terms.map((t) => t.count);
  const lo = Math.min(...counts);
  const hi = Math.max(...counts);
  const spans = terms.map(({ term, count }) => {
    const scale = hi === lo ? 1 : (count - lo) / (hi - lo);
    const px = Math.round(MIN_PX + scale * (MAX_PX - MIN_PX));
    return (
      `<span class="wc-term" dir="auto" style="font-size:${px}px"` +
      ` title=${attr(`${term}: ${count}`)}>${esc(term)}</span>`
    );
  });
  return `<div class="wordcloud">${spans.join("\n")}</div>`;
}
