/** Upload form and inline validation report. */

import { esc } from "../html.js";
import type { SubtopicsPayload, ValidationReport } from "../types.js";

export function renderUploadForm(): string {
  return (
    `<form class="upload" id="upload-form">` +
    `<input type="file" name="file" required>` +
    `<select name="format"><option>jsonl</option><option>json</option><option>csv</option><option>tsv</option></select>` +
    `<input type="text" name="name" placeholder="dataset name">` +
    `<button type="submit">upload</button>` +
    `<progress hidden></progress>` +
    `</form>`
  );
}

export function renderValidationReport(report: ValidationReport): string {
  const head = `<p class="report-summary">accepted ${report.accepted} of ${report.total} rows</p>`;
  if (report.rejected.length === 0) return head;
  const rows = report.rejected
    .slice(0, 100)
    .map(
      (e) =>
        `<tr><td class="num">${e.row_index}</td><td>${esc(e.error_code)}</td>` +
        `<td dir="auto">${esc(e.message)}</td></tr>`,
    );
  const more =
    report.rejected.length > 100
      ? `<p class="report-more">… and ${report.rejected.length - 100} more</p>`
      : "";
  return (
    head +
    `<table class="report"><thead><tr><th>row</th><th>error</th><th>message</th></tr></thead>` +
    `<tbody>${rows.join("\n")}</tbody></table>` +
    more
  );
}

/** Subtopic cards (one per cluster) with their top terms. */
export function renderSubtopics(payload: SubtopicsPayload): string {
  const cards = payload.clusters.map((c) => {
    const terms = c.top_terms
      .map((t) => `<li dir="auto">${esc(t.term)} <span class="weight">${t.weight.toFixed(3)}</span></li>`)
      .join("\n");
    return (
      `<div class="cluster"><h3>cluster ${c.cluster_id} · ${c.doc_count} posts</h3>` +
      `<ul class="terms">${terms}</ul></div>`
    );
  });
  return `<div class="subtopics" data-k="${payload.k}" data-seed="${payload.seed}">${cards.join("\n")}</div>`;
}
