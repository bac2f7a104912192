/** Post table: label / degree / location mentions per post, with a relabel
 * control. Machine labels and human relabels are shown side by side; data
 * cells use dir="auto" so Arabic text renders RTL. */

import { attr, esc, fmt } from "../html.js";
import type { Annotation, Post, PostAnalysisPayload } from "../types.js";

export interface PostTableRow {
  post_id: string;
  text: string;
  kind: string;
  machine_label: string;
  human_label: string | null;
  degree: number;
  locations: string[];
}

const RELABEL_OPTIONS: Record<string, string[]> = {
  sentiment: ["positive", "negative", "neutral"],
  propaganda: ["propaganda", "clean"],
};

/** Join the analysis records with post texts and any human relabels. */
export function buildPostRows(
  payload: PostAnalysisPayload,
  posts: Post[],
  annotations: Annotation[],
  kind = "sentiment",
): PostTableRow[] {
  const textById = new Map(posts.map((p) => [p.id, p.text]));
  const lastHuman = new Map<string, string>();
  for (const a of annotations) {
    if (a.kind === kind) lastHuman.set(a.post_id, a.new_label); // append-only log: last wins
  }
  return payload.records
    .filter((r) => r.kind === kind)
    .map((r) => ({
      post_id: r.post_id,
      text: textById.get(r.post_id) ?? "",
      kind: r.kind,
      machine_label: r.label,
      human_label: lastHuman.get(r.post_id) ?? null,
      degree: r.degree,
      locations: r.locations,
    }));
}

export function renderPostTable(rows: PostTableRow[], maxRows = 50): string {
  if (rows.length === 0) return `<div class="posts empty">No analyzed posts</div>`;
  const kind = rows[0].kind;
  const options = RELABEL_OPTIONS[kind] ?? [];
  const body = rows.slice(0, maxRows).map((r) => {
    const optionTags = options
      .map((label) => `<option value=${attr(label)}${label === r.machine_label ? " selected" : ""}>${esc(label)}</option>`)
      .join("");
    const human = r.human_label
      ? `<span class="label human">${esc(r.human_label)}</span>`
      : `<span class="label none">—</span>`;
    return (
      `<tr data-post=${attr(r.post_id)}>` +
      `<td class="id">${esc(r.post_id)}</td>` +
      `<td class="text" dir="auto">${esc(r.text)}</td>` +
      `<td><span class="label machine ${esc(r.machine_label)}">${esc(r.machine_label)}</span></td>` +
      `<td>${human}</td>` +
      `<td class="num">${fmt(r.degree, 3)}</td>` +
      `<td dir="auto">${esc(r.locations.join(", "))}</td>` +
      `<td><select class="relabel" data-post=${attr(r.post_id)} data-kind=${attr(kind)}>${optionTags}</select>` +
      `<button class="relabel-save" data-post=${attr(r.post_id)}>relabel</button></td>` +
      `</tr>`
    );
  });
  return (
    `<table class="posts"><thead><tr>` +
    `<th>post</th><th>text</th><th>machine</th><th>human</th><th>degree</th><th>locations</th><th>relabel</th>` +
    `</tr></thead><tbody>${body.join("\n")}</tbody></table>`
  );
}
