/** Job board: one chip per job with live status, queue position for queued
 * jobs, and error text verbatim for failed ones. */

import { attr, esc } from "../html.js";
import type { Job, JobState } from "../types.js";

export const TERMINAL_STATES: ReadonlySet<JobState> = new Set(["done", "failed", "cancelled"] as JobState[]);

export function renderJobBoard(jobs: Job[]): string {
  if (jobs.length === 0) return `<div class="jobs empty">No jobs yet</div>`;
  const rows = jobs.map((j) => {
    let detail = "";
    if (j.state === "queued") {
      const pos = j.queue_position;
      detail = pos == null ? "waiting" : `position ${pos + 1} in queue`;
    } else if (j.state === "running") {
      detail = `started ${esc(j.started_at ?? "")}`;
    } else if (j.state === "failed") {
      detail = `<span class="error">${esc(j.error ?? "failed")}</span>`;
    } else if (j.state === "done") {
      detail =
        `<a class="export" href=${attr(`/v1/export/${j.job_id}?format=csv`)}>csv</a> ` +
        `<a class="export" href=${attr(`/v1/export/${j.job_id}?format=json`)}>json</a>`;
    }
    return (
      `<tr class="job ${esc(j.state)}" data-job=${attr(j.job_id)}>` +
      `<td class="kind">${esc(j.kind)}</td>` +
      `<td><span class="chip ${esc(j.state)}">${esc(j.state)}</span></td>` +
      `<td class="detail">${detail}</td>` +
      `<td>${j.state === "queued" ? `<button class="cancel" data-job=${attr(j.job_id)}>cancel</button>` : ""}</td>` +
      `</tr>`
    );
  });
  return (
    `<table class="jobs"><thead><tr><th>analysis</th><th>state</th><th>detail</th><th></th></tr></thead>` +
    `<tbody>${rows.join("\n")}</tbody></table>`
  );
}

/** Banner text for jobs that reached a terminal state since the last poll. */
export function terminalTransitions(previous: Map<string, JobState>, current: Job[]): string[] {
  const messages: string[] = [];
  for (const job of current) {
    const before = previous.get(job.job_id);
    if (TERMINAL_STATES.has(job.state) && before !== job.state && !TERMINAL_STATES.has(before as JobState)) {
      if (job.state === "done") {
        messages.push(`${job.kind} analysis is ready to visualize`);
      } else if (job.state === "failed") {
        messages.push(`${job.kind} analysis failed: ${job.error ?? "unknown error"}`);
      } else {
        messages.push(`${job.kind} analysis was cancelled`);
      }
    }
  }
  return messages;
}

export function renderBanner(messages: string[]): string {
  if (messages.length === 0) return "";
  const items = messages.map((m) => `<div class="banner-item">${esc(m)}</div>`);
  return `<div class="banner" role="status">${items.join("\n")}</div>`;
}
