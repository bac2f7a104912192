/** Dashboard wiring: a thin shell that fetches API payloads and hands them
 * to the pure view renderers. All analytics numbers come from the API. */

import { ApiClient, ApiError } from "./api.js";
import { esc } from "./html.js";
import type { AnalysisKind, Annotation, Job, JobState, Post, PostAnalysisPayload } from "./types.js";
import { renderJobBoard, renderBanner, terminalTransitions } from "./views/jobs.js";
import { renderRegionMap } from "./views/map.js";
import { renderInfluencerList, renderNetwork } from "./views/network.js";
import { buildPostRows, renderPostTable } from "./views/posts.js";
import { renderTrendChart } from "./views/trend.js";
import { renderSubtopics, renderUploadForm, renderValidationReport } from "./views/upload.js";
import { renderWordCloud } from "./views/wordcloud.js";

const POLL_MS = 2000;
const KINDS: AnalysisKind[] = [
  "subtopics", "wordcloud", "sentiment", "propaganda", "trends", "spatial", "network", "post_analysis",
];

interface State {
  client: ApiClient | null;
  datasetId: string | null;
  jobStates: Map<string, JobState>;
  posts: Post[];
  annotations: Annotation[];
  postAnalysis: PostAnalysisPayload | null;
}

const state: State = {
  client: null,
  datasetId: null,
  jobStates: new Map(),
  posts: [],
  annotations: [],
  postAnalysis: null,
};

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function toast(message: string, isError = false): void {
  const banner = el("banner");
  banner.innerHTML = renderBanner([message]);
  banner.firstElementChild?.classList.toggle("error", isError);
  setTimeout(() => (banner.innerHTML = ""), 6000);
}

function clientOrPrompt(): ApiClient | null {
  if (state.client) return state.client;
  toast("Set the API token first", true);
  return null;
}

async function refreshDatasets(): Promise<void> {
  const client = clientOrPrompt();
  if (!client) return;
  const datasets = await client.listDatasets();
  const rows = datasets.map(
    (d) =>
      `<tr class="${d.dataset_id === state.datasetId ? "selected" : ""}">` +
      `<td><button class="pick" data-ds="${esc(d.dataset_id)}">${esc(d.name)}</button></td>` +
      `<td>${d.metadata.n_posts}</td><td><span class="chip ${esc(d.status)}">${esc(d.status)}</span></td></tr>`,
  );
  el("datasets").innerHTML =
    `<table class="datasets"><thead><tr><th>dataset</th><th>posts</th><th>status</th></tr></thead>` +
    `<tbody>${rows.join("")}</tbody></table>`;
  for (const btn of el("datasets").querySelectorAll<HTMLButtonElement>("button.pick")) {
    btn.onclick = () => selectDataset(btn.dataset.ds!);
  }
}

async function selectDataset(datasetId: string): Promise<void> {
  state.datasetId = datasetId;
  state.jobStates = new Map();
  state.postAnalysis = null;
  el("results").innerHTML = "";
  await Promise.all([refreshDatasets(), refreshJobs(), loadPostsAndAnnotations()]);
}

async function loadPostsAndAnnotations(): Promise<void> {
  const client = state.client;
  if (!client || !state.datasetId) return;
  [state.posts, state.annotations] = await Promise.all([
    client.getPosts(state.datasetId),
    client.listAnnotations(state.datasetId),
  ]);
  renderPostsSection();
}

async function refreshJobs(): Promise<void> {
  const client = state.client;
  if (!client || !state.datasetId) return;
  let jobs: Job[];
  try {
    jobs = await client.listJobs(state.datasetId);
  } catch (err) {
    if (err instanceof ApiError && err.status >= 500) return; // poll again later
    throw err;
  }
  const messages = terminalTransitions(state.jobStates, jobs);
  for (const m of messages) toast(m, m.includes("failed"));
  const finishedKinds = jobs
    .filter((j) => j.state === "done" && state.jobStates.get(j.job_id) !== "done")
    .map((j) => j.kind);
  state.jobStates = new Map(jobs.map((j) => [j.job_id, j.state]));
  el("jobs").innerHTML = renderJobBoard(jobs);
  for (const btn of el("jobs").querySelectorAll<HTMLButtonElement>("button.cancel")) {
    btn.onclick = async () => {
      await client.cancelJob(btn.dataset.job!);
      await refreshJobs();
    };
  }
  for (const kind of finishedKinds) await showResult(kind);
}

async function showResult(kind: AnalysisKind): Promise<void> {
  const client = state.client;
  if (!client || !state.datasetId) return;
  const results = await client.getResults(state.datasetId, kind);
  if (results.length === 0) {
    toast(`no stored ${kind} result yet`, true);
    return;
  }
  const payload = results[results.length - 1].payload as never;
  let html = "";
  if (kind === "wordcloud") html = renderWordCloud(payload);
  else if (kind === "trends") html = renderTrendChart(payload);
  else if (kind === "spatial") html = renderRegionMap(payload);
  else if (kind === "network") html = renderNetwork(payload) + renderInfluencerList(payload);
  else if (kind === "subtopics") html = renderSubtopics(payload);
  else if (kind === "post_analysis") {
    state.postAnalysis = payload;
    renderPostsSection();
    return;
  } else html = `<pre dir="auto">${esc(JSON.stringify(payload, null, 2))}</pre>`;
  el("results").innerHTML = `<h2>${esc(kind)}</h2>` + html;
}

function renderPostsSection(): void {
  if (!state.postAnalysis) return;
  const rows = buildPostRows(state.postAnalysis, state.posts, state.annotations);
  el("posts").innerHTML = renderPostTable(rows);
  for (const btn of el("posts").querySelectorAll<HTMLButtonElement>("button.relabel-save")) {
    btn.onclick = () => relabel(btn.dataset.post!);
  }
}

async function relabel(postId: string): Promise<void> {
  const client = state.client;
  if (!client || !state.datasetId) return;
  const select = el("posts").querySelector<HTMLSelectElement>(`select.relabel[data-post="${postId}"]`);
  if (!select) return;
  const kind = select.dataset.kind ?? "sentiment";
  const machine =
    state.postAnalysis?.records.find((r) => r.post_id === postId && r.kind === kind)?.label ?? "neutral";
  const optimistic: Annotation = {
    annotation_id: "pending",
    dataset_id: state.datasetId,
    post_id: postId,
    kind,
    old_label: machine,
    new_label: select.value,
    annotator: "me",
    created_at: new Date().toISOString(),
  };
  const before = state.annotations;
  state.annotations = [...before, optimistic];
  renderPostsSection(); // optimistic update
  try {
    await client.annotate({
      dataset_id: state.datasetId,
      post_id: postId,
      kind,
      old_label: machine,
      new_label: select.value,
    });
    state.annotations = await client.listAnnotations(state.datasetId);
  } catch (err) {
    state.annotations = before; // roll back
    toast(err instanceof ApiError ? `${err.code}: ${err.message}` : String(err), true);
  }
  renderPostsSection();
}

async function applyFeedback(): Promise<void> {
  const client = clientOrPrompt();
  if (!client || !state.datasetId) return;
  const outcome = await client.applyFeedback(state.datasetId);
  toast(
    outcome.lexicon_version === outcome.previous_version
      ? `lexicon unchanged (v${outcome.lexicon_version})`
      : `lexicon updated to v${outcome.lexicon_version}`,
  );
}

function wireUpload(): void {
  el("upload").innerHTML = renderUploadForm();
  const form = el("upload-form") as HTMLFormElement;
  form.onsubmit = async (event) => {
    event.preventDefault();
    const client = clientOrPrompt();
    if (!client) return;
    const data = new FormData(form);
    const file = data.get("file") as File;
    const progress = form.querySelector("progress")!;
    progress.hidden = false;
    try {
      const res = await client.uploadDataset(
        file,
        file.name,
        String(data.get("format")),
        String(data.get("name") ?? ""),
      );
      el("upload-report").innerHTML = renderValidationReport(res.validation_report);
      toast(`uploaded: ${res.validation_report.accepted} rows accepted`);
      await refreshDatasets();
      await selectDataset(res.dataset_id);
    } catch (err) {
      if (err instanceof ApiError) {
        el("upload-report").innerHTML = `<p class="error">${esc(err.code)}: ${esc(err.message)}</p>`;
      }
      toast("upload failed", true);
    } finally {
      progress.hidden = true;
    }
  };
}

function wireAnalysisButtons(): void {
  el("analyses").innerHTML = KINDS.map(
    (kind) => `<button class="run" data-kind="${kind}">${kind}</button>`,
  ).join("");
  for (const btn of el("analyses").querySelectorAll<HTMLButtonElement>("button.run")) {
    btn.onclick = async () => {
      const client = clientOrPrompt();
      if (!client || !state.datasetId) {
        toast("pick a dataset first", true);
        return;
      }
      try {
        await client.submitJob({ dataset_id: state.datasetId, kind: btn.dataset.kind as AnalysisKind, seed: 7 });
        await refreshJobs();
      } catch (err) {
        toast(err instanceof ApiError ? `${err.code}: ${err.message}` : String(err), true);
      }
    };
  }
  (el("apply-feedback") as HTMLButtonElement).onclick = applyFeedback;
}

function wireSettings(): void {
  const tokenInput = el("token") as HTMLInputElement;
  tokenInput.value = localStorage.getItem("marsad_token") ?? "";
  const connect = async () => {
    localStorage.setItem("marsad_token", tokenInput.value);
    state.client = new ApiClient({ baseUrl: "", token: tokenInput.value });
    try {
      await state.client.health();
      toast("connected");
      await refreshDatasets();
    } catch {
      toast("API unreachable", true);
    }
  };
  (el("connect") as HTMLButtonElement).onclick = connect;
  if (tokenInput.value) void connect();
}

export function start(): void {
  wireSettings();
  wireUpload();
  wireAnalysisButtons();
  setInterval(() => void refreshJobs(), POLL_MS);
}

if (typeof document !== "undefined" && document.getElementById("app-root")) {
  start();
}
