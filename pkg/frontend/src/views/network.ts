/** Force-layout network view.
 *
 * The layout is presentation only (influence numbers all come from the
 * API payload) and fully deterministic: seeded initial placement plus a
 * fixed number of spring iterations, so renders are snapshot-stable.
 */

import { esc, fmt } from "../html.js";
import type { NetworkPayload } from "../types.js";

const W = 720;
const H = 480;
const ITERATIONS = 150;

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function layoutNetwork(payload: NetworkPayload): Map<string, [number, number]> {
  const nodes = payload.nodes.map((n) => n.id);
  const rand = mulberry32(nodes.length * 2654435761 + 7);
  const pos = new Map<string, [number, number]>();
  for (const id of nodes) {
    pos.set(id, [W * (0.15 + 0.7 * rand()), H * (0.15 + 0.7 * rand())]);
  }
  const k = Math.sqrt((W * H) / Math.max(1, nodes.length));
  for (let iter = 0; iter < ITERATIONS; iter++) {
    const cool = 1 - iter / ITERATIONS;
    const disp = new Map<string, [number, number]>(nodes.map((id) => [id, [0, 0]]));
    for (let i = 0; i < nodes.length; i++) {
      for (let j = i + 1; j < nodes.length; j++) {
        const [xa, ya] = pos.get(nodes[i])!;
        const [xb, yb] = pos.get(nodes[j])!;
        let dx = xa - xb;
        let dy = ya - yb;
        const dist = Math.max(0.01, Math.hypot(dx, dy));
        const force = (k * k) / dist / dist;
        dx *= force;
        dy *= force;
        const da = disp.get(nodes[i])!;
        const db = disp.get(nodes[j])!;
        da[0] += dx;
        da[1] += dy;
        db[0] -= dx;
        db[1] -= dy;
      }
    }
    for (const e of payload.edges) {
      const a = pos.get(e.source);
      const b = pos.get(e.target);
      if (!a || !b) continue;
      const dx = b[0] - a[0];
      const dy = b[1] - a[1];
      const dist = Math.max(0.01, Math.hypot(dx, dy));
      const pull = (dist * dist) / k / dist / 8;
      const da = disp.get(e.source)!;
      const db = disp.get(e.target)!;
      da[0] += dx * pull;
      da[1] += dy * pull;
      db[0] -= dx * pull;
      db[1] -= dy * pull;
    }
    for (const id of nodes) {
      const [x, y] = pos.get(id)!;
      const [dx, dy] = disp.get(id)!;
      const len = Math.max(0.01, Math.hypot(dx, dy));
      const step = Math.min(len, 12 * cool);
      pos.set(id, [
        Math.min(W - 20, Math.max(20, x + (dx / len) * step)),
        Math.min(H - 20, Math.max(20, y + (dy / len) * step)),
      ]);
    }
  }
  for (const [id, [x, y]] of pos) pos.set(id, [Math.round(x * 10) / 10, Math.round(y * 10) / 10]);
  return pos;
}

export function renderNetwork(payload: NetworkPayload, maxNodes = 60): string {
  if (payload.nodes.length === 0) return `<div class="network empty">No interactions</div>`;
  const keep = [...payload.nodes].sort((a, b) => b.pagerank - a.pagerank).slice(0, maxNodes);
  const keepIds = new Set(keep.map((n) => n.id));
  const sub = {
    ...payload,
    nodes: keep,
    edges: payload.edges.filter((e) => keepIds.has(e.source) && keepIds.has(e.target)),
  };
  const pos = layoutNetwork(sub);
  const maxRank = Math.max(...keep.map((n) => n.pagerank));
  const influencers = new Set(payload.top_influencers.slice(0, 5));

  const lines = sub.edges.map((e) => {
    const [x1, y1] = pos.get(e.source)!;
    const [x2, y2] = pos.get(e.target)!;
    return (
      `<line class="edge ${esc(e.kind)}" x1="${x1}" y1="${y1}" x2="${x2}" y2="${y2}"` +
      ` stroke-width="${Math.min(4, e.weight)}"/>`
    );
  });
  const circles = keep.map((n) => {
    const [x, y] = pos.get(n.id)!;
    const r = 4 + Math.round(12 * Math.sqrt(n.pagerank / maxRank));
    const cls = influencers.has(n.id) ? "node influencer" : "node";
    const title = `${n.id}: pagerank ${fmt(n.pagerank, 4)}, in ${n.in_degree}, out ${n.out_degree}`;
    return (
      `<g class="${cls}" transform="translate(${x},${y})">` +
      `<circle r="${r}"><title>${esc(title)}</title></circle>` +
      `<text class="node-label" y="${r + 10}" text-anchor="middle" dir="auto">${esc(n.id)}</text></g>`
    );
  });
  return (
    `<svg class="network" viewBox="0 0 ${W} ${H}" role="img" aria-label="interaction graph">` +
    `\n<g>${lines.join("\n")}</g>` +
    `\n<g>${circles.join("\n")}</g>` +
    `\n</svg>`
  );
}

export function renderInfluencerList(payload: NetworkPayload): string {
  const byId = new Map(payload.nodes.map((n) => [n.id, n]));
  const rows = payload.top_influencers.map((id, i) => {
    const n = byId.get(id);
    const rank = n ? fmt(n.pagerank, 4) : "?";
    return `<li><span dir="auto">${esc(id)}</span> <span class="rank">${rank}</span></li>`;
  });
  return `<ol class="influencers">${rows.join("\n")}</ol>`;
}
