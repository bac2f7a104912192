/** Tiny string-template helpers; views render plain HTML/SVG strings so
 * they stay snapshot-testable without a DOM. */

const ENTITIES: Record<string, string> = {
  "&": "&amp;",
  "<": "&lt;",
  ">": "&gt;",
  '"': "&quot;",
  "'": "&#39;",
};

export function esc(value: unknown): string {
  return String(value).replace(/[&<>"']/g, (ch) => ENTITIES[ch]);
}

export function attr(value: unknown): string {
  return `"${esc(value)}"`;
}

/** Fixed-precision number for stable snapshots and tidy labels. */
export function fmt(value: number, digits = 3): string {
  return Number(value).toFixed(digits);
}
