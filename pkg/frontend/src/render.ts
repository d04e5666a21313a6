/** Pure view: ViewState in, HTML string out. No DOM access, no fetches. */

import { Completion } from "./api.js";
import { ViewState } from "./controller.js";

function escapeHtml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** The typed prefix shown bold inside its suggestion. */
function highlight(prefix: string, completion: string): string {
  const p = prefix.trim().toLowerCase();
  const c = completion.toLowerCase();
  if (p && c.startsWith(p)) {
    return (
      `<strong>${escapeHtml(completion.slice(0, p.length))}</strong>` +
      escapeHtml(completion.slice(p.length))
    );
  }
  return escapeHtml(completion);
}

function renderItem(prefix: string, c: Completion): string {
  return (
    `<li class="suggestion grade-${c.grade.toLowerCase()}" data-dtype="${escapeHtml(c.dtype)}">` +
    `<span class="text">${highlight(prefix, c.completion)}</span>` +
    `<span class="meaning">${escapeHtml(c.interpretation)}</span>` +
    `</li>`
  );
}

export function render(state: ViewState): string {
  switch (state.status) {
    case "idle":
      return `<p class="hint">Start typing a query.</p>`;
    case "loading":
      return `<p class="loading">…</p>`;
    case "ok":
      return `<ul class="suggestions">${state.completions
        .map((c) => renderItem(state.prefix, c))
        .join("")}</ul>`;
    case "empty":
      return `<p class="empty">No suggestions — keep typing.</p>`;
    case "dead": {
      const at = state.deadAt;
      const note =
        at === null
          ? ""
          : ` <span class="dead-at">(stopped making sense at character ${at})</span>`;
      return `<p class="dead">No suggestions — this can’t become a known query.${note}</p>`;
    }
    case "error":
      return `<p class="error">Suggestion service unavailable.</p>`;
  }
}
