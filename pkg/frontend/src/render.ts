/**
 * Pure rendering: (EditorState, last server responses) -> HTML strings.
 * No behavior lives here; main.ts wires events onto the produced markup.
 */

import { parseHint } from "./expression.js";
import { isTabEnabled } from "./locks.js";
import type { EditorState } from "./editor.js";
import { canSubmit } from "./editor.js";
import type { FeedbackReport } from "./model.js";

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderTabs(state: EditorState): string {
  const ordered = state.statement.flow.productions.slice().sort((a, b) => a.order - b.order);
  const items = ordered.map((p) => {
    const enabled = isTabEnabled(state.statement.flow, p.id, state.edited);
    const classes = [
      "tab",
      state.activeTab === p.id ? "active" : "",
      enabled ? "" : "locked",
    ]
      .filter(Boolean)
      .join(" ");
    return `<li class="${classes}" data-tab="${p.id}">${escapeHtml(p.id)}</li>`;
  });
  return `<ul class="tabs">${items.join("")}</ul>`;
}

export function renderDrawing(state: EditorState): string {
  const gli = state.statement.gli;
  const boxes = gli.boxes
    .map((box) => {
      if (box.color === "Red") {
        const text = state.draft.red.get(box.number) ?? "";
        const hint = parseHint(text);
        const hintHtml = hint.ok
          ? ""
          : `<span class="hint" data-offset="${hint.offset}">${escapeHtml(hint.reason)}</span>`;
        return (
          `<div class="box red" data-box="${box.number}">` +
          `<input value="${escapeHtml(text)}" data-box-input="${box.number}">${hintHtml}</div>`
        );
      }
      const chosen = state.draft.green.get(box.number) ?? "";
      const options = state.statement["label-options"]
        .map(
          (o) =>
            `<option value="${o.id}"${o.id === chosen ? " selected" : ""}>${escapeHtml(o.text)}</option>`,
        )
        .join("");
      return (
        `<div class="box green" data-box="${box.number}">` +
        `<select data-box-select="${box.number}"><option value=""></option>${options}</select></div>`
      );
    })
    .join("");
  const bars = gli.bars
    .map((bar) => {
      const text = state.draft.bars.get(bar.id) ?? "";
      return (
        `<div class="bar" data-bar="${bar.id}" data-rank="${bar.rank}">` +
        `<input value="${escapeHtml(text)}" data-bar-input="${bar.id}"></div>`
      );
    })
    .join("");
  return `<div class="drawing">${boxes}${bars}</div>`;
}

export function renderAttemptsCounter(state: EditorState): string {
  if (state.mode === "Formative") {
    return '<span class="badge formative">training run, not counted</span>';
  }
  if (state.remainingAttempts === null) {
    return '<span class="badge">up to 3 graded submissions</span>';
  }
  return `<span class="badge">${state.remainingAttempts} graded submission(s) left</span>`;
}

export function renderSubmitButton(state: EditorState): string {
  const disabled = canSubmit(state) ? "" : " disabled";
  return `<button id="submit"${disabled}>Submit whole solution</button>`;
}

export function renderReport(report: FeedbackReport | null): string {
  if (report === null) {
    return '<section class="report empty">no feedback yet</section>';
  }
  const blocks = report["per-production"]
    .map((production) => {
      const comments = production.comments
        .map((c) => {
          const feedforward = c.feedforward
            ? ` <a class="feedforward" href="#${encodeURIComponent(c.feedforward)}">${escapeHtml(c.feedforward)}</a>`
            : "";
          const detail = c.detail ? ` <span class="detail">${escapeHtml(c.detail)}</span>` : "";
          return `<li class="comment ${c.nature.toLowerCase()}"><code>${c.code}</code> ${escapeHtml(c.message)}${feedforward}${detail}</li>`;
        })
        .join("");
      return (
        `<div class="production" data-production="${production["production-id"]}">` +
        `<h4>${production["production-id"]} — ${production["points-earned"]}/${production["points-possible"]}</h4>` +
        `<ul>${comments || '<li class="clean">nothing to report</li>'}</ul></div>`
      );
    })
    .join("");
  const percent = (report["grade-fraction"] * 100).toFixed(0);
  return (
    `<section class="report"><h3>Grade: ${report["total-earned"]}/${report["total-possible"]} (${percent}%)</h3>` +
    `${blocks}</section>`
  );
}
