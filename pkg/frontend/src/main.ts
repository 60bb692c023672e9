/**
 * Browser entry point: mount the editor for one statement, wire DOM events
 * to the pure state transitions, reconcile with server responses.
 */

import { ApiError, Client } from "./api.js";
import {
  EditorState,
  applySubmissionResult,
  assertSubmittable,
  canSubmit,
  dragStateBar,
  editCode,
  editVariant,
  fillRedBox,
  initialState,
  pickGreenLabel,
  positionBar,
  solutionPayloads,
  switchTab,
} from "./editor.js";
import {
  renderAttemptsCounter,
  renderDrawing,
  renderReport,
  renderSubmitButton,
  renderTabs,
} from "./render.js";

interface MountOptions {
  baseUrl: string;
  token: string;
  statementId: string;
}

export async function mount(root: HTMLElement, options: MountOptions): Promise<void> {
  const client = new Client(options.baseUrl, options.token);
  const statement = await client.getStatement(options.statementId);
  let state: EditorState = initialState(statement);

  function update(next: EditorState): void {
    state = next;
    render();
  }

  function render(): void {
    root.innerHTML = [
      `<h2>${statement.title}</h2>`,
      `<p class="prose">${statement.prose}</p>`,
      renderTabs(state),
      renderActivePane(),
      renderAttemptsCounter(state),
      renderSubmitButton(state),
      renderReport(state.lastReport),
    ].join("\n");
    wire();
  }

  function renderActivePane(): string {
    const production = statement.flow.productions.find((p) => p.id === state.activeTab);
    if (!production) return "";
    if (production.kind === "Gli") {
      return renderDrawing(state);
    }
    if (production.kind === "InitialRepresentation" || production.kind === "FinalRepresentation") {
      const bars = production.kind === "InitialRepresentation" ? state.initBars : state.finalBars;
      const rows = [...bars.keys()]
        .sort()
        .map(
          (bar) =>
            `<label>${bar} <input data-state-bar="${bar}" value="${bars.get(bar) ?? ""}"></label>`,
        )
        .join("");
      return `<div class="state-bars" data-pane="${production.id}">${rows}</div>`;
    }
    if (production.kind === "VariantFunction") {
      return `<label>work remaining <input id="variant" value="${state.variantText}"></label>`;
    }
    if (production.kind === "Code") {
      return (
        `<textarea id="code" rows="20" cols="80">${state.codeBuffer}</textarea>` +
        `<div><label>stdin <input id="stdin"></label>` +
        `<button id="run-playground">Compile &amp; run</button></div>` +
        `<pre id="playground-output"></pre>`
      );
    }
    return "";
  }

  function wire(): void {
    root.querySelectorAll<HTMLElement>("[data-tab]").forEach((el) => {
      el.addEventListener("click", () => update(switchTab(state, el.dataset.tab!)));
    });
    root.querySelectorAll<HTMLInputElement>("[data-box-input]").forEach((el) => {
      el.addEventListener("change", () =>
        update(fillRedBox(state, Number(el.dataset.boxInput), el.value)),
      );
    });
    root.querySelectorAll<HTMLSelectElement>("[data-box-select]").forEach((el) => {
      el.addEventListener("change", () =>
        update(pickGreenLabel(state, Number(el.dataset.boxSelect), el.value)),
      );
    });
    root.querySelectorAll<HTMLInputElement>("[data-bar-input]").forEach((el) => {
      el.addEventListener("change", () => update(positionBar(state, el.dataset.barInput!, el.value)));
    });
    root.querySelectorAll<HTMLInputElement>("[data-state-bar]").forEach((el) => {
      el.addEventListener("change", () =>
        update(dragStateBar(state, state.activeTab, el.dataset.stateBar!, el.value)),
      );
    });
    const variant = root.querySelector<HTMLInputElement>("#variant");
    variant?.addEventListener("change", () => update(editVariant(state, variant.value)));
    const code = root.querySelector<HTMLTextAreaElement>("#code");
    code?.addEventListener("change", () => update(editCode(state, state.activeTab, code.value)));

    root.querySelector("#run-playground")?.addEventListener("click", async () => {
      const stdin = root.querySelector<HTMLInputElement>("#stdin")?.value ?? "";
      const result = await client.playground(options.statementId, state.codeBuffer, stdin);
      const output = root.querySelector("#playground-output");
      if (output) {
        output.textContent = result.error
          ? `${result.error.code}: ${result.error.message}`
          : result.stdout ?? "";
      }
    });

    root.querySelector("#submit")?.addEventListener("click", async () => {
      if (!canSubmit(state)) return;
      assertSubmittable(state); // lock discipline, even if the DOM lied
      update({ ...state, submitting: true });
      try {
        const result = await client.submit(options.statementId, solutionPayloads(state));
        update(applySubmissionResult(state, result.report, result.mode, result.remainingAttempts));
      } catch (err) {
        update({ ...state, submitting: false });
        if (err instanceof ApiError && err.body.code === "QUOTA_EXCEEDED") {
          update({ ...state, remainingAttempts: 0, mode: "Certificative" });
          return;
        }
        throw err;
      }
    });
  }

  render();
}
