/**
 * The resolution editor's view model and its pure transitions.
 *
 * State changes are plain functions (state, action) -> state so every
 * behavior is testable without a DOM; rendering consumes the state
 * read-only. Submitting is guarded by the tab locks: a locked production
 * can never reach the network layer.
 */

import { isTabEnabled } from "./locks.js";
import {
  Descriptor,
  FeedbackReport,
  FilledGliDraft,
  StatementDoc,
  canonicalJson,
  emptyDraft,
  filledGliDoc,
} from "./model.js";

export interface EditorState {
  statement: StatementDoc;
  activeTab: string;
  draft: FilledGliDraft;
  initBars: Map<string, string>;
  finalBars: Map<string, string>;
  variantText: string;
  codeBuffer: string;
  edited: Set<string>;
  lastReport: FeedbackReport | null;
  remainingAttempts: number | null; // null until the server has spoken
  mode: string | null; // Certificative | Formative, from the last response
  submitting: boolean;
}

export class LockedTabError extends Error {
  constructor(tab: string) {
    super(`tab ${tab} is locked: its prerequisite was never edited`);
  }
}

function defaultBars(descriptor: Descriptor): Map<string, string> {
  return new Map(descriptor.bars.map((bar) => [bar.id, ""]));
}

export function initialState(statement: StatementDoc): EditorState {
  const ordered = statement.flow.productions.slice().sort((a, b) => a.order - b.order);
  return {
    statement,
    activeTab: ordered[0].id,
    draft: emptyDraft(statement.gli),
    initBars: defaultBars(statement.gli),
    finalBars: defaultBars(statement.gli),
    variantText: "",
    codeBuffer: statement["code-template"],
    edited: new Set(),
    lastReport: null,
    remainingAttempts: null,
    mode: null,
    submitting: false,
  };
}

function withEdited(state: EditorState, productionId: string): EditorState {
  const edited = new Set(state.edited);
  edited.add(productionId);
  return { ...state, edited };
}

export function switchTab(state: EditorState, tab: string): EditorState {
  if (!isTabEnabled(state.statement.flow, tab, state.edited)) {
    return state; // a locked tab ignores the click
  }
  return { ...state, activeTab: tab };
}

/** Fill a red box with free text. Unparseable content is allowed: the
 * hint layer shows it, the server judges it. */
export function fillRedBox(state: EditorState, box: number, text: string): EditorState {
  const target = state.statement.gli.boxes.find((b) => b.number === box);
  if (!target || target.color !== "Red") {
    return state; // a label cannot be dropped into a red box and vice versa
  }
  const red = new Map(state.draft.red);
  red.set(box, text);
  return withEdited({ ...state, draft: { ...state.draft, red } }, "gli");
}

export function pickGreenLabel(state: EditorState, box: number, optionId: string): EditorState {
  const target = state.statement.gli.boxes.find((b) => b.number === box);
  if (!target || target.color !== "Green") {
    return state;
  }
  if (!state.statement["label-options"].some((o) => o.id === optionId)) {
    return state;
  }
  const green = new Map(state.draft.green);
  green.set(box, optionId);
  return withEdited({ ...state, draft: { ...state.draft, green } }, "gli");
}

export function positionBar(state: EditorState, bar: string, text: string): EditorState {
  if (!state.statement.gli.bars.some((b) => b.id === bar)) {
    return state;
  }
  const bars = new Map(state.draft.bars);
  bars.set(bar, text);
  return withEdited({ ...state, draft: { ...state.draft, bars } }, "gli");
}

function whichBarTab(state: EditorState, tab: string): "init" | "final" | null {
  const production = state.statement.flow.productions.find((p) => p.id === tab);
  if (production?.kind === "InitialRepresentation") return "init";
  if (production?.kind === "FinalRepresentation") return "final";
  return null;
}

/** Drag a bar on the initial/final tab. Dragging past the structure snaps
 * back (the previous position is kept). */
export function dragStateBar(
  state: EditorState,
  tab: string,
  bar: string,
  text: string,
  withinStructure = true,
): EditorState {
  const which = whichBarTab(state, tab);
  if (which === null || !state.statement.gli.bars.some((b) => b.id === bar)) {
    return state;
  }
  if (!withinStructure) {
    return state; // snap back
  }
  if (which === "init") {
    const bars = new Map(state.initBars);
    bars.set(bar, text);
    return withEdited({ ...state, initBars: bars }, tab);
  }
  const bars = new Map(state.finalBars);
  bars.set(bar, text);
  return withEdited({ ...state, finalBars: bars }, tab);
}

export function editVariant(state: EditorState, text: string): EditorState {
  const production = state.statement.flow.productions.find((p) => p.kind === "VariantFunction");
  const next = { ...state, variantText: text };
  return production ? withEdited(next, production.id) : next;
}

export function editCode(state: EditorState, tab: string, source: string): EditorState {
  if (!isTabEnabled(state.statement.flow, tab, state.edited)) {
    throw new LockedTabError(tab);
  }
  return withEdited({ ...state, codeBuffer: source }, tab);
}

/** The whole-solution payload map, keyed by production id. */
export function solutionPayloads(state: EditorState): Record<string, unknown> {
  const payloads: Record<string, unknown> = {};
  for (const production of state.statement.flow.productions) {
    if (production.kind === "Gli") {
      payloads[production.id] = filledGliDoc(state.draft);
    } else if (production.kind === "InitialRepresentation") {
      payloads[production.id] = sortedRecord(state.initBars);
    } else if (production.kind === "FinalRepresentation") {
      payloads[production.id] = sortedRecord(state.finalBars);
    } else if (production.kind === "VariantFunction") {
      payloads[production.id] = state.variantText;
    } else if (production.kind === "Code") {
      payloads[production.id] = state.codeBuffer;
    }
  }
  return payloads;
}

function sortedRecord(map: Map<string, string>): Record<string, string> {
  const out: Record<string, string> = {};
  for (const key of [...map.keys()].sort()) {
    out[key] = map.get(key)!;
  }
  return out;
}

/** Serialized drawing, byte-identical to what the server validates. */
export function serializedDrawing(state: EditorState): string {
  return canonicalJson(filledGliDoc(state.draft));
}

/** Lock discipline: submitting requires the code production's tab to be
 * unlocked AND edited; otherwise the call must never be issued. */
export function assertSubmittable(state: EditorState): void {
  const code = state.statement.flow.productions.find((p) => p.kind === "Code");
  if (!code) return;
  if (!isTabEnabled(state.statement.flow, code.id, state.edited)) {
    throw new LockedTabError(code.id);
  }
}

export function applySubmissionResult(
  state: EditorState,
  report: FeedbackReport,
  mode: string,
  remainingAttempts: number,
): EditorState {
  return {
    ...state,
    lastReport: report,
    mode,
    remainingAttempts: remainingAttempts >= 0 ? remainingAttempts : null,
    submitting: false,
  };
}

export function canSubmit(state: EditorState): boolean {
  if (state.submitting) return false;
  if (state.mode === "Certificative" && state.remainingAttempts === 0) return false;
  try {
    assertSubmittable(state);
  } catch {
    return false;
  }
  return true;
}
