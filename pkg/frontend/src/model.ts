/**
 * Wire types and the canonical JSON encoding shared with the server.
 *
 * The client never grades; it only assembles payloads whose serialized form
 * is byte-for-byte what the server validates. Canonical rules: compact
 * separators, box maps keyed by the decimal box number as a string in
 * ascending order, bar maps in ascending id order.
 */

export type BoxColor = "Red" | "Green";

export interface DescriptorBox {
  number: number;
  color: BoxColor;
  anchor: string;
  required: boolean;
  role: string | null;
}

export interface DescriptorBar {
  id: string;
  structure: string;
  rank: number;
}

export interface DescriptorElement {
  id: string;
  kind: string;
  label: string;
}

export interface Descriptor {
  id: string;
  elements: DescriptorElement[];
  boxes: DescriptorBox[];
  bars: DescriptorBar[];
}

export interface Production {
  id: string;
  kind: string;
  phase: string;
  order: number;
  weight: number;
}

export interface Flow {
  productions: Production[];
  locks: [string, string][]; // [blocked, prerequisite]
}

export interface LabelOption {
  id: string;
  text: string;
  distractor: boolean;
}

export interface StatementDoc {
  id: string;
  title: string;
  prose: string;
  flow: Flow;
  gli: Descriptor;
  "label-options": LabelOption[];
  "code-template": string;
  "test-cases": { stdin: string; "expected-stdout": string }[];
  "rubric-bindings": { code: string; predicate: string; params: Record<string, unknown> }[];
  window: { "opens-at": string; "closes-at": string };
  "weight-percent": number | string;
  "formative-only": boolean;
}

/** A student's drawing under construction. Content is source text; the
 * empty string is the blank box. */
export interface FilledGliDraft {
  descriptorRef: string;
  red: Map<number, string>;
  green: Map<number, string>;
  bars: Map<string, string>;
}

export interface FeedbackComment {
  code: string;
  nature: string;
  message: string;
  feedforward?: string;
  detail?: string;
}

export interface ProductionFeedback {
  "production-id": string;
  comments: FeedbackComment[];
  "points-earned": number;
  "points-possible": number;
}

export interface FeedbackReport {
  "per-production": ProductionFeedback[];
  "total-earned": number;
  "total-possible": number;
  "grade-fraction": number;
}

export function emptyDraft(descriptor: Descriptor): FilledGliDraft {
  return {
    descriptorRef: descriptor.id,
    red: new Map(),
    green: new Map(),
    bars: new Map(),
  };
}

function sortedBoxEntries(map: Map<number, string>): Record<string, string> {
  const out: Record<string, string> = {};
  for (const key of [...map.keys()].sort((a, b) => a - b)) {
    out[String(key)] = map.get(key)!;
  }
  return out;
}

function sortedBarEntries(map: Map<string, string>): Record<string, string> {
  const out: Record<string, string> = {};
  for (const key of [...map.keys()].sort()) {
    out[key] = map.get(key)!;
  }
  return out;
}

export function filledGliDoc(draft: FilledGliDraft): object {
  return {
    "descriptor-ref": draft.descriptorRef,
    "red-assignments": sortedBoxEntries(draft.red),
    "green-assignments": sortedBoxEntries(draft.green),
    "bar-positions": sortedBarEntries(draft.bars),
  };
}

/** Compact JSON, identical bytes to the server's canonical form. */
export function canonicalJson(doc: unknown): string {
  return JSON.stringify(doc);
}

export function draftFromDoc(doc: {
  "descriptor-ref": string;
  "red-assignments"?: Record<string, string>;
  "green-assignments"?: Record<string, string>;
  "bar-positions"?: Record<string, string>;
}): FilledGliDraft {
  const draft: FilledGliDraft = {
    descriptorRef: doc["descriptor-ref"],
    red: new Map(),
    green: new Map(),
    bars: new Map(),
  };
  for (const [k, v] of Object.entries(doc["red-assignments"] ?? {})) {
    draft.red.set(Number(k), v);
  }
  for (const [k, v] of Object.entries(doc["green-assignments"] ?? {})) {
    draft.green.set(Number(k), v);
  }
  for (const [k, v] of Object.entries(doc["bar-positions"] ?? {})) {
    draft.bars.set(k, v);
  }
  return draft;
}
