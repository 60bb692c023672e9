/**
 * Supervisor mode: compose a blank drawing with the same editor and wrap it
 * into a statement document the encode endpoint accepts.
 *
 * Boxes are numbered automatically in placement order, so duplicate numbers
 * cannot happen; the window is checked client-side before anything is sent.
 */

import type {
  Descriptor,
  DescriptorBar,
  DescriptorBox,
  DescriptorElement,
  Flow,
  LabelOption,
  StatementDoc,
} from "./model.js";

export class AuthoringError extends Error {}

export class DescriptorComposer {
  private elements: DescriptorElement[] = [];
  private boxes: DescriptorBox[] = [];
  private bars: DescriptorBar[] = [];

  constructor(private id: string) {}

  addElement(id: string, kind: string, label = ""): this {
    if (this.elements.some((e) => e.id === id)) {
      throw new AuthoringError(`element ${id} already placed`);
    }
    this.elements.push({ id, kind, label });
    return this;
  }

  /** Boxes take the next free number automatically. */
  placeBox(color: "Red" | "Green", anchor: string, options: { required?: boolean; role?: string | null } = {}): number {
    if (!this.elements.some((e) => e.id === anchor)) {
      throw new AuthoringError(`no element ${anchor} to anchor the box to`);
    }
    const number = this.boxes.length + 1;
    this.boxes.push({
      number,
      color,
      anchor,
      required: options.required ?? false,
      role: options.role ?? null,
    });
    return number;
  }

  placeBar(id: string, structure: string): this {
    if (!this.elements.some((e) => e.id === structure)) {
      throw new AuthoringError(`no structure ${structure} for bar ${id}`);
    }
    if (this.bars.some((b) => b.id === id)) {
      throw new AuthoringError(`bar ${id} already placed`);
    }
    const rank = this.bars.filter((b) => b.structure === structure).length;
    this.bars.push({ id, structure, rank });
    return this;
  }

  build(): Descriptor {
    if (this.bars.length === 0) {
      throw new AuthoringError("a drawing needs at least one movable bar");
    }
    return { id: this.id, elements: this.elements, boxes: this.boxes, bars: this.bars };
  }
}

export interface StatementDraft {
  id: string;
  title: string;
  prose: string;
  flow: Flow;
  gli: Descriptor;
  labelOptions: LabelOption[];
  codeTemplate: string;
  testCases: { stdin: string; expectedStdout: string }[];
  rubricBindings: { code: string; predicate: string; params: Record<string, unknown> }[];
  opensAt: string; // ISO instant
  closesAt: string;
  weightPercent: number;
  formativeOnly: boolean;
}

export function buildStatementDoc(draft: StatementDraft): StatementDoc {
  if (Date.parse(draft.opensAt) >= Date.parse(draft.closesAt)) {
    throw new AuthoringError("the window must close after it opens");
  }
  if ((draft.weightPercent === 0) !== draft.formativeOnly) {
    throw new AuthoringError("weight 0 and formative-only go together");
  }
  return {
    id: draft.id,
    title: draft.title,
    prose: draft.prose,
    flow: draft.flow,
    gli: draft.gli,
    "label-options": draft.labelOptions,
    "code-template": draft.codeTemplate,
    "test-cases": draft.testCases.map((c) => ({ stdin: c.stdin, "expected-stdout": c.expectedStdout })),
    "rubric-bindings": draft.rubricBindings,
    window: { "opens-at": draft.opensAt, "closes-at": draft.closesAt },
    "weight-percent": draft.weightPercent,
    "formative-only": draft.formativeOnly,
  };
}
