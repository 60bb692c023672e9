import { describe, expect, it } from "vitest";

import {
  fillRedBox,
  initialState,
  pickGreenLabel,
  positionBar,
  serializedDrawing,
  solutionPayloads,
} from "../src/editor.js";
import { canonicalJson, draftFromDoc, filledGliDoc } from "../src/model.js";
import { goldenGliText, goldenStatement } from "./helpers.js";

function buildGoldenThroughEditor() {
  let state = initialState(goldenStatement());
  state = fillRedBox(state, 1, "p");
  state = fillRedBox(state, 3, "");
  state = fillRedBox(state, 5, "lo");
  state = fillRedBox(state, 6, "hi");
  state = pickGreenLabel(state, 2, "opt-product");
  state = pickGreenLabel(state, 4, "opt-remaining");
  state = positionBar(state, "left", "lo");
  state = positionBar(state, "cursor", "i");
  state = positionBar(state, "right", "hi");
  return state;
}

describe("drawing serialization", () => {
  it("golden drawing built interactively serializes to the golden fixture bytes", () => {
    const state = buildGoldenThroughEditor();
    expect(serializedDrawing(state)).toBe(goldenGliText());
  });

  it("blank red boxes serialize as the empty string", () => {
    const state = buildGoldenThroughEditor();
    const doc = JSON.parse(serializedDrawing(state)) as {
      "red-assignments": Record<string, string>;
    };
    expect(doc["red-assignments"]["3"]).toBe("");
  });

  it("editor -> JSON -> editor reproduces the identical view model", () => {
    const state = buildGoldenThroughEditor();
    const doc = filledGliDoc(state.draft) as Parameters<typeof draftFromDoc>[0];
    const rebuilt = draftFromDoc(JSON.parse(canonicalJson(doc)));
    expect(rebuilt.descriptorRef).toBe(state.draft.descriptorRef);
    expect([...rebuilt.red.entries()].sort()).toEqual([...state.draft.red.entries()].sort());
    expect([...rebuilt.green.entries()].sort()).toEqual([...state.draft.green.entries()].sort());
    expect([...rebuilt.bars.entries()].sort()).toEqual([...state.draft.bars.entries()].sort());
  });

  it("whole-solution payloads carry every production", () => {
    const statement = goldenStatement();
    const payloads = solutionPayloads(buildGoldenThroughEditor());
    expect(Object.keys(payloads).sort()).toEqual(
      statement.flow.productions.map((p) => p.id).sort(),
    );
    expect(typeof payloads["code"]).toBe("string");
    expect(payloads["init"]).toEqual({ cursor: "", left: "", right: "" });
  });
});
