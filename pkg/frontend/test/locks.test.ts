import { describe, expect, it } from "vitest";

import {
  LockedTabError,
  assertSubmittable,
  canSubmit,
  editCode,
  fillRedBox,
  initialState,
  switchTab,
} from "../src/editor.js";
import { enabledTabs, isTabEnabled } from "../src/locks.js";
import { goldenStatement } from "./helpers.js";

describe("tab locks", () => {
  it("only the drawing tab is enabled before anything is edited", () => {
    const statement = goldenStatement();
    expect(enabledTabs(statement.flow, new Set())).toEqual(["gli"]);
  });

  it("editing the drawing unlocks the downstream tabs", () => {
    let state = initialState(goldenStatement());
    expect(isTabEnabled(state.statement.flow, "code", state.edited)).toBe(false);
    state = fillRedBox(state, 1, "p");
    expect(enabledTabs(state.statement.flow, state.edited)).toEqual([
      "gli",
      "init",
      "final",
      "variant",
      "code",
    ]);
  });

  it("switching to a locked tab is ignored", () => {
    const state = initialState(goldenStatement());
    expect(switchTab(state, "code").activeTab).toBe("gli");
  });

  it("editing code on a locked tab throws", () => {
    const state = initialState(goldenStatement());
    expect(() => editCode(state, "code", "int main(void) {}")).toThrow(LockedTabError);
  });

  it("no submit call can be issued while the code tab is locked", () => {
    const state = initialState(goldenStatement());
    expect(canSubmit(state)).toBe(false);
    expect(() => assertSubmittable(state)).toThrow(LockedTabError);
    const unlocked = fillRedBox(state, 1, "p");
    expect(() => assertSubmittable(unlocked)).not.toThrow();
    expect(canSubmit(unlocked)).toBe(true);
  });
});
