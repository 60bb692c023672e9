import { describe, expect, it } from "vitest";

import { parseHint } from "../src/expression.js";

describe("client-side expression hints", () => {
  it("accepts the course staples", () => {
    for (const text of ["p", "lo", "hi - i + 1", "i <= hi", "!(i > hi)", "(a + b) * 2"]) {
      expect(parseHint(text)).toEqual({ ok: true, blank: false });
    }
  });

  it("blank content is fine (it is a value, not an error)", () => {
    expect(parseHint("")).toEqual({ ok: true, blank: true });
    expect(parseHint("   ")).toEqual({ ok: true, blank: true });
  });

  it("reports the offset of an unknown operator", () => {
    const hint = parseHint("2 ** 3");
    expect(hint.ok).toBe(false);
    if (!hint.ok) {
      expect(hint.offset).toBe(2);
    }
  });

  it("reports trailing garbage", () => {
    const hint = parseHint("p +");
    expect(hint.ok).toBe(false);
    if (!hint.ok) {
      expect(hint.reason).toContain("expected an operand");
    }
  });
});
