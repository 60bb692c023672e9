import { describe, expect, it } from "vitest";

import { AuthoringError, DescriptorComposer, buildStatementDoc } from "../src/authoring.js";
import { canonicalJson } from "../src/model.js";
import { fixtureText, goldenStatement } from "./helpers.js";

/** Rebuild the shipped product-range drawing with the composer; the
 * free-text fields come from the authoring form (here: the fixture). */
function composeGoldenDescriptor() {
  const composer = new DescriptorComposer("product-range-gli");
  composer
    .addElement("range", "range", "the integers given as input")
    .addElement("processed", "region", "already multiplied")
    .addElement("remaining", "region", "still to multiply");
  composer.placeBox("Red", "processed", { required: true });
  composer.placeBox("Green", "processed", { role: "achieved" });
  composer.placeBox("Red", "remaining");
  composer.placeBox("Green", "remaining");
  composer.placeBox("Red", "range", { required: true, role: "lower-bound" });
  composer.placeBox("Red", "range", { required: true, role: "upper-bound" });
  composer.placeBar("left", "range").placeBar("cursor", "range").placeBar("right", "range");
  return composer.build();
}

describe("statement authoring", () => {
  it("boxes are numbered automatically and contiguously", () => {
    const descriptor = composeGoldenDescriptor();
    expect(descriptor.boxes.map((b) => b.number)).toEqual([1, 2, 3, 4, 5, 6]);
    expect(descriptor.bars.map((b) => b.rank)).toEqual([0, 1, 2]);
  });

  it("the composed statement matches the served one byte for byte", () => {
    const reference = goldenStatement();
    const doc = buildStatementDoc({
      id: reference.id,
      title: reference.title,
      prose: reference.prose,
      flow: reference.flow,
      gli: composeGoldenDescriptor(),
      labelOptions: reference["label-options"],
      codeTemplate: reference["code-template"],
      testCases: reference["test-cases"].map((c) => ({
        stdin: c.stdin,
        expectedStdout: c["expected-stdout"],
      })),
      rubricBindings: reference["rubric-bindings"],
      opensAt: reference.window["opens-at"],
      closesAt: reference.window["closes-at"],
      weightPercent: reference["weight-percent"] as number,
      formativeOnly: reference["formative-only"],
    });
    expect(canonicalJson(doc)).toBe(fixtureText("golden-statement.json"));
  });

  it("a window that closes before it opens is blocked client-side", () => {
    const reference = goldenStatement();
    expect(() =>
      buildStatementDoc({
        id: "ch-x",
        title: "t",
        prose: "",
        flow: reference.flow,
        gli: composeGoldenDescriptor(),
        labelOptions: [],
        codeTemplate: "",
        testCases: [],
        rubricBindings: [],
        opensAt: "2022-09-30T18:00:00Z",
        closesAt: "2022-09-28T16:00:00Z",
        weightPercent: 2,
        formativeOnly: false,
      }),
    ).toThrow(AuthoringError);
  });

  it("duplicate placements are impossible", () => {
    const composer = new DescriptorComposer("d");
    composer.addElement("range", "range");
    expect(() => composer.addElement("range", "range")).toThrow(AuthoringError);
    composer.placeBar("left", "range");
    expect(() => composer.placeBar("left", "range")).toThrow(AuthoringError);
    expect(() => composer.placeBox("Red", "nowhere")).toThrow(AuthoringError);
  });

  it("a drawing without bars does not build", () => {
    const composer = new DescriptorComposer("d");
    composer.addElement("range", "range");
    composer.placeBox("Red", "range");
    expect(() => composer.build()).toThrow(AuthoringError);
  });
});
