import { describe, expect, it } from "vitest";

import {
  ALL_KINDS,
  authorConstraint,
  canAuthor,
  describeConstraint,
  SelectionError,
  validateConstraintDoc,
} from "../src/constraints.js";
import type { ConstraintDoc, ConstraintKind } from "../src/types.js";

const PAIR = { elements: [2, 5] };
const SINGLE_WITH_REGION = { elements: [1], region: "top" as const };
const NOTHING = { elements: [] };

describe("authorConstraint", () => {
  it("maps a two-element selection to a relational document", () => {
    expect(authorConstraint(PAIR, "loc-above")).toEqual({
      kind: "loc-above",
      subject: 2,
      object: 5,
    });
  });

  it("maps element plus region to a canvas document", () => {
    expect(authorConstraint(SINGLE_WITH_REGION, "canvas-region")).toEqual({
      kind: "canvas-region",
      subject: 1,
      region: "top",
    });
  });

  it("maps an empty selection to global documents", () => {
    expect(authorConstraint(NOTHING, "alignment")).toEqual({ kind: "alignment" });
    expect(authorConstraint(NOTHING, "non-overlap")).toEqual({ kind: "non-overlap" });
  });

  it("rejects a single element for a size relation", () => {
    expect(canAuthor({ elements: [1] }, "size-larger")).toBe(false);
    expect(() => authorConstraint({ elements: [1] }, "size-larger")).toThrow(SelectionError);
  });

  it("rejects a pair selecting the same element twice", () => {
    expect(canAuthor({ elements: [3, 3] }, "loc-left")).toBe(false);
  });

  it("rejects region selections for relational kinds", () => {
    expect(canAuthor({ elements: [0, 1], region: "top" }, "loc-above")).toBe(false);
  });

  it("produces schema-exact keys with no extras", () => {
    const doc = authorConstraint(PAIR, "size-equal");
    expect(Object.keys(doc).sort()).toEqual(["kind", "object", "subject"]);
    const canvas = authorConstraint(SINGLE_WITH_REGION, "canvas-region");
    expect(Object.keys(canvas).sort()).toEqual(["kind", "region", "subject"]);
    const global = authorConstraint(NOTHING, "alignment");
    expect(Object.keys(global)).toEqual(["kind"]);
  });

  it("authors every kind from a matching selection", () => {
    for (const kind of ALL_KINDS) {
      const selection =
        kind === "alignment" || kind === "non-overlap"
          ? NOTHING
          : kind === "canvas-region"
            ? SINGLE_WITH_REGION
            : PAIR;
      const doc = authorConstraint(selection, kind as ConstraintKind);
      expect(doc.kind).toBe(kind);
      expect(validateConstraintDoc(doc, 6)).toBeNull();
    }
  });
});

describe("validateConstraintDoc", () => {
  it("flags out-of-range indices", () => {
    const doc: ConstraintDoc = { kind: "loc-above", subject: 0, object: 9 };
    expect(validateConstraintDoc(doc, 3)).toMatch(/out of range/);
  });

  it("flags indices on global kinds", () => {
    const doc = { kind: "alignment", subject: 0 } as ConstraintDoc;
    expect(validateConstraintDoc(doc, 3)).toMatch(/no indices/);
  });

  it("flags bad regions", () => {
    const doc = { kind: "canvas-region", subject: 0, region: "left" } as unknown as ConstraintDoc;
    expect(validateConstraintDoc(doc, 3)).toMatch(/bad region/);
  });
});

describe("describeConstraint", () => {
  it("reads naturally for each family", () => {
    expect(describeConstraint({ kind: "loc-above", subject: 2, object: 5 })).toBe(
      "element 2 above 5",
    );
    expect(describeConstraint({ kind: "loc-left", subject: 0, object: 1 })).toBe(
      "element 0 left of 1",
    );
    expect(describeConstraint({ kind: "canvas-region", subject: 1, region: "top" })).toBe(
      "element 1 in the top band",
    );
    expect(describeConstraint({ kind: "non-overlap" })).toBe("no overlapping elements");
  });
});
