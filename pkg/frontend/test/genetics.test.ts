import { describe, expect, it } from "vitest";

import {
  carrierProbability,
  evidenceDocument,
  mutantDose,
  stateLabels,
} from "../src/genetics.js";

describe("state labels", () => {
  it("mirror the service spaces, fully mutant first", () => {
    expect(stateLabels("AD", "female")).toEqual(["AA", "Aa", "aa"]);
    expect(stateLabels("AR", "male")).toEqual(["aa", "Aa", "AA"]);
    expect(stateLabels("XL", "female")).toEqual(["xx", "Xx", "XX"]);
    expect(stateLabels("XL", "male")).toEqual(["xY", "XY"]);
    expect(stateLabels("XL", "unknown")).toEqual(["xx", "Xx", "XX", "xY", "XY"]);
  });

  it("autosomal spaces ignore sex", () => {
    expect(stateLabels("AD", "unknown")).toEqual(stateLabels("AD", "male"));
  });
});

describe("mutant dose", () => {
  it("counts the pattern's disease allele", () => {
    expect(mutantDose("AD", "AA")).toBe(2);
    expect(mutantDose("AD", "aa")).toBe(0);
    expect(mutantDose("AR", "AA")).toBe(0);
    expect(mutantDose("AR", "aa")).toBe(2);
    expect(mutantDose("XL", "xY")).toBe(1);
    expect(mutantDose("XL", "XY")).toBe(0);
    expect(mutantDose("XL", "Xx")).toBe(1);
  });
});

describe("carrier probability", () => {
  it("sums exactly the service-provided masses with dose >= 1", () => {
    const posterior = { xx: 0.125, Xx: 0.25, XX: 0.625 };
    expect(carrierProbability("XL", posterior)).toBeCloseTo(0.375, 12);
  });

  it("never invents numbers: empty posterior gives zero", () => {
    expect(carrierProbability("AD", {})).toBe(0);
  });

  it("a forced-carrier male shows full intensity", () => {
    expect(carrierProbability("XL", { xY: 1.0, XY: 0.0 })).toBe(1.0);
  });
});

describe("evidence document", () => {
  it("serializes selections sorted, matching the CLI evidence format", () => {
    const doc = evidenceDocument({ b: ["xY"], a: ["Xx", "xx"] });
    expect(JSON.stringify(doc)).toBe('{"a":["Xx","xx"],"b":["xY"]}');
  });
});
