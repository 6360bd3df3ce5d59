import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import {
  RequestCoordinator,
  applyFailure,
  applyResponses,
  clearEvidence,
  initialState,
  toggleEvidence,
  withPattern,
  withPedigree,
} from "../src/state.js";
import type {
  PedigreeDoc,
  PredictResponse,
  SmoothResponse,
} from "../src/types.js";

const DOC: PedigreeDoc = {
  persons: [
    { id: "mom", sex: "female", phenotype: "unaffected" },
    { id: "dad", sex: "male", phenotype: "unaffected" },
    { id: "son", sex: "male", phenotype: "unobserved" },
  ],
  unions: [{ id: "u", mother: "mom", father: "dad", children: ["son"] }],
};

const SMOOTH_OK: SmoothResponse = {
  log_marginal: -1.5,
  posteriors: { son: { xY: 0.25, XY: 0.75 } },
  audit: { anchor_spread: 1e-15, fvs: [] },
};

const PREDICT_OK: PredictResponse = {
  log_marginals: { AD: -3.0, AR: -4.0, XL: -2.0 },
  posterior: { AD: 0.2, AR: 0.1, XL: 0.7 },
  predicted: "XL",
  confident: false,
  samples: 100,
  seed: 0,
};

function loaded() {
  return withPedigree(initialState(), DOC);
}

describe("evidence selections", () => {
  it("toggle adds then removes a label", () => {
    let s = loaded();
    s = toggleEvidence(s, "son", "xY");
    expect(s.evidence).toEqual({ son: ["xY"] });
    expect(s.stale).toBe(true);
    s = toggleEvidence(s, "son", "xY");
    expect(s.evidence).toEqual({});
  });

  it("selections stay sorted and per-person", () => {
    let s = loaded();
    s = toggleEvidence(s, "son", "XY");
    s = toggleEvidence(s, "son", "xY");
    expect(s.evidence.son).toEqual(["XY", "xY"]);
  });

  it("rejects labels invalid for the person's sex and pattern", () => {
    expect(() => toggleEvidence(loaded(), "son", "Xx")).toThrow(/not a state/);
  });

  it("pattern switch clears selections (labels are per pattern)", () => {
    let s = toggleEvidence(loaded(), "son", "xY");
    s = withPattern(s, "AR");
    expect(s.evidence).toEqual({});
    expect(s.pattern).toBe("AR");
  });

  it("clearEvidence restores the baseline request state", () => {
    let s = toggleEvidence(loaded(), "son", "xY");
    s = clearEvidence(s);
    expect(s.evidence).toEqual({});
    expect(s.stale).toBe(true);
  });
});

describe("responses", () => {
  it("stores service numbers verbatim and clears staleness", () => {
    const s = applyResponses(loaded(), SMOOTH_OK, PREDICT_OK);
    expect(s.smooth?.posteriors.son.xY).toBe(0.25);
    expect(s.prediction?.posterior?.XL).toBe(0.7);
    expect(s.stale).toBe(false);
    expect(s.banner).toBeNull();
  });

  it("the -inf sentinel raises the impossible banner", () => {
    const impossible: SmoothResponse = {
      log_marginal: "-inf",
      posteriors: {},
      audit: { anchor_spread: 0, fvs: [] },
    };
    const s = applyResponses(loaded(), impossible, PREDICT_OK);
    expect(s.banner).toMatch(/impossible under XL/);
  });

  it("an all-pattern impossibility gets its own banner", () => {
    const failed: PredictResponse = {
      log_marginals: { AD: "-inf", AR: "-inf", XL: "-inf" },
      posterior: null,
      predicted: null,
      confident: false,
      samples: 100,
      seed: 0,
      error: "impossible-evidence",
    };
    const s = applyResponses(loaded(), SMOOTH_OK, failed);
    expect(s.banner).toMatch(/every pattern/);
  });

  it("failures keep selections for retry", () => {
    const s = applyFailure(toggleEvidence(loaded(), "son", "xY"), "boom");
    expect(s.error).toBe("boom");
    expect(s.evidence).toEqual({ son: ["xY"] });
  });
});

describe("request coordinator", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("debounces rapid toggles into one launch", () => {
    const launches: number[] = [];
    const c = new RequestCoordinator((seq) => launches.push(seq), 250);
    c.request();
    vi.advanceTimersByTime(100);
    c.request();
    vi.advanceTimersByTime(100);
    c.request();
    expect(launches).toEqual([]);
    vi.advanceTimersByTime(250);
    expect(launches).toEqual([1]);
  });

  it("keeps at most one outstanding pair and refires after settle", () => {
    const launches: number[] = [];
    const c = new RequestCoordinator((seq) => launches.push(seq), 0);
    c.request();
    vi.advanceTimersByTime(0);
    expect(c.outstanding).toBe(1);
    c.request(); // arrives while 1 is in flight
    vi.advanceTimersByTime(0);
    expect(launches).toEqual([1]);
    expect(c.settle(1)).toBe(true);
    expect(launches).toEqual([1, 2]); // coalesced follow-up
    expect(c.settle(2)).toBe(true);
  });

  it("discards stale responses by sequence number", () => {
    const c = new RequestCoordinator(() => undefined, 0);
    c.request();
    vi.advanceTimersByTime(0);
    c.settle(1);
    c.request();
    vi.advanceTimersByTime(0);
    expect(c.settle(2)).toBe(true);
    // a late duplicate of an older pair must not be applied
    expect(c.settle(1)).toBe(false);
  });
});
