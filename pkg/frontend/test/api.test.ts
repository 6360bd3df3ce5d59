import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiError, Client } from "../src/api.js";
import { fromWire, isImpossible } from "../src/types.js";
import type { PedigreeDoc } from "../src/types.js";

const DOC: PedigreeDoc = {
  persons: [{ id: "solo", sex: "female", phenotype: "unaffected" }],
  unions: [],
};

function mockFetch(status: number, payload: unknown) {
  const calls: { url: string; body: unknown }[] = [];
  vi.stubGlobal("fetch", async (url: string, init?: RequestInit) => {
    calls.push({ url, body: init?.body ? JSON.parse(init.body as string) : null });
    return new Response(JSON.stringify(payload), { status });
  });
  return calls;
}

afterEach(() => vi.unstubAllGlobals());

describe("wire numbers", () => {
  it("decodes the service sentinels", () => {
    expect(fromWire("-inf")).toBe(-Infinity);
    expect(fromWire(-1.5)).toBe(-1.5);
    expect(isImpossible("-inf")).toBe(true);
    expect(isImpossible(-900)).toBe(false);
  });
});

describe("client payloads", () => {
  it("smooth sends pattern, seed and the evidence map", async () => {
    const calls = mockFetch(200, { log_marginal: 0, posteriors: {}, audit: {} });
    const client = new Client({ baseUrl: "http://test" });
    await client.smooth(DOC, "XL", { solo: ["XX"] }, 9);
    expect(calls[0].url).toBe("http://test/api/smooth");
    expect(calls[0].body).toMatchObject({
      pattern: "XL",
      seed: 9,
      samples: 1,
      evidence: { solo: ["XX"] },
    });
  });

  it("predict names the evidence's home pattern for dose translation", async () => {
    const calls = mockFetch(200, {});
    const client = new Client({ baseUrl: "http://test", samples: 50 });
    await client.predict(DOC, { solo: ["XX"] }, "XL", 4);
    expect(calls[0].body).toMatchObject({
      evidence_pattern: "XL",
      samples: 50,
      seed: 4,
    });
  });

  it("empty evidence is omitted entirely", async () => {
    const calls = mockFetch(200, {});
    const client = new Client({ baseUrl: "http://test" });
    await client.predict(DOC, {}, "AD", 0);
    expect("evidence" in (calls[0].body as object)).toBe(false);
    expect("evidence_pattern" in (calls[0].body as object)).toBe(false);
  });

  it("maps 422 violations into ApiError", async () => {
    mockFetch(422, {
      violations: [{ rule: "directed-cycle", ids: [], message: "cycle at a",
                     severity: "error" }],
    });
    const client = new Client({ baseUrl: "http://test" });
    await expect(client.validate(DOC)).rejects.toThrowError(ApiError);
    await expect(client.validate(DOC)).rejects.toThrow(/cycle at a/);
  });

  it("health survives a dead service", async () => {
    vi.stubGlobal("fetch", async () => {
      throw new Error("refused");
    });
    const client = new Client({ baseUrl: "http://test" });
    expect(await client.health()).toBe(false);
  });
});
