/** Thin fetch client for the inference service.
 *
 * The UI never computes probabilities itself: every displayed number comes
 * out of these calls verbatim.
 */

import type {
  EvidenceMap,
  PatternName,
  PedigreeDoc,
  PredictResponse,
  SmoothResponse,
  Violation,
} from "./types.js";

export interface ApiOptions {
  baseUrl?: string;
  samples?: number;
  strength?: number;
  threshold?: number;
}

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
    readonly violations: Violation[] = [],
  ) {
    super(message);
  }
}

async function post<T>(url: string, body: unknown): Promise<T> {
  const response = await fetch(url, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
  const text = await response.text();
  let payload: unknown = null;
  try {
    payload = JSON.parse(text);
  } catch {
    throw new ApiError(`non-JSON response from ${url}`, response.status);
  }
  if (!response.ok) {
    const violations =
      (payload as { violations?: Violation[] }).violations ?? [];
    const detail =
      violations.map((v) => v.message).join("; ") ||
      (payload as { error?: string }).error ||
      `HTTP ${response.status}`;
    throw new ApiError(detail, response.status, violations);
  }
  return payload as T;
}

export class Client {
  readonly baseUrl: string;
  readonly samples: number;
  readonly strength: number;
  readonly threshold: number;

  constructor(options: ApiOptions = {}) {
    this.baseUrl = options.baseUrl ?? "http://127.0.0.1:8000";
    this.samples = options.samples ?? 100;
    this.strength = options.strength ?? 1_000_000;
    this.threshold = options.threshold ?? 0.8;
  }

  async health(): Promise<boolean> {
    try {
      const r = await fetch(this.baseUrl + "/api/health");
      return r.ok;
    } catch {
      return false;
    }
  }

  validate(pedigree: PedigreeDoc): Promise<{ violations: Violation[] }> {
    return post(this.baseUrl + "/api/validate", { pedigree });
  }

  smooth(
    pedigree: PedigreeDoc,
    pattern: PatternName,
    evidence: EvidenceMap,
    seed: number,
  ): Promise<SmoothResponse> {
    return post(this.baseUrl + "/api/smooth", {
      pedigree,
      pattern,
      evidence: Object.keys(evidence).length ? evidence : undefined,
      samples: 1,
      strength: this.strength,
      seed,
    });
  }

  predict(
    pedigree: PedigreeDoc,
    evidence: EvidenceMap,
    evidencePattern: PatternName,
    seed: number,
  ): Promise<PredictResponse> {
    return post(this.baseUrl + "/api/predict", {
      pedigree,
      evidence: Object.keys(evidence).length ? evidence : undefined,
      evidence_pattern: Object.keys(evidence).length
        ? evidencePattern
        : undefined,
      samples: this.samples,
      strength: this.strength,
      threshold: this.threshold,
      seed,
    });
  }
}
