/** Shared shapes mirroring the inference service's JSON wire formats. */

export type Sex = "female" | "male" | "unknown";
export type PhenotypeValue = "affected" | "unaffected" | "unobserved";
export type PatternName = "AD" | "AR" | "XL";

export const PATTERNS: PatternName[] = ["AD", "AR", "XL"];

export interface PersonDoc {
  id: string;
  sex: Sex;
  phenotype: PhenotypeValue;
}

export interface UnionDoc {
  id: string;
  mother: string;
  father: string;
  children: string[];
}

export interface PedigreeDoc {
  persons: PersonDoc[];
  unions: UnionDoc[];
}

export interface Violation {
  rule: string;
  ids: string[];
  message: string;
  severity: "error" | "warning";
}

/** The service serializes -infinity as the string "-inf". */
export type WireNumber = number | "-inf" | "inf" | "nan";

export interface SmoothResponse {
  log_marginal: WireNumber;
  posteriors: Record<string, Record<string, number>>;
  audit: { anchor_spread: number; fvs: string[] };
  parent_conditionals?: Record<string, unknown>;
}

export interface PredictResponse {
  log_marginals: Record<PatternName, WireNumber>;
  posterior: Record<PatternName, number> | null;
  predicted: PatternName | null;
  confident: boolean;
  samples: number;
  seed: number;
  error?: string;
}

/** Evidence selections: person id -> allowed state labels (non-empty). */
export type EvidenceMap = Record<string, string[]>;

export function fromWire(value: WireNumber): number {
  if (value === "-inf") return -Infinity;
  if (value === "inf") return Infinity;
  if (value === "nan") return NaN;
  return value;
}

export function isImpossible(value: WireNumber): boolean {
  return value === "-inf";
}
