/** Presentation-side genotype metadata.
 *
 * State labels mirror the service's spaces exactly (index 0 = fully
 * mutant). The UI uses them only to offer evidence toggles and to
 * aggregate service-provided posteriors into a displayed carrier
 * probability; it never computes probabilities of its own.
 */

import type { PatternName, Sex } from "./types.js";

const MUTANT_CHAR: Record<PatternName, string> = { AD: "A", AR: "a", XL: "x" };

export function stateLabels(pattern: PatternName, sex: Sex): string[] {
  if (pattern === "AD") return ["AA", "Aa", "aa"];
  if (pattern === "AR") return ["aa", "Aa", "AA"];
  if (sex === "female") return ["xx", "Xx", "XX"];
  if (sex === "male") return ["xY", "XY"];
  return ["xx", "Xx", "XX", "xY", "XY"];
}

/** Number of disease alleles a label carries under the pattern. */
export function mutantDose(pattern: PatternName, label: string): number {
  const mutant = MUTANT_CHAR[pattern];
  let dose = 0;
  for (const ch of label) if (ch === mutant) dose += 1;
  return dose;
}

/** P(at least one mutant allele), summed from service posterior values. */
export function carrierProbability(
  pattern: PatternName,
  posterior: Record<string, number>,
): number {
  let p = 0;
  for (const [label, mass] of Object.entries(posterior)) {
    if (mutantDose(pattern, label) >= 1) p += mass;
  }
  return p;
}

/** Sorted copy of an evidence selection, as the CLI evidence file format. */
export function evidenceDocument(
  evidence: Record<string, string[]>,
): Record<string, string[]> {
  const out: Record<string, string[]> = {};
  for (const pid of Object.keys(evidence).sort()) {
    out[pid] = [...evidence[pid]].sort();
  }
  return out;
}
