/** View state and the request-pair sequencing discipline.
 *
 * All transitions are pure functions so they can be tested without a DOM;
 * the RequestCoordinator is the one stateful piece, enforcing the
 * debounce, the single outstanding smooth+predict pair, and the discard
 * of stale responses by sequence number.
 */

import { stateLabels } from "./genetics.js";
import type {
  EvidenceMap,
  PatternName,
  PedigreeDoc,
  PredictResponse,
  SmoothResponse,
} from "./types.js";
import { isImpossible } from "./types.js";

export interface ViewState {
  pedigree: PedigreeDoc | null;
  pattern: PatternName;
  evidence: EvidenceMap;
  seed: number;
  smooth: SmoothResponse | null;
  prediction: PredictResponse | null;
  /** true while displayed results lag the current selections */
  stale: boolean;
  banner: string | null;
  error: string | null;
}

export function initialState(seed = 0): ViewState {
  return {
    pedigree: null,
    pattern: "XL",
    evidence: {},
    seed,
    smooth: null,
    prediction: null,
    stale: false,
    banner: null,
    error: null,
  };
}

export function withPedigree(state: ViewState, doc: PedigreeDoc): ViewState {
  return {
    ...state,
    pedigree: doc,
    evidence: {},
    smooth: null,
    prediction: null,
    stale: true,
    banner: null,
    error: null,
  };
}

/** Switching tabs drops selections: labels are only valid per pattern. */
export function withPattern(state: ViewState, pattern: PatternName): ViewState {
  if (pattern === state.pattern) return state;
  return { ...state, pattern, evidence: {}, stale: true, banner: null };
}

export function validLabels(state: ViewState, personId: string): string[] {
  const person = state.pedigree?.persons.find((p) => p.id === personId);
  if (!person) return [];
  return stateLabels(state.pattern, person.sex);
}

export function toggleEvidence(
  state: ViewState,
  personId: string,
  label: string,
): ViewState {
  if (!validLabels(state, personId).includes(label)) {
    throw new Error(`${label} is not a state of ${personId} under ${state.pattern}`);
  }
  const current = new Set(state.evidence[personId] ?? []);
  if (current.has(label)) current.delete(label);
  else current.add(label);
  const evidence: EvidenceMap = { ...state.evidence };
  if (current.size === 0) delete evidence[personId];
  else evidence[personId] = [...current].sort();
  return { ...state, evidence, stale: true };
}

export function clearEvidence(state: ViewState): ViewState {
  if (!Object.keys(state.evidence).length) return state;
  return { ...state, evidence: {}, stale: true };
}

export function applyResponses(
  state: ViewState,
  smooth: SmoothResponse,
  prediction: PredictResponse,
): ViewState {
  let banner: string | null = null;
  if (isImpossible(smooth.log_marginal)) {
    banner = `This hypothesis is impossible under ${state.pattern}.`;
  } else if (prediction.error === "impossible-evidence") {
    banner = "This hypothesis is impossible under every pattern.";
  }
  return {
    ...state,
    smooth,
    prediction,
    stale: false,
    banner,
    error: null,
  };
}

export function applyFailure(state: ViewState, message: string): ViewState {
  // keep selections so the user can retry
  return { ...state, stale: false, error: message };
}

export const DEBOUNCE_MS = 250;

export class RequestCoordinator {
  private nextSeq = 0;
  private appliedSeq = 0;
  private inflight: number | null = null;
  private dirty = false;
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private readonly launch: (seq: number) => void,
    private readonly debounceMs: number = DEBOUNCE_MS,
  ) {}

  /** Called after every user interaction; coalesces rapid toggles. */
  request(): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      this.fire();
    }, this.debounceMs);
  }

  private fire(): void {
    if (this.inflight !== null) {
      this.dirty = true;
      return;
    }
    this.inflight = ++this.nextSeq;
    this.launch(this.inflight);
  }

  /** Report a finished pair; returns whether its payload may be applied. */
  settle(seq: number): boolean {
    if (this.inflight === seq) this.inflight = null;
    const apply = seq > this.appliedSeq;
    if (apply) this.appliedSeq = seq;
    if (this.dirty && this.inflight === null) {
      this.dirty = false;
      this.fire();
    }
    return apply;
  }

  get outstanding(): number | null {
    return this.inflight;
  }
}
