"""Document-level operations shared verbatim by the CLI and HTTP service.

Each workflow returns a JSON-ready dict; both front ends serialize it with
the same canonical encoder, which is what makes their outputs byte-identical
for identical inputs and seeds.
"""

from __future__ import annotations

import math
from typing import Mapping

import numpy as np

from .engine import (
    EvidenceSet,
    InferenceSession,
    _logsumexp_exact,
    translate_evidence_spec,
)
from .mendel import (
    Pattern,
    build_priors,
    sample_parameters,
    simulate,
    state_space,
)
from .pedigree import Pedigree, validate
from .predictor import Prediction, _draw_seed, predict

NEG_INF = float("-inf")


def violations_document(pedigree: Pedigree) -> tuple[dict, bool]:
    """(violations payload, has_errors)."""
    found = validate(pedigree)
    doc = {
        "violations": [
            {
                "rule": v.rule,
                "ids": list(v.ids),
                "message": v.message,
                "severity": v.severity,
            }
            for v in found
        ]
    }
    return doc, any(v.severity == "error" for v in found)


def evidence_from_spec(pedigree: Pedigree, pattern: Pattern,
                       spec: Mapping[str, object] | None,
                       evidence_pattern: Pattern | None = None) -> EvidenceSet | None:
    return translate_evidence_spec(pedigree, pattern, spec, evidence_pattern)


def smooth_document(pedigree: Pedigree, pattern: Pattern,
                    evidence: EvidenceSet | None = None,
                    samples: int = 1, strength: float = 1_000_000.0,
                    seed: int = 0, carrier_evidence: bool = True,
                    pairwise: bool = False) -> dict:
    """Smoothed per-person genotype posteriors under one pattern.

    ``samples == 1`` smooths under a single parameter draw. Larger values
    average the per-draw posteriors weighted by each draw's evidence
    likelihood, estimating the posterior under the pattern prior itself.
    Impossible evidence yields the "-inf" sentinel with empty posteriors.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    pattern = Pattern(pattern)
    priors = build_priors(pattern, strength)
    sessions = []
    for k in range(samples):
        params = sample_parameters(priors, _draw_seed(seed, pattern, k))
        sessions.append(InferenceSession(pedigree, params, evidence,
                                         carrier_evidence=carrier_evidence))
    logs = [s.log_marginal() for s in sessions]
    log_marginal = _logsumexp_exact(logs) - math.log(samples)
    fvs = list(sessions[0].feedback.members)
    if log_marginal == NEG_INF:
        return {
            "log_marginal": NEG_INF,
            "posteriors": {},
            "audit": {"anchor_spread": 0.0, "fvs": fvs},
        }

    top = max(logs)
    weights = [math.exp(l - top) if l != NEG_INF else 0.0 for l in logs]
    wsum = math.fsum(weights)
    posteriors: dict[str, dict[str, float]] = {}
    for pid, person in pedigree.persons.items():
        labels = state_space(pattern, person.sex).labels
        acc = np.zeros(len(labels))
        for w, session in zip(weights, sessions):
            if w > 0:
                acc += w * session.node_posterior(pid)
        acc /= wsum
        posteriors[pid] = {label: float(p) for label, p in zip(labels, acc)}

    spread = 0.0
    for w, session in zip(weights, sessions):
        if w > 0:
            spread = max(spread, session.audit().anchor_spread)
    doc = {
        "log_marginal": log_marginal,
        "posteriors": posteriors,
        "audit": {"anchor_spread": spread, "fvs": fvs},
    }
    if pairwise:
        doc["parent_conditionals"] = _pairwise_tables(pedigree, pattern,
                                                      weights, wsum, sessions)
    return doc


def _pairwise_tables(pedigree: Pedigree, pattern: Pattern, weights: list[float],
                     wsum: float, sessions: list[InferenceSession]) -> dict:
    out: dict[str, dict] = {}
    for pid in pedigree.persons:
        uid = pedigree.up_edge(pid)
        if uid is None:
            continue
        union = pedigree.unions[uid]
        shape = None
        acc_joint = None
        for w, session in zip(weights, sessions):
            if w <= 0:
                continue
            tables = session.parent_conditional(pid)
            joint = tables.joint
            if acc_joint is None:
                shape = joint.shape
                acc_joint = np.zeros(shape)
            acc_joint += w * joint
        acc_joint /= wsum
        parent_mass = acc_joint.sum(axis=2, keepdims=True)
        conditional = np.divide(acc_joint, parent_mass,
                                out=np.zeros_like(acc_joint),
                                where=parent_mass > 0)
        out[pid] = {
            "mother": union.mother,
            "father": union.father,
            "mother_labels": list(state_space(pattern, pedigree.persons[union.mother].sex).labels),
            "father_labels": list(state_space(pattern, pedigree.persons[union.father].sex).labels),
            "child_labels": list(state_space(pattern, pedigree.persons[pid].sex).labels),
            "conditional": conditional.tolist(),
        }
    return out


def predict_document(pedigree: Pedigree,
                     evidence_spec: Mapping[str, object] | None = None,
                     evidence_pattern: Pattern | None = None,
                     samples: int = 100, strength: float = 1_000_000.0,
                     threshold: float = 0.8, seed: int = 0,
                     carrier_evidence: bool = True) -> tuple[dict, bool]:
    """(prediction payload, possible). Impossible evidence keeps the -inf
    marginals in the payload so callers can render them as an answer."""
    from .predictor import PredictionError
    from .mendel import PATTERNS

    evidence = {
        p: evidence_from_spec(pedigree, p, evidence_spec, evidence_pattern)
        for p in PATTERNS
    }
    try:
        prediction: Prediction = predict(
            pedigree, evidence, samples=samples, strength=strength,
            threshold=threshold, seed=seed, carrier_evidence=carrier_evidence)
        return prediction.to_document(), True
    except PredictionError:
        log_marginals = {p.value: NEG_INF for p in PATTERNS}
        return {
            "log_marginals": log_marginals,
            "posterior": None,
            "predicted": None,
            "confident": False,
            "samples": samples,
            "seed": seed,
            "error": "impossible-evidence",
        }, False


def simulate_document(pedigree: Pedigree, pattern: Pattern,
                      strength: float = 1_000_000.0, seed: int = 0,
                      with_latents: bool = False) -> dict:
    """Pedigree document with phenotypes replaced by a forward simulation."""
    pattern = Pattern(pattern)
    priors = build_priors(pattern, strength)
    params = sample_parameters(priors, _draw_seed(seed, pattern, 0))
    drawn = simulate(pedigree, params, seed)
    doc = {
        "persons": [
            {
                "id": p.id,
                "sex": p.sex.value,
                "phenotype": drawn[p.id].phenotype.value,
            }
            for p in pedigree.persons.values()
        ],
        "unions": [
            {
                "id": u.id,
                "mother": u.mother,
                "father": u.father,
                "children": list(u.children),
            }
            for u in pedigree.unions.values()
        ],
    }
    if with_latents:
        return {
            "pedigree": doc,
            "latent_states": {pid: drawn[pid].state_label for pid in sorted(drawn)},
        }
    return doc
