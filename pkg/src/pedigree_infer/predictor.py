"""Inheritance-pattern prediction by Monte Carlo marginal likelihood.

For each candidate pattern the evidence likelihood P(Y | params) is averaged
over parameter draws from that pattern's Mendelian prior; the pattern with
the largest average wins. The normalized averages double as a confidence
score: predictions are flagged confident only when the winner clears a
threshold, mirroring how a specialist declines to call unclear pedigrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import EvidenceSet, InferenceSession, _logsumexp_exact
from .mendel import PATTERNS, Pattern, build_priors, sample_parameters
from .pedigree import Pedigree

DEFAULT_SAMPLES = 100
DEFAULT_STRENGTH = 1_000_000.0
DEFAULT_THRESHOLD = 0.8


class PredictionError(RuntimeError):
    """Every pattern assigns zero probability to the evidence."""


@dataclass(frozen=True)
class Prediction:
    log_marginals: dict[Pattern, float]
    posterior: dict[Pattern, float]
    predicted: Pattern
    confident: bool
    samples: int
    seed: int
    threshold: float

    def to_document(self) -> dict:
        return {
            "log_marginals": {p.value: v for p, v in self.log_marginals.items()},
            "posterior": {p.value: v for p, v in self.posterior.items()},
            "predicted": self.predicted.value,
            "confident": self.confident,
            "samples": self.samples,
            "seed": self.seed,
        }


def _draw_seed(seed: int, pattern: Pattern, k: int) -> np.random.SeedSequence:
    # Distinct, reproducible stream per (pattern, draw): patterns must not be
    # correlated through one shared stream.
    return np.random.SeedSequence(
        entropy=(int(seed) & 0xFFFFFFFF, list(PATTERNS).index(pattern), k))


def pattern_log_marginal(pedigree: Pedigree, pattern: Pattern,
                         evidence: EvidenceSet | None = None,
                         samples: int = DEFAULT_SAMPLES,
                         strength: float = DEFAULT_STRENGTH,
                         seed: int = 0,
                         carrier_evidence: bool = True,
                         return_draws: bool = False):
    """log of the mean evidence likelihood over ``samples`` prior draws.

    Computed as log-mean-exp of the per-draw log marginals; all-impossible
    draws yield -inf.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    pattern = Pattern(pattern)
    priors = build_priors(pattern, strength)
    draws = []
    for k in range(samples):
        sub_seed = _draw_seed(seed, pattern, k)
        params = sample_parameters(priors, sub_seed)
        session = InferenceSession(pedigree, params, evidence,
                                   carrier_evidence=carrier_evidence)
        draws.append(session.log_marginal())
    estimate = _logsumexp_exact(draws) - math.log(samples) \
        if any(d != float("-inf") for d in draws) else float("-inf")
    if return_draws:
        return estimate, draws
    return estimate


def normalize_scores(log_marginals: dict[Pattern, float]) -> dict[Pattern, float]:
    """Linear-scale normalization of per-pattern log estimates.

    Invariant to a common additive log offset; -inf entries get exactly 0.
    """
    norm = _logsumexp_exact(list(log_marginals.values()))
    if norm == float("-inf"):
        raise PredictionError(
            "evidence impossible under every inheritance pattern")
    return {
        p: (math.exp(v - norm) if v != float("-inf") else 0.0)
        for p, v in log_marginals.items()
    }


def predict(pedigree: Pedigree,
            evidence: EvidenceSet | dict[Pattern, EvidenceSet | None] | None = None,
            samples: int = DEFAULT_SAMPLES, strength: float = DEFAULT_STRENGTH,
            threshold: float = DEFAULT_THRESHOLD, seed: int = 0,
            carrier_evidence: bool = True) -> Prediction:
    """Compare AD, AR and XL on one pedigree and pick the best-supported.

    Evidence may be a single EvidenceSet (reused for every pattern; state
    indices must be meaningful under each) or a per-pattern mapping, e.g.
    from :func:`pedigree_infer.engine.translate_evidence_spec`.

    Deterministic for a fixed seed; ties break in pattern order AD < AR < XL.
    Raises PredictionError when the evidence is impossible under all three.
    """
    if isinstance(evidence, dict):
        per_pattern = {Pattern(p): ev for p, ev in evidence.items()}
    else:
        per_pattern = {p: evidence for p in PATTERNS}
    log_marginals = {
        pattern: pattern_log_marginal(
            pedigree, pattern, per_pattern.get(pattern), samples=samples,
            strength=strength, seed=seed, carrier_evidence=carrier_evidence)
        for pattern in PATTERNS
    }
    posterior = normalize_scores(log_marginals)
    predicted = max(PATTERNS, key=lambda p: (posterior[p], ))
    best = posterior[predicted]
    # max() keeps the first of equal keys, so ties land on AD < AR < XL order
    return Prediction(
        log_marginals=log_marginals,
        posterior=posterior,
        predicted=predicted,
        confident=best > threshold,
        samples=samples,
        seed=seed,
        threshold=threshold,
    )
