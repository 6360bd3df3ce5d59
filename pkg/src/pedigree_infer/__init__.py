"""Exact genotype inference and inheritance-pattern prediction on pedigrees.

The package models a family pedigree as a directed acyclic hypergraph of
persons and reproductive unions, puts Mendelian latent-state priors over
genotypes, and answers three kinds of questions exactly:

* how likely are the observed phenotypes (optionally under hypothetical
  genotype evidence) given a pattern of inheritance;
* what is each person's smoothed genotype distribution;
* which of AD, AR, XL best explains the family, by Monte Carlo comparison
  of the marginal likelihood under each pattern's prior.
"""

from .engine import (
    AuditReport,
    EvidenceError,
    EvidenceSet,
    FeedbackSet,
    ImpossibleEvidenceError,
    InferenceSession,
    MessageCache,
    ParentTables,
    apply_evidence,
    compute_messages,
    consistency_audit,
    find_feedback_set,
    marginal_likelihood,
    node_posterior,
    parent_conditional,
    translate_evidence_spec,
)
from .mendel import (
    ParameterSet,
    Pattern,
    PriorSet,
    SimulationError,
    StateSpace,
    apply_prior_strength,
    build_emission_prior,
    build_priors,
    build_root_prior,
    build_transition_prior,
    parameters_to_document,
    priors_to_document,
    sample_parameters,
    simulate,
    state_space,
)
from .oracle import (
    JointTable,
    OracleSizeError,
    oracle_marginal,
    oracle_parent_conditional,
    oracle_posterior,
)
from .pedigree import (
    Pedigree,
    PedigreeError,
    Person,
    Phenotype,
    Sex,
    Union,
    Violation,
    parse_pedigree,
    pedigree_from_document,
    pedigree_to_document,
    serialize_pedigree,
    validate,
)
from .predictor import Prediction, PredictionError, pattern_log_marginal, predict

__version__ = "0.1.0"

__all__ = [
    "AuditReport", "EvidenceError", "EvidenceSet", "FeedbackSet",
    "ImpossibleEvidenceError", "InferenceSession", "MessageCache",
    "ParentTables", "apply_evidence", "compute_messages", "consistency_audit",
    "find_feedback_set", "marginal_likelihood", "node_posterior",
    "parent_conditional", "translate_evidence_spec",
    "ParameterSet", "Pattern", "PriorSet", "SimulationError", "StateSpace",
    "apply_prior_strength", "build_emission_prior", "build_priors",
    "build_root_prior", "build_transition_prior", "parameters_to_document",
    "priors_to_document", "sample_parameters", "simulate", "state_space",
    "JointTable", "OracleSizeError", "oracle_marginal",
    "oracle_parent_conditional", "oracle_posterior",
    "Pedigree", "PedigreeError", "Person", "Phenotype", "Sex", "Union",
    "Violation", "parse_pedigree", "pedigree_from_document",
    "pedigree_to_document", "serialize_pedigree", "validate",
    "Prediction", "PredictionError", "pattern_log_marginal", "predict",
    "__version__",
]
