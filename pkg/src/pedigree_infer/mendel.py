"""Latent genotype state spaces, Mendelian priors, and parameter sampling.

State-index convention, used everywhere in this package: index 0 is the
fully mutant genotype and the last index carries zero disease alleles.
Under it the emission matrices, root priors and transition tensors below
are all generated from allele-segregation logic:

* autosomal inheritance: each parent passes one of their two alleles,
  chosen uniformly;
* X-linked inheritance: the mother passes one of her two X's uniformly;
  the father passes his X to daughters and his Y to sons, so a son's
  genotype never depends on the father's state;
* an unknown-sex child is a daughter or a son with probability 1/2 each.

Emission matrices are indexed (latent state, [unaffected, affected]).
Transition tensors are indexed (mother state, father state, child state),
with the mother axis over the female state space and the father axis over
the male state space.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .pedigree import Pedigree, Phenotype, Sex


class Pattern(str, enum.Enum):
    """Inheritance patterns, in canonical (tie-break) order."""

    AD = "AD"
    AR = "AR"
    XL = "XL"


PATTERNS = (Pattern.AD, Pattern.AR, Pattern.XL)
_SEXES = (Sex.FEMALE, Sex.MALE, Sex.UNKNOWN)

# Mutant allele symbol: dominant mutations are written uppercase.
_MUTANT_CHAR = {Pattern.AD: "A", Pattern.AR: "a", Pattern.XL: "x"}


@dataclass(frozen=True)
class StateSpace:
    """Ordered genotype states for one (pattern, sex)."""

    pattern: Pattern
    sex: Sex
    labels: tuple[str, ...]
    mutant_dose: tuple[int, ...]
    affected: tuple[bool, ...]

    @property
    def size(self) -> int:
        return len(self.labels)

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(
                f"unknown state {label!r} for {self.pattern.value}/"
                f"{self.sex.value}; expected one of {self.labels}"
            ) from None

    def affected_indices(self) -> tuple[int, ...]:
        return tuple(i for i, a in enumerate(self.affected) if a)

    def carrier_indices(self) -> tuple[int, ...]:
        """States holding at least one mutant allele."""
        return tuple(i for i, d in enumerate(self.mutant_dose) if d >= 1)


@lru_cache(maxsize=None)
def state_space(pattern: Pattern, sex: Sex) -> StateSpace:
    """The genotype space for a person of the given sex under a pattern.

    Autosomal patterns use the same three-state space for every sex. XL
    females have three states, XL males two, and XL unknown-sex persons
    the concatenation (female states first).
    """
    pattern = Pattern(pattern)
    sex = Sex(sex)
    if pattern in (Pattern.AD, Pattern.AR):
        m = _MUTANT_CHAR[pattern]
        other = "a" if m == "A" else "A"
        labels = (m + m, "Aa", other + other)
        dose = (2, 1, 0)
        if pattern == Pattern.AD:
            affected = tuple(d >= 1 for d in dose)
        else:
            affected = tuple(d == 2 for d in dose)
        return StateSpace(pattern, sex, labels, dose, affected)

    if sex == Sex.FEMALE:
        return StateSpace(pattern, sex, ("xx", "Xx", "XX"), (2, 1, 0),
                          (True, False, False))
    if sex == Sex.MALE:
        return StateSpace(pattern, sex, ("xY", "XY"), (1, 0), (True, False))
    female = state_space(pattern, Sex.FEMALE)
    male = state_space(pattern, Sex.MALE)
    return StateSpace(
        pattern, sex,
        female.labels + male.labels,
        female.mutant_dose + male.mutant_dose,
        female.affected + male.affected,
    )


# ----------------------------------------------------------------------
# Punnett-derived base tensors (pre prior-strength)

def _autosomal_child_dist(dose_m: int, dose_f: int) -> np.ndarray:
    pm, pf = dose_m / 2.0, dose_f / 2.0
    return np.array([
        pm * pf,
        pm * (1.0 - pf) + (1.0 - pm) * pf,
        (1.0 - pm) * (1.0 - pf),
    ])


def _x_child_dist(dose_m: int, father_mutant: bool, child_sex: Sex) -> np.ndarray:
    pm = dose_m / 2.0
    fc = 1 if father_mutant else 0
    daughter = np.zeros(3)
    daughter[2 - (0 + fc)] += 1.0 - pm   # mother passes normal X
    daughter[2 - (1 + fc)] += pm         # mother passes mutant x
    son = np.array([pm, 1.0 - pm])       # father passes Y; dose = mother's draw
    if child_sex == Sex.FEMALE:
        return daughter
    if child_sex == Sex.MALE:
        return son
    return np.concatenate([0.5 * daughter, 0.5 * son])


def build_transition_prior(pattern: Pattern, child_sex: Sex) -> np.ndarray:
    """Base transition tensor (mother, father, child), rows summing to 1."""
    pattern = Pattern(pattern)
    child_sex = Sex(child_sex)
    if pattern in (Pattern.AD, Pattern.AR):
        t = np.zeros((3, 3, 3))
        for im, dm in enumerate((2, 1, 0)):
            for if_, df in enumerate((2, 1, 0)):
                t[im, if_] = _autosomal_child_dist(dm, df)
        return t
    child_size = state_space(pattern, child_sex).size
    t = np.zeros((3, 2, child_size))
    for im, dm in enumerate((2, 1, 0)):
        for if_, father_mutant in enumerate((True, False)):
            t[im, if_] = _x_child_dist(dm, father_mutant, child_sex)
    return t


def build_emission_prior(pattern: Pattern, sex: Sex) -> np.ndarray:
    """Base emission matrix (latent state, [unaffected, affected]).

    Rows are point masses: the affected column gets the mass exactly for
    states whose allele dose expresses the disease.
    """
    space = state_space(pattern, sex)
    m = np.zeros((space.size, 2))
    for i, affected in enumerate(space.affected):
        m[i, 1 if affected else 0] = 1.0
    return m


def build_root_prior(pattern: Pattern, sex: Sex) -> np.ndarray:
    """Base root concentration: all mass on mutation-free genotypes.

    Unknown-sex spaces have one mutation-free state per sex; the mass is
    split evenly between them.
    """
    space = state_space(pattern, sex)
    free = [i for i, d in enumerate(space.mutant_dose) if d == 0]
    v = np.zeros(space.size)
    v[free] = 1.0 / len(free)
    return v


def apply_prior_strength(base: np.ndarray, strength: float) -> np.ndarray:
    """Final Dirichlet concentrations: 1 + base * strength, elementwise."""
    if strength <= 0:
        raise ValueError(f"prior strength must be positive, got {strength}")
    base = np.asarray(base, dtype=float)
    if base.min() < 0 or base.max() > 1:
        raise ValueError("base concentrations must lie in [0, 1]")
    return 1.0 + base * strength


@dataclass(frozen=True)
class PriorSet:
    """Dirichlet concentrations for one pattern at a given prior strength."""

    pattern: Pattern
    strength: float
    root: dict[Sex, np.ndarray]
    transition: dict[Sex, np.ndarray]   # keyed by child sex
    emission: dict[Sex, np.ndarray]


@dataclass(frozen=True)
class ParameterSet:
    """One sampled set of root/transition/emission distributions."""

    pattern: Pattern
    root: dict[Sex, np.ndarray]
    transition: dict[Sex, np.ndarray]   # keyed by child sex
    emission: dict[Sex, np.ndarray]

    def space(self, sex: Sex) -> StateSpace:
        return state_space(self.pattern, sex)


def build_priors(pattern: Pattern, strength: float = 1_000_000.0) -> PriorSet:
    pattern = Pattern(pattern)
    return PriorSet(
        pattern=pattern,
        strength=float(strength),
        root={s: apply_prior_strength(build_root_prior(pattern, s), strength)
              for s in _SEXES},
        transition={s: apply_prior_strength(build_transition_prior(pattern, s), strength)
                    for s in _SEXES},
        emission={s: apply_prior_strength(build_emission_prior(pattern, s), strength)
                  for s in _SEXES},
    )


def _dirichlet_row(rng: np.random.Generator, alpha: np.ndarray) -> np.ndarray:
    # Length-1 simplices are the point 1.0; no randomness is consumed.
    if alpha.shape[-1] == 1:
        return np.ones(1)
    row = rng.dirichlet(alpha)
    row = np.clip(row, 0.0, None)
    return row / row.sum()


def sample_parameters(priors: PriorSet, seed: int) -> ParameterSet:
    """Draw one ParameterSet from the priors, deterministically per seed.

    Row order is canonical: for each sex (female, male, unknown) the root
    vector is drawn first, then transition rows in row-major (mother-major)
    order, then emission rows top to bottom.
    """
    rng = np.random.default_rng(seed)
    root = {}
    transition = {}
    emission = {}
    for sex in _SEXES:
        root[sex] = _dirichlet_row(rng, priors.root[sex])
    for sex in _SEXES:
        alpha = priors.transition[sex]
        t = np.zeros_like(alpha)
        # A son's X comes from the mother alone, so for XL male children the
        # father axis indexes the same physical conditional: one draw per
        # mother state, shared across the axis. Independent draws would leak
        # a phantom father-dependence into per-draw posteriors.
        tied_father = priors.pattern == Pattern.XL and sex == Sex.MALE
        for im in range(alpha.shape[0]):
            if tied_father:
                row = _dirichlet_row(rng, alpha[im, 0])
                for if_ in range(alpha.shape[1]):
                    t[im, if_] = row
                continue
            for if_ in range(alpha.shape[1]):
                t[im, if_] = _dirichlet_row(rng, alpha[im, if_])
        transition[sex] = t
    for sex in _SEXES:
        alpha = priors.emission[sex]
        m = np.zeros_like(alpha)
        for i in range(alpha.shape[0]):
            m[i] = _dirichlet_row(rng, alpha[i])
        emission[sex] = m
    return ParameterSet(priors.pattern, root, transition, emission)


# ----------------------------------------------------------------------
# role projection

def project_parent_index(pattern: Pattern, sex: Sex, role: str, index: int) -> int | None:
    """Map a person's state index onto the mother or father tensor axis.

    Returns None when the state cannot occupy the role: the male half of an
    unknown-sex space in the mother role (and vice versa), or any state of
    a truly sex-mismatched XL parent, where the union itself is impossible
    evidence.
    """
    if role not in ("mother", "father"):
        raise ValueError(f"role must be 'mother' or 'father', got {role!r}")
    pattern = Pattern(pattern)
    if pattern in (Pattern.AD, Pattern.AR):
        return index  # one shared autosomal space
    if role == "mother":
        if sex == Sex.FEMALE:
            return index
        if sex == Sex.UNKNOWN:
            return index if index < 3 else None
        return None
    if sex == Sex.MALE:
        return index
    if sex == Sex.UNKNOWN:
        return index - 3 if index >= 3 else None
    return None


def emission_factor(params: ParameterSet, sex: Sex, phenotype: Phenotype) -> np.ndarray:
    """Per-state likelihood of the observed phenotype (ones if unobserved)."""
    l = params.emission[sex]
    if phenotype == Phenotype.UNOBSERVED:
        return np.ones(l.shape[0])
    return l[:, 1].copy() if phenotype == Phenotype.AFFECTED else l[:, 0].copy()


# ----------------------------------------------------------------------
# forward simulation

class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class SimulatedPerson:
    state_index: int
    state_label: str
    phenotype: Phenotype


def simulate(pedigree: Pedigree, params: ParameterSet, seed: int) -> dict[str, SimulatedPerson]:
    """Forward-sample latent genotypes and phenotypes for every person.

    Roots draw from the root distribution; every child draws from the
    transition tensor indexed by its parents' realized states, in a
    parents-first traversal. Deterministic for a fixed seed.
    """
    rng = np.random.default_rng(seed)
    states: dict[str, int] = {}
    out: dict[str, SimulatedPerson] = {}
    for pid in pedigree.traversal_order():
        person = pedigree.persons[pid]
        space = state_space(params.pattern, person.sex)
        up = pedigree.up_edge(pid)
        if up is None:
            dist = params.root[person.sex]
        else:
            union = pedigree.unions[up]
            mother = pedigree.persons[union.mother]
            father = pedigree.persons[union.father]
            im = project_parent_index(params.pattern, mother.sex, "mother",
                                      states[union.mother])
            if_ = project_parent_index(params.pattern, father.sex, "father",
                                       states[union.father])
            if im is None or if_ is None:
                bad = union.mother if im is None else union.father
                raise SimulationError(
                    f"union {up!r}: realized state of {bad!r} cannot be "
                    "mapped onto its parent role under "
                    f"{params.pattern.value}"
                )
            dist = params.transition[person.sex][im, if_]
        x = int(rng.choice(space.size, p=dist / dist.sum()))
        states[pid] = x
        y = int(rng.choice(2, p=params.emission[person.sex][x]))
        out[pid] = SimulatedPerson(
            state_index=x,
            state_label=space.labels[x],
            phenotype=Phenotype.AFFECTED if y == 1 else Phenotype.UNAFFECTED,
        )
    return out


# ----------------------------------------------------------------------
# audit serialization

def _tensor_doc(arr: np.ndarray) -> dict:
    return {"shape": list(arr.shape), "values": [float(x) for x in arr.ravel()]}


def parameters_to_document(params: ParameterSet) -> dict:
    """JSON-ready dump of a ParameterSet (shapes, row-major values, labels)."""
    doc = {"pattern": params.pattern.value, "root": {}, "transition": {},
           "emission": {}, "labels": {}}
    for sex in _SEXES:
        doc["root"][sex.value] = _tensor_doc(params.root[sex])
        doc["transition"][sex.value] = _tensor_doc(params.transition[sex])
        doc["emission"][sex.value] = _tensor_doc(params.emission[sex])
        doc["labels"][sex.value] = list(state_space(params.pattern, sex).labels)
    return doc


def priors_to_document(priors: PriorSet) -> dict:
    doc = {"pattern": priors.pattern.value, "strength": priors.strength,
           "root": {}, "transition": {}, "emission": {}, "labels": {}}
    for sex in _SEXES:
        doc["root"][sex.value] = _tensor_doc(priors.root[sex])
        doc["transition"][sex.value] = _tensor_doc(priors.transition[sex])
        doc["emission"][sex.value] = _tensor_doc(priors.emission[sex])
        doc["labels"][sex.value] = list(state_space(priors.pattern, sex).labels)
    return doc
