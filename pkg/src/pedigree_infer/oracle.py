"""Brute-force ground truth for small pedigrees.

Enumerates every joint latent assignment and sums the factored weights
directly: masked root distributions for roots, masked transitions for
children, emission likelihoods for everyone. Deliberately simple so it can
be audited by eye; the message-passing engine is tested against it.
"""

from __future__ import annotations

import math

import numpy as np

from .engine import EvidenceSet, ImpossibleEvidenceError
from .mendel import (
    ParameterSet,
    emission_factor,
    project_parent_index,
    state_space,
)
from .pedigree import Pedigree, Phenotype

MAX_JOINT_STATES = 10_000_000


class OracleSizeError(RuntimeError):
    pass


def _person_factors(pedigree: Pedigree, params: ParameterSet,
                    evidence: EvidenceSet | None,
                    carrier_evidence: bool) -> tuple[list[str], dict[str, np.ndarray], dict[str, np.ndarray]]:
    """Per-person masked local tables: root vec or lifted transition, and phi."""
    evidence = evidence or EvidenceSet()
    order = sorted(pedigree.persons)
    locals_: dict[str, np.ndarray] = {}
    phis: dict[str, np.ndarray] = {}
    for pid in order:
        person = pedigree.persons[pid]
        space = state_space(params.pattern, person.sex)
        mask = evidence.mask(pid, space.size)
        if carrier_evidence and person.phenotype == Phenotype.AFFECTED:
            carrier = np.zeros(space.size)
            carrier[list(space.affected_indices())] = 1.0
            mask = mask * carrier
        phis[pid] = emission_factor(params, person.sex, person.phenotype)
        uid = pedigree.up_edge(pid)
        if uid is None:
            locals_[pid] = params.root[person.sex] * mask
        else:
            union = pedigree.unions[uid]
            mother = pedigree.persons[union.mother]
            father = pedigree.persons[union.father]
            sm = state_space(params.pattern, mother.sex).size
            sf = state_space(params.pattern, father.sex).size
            canon = params.transition[person.sex]
            t = np.zeros((sm, sf, space.size))
            for im in range(sm):
                cm = project_parent_index(params.pattern, mother.sex, "mother", im)
                if cm is None:
                    continue
                for if_ in range(sf):
                    cf = project_parent_index(params.pattern, father.sex, "father", if_)
                    if cf is None:
                        continue
                    t[im, if_] = canon[cm, cf]
            locals_[pid] = t * mask[None, None, :]
    return order, locals_, phis


class JointTable:
    """Weight tensor over every joint latent assignment.

    Axes follow ``order`` (person ids sorted); entry = P(assignment, all
    phenotypes, evidence | params), held scaled with a log offset.
    """

    def __init__(self, pedigree: Pedigree, params: ParameterSet,
                 evidence: EvidenceSet | None = None,
                 carrier_evidence: bool = True):
        self.pedigree = pedigree
        self.order, locals_, phis = _person_factors(
            pedigree, params, evidence, carrier_evidence)
        self.sizes = [locals_[pid].shape[-1] for pid in self.order]
        joint_states = 1
        for s in self.sizes:
            joint_states *= s
            if joint_states > MAX_JOINT_STATES:
                raise OracleSizeError(
                    f"joint state space exceeds {MAX_JOINT_STATES}")
        self.axis = {pid: i for i, pid in enumerate(self.order)}
        n = len(self.order)
        weights = np.ones(self.sizes)
        self.log_offset = 0.0

        def expand(values: np.ndarray, axes: tuple[int, ...]) -> np.ndarray:
            # permute the factor's axes into ascending target order first;
            # a bare reshape would silently scramble the table
            order = np.argsort(axes)
            permuted = np.transpose(values, order)
            shape = [1] * n
            for ax, size in zip(axes, values.shape):
                shape[ax] = size
            return permuted.reshape(shape)

        for pid in self.order:
            local = locals_[pid]
            phi = phis[pid]
            ax = self.axis[pid]
            if local.ndim == 1:
                factor = local * phi
                weights = weights * expand(factor, (ax,))
            else:
                union = pedigree.unions[pedigree.up_edge(pid)]
                axes = (self.axis[union.mother], self.axis[union.father], ax)
                factor = local * phi[None, None, :]
                weights = weights * expand(factor, axes)
            top = weights.max()
            if top > 0:
                weights = weights / top
                self.log_offset += math.log(top)
            else:
                self.log_offset = float("-inf")
                break
        self.weights = weights

    def total(self) -> tuple[float, float]:
        """(scaled sum, log offset); fsum keeps the result order-independent."""
        s = math.fsum(self.weights.ravel())
        return s, self.log_offset

    def marginal_over(self, keep: list[str]) -> np.ndarray:
        """Scaled mass summed onto the kept persons' axes, in ``keep`` order."""
        flat_keep = [self.axis[pid] for pid in keep]
        moved = np.moveaxis(self.weights, flat_keep, range(len(flat_keep)))
        kept_shape = moved.shape[:len(flat_keep)]
        rest = int(np.prod(moved.shape[len(flat_keep):], dtype=np.int64))
        blocks = moved.reshape(int(np.prod(kept_shape, dtype=np.int64)), rest)
        out = np.array([math.fsum(row) for row in blocks])
        return out.reshape(kept_shape)


def oracle_marginal(pedigree: Pedigree, params: ParameterSet,
                    evidence: EvidenceSet | None = None,
                    carrier_evidence: bool = True) -> float:
    table = JointTable(pedigree, params, evidence, carrier_evidence)
    s, offset = table.total()
    if s <= 0 or offset == float("-inf"):
        return float("-inf")
    return math.log(s) + offset


def oracle_posterior(pedigree: Pedigree, params: ParameterSet,
                     evidence: EvidenceSet | None, pid: str,
                     carrier_evidence: bool = True) -> np.ndarray:
    table = JointTable(pedigree, params, evidence, carrier_evidence)
    values = table.marginal_over([pid])
    total = math.fsum(values.ravel())
    if total <= 0:
        raise ImpossibleEvidenceError(
            f"evidence has zero probability; posterior of {pid!r} undefined")
    return values / total


def oracle_parent_conditional(pedigree: Pedigree, params: ParameterSet,
                              evidence: EvidenceSet | None, pid: str,
                              carrier_evidence: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """(conditional P(child|mother,father,Y,ev), joint mass (m,f,c) scaled).

    The joint is returned unnormalized but scaled consistently with
    :func:`oracle_marginal` via its log offset being dropped; use the
    conditional for comparisons and the joint only for shape/marginal
    identities within one call.
    """
    uid = pedigree.up_edge(pid)
    if uid is None:
        raise ValueError(f"{pid!r} is a root; it has no parents")
    union = pedigree.unions[uid]
    table = JointTable(pedigree, params, evidence, carrier_evidence)
    keep = [union.mother, union.father, pid]
    joint = table.marginal_over(keep)
    parent_mass = joint.sum(axis=2, keepdims=True)
    conditional = np.divide(joint, parent_mass, out=np.zeros_like(joint),
                            where=parent_mass > 0)
    return conditional, joint
