"""Exact inference on pedigree hypergraphs.

Singly connected pedigrees are solved by a two-direction message pass:
``u(n)`` carries the joint of everything reachable through a node's up
edge (its own emission included) with its latent state, and ``v(n, e)``
the likelihood of everything reachable down union ``e`` given the state.
``a(n, e) = u(n) * prod(v over other down edges)`` and
``b(n) = sum_x emission*transition*prod(v)`` are derived on demand.

Multiply connected pedigrees are conditioned on a feedback vertex set:
every member is split into one clone per incident union, all clamped to
one joint state by a point-mass indicator, which restores single
connectedness; results are summed over all joint clamp states. A clamp
may leave the split graph in several connected components (a member with
a pendant subtree), in which case component likelihoods multiply.

Messages are scaled vectors (unit-max values plus a log accumulator), so
deep pedigrees cannot underflow and all public probabilities are ratios
of scaled quantities.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .mendel import (
    ParameterSet,
    Pattern,
    StateSpace,
    emission_factor,
    project_parent_index,
    state_space,
)
from .pedigree import (
    Pedigree,
    Phenotype,
    _connected_components,
    _has_undirected_cycle,
)

NEG_INF = float("-inf")


class EngineError(RuntimeError):
    pass


class EvidenceError(ValueError):
    """Evidence refers to unknown persons or states, or allows no state."""


class ImpossibleEvidenceError(RuntimeError):
    """The evidence has zero probability; posteriors are undefined."""


# ----------------------------------------------------------------------
# evidence

class EvidenceSet:
    """Per-person allowed-genotype restrictions (hypothetical evidence).

    Restrictions act as unnormalized indicator masks on the person's root
    or transition table: probability mass outside the allowed set is
    dropped, never redistributed, so the marginal likelihood under the
    evidence also prices how plausible the hypothesis itself is.
    """

    def __init__(self, allowed: Mapping[str, Iterable[int]] | None = None):
        self.allowed: dict[str, frozenset[int]] = {}
        for pid, states in (allowed or {}).items():
            states = frozenset(int(s) for s in states)
            if not states:
                raise EvidenceError(f"evidence for {pid!r} allows no state")
            self.allowed[pid] = states

    @classmethod
    def from_labels(cls, pedigree: Pedigree, pattern: Pattern,
                    labels: Mapping[str, Iterable[str] | str]) -> "EvidenceSet":
        allowed: dict[str, list[int]] = {}
        for pid, names in labels.items():
            if pid not in pedigree.persons:
                raise EvidenceError(f"evidence names unknown person {pid!r}")
            space = state_space(pattern, pedigree.persons[pid].sex)
            if isinstance(names, str):
                names = [s for s in names.split(",") if s]
            states: set[int] = set()
            for name in names:
                states.update(_resolve_label(space, name))
            allowed[pid] = sorted(states)
        return cls(allowed)

    def to_labels(self, pedigree: Pedigree, pattern: Pattern) -> dict[str, list[str]]:
        out = {}
        for pid in sorted(self.allowed):
            space = state_space(pattern, pedigree.persons[pid].sex)
            out[pid] = [space.labels[i] for i in sorted(self.allowed[pid])]
        return out

    def mask(self, pid: str, size: int) -> np.ndarray:
        states = self.allowed.get(pid)
        if states is None:
            return np.ones(size)
        if max(states) >= size or min(states) < 0:
            raise EvidenceError(
                f"evidence for {pid!r} uses state index outside 0..{size - 1}")
        m = np.zeros(size)
        m[sorted(states)] = 1.0
        return m

    def __contains__(self, pid: str) -> bool:
        return pid in self.allowed

    def __len__(self) -> int:
        return len(self.allowed)


_ALIASES = ("carrier", "noncarrier")


def _resolve_label(space: StateSpace, name: str) -> tuple[int, ...]:
    if name == "carrier":
        states = space.carrier_indices()
    elif name == "noncarrier":
        states = tuple(i for i, d in enumerate(space.mutant_dose) if d == 0)
    else:
        return (space.index_of(name),)
    if not states:
        raise EvidenceError(
            f"alias {name!r} matches no state of {space.pattern.value}/"
            f"{space.sex.value}")
    return states


def translate_evidence_spec(pedigree: Pedigree, pattern: Pattern,
                            spec: Mapping[str, Iterable[str] | str] | None,
                            evidence_pattern: Pattern | None = None,
                            ) -> EvidenceSet | None:
    """Resolve a {person: state labels} spec under a target pattern.

    Labels resolve by, in order: the aliases "carrier" (any mutant allele)
    and "noncarrier" (none); an exact label of the person's space under the
    target pattern; and, when ``evidence_pattern`` names the pattern the
    labels were written for, translation by mutant dose (states of equal
    dose, falling back to all carrier states when the source dose exceeds
    the target space, e.g. a homozygote hypothesis applied to males under
    X-linked inheritance). Anything else is an error.
    """
    if not spec:
        return None
    pattern = Pattern(pattern)
    allowed: dict[str, set[int]] = {}
    for pid, names in spec.items():
        if pid not in pedigree.persons:
            raise EvidenceError(f"evidence names unknown person {pid!r}")
        sex = pedigree.persons[pid].sex
        target = state_space(pattern, sex)
        if isinstance(names, str):
            names = [s for s in names.split(",") if s]
        states: set[int] = set()
        for name in names:
            if name in _ALIASES:
                states.update(_resolve_label(target, name))
                continue
            if name in target.labels:
                states.add(target.index_of(name))
                continue
            if evidence_pattern is not None:
                source = state_space(evidence_pattern, sex)
                if name in source.labels:
                    dose = source.mutant_dose[source.index_of(name)]
                    same = [i for i, d in enumerate(target.mutant_dose) if d == dose]
                    if not same and dose > 0:
                        same = list(target.carrier_indices())
                    if same:
                        states.update(same)
                        continue
            raise EvidenceError(
                f"state {name!r} does not resolve for {pid!r} under "
                f"{pattern.value} (labels: {target.labels}; aliases: "
                f"{_ALIASES}; pass the pattern the labels belong to for "
                "dose translation)")
        allowed[pid] = states
    return EvidenceSet(allowed)


@dataclass(frozen=True)
class MaskedModel:
    """Per-person probability tables with evidence indicators folded in.

    ``root`` holds masked root distributions for root persons, ``transition``
    masked lifted tensors (mother axis, father axis, child axis — axes sized
    by the actual parents' state spaces) for non-roots, and ``phi`` the
    emission likelihood of each person's observed phenotype. Masks live only
    in root/transition so each indicator is applied exactly once.
    """

    root: dict[str, np.ndarray]
    transition: dict[str, np.ndarray]
    phi: dict[str, np.ndarray]
    mask: dict[str, np.ndarray]
    spaces: dict[str, StateSpace]


def _lift_transition(pedigree: Pedigree, params: ParameterSet, child: str) -> np.ndarray:
    """Transition tensor for one child, axes over the actual parents' spaces.

    Parent states that cannot occupy their union role (the off-role half of
    an unknown-sex space, or any state of a sex-mismatched XL parent) yield
    all-zero child rows: the union is impossible evidence for those states.
    """
    uid = pedigree.up_edge(child)
    union = pedigree.unions[uid]
    pattern = params.pattern
    mother = pedigree.persons[union.mother]
    father = pedigree.persons[union.father]
    child_sex = pedigree.persons[child].sex
    canon = params.transition[child_sex]
    sm = state_space(pattern, mother.sex).size
    sf = state_space(pattern, father.sex).size
    out = np.zeros((sm, sf, canon.shape[2]))
    for im in range(sm):
        cm = project_parent_index(pattern, mother.sex, "mother", im)
        if cm is None:
            continue
        for if_ in range(sf):
            cf = project_parent_index(pattern, father.sex, "father", if_)
            if cf is None:
                continue
            out[im, if_] = canon[cm, cf]
    return out


def _check_shapes(params: ParameterSet) -> None:
    from .pedigree import Sex

    mother_dim = state_space(params.pattern, Sex.FEMALE).size
    father_dim = state_space(params.pattern, Sex.MALE).size
    for sex in (Sex.FEMALE, Sex.MALE, Sex.UNKNOWN):
        size = state_space(params.pattern, sex).size
        expected = {
            "root": (size,),
            "transition": (mother_dim, father_dim, size),
            "emission": (size, 2),
        }
        for name, want in expected.items():
            got = getattr(params, name)[sex].shape
            if tuple(got) != want:
                raise EngineError(
                    f"{name} tensor for {params.pattern.value}/{sex.value} "
                    f"has shape {tuple(got)}, expected {want}")


def apply_evidence(pedigree: Pedigree, params: ParameterSet,
                   evidence: EvidenceSet | None = None,
                   carrier_evidence: bool = True) -> MaskedModel:
    """Build the per-person masked tables the engine and queries consume.

    With ``carrier_evidence`` (the default), every affected person is also
    restricted to the genotypes that express the disease under the active
    pattern, mirroring a confirmatory blood test; their affected emission
    factor applies either way.
    """
    _check_shapes(params)
    evidence = evidence or EvidenceSet()
    for pid in evidence.allowed:
        if pid not in pedigree.persons:
            raise EvidenceError(f"evidence names unknown person {pid!r}")
    root: dict[str, np.ndarray] = {}
    transition: dict[str, np.ndarray] = {}
    phi: dict[str, np.ndarray] = {}
    masks: dict[str, np.ndarray] = {}
    spaces: dict[str, StateSpace] = {}
    for pid, person in pedigree.persons.items():
        space = state_space(params.pattern, person.sex)
        spaces[pid] = space
        mask = evidence.mask(pid, space.size)
        if carrier_evidence and person.phenotype == Phenotype.AFFECTED:
            carrier = np.zeros(space.size)
            carrier[list(space.affected_indices())] = 1.0
            mask = mask * carrier
        masks[pid] = mask
        phi[pid] = emission_factor(params, person.sex, person.phenotype)
        if pedigree.is_root(pid):
            root[pid] = params.root[person.sex] * mask
        else:
            transition[pid] = _lift_transition(pedigree, params, pid) * mask
    return MaskedModel(root=root, transition=transition, phi=phi,
                       mask=masks, spaces=spaces)


# ----------------------------------------------------------------------
# feedback vertex sets

@dataclass(frozen=True)
class FeedbackSet:
    """Persons whose conditioning renders the pedigree singly connected."""

    members: tuple[str, ...]
    state_sizes: tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.members)

    def assignments(self) -> Iterable[tuple[int, ...]]:
        if not self.members:
            return [()]
        return itertools.product(*(range(s) for s in self.state_sizes))


def _two_core(adj: Mapping[str, set[str]]) -> set[str]:
    degree = {v: len(ns) for v, ns in adj.items()}
    queue = [v for v, d in degree.items() if d <= 1]
    alive = set(adj)
    while queue:
        v = queue.pop()
        if v not in alive:
            continue
        alive.discard(v)
        for w in adj[v]:
            if w in alive:
                degree[w] -= 1
                if degree[w] <= 1:
                    queue.append(w)
    return alive


def _removal_view(adj: Mapping[str, set[str]], removed: set[str]) -> dict[str, set[str]]:
    return {v: {w for w in ns if w not in removed}
            for v, ns in adj.items() if v not in removed}


def _is_polytree_after(adj: Mapping[str, set[str]], removed: set[str]) -> tuple[bool, bool]:
    view = _removal_view(adj, removed)
    acyclic = not _has_undirected_cycle(view)
    comps = [c for c in _connected_components(view)
             if any(not v.startswith("e:") for v in c)]
    return acyclic, len(comps) <= 1


_EXACT_SEARCH_LIMIT = 20


def find_feedback_set(pedigree: Pedigree, pattern: Pattern | None = None) -> FeedbackSet:
    """Smallest deterministic feedback vertex set for a pedigree.

    Exhaustive minimum search over cycle-relevant persons when there are at
    most 20 of them, otherwise a greedy highest-degree heuristic. Among
    minimum sets, ones whose removal keeps a single connected component are
    preferred; ties break lexicographically. Correctness of inference never
    depends on minimality, only its cost.
    """
    adj = pedigree.skeleton_adjacency()

    def finish(members: tuple[str, ...]) -> FeedbackSet:
        sizes = ()
        if pattern is not None:
            sizes = tuple(
                state_space(pattern, pedigree.persons[pid].sex).size
                for pid in members)
        return FeedbackSet(members, sizes)

    if not _has_undirected_cycle(adj):
        return finish(())

    candidates = sorted(v for v in _two_core(adj) if not v.startswith("e:"))
    if len(candidates) <= _EXACT_SEARCH_LIMIT:
        for size in range(1, len(candidates) + 1):
            acyclic_only: tuple[str, ...] | None = None
            for combo in itertools.combinations(candidates, size):
                acyclic, one_comp = _is_polytree_after(adj, set(combo))
                if acyclic and one_comp:
                    return finish(combo)
                if acyclic and acyclic_only is None:
                    acyclic_only = combo
            if acyclic_only is not None:
                return finish(acyclic_only)

    members: list[str] = []
    work = {v: set(ns) for v, ns in adj.items()}
    while _has_undirected_cycle(work):
        core = _two_core(work)
        pick = max(sorted(p for p in core if not p.startswith("e:")),
                   key=lambda p: (len(work[p]), ), default=None)
        if pick is None:
            break
        members.append(pick)
        work = _removal_view(work, {pick})
    return finish(tuple(sorted(members)))


# ----------------------------------------------------------------------
# scaled message arithmetic

class _Scaled(NamedTuple):
    values: np.ndarray   # nonnegative, max 1 (all zero if impossible)
    log: float           # log of the scale factor, -inf if impossible


def _scaled(values: np.ndarray, log: float = 0.0) -> _Scaled:
    m = float(values.max()) if values.size else 0.0
    if not np.isfinite(m):
        raise EngineError("non-finite message value")
    if m <= 0.0 or log == NEG_INF:
        return _Scaled(np.zeros_like(values), NEG_INF)
    return _Scaled(values / m, log + math.log(m))


def _logsumexp_exact(values: list[float]) -> float:
    """Correctly rounded log-sum-exp; result independent of input order."""
    finite = [v for v in values if v != NEG_INF]
    if not finite:
        return NEG_INF
    m = max(finite)
    return m + math.log(math.fsum(math.exp(v - m) for v in finite))


# ----------------------------------------------------------------------
# split graph

@dataclass(frozen=True)
class _Node:
    key: tuple
    person: str
    up: str | None
    downs: tuple[str, ...]
    real: bool      # carries the person's root/transition and emission
    clamped: bool   # point-mass indicator at the current feedback state


@dataclass
class _SplitGraph:
    nodes: dict[tuple, _Node]
    slots: dict[str, tuple[tuple, tuple, tuple[tuple, ...]]]  # uid -> (mother, father, children)
    comp_of: dict[tuple, int]
    n_components: int
    feedback: tuple[str, ...]


def _build_split_graph(pedigree: Pedigree, feedback: tuple[str, ...]) -> _SplitGraph:
    fset = set(feedback)
    nodes: dict[tuple, _Node] = {}

    def child_key(pid: str, uid: str) -> tuple:
        return ("p", pid) if pid not in fset else ("c", pid, uid)

    for pid in pedigree.persons:
        if pid not in fset:
            key = ("p", pid)
            nodes[key] = _Node(key, pid, pedigree.up_edge(pid),
                               pedigree.down_edges(pid), real=True, clamped=False)
            continue
        up = pedigree.up_edge(pid)
        downs = pedigree.down_edges(pid)
        incarnations: list[tuple[tuple, str | None, tuple[str, ...]]] = []
        if up is not None:
            incarnations.append((("c", pid, up), up, ()))
        for uid in downs:
            incarnations.append((("c", pid, uid), None, (uid,)))
        if not incarnations:
            incarnations.append((("c", pid, "*"), None, ()))
        real_index = 0  # the child-side clone, or the first down clone for roots
        for i, (key, up_uid, down_uids) in enumerate(incarnations):
            nodes[key] = _Node(key, pid, up_uid, down_uids,
                               real=(i == real_index), clamped=True)

    slots = {}
    for uid, union in pedigree.unions.items():
        mother = ("p", union.mother) if union.mother not in fset else ("c", union.mother, uid)
        father = ("p", union.father) if union.father not in fset else ("c", union.father, uid)
        children = tuple(child_key(c, uid) for c in union.children)
        slots[uid] = (mother, father, children)

    adj: dict[tuple, set[tuple]] = {key: set() for key in nodes}
    for uid, (mk, fk, childs) in slots.items():
        evert = ("e", uid)
        adj[evert] = set()
        for key in (mk, fk, *childs):
            adj[evert].add(key)
            adj[key].add(evert)
    if _has_undirected_cycle(adj):
        raise EngineError(
            f"feedback set {sorted(feedback)} does not make the pedigree "
            "singly connected")
    comp_of: dict[tuple, int] = {}
    comps = _connected_components(adj)
    for i, comp in enumerate(sorted(comps, key=min)):
        for v in comp:
            if v in nodes:
                comp_of[v] = i
    return _SplitGraph(nodes, slots, comp_of, len(comps), tuple(feedback))


# ----------------------------------------------------------------------
# message evaluation for one feedback assignment

class _Messages:
    """Lazily evaluated, memoized u/v/a/b messages for one clamp state."""

    def __init__(self, model: MaskedModel, graph: _SplitGraph,
                 clamp: dict[str, int]):
        self.model = model
        self.graph = graph
        self.clamp = clamp
        self._u: dict[tuple, _Scaled] = {}
        self._v: dict[tuple[tuple, str], _Scaled] = {}
        self._b: dict[tuple, _Scaled] = {}

    # local factors ----------------------------------------------------

    def _indicator(self, pid: str) -> np.ndarray:
        size = self.model.spaces[pid].size
        ind = np.zeros(size)
        ind[self.clamp[pid]] = 1.0
        return ind

    def _phi(self, node: _Node) -> np.ndarray:
        if node.real:
            return self.model.phi[node.person]
        return np.ones(self.model.spaces[node.person].size)

    def _transition(self, node: _Node) -> np.ndarray:
        t = self.model.transition[node.person]
        if node.clamped:
            t = t * self._indicator(node.person)[None, None, :]
        return t

    def _root_vector(self, node: _Node) -> np.ndarray:
        if node.real:
            vec = self.model.root[node.person].copy()
        else:
            vec = np.ones(self.model.spaces[node.person].size)
        if node.clamped:
            vec = vec * self._indicator(node.person)
        return vec

    # recursions ---------------------------------------------------------

    def u(self, key: tuple) -> _Scaled:
        got = self._u.get(key)
        if got is not None:
            return got
        node = self.graph.nodes[key]
        if node.up is None:
            out = _scaled(self._root_vector(node) * self._phi(node))
        else:
            w = self._parent_context(node.up, exclude=key)
            t = self._transition(node)
            vec = self._phi(node) * np.einsum("mf,mfc->c", w.values, t)
            out = _scaled(vec, w.log)
        self._u[key] = out
        return out

    def v(self, key: tuple, uid: str) -> _Scaled:
        got = self._v.get((key, uid))
        if got is not None:
            return got
        mother, father, children = self.graph.slots[uid]
        if key not in (mother, father):
            raise EngineError(f"{key} is not a parent of union {uid!r}")
        other = father if key == mother else mother
        prod = self._children_product(uid)
        ao = self.a(other, uid)
        if key == mother:
            vec = np.einsum("mf,f->m", prod.values, ao.values)
        else:
            vec = np.einsum("mf,m->f", prod.values, ao.values)
        out = _scaled(vec, prod.log + ao.log)
        self._v[(key, uid)] = out
        return out

    def a(self, key: tuple, uid: str) -> _Scaled:
        node = self.graph.nodes[key]
        acc = self.u(key)
        vec, log = acc.values.copy(), acc.log
        for other_uid in node.downs:
            if other_uid == uid:
                continue
            m = self.v(key, other_uid)
            vec = vec * m.values
            log += m.log
        return _scaled(vec, log)

    def b(self, key: tuple) -> _Scaled:
        got = self._b.get(key)
        if got is not None:
            return got
        node = self.graph.nodes[key]
        if node.up is None:
            raise EngineError(f"b is undefined for root node {key}")
        down = self._down_product(node)
        integrand = self._phi(node) * down.values
        mat = np.einsum("mfc,c->mf", self._transition(node), integrand)
        out = _scaled(mat, down.log)
        self._b[key] = out
        return out

    # helpers -----------------------------------------------------------

    def _down_product(self, node: _Node) -> _Scaled:
        size = self.model.spaces[node.person].size
        vec, log = np.ones(size), 0.0
        for uid in node.downs:
            m = self.v(node.key, uid)
            vec = vec * m.values
            log += m.log
        return _Scaled(vec, log)

    def _children_product(self, uid: str) -> _Scaled:
        mother, father, children = self.graph.slots[uid]
        sm = self.model.spaces[self.graph.nodes[mother].person].size
        sf = self.model.spaces[self.graph.nodes[father].person].size
        vals, log = np.ones((sm, sf)), 0.0
        for ck in children:
            m = self.b(ck)
            vals = vals * m.values
            log += m.log
        return _scaled(vals, log)

    def _parent_context(self, uid: str, exclude: tuple) -> _Scaled:
        """Joint (mother, father) weight from above and from siblings."""
        mother, father, children = self.graph.slots[uid]
        am = self.a(mother, uid)
        af = self.a(father, uid)
        vals = np.outer(am.values, af.values)
        log = am.log + af.log
        for ck in children:
            if ck == exclude:
                continue
            m = self.b(ck)
            vals = vals * m.values
            log += m.log
        return _scaled(vals, log)

    def node_joint(self, key: tuple) -> _Scaled:
        """P(node state, all emissions in its component | clamp)."""
        node = self.graph.nodes[key]
        upper = self.u(key)
        down = self._down_product(node)
        return _scaled(upper.values * down.values, upper.log + down.log)

    def component_loglik(self, comp: int) -> float:
        anchor = min(k for k, c in self.graph.comp_of.items() if c == comp)
        j = self.node_joint(anchor)
        total = float(j.values.sum())
        if total <= 0.0 or j.log == NEG_INF:
            return NEG_INF
        return math.log(total) + j.log


class MessageCache:
    """All u/v messages of one feedback assignment, fully materialized."""

    def __init__(self, messages: _Messages):
        self._m = messages
        graph = messages.graph
        for key, node in graph.nodes.items():
            messages.u(key)
            for uid in node.downs:
                messages.v(key, uid)

    def _key(self, pid: str) -> tuple:
        key = ("p", pid)
        if key not in self._m.graph.nodes:
            raise KeyError(
                f"{pid!r} is a feedback member; query its clones explicitly")
        return key

    def u(self, pid: str) -> _Scaled:
        return self._m.u(self._key(pid))

    def v(self, pid: str, uid: str) -> _Scaled:
        return self._m.v(self._key(pid), uid)

    def a(self, pid: str, uid: str) -> _Scaled:
        return self._m.a(self._key(pid), uid)

    def b(self, pid: str) -> _Scaled:
        return self._m.b(self._key(pid))

    def down_product(self, pid: str) -> _Scaled:
        """Product of v over the person's down edges; ones for leaves."""
        return self._m._down_product(self._m.graph.nodes[self._key(pid)])

    def u_dense(self, pid: str) -> np.ndarray:
        s = self.u(pid)
        return s.values * math.exp(s.log) if s.log != NEG_INF else np.zeros_like(s.values)

    @property
    def finite(self) -> bool:
        return all(np.isfinite(s.values).all() for s in self._m._u.values()) and \
            all(np.isfinite(s.values).all() for s in self._m._v.values())


def compute_messages(pedigree: Pedigree, params: ParameterSet,
                     feedback: FeedbackSet, assignment: tuple[int, ...],
                     evidence: EvidenceSet | None = None,
                     carrier_evidence: bool = True) -> MessageCache:
    """Materialize every message for one joint feedback-state assignment."""
    model = apply_evidence(pedigree, params, evidence, carrier_evidence)
    graph = _build_split_graph(pedigree, feedback.members)
    clamp = dict(zip(feedback.members, assignment))
    return MessageCache(_Messages(model, graph, clamp))


# ----------------------------------------------------------------------
# inference session and public queries

@dataclass(frozen=True)
class AuditReport:
    log_marginal: float
    anchor_spread: float
    fvs: tuple[str, ...]
    checks: int
    assignments: int

    @property
    def passed(self) -> bool:
        return self.anchor_spread <= 1e-10


@dataclass(frozen=True)
class ParentTables:
    """Joint and conditional tables of a child with its two parents."""

    child: str
    mother: str
    father: str
    log_joint: np.ndarray      # (mother, father, child) of log P(states, Y, ev)
    conditional: np.ndarray    # child distribution per (mother, father)

    @property
    def joint(self) -> np.ndarray:
        return np.exp(self.log_joint)

    def parent_log_marginal(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            j = self.joint
            return np.where(j.sum(axis=2) > 0,
                            np.log(np.maximum(j.sum(axis=2), 1e-300)), NEG_INF)


class InferenceSession:
    """Shared message workspace for every query against one evidence state.

    A pure function of (pedigree, parameters, evidence): construct once,
    query any number of times from any number of threads.
    """

    def __init__(self, pedigree: Pedigree, params: ParameterSet,
                 evidence: EvidenceSet | None = None,
                 carrier_evidence: bool = True,
                 feedback: FeedbackSet | None = None):
        self.pedigree = pedigree
        self.params = params
        self.evidence = evidence or EvidenceSet()
        self.model = apply_evidence(pedigree, params, self.evidence, carrier_evidence)
        if feedback is None:
            feedback = find_feedback_set(pedigree, params.pattern)
        elif not feedback.state_sizes and feedback.members:
            feedback = FeedbackSet(
                feedback.members,
                tuple(self.model.spaces[pid].size for pid in feedback.members))
        self.feedback = feedback
        self.graph = _build_split_graph(pedigree, feedback.members)
        self._assignments: list[tuple[tuple[int, ...], _Messages, list[float], float]] = []
        for assignment in feedback.assignments():
            clamp = dict(zip(feedback.members, assignment))
            msgs = _Messages(self.model, self.graph, clamp)
            logliks = [msgs.component_loglik(c) for c in range(self.graph.n_components)]
            total = NEG_INF if NEG_INF in logliks else math.fsum(logliks)
            self._assignments.append((assignment, msgs, logliks, total))
        self._log_marginal = _logsumexp_exact([t for *_, t in self._assignments])

    # -- queries ---------------------------------------------------------

    def log_marginal(self) -> float:
        """log P(all phenotypes, evidence); -inf for impossible evidence."""
        return self._log_marginal

    def _require_possible(self) -> None:
        if self._log_marginal == NEG_INF:
            raise ImpossibleEvidenceError(
                "evidence has zero probability under this pattern")

    def _log_node_mass(self, pid: str) -> tuple[np.ndarray, float]:
        """Unnormalized P(n_x, Y, ev) as (values, log scale)."""
        size = self.model.spaces[pid].size
        if pid in self.feedback.members:
            idx = self.feedback.members.index(pid)
            logs = [[] for _ in range(size)]
            for assignment, _msgs, _logliks, total in self._assignments:
                logs[assignment[idx]].append(total)
            per_state = np.array([_logsumexp_exact(l) for l in logs])
            m = float(per_state.max())
            if m == NEG_INF:
                return np.zeros(size), NEG_INF
            return np.exp(per_state - m), m
        key = ("p", pid)
        comp = self.graph.comp_of[key]
        entries: list[tuple[np.ndarray, float]] = []
        for _assignment, msgs, logliks, total in self._assignments:
            if total == NEG_INF:
                continue
            j = msgs.node_joint(key)
            rest = math.fsum(l for c, l in enumerate(logliks) if c != comp)
            if j.log == NEG_INF or rest == NEG_INF:
                continue
            entries.append((j.values, j.log + rest))
        return _accumulate(entries, size)

    def node_posterior(self, pid: str) -> np.ndarray:
        """P(n_x | Y, evidence); exact zero outside the evidence set."""
        if pid not in self.pedigree.persons:
            raise KeyError(f"unknown person id {pid!r}")
        self._require_possible()
        values, _ = self._log_node_mass(pid)
        total = values.sum()
        if total <= 0:
            raise ImpossibleEvidenceError(
                f"no feasible state for {pid!r} under the evidence")
        return values / total

    def parent_conditional(self, pid: str) -> ParentTables:
        """P(child | mother, father, Y, ev) plus the joint over the trio."""
        uid = self.pedigree.up_edge(pid)
        if uid is None:
            raise ValueError(f"{pid!r} is a root; it has no parents")
        self._require_possible()
        union = self.pedigree.unions[uid]
        mother_key, father_key, child_keys = self.graph.slots[uid]
        node_key = ("p", pid) if pid not in self.feedback.members else ("c", pid, uid)
        comp = self.graph.comp_of[node_key]
        sm = self.model.spaces[union.mother].size
        sf = self.model.spaces[union.father].size
        sc = self.model.spaces[pid].size
        entries: list[tuple[np.ndarray, float]] = []
        for _assignment, msgs, logliks, total in self._assignments:
            if total == NEG_INF:
                continue
            am = msgs.a(mother_key, uid)
            af = msgs.a(father_key, uid)
            node = self.graph.nodes[node_key]
            down = msgs._down_product(node)
            t = msgs._transition(node)
            j = (am.values[:, None, None] * af.values[None, :, None] * t
                 * (msgs._phi(node) * down.values)[None, None, :])
            log = am.log + af.log + down.log
            for ck in child_keys:
                if ck == node_key:
                    continue
                sb = msgs.b(ck)
                j = j * sb.values[:, :, None]
                log += sb.log
            rest = math.fsum(l for c, l in enumerate(logliks) if c != comp)
            if log == NEG_INF or rest == NEG_INF or not j.any():
                continue
            entries.append((j, log + rest))
        values, log_scale = _accumulate(entries, (sm, sf, sc))
        with np.errstate(divide="ignore"):
            log_joint = np.where(values > 0,
                                 np.log(np.maximum(values, 1e-300)) + log_scale,
                                 NEG_INF)
        parent_mass = values.sum(axis=2, keepdims=True)
        conditional = np.divide(values, parent_mass,
                                out=np.zeros_like(values), where=parent_mass > 0)
        return ParentTables(child=pid, mother=union.mother, father=union.father,
                            log_joint=log_joint, conditional=conditional)

    def audit(self) -> AuditReport:
        """Recompute the total likelihood at every anchor and queryable joint."""
        ref = self._log_marginal
        checks = 0
        spread = 0.0
        for pid in self.pedigree.persons:
            values, log_scale = self._log_node_mass(pid)
            total = values.sum()
            log_here = math.log(total) + log_scale if total > 0 else NEG_INF
            spread = max(spread, _relative_gap(log_here, ref))
            checks += 1
        for pid in self.pedigree.persons:
            if self.pedigree.up_edge(pid) is None or ref == NEG_INF:
                continue
            tables = self.parent_conditional(pid)
            j = tables.log_joint
            finite = j[j != NEG_INF]
            log_here = _logsumexp_exact([float(x) for x in finite.ravel()])
            spread = max(spread, _relative_gap(log_here, ref))
            checks += 1
        return AuditReport(log_marginal=ref, anchor_spread=spread,
                           fvs=self.feedback.members, checks=checks,
                           assignments=len(self._assignments))

    def posteriors(self) -> dict[str, np.ndarray]:
        return {pid: self.node_posterior(pid) for pid in self.pedigree.persons}


def _accumulate(entries: list[tuple[np.ndarray, float]],
                shape) -> tuple[np.ndarray, float]:
    """Sum scaled arrays exactly: values * exp(log) across entries."""
    if not entries:
        return np.zeros(shape), NEG_INF
    m = max(log for _, log in entries)
    if m == NEG_INF:
        return np.zeros(shape), NEG_INF
    out = np.zeros(shape)
    for values, log in entries:
        out = out + values * math.exp(log - m)
    return out, m


def _relative_gap(log_a: float, log_b: float) -> float:
    if log_a == NEG_INF and log_b == NEG_INF:
        return 0.0
    if log_a == NEG_INF or log_b == NEG_INF:
        return math.inf
    return abs(math.expm1(log_a - log_b))


# ----------------------------------------------------------------------
# one-shot convenience wrappers

def marginal_likelihood(pedigree: Pedigree, params: ParameterSet,
                        evidence: EvidenceSet | None = None,
                        carrier_evidence: bool = True) -> float:
    return InferenceSession(pedigree, params, evidence, carrier_evidence).log_marginal()


def node_posterior(pedigree: Pedigree, params: ParameterSet,
                   evidence: EvidenceSet | None, pid: str,
                   carrier_evidence: bool = True) -> np.ndarray:
    return InferenceSession(pedigree, params, evidence, carrier_evidence).node_posterior(pid)


def parent_conditional(pedigree: Pedigree, params: ParameterSet,
                       evidence: EvidenceSet | None, pid: str,
                       carrier_evidence: bool = True) -> ParentTables:
    return InferenceSession(pedigree, params, evidence, carrier_evidence).parent_conditional(pid)


def consistency_audit(pedigree: Pedigree, params: ParameterSet,
                      evidence: EvidenceSet | None = None,
                      carrier_evidence: bool = True) -> AuditReport:
    return InferenceSession(pedigree, params, evidence, carrier_evidence).audit()
