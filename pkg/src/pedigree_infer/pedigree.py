"""Family pedigrees as directed acyclic hypergraphs.

A pedigree is a set of persons plus a set of reproductive unions. Each union
is a hyperedge from exactly two parents (a mother role and a father role) to
one or more children. A person belongs to at most one union as a child (their
"up edge") and to any number of unions as a parent ("down edges"). The graph
may be multiply connected (e.g. cousin marriages) but never cyclic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping


class Sex(str, Enum):
    FEMALE = "female"
    MALE = "male"
    UNKNOWN = "unknown"


class Phenotype(str, Enum):
    AFFECTED = "affected"
    UNAFFECTED = "unaffected"
    UNOBSERVED = "unobserved"


class PedigreeError(ValueError):
    """Malformed or invariant-violating pedigree input."""


@dataclass(frozen=True)
class Person:
    id: str
    sex: Sex = Sex.UNKNOWN
    phenotype: Phenotype = Phenotype.UNOBSERVED


@dataclass(frozen=True)
class Union:
    """Reproductive hyperedge: (mother role, father role) -> children."""

    id: str
    mother: str
    father: str
    children: tuple[str, ...]


@dataclass(frozen=True)
class Violation:
    rule: str
    ids: tuple[str, ...]
    message: str
    severity: str = "error"  # "error" | "warning"

    def __str__(self) -> str:
        return f"[{self.severity}] {self.rule}: {self.message}"


@dataclass(frozen=True)
class Relations:
    """Neighborhood accessors for one person."""

    person: str
    up_edge: str | None
    down_edges: tuple[str, ...]
    parents: tuple[str, ...]
    siblings: tuple[str, ...]
    mates_by_edge: Mapping[str, tuple[str, ...]]
    children_by_edge: Mapping[str, tuple[str, ...]]

    @property
    def is_root(self) -> bool:
        return self.up_edge is None

    @property
    def is_leaf(self) -> bool:
        return len(self.down_edges) == 0

    def mates(self, union_id: str) -> tuple[str, ...]:
        return self.mates_by_edge[union_id]

    def children(self, union_id: str) -> tuple[str, ...]:
        return self.children_by_edge[union_id]


class Pedigree:
    """Immutable person/union structure with derived adjacency maps.

    Construction only resolves references; call :func:`validate` (or go
    through :func:`parse_pedigree`, which raises on errors) to check the
    full invariant set. All iteration orders are sorted by id so results
    are reproducible.
    """

    def __init__(self, persons: Iterable[Person], unions: Iterable[Union]):
        self.persons: dict[str, Person] = {}
        for p in sorted(persons, key=lambda p: p.id):
            if p.id in self.persons:
                raise PedigreeError(f"duplicate person id {p.id!r}")
            self.persons[p.id] = p
        self.unions: dict[str, Union] = {}
        for u in sorted(unions, key=lambda u: u.id):
            if u.id in self.unions:
                raise PedigreeError(f"duplicate union id {u.id!r}")
            self.unions[u.id] = u

        # up_edges keeps every up edge seen so validate() can report
        # multiplicity; well-formed pedigrees have at most one per person.
        self._up_edges: dict[str, list[str]] = {pid: [] for pid in self.persons}
        self._down_edges: dict[str, list[str]] = {pid: [] for pid in self.persons}
        for u in self.unions.values():
            for parent in (u.mother, u.father):
                if parent in self._down_edges:
                    self._down_edges[parent].append(u.id)
            for child in u.children:
                if child in self._up_edges:
                    self._up_edges[child].append(u.id)

    # ------------------------------------------------------------------
    # accessors

    def person_ids(self) -> list[str]:
        return list(self.persons)

    def union_ids(self) -> list[str]:
        return list(self.unions)

    def up_edge(self, person_id: str) -> str | None:
        edges = self._up_edges[person_id]
        if len(edges) > 1:
            raise PedigreeError(
                f"multiple up edges for {person_id!r}: {sorted(edges)}"
            )
        return edges[0] if edges else None

    def down_edges(self, person_id: str) -> tuple[str, ...]:
        return tuple(self._down_edges[person_id])

    def parents(self, person_id: str) -> tuple[str, ...]:
        up = self.up_edge(person_id)
        if up is None:
            return ()
        u = self.unions[up]
        return (u.mother, u.father)

    def is_root(self, person_id: str) -> bool:
        return self.up_edge(person_id) is None

    def is_leaf(self, person_id: str) -> bool:
        return not self._down_edges[person_id]

    def roots(self) -> list[str]:
        return [pid for pid in self.persons if self.is_root(pid)]

    def leaves(self) -> list[str]:
        return [pid for pid in self.persons if self.is_leaf(pid)]

    def relations(self, person_id: str) -> Relations:
        """Up/down edges, parents, siblings, and per-edge mates/children."""
        if person_id not in self.persons:
            raise KeyError(f"unknown person id {person_id!r}")
        up = self.up_edge(person_id)
        parents: tuple[str, ...] = ()
        siblings: tuple[str, ...] = ()
        if up is not None:
            u = self.unions[up]
            parents = (u.mother, u.father)
            siblings = tuple(c for c in u.children if c != person_id)
        down = self.down_edges(person_id)
        mates = {}
        children = {}
        for eid in down:
            u = self.unions[eid]
            mates[eid] = tuple(p for p in (u.mother, u.father) if p != person_id)
            children[eid] = tuple(u.children)
        return Relations(
            person=person_id,
            up_edge=up,
            down_edges=down,
            parents=parents,
            siblings=siblings,
            mates_by_edge=mates,
            children_by_edge=children,
        )

    # ------------------------------------------------------------------
    # traversal

    def traversal_order(self) -> list[str]:
        """Topological order of persons: parents before their children.

        Kahn's algorithm over unions; ready persons are released in sorted
        id order so the result is deterministic.
        """
        waiting = {
            uid: {u.mother, u.father} & set(self.persons)
            for uid, u in self.unions.items()
        }
        released: list[str] = []
        ready = sorted(pid for pid in self.persons if self.is_root(pid))
        seen: set[str] = set(ready)
        while ready:
            pid = ready.pop(0)
            released.append(pid)
            for eid in self._down_edges[pid]:
                pending = waiting[eid]
                pending.discard(pid)
                if not pending:
                    for child in sorted(self.unions[eid].children):
                        if child in self.persons and child not in seen:
                            seen.add(child)
                            ready.append(child)
            ready.sort()
        if len(released) != len(self.persons):
            raise PedigreeError("pedigree contains a directed cycle")
        return released

    def skeleton_adjacency(self) -> dict[str, set[str]]:
        """Undirected bipartite incidence between persons and unions.

        Person vertices keep their ids; union vertices use ``"e:" + id``.
        """
        adj: dict[str, set[str]] = {pid: set() for pid in self.persons}
        for uid, u in self.unions.items():
            key = "e:" + uid
            adj[key] = set()
            for pid in {u.mother, u.father, *u.children}:
                if pid in self.persons:
                    adj[key].add(pid)
                    adj[pid].add(key)
        return adj


# ----------------------------------------------------------------------
# validation

def _connected_components(adj: Mapping[str, set[str]]) -> list[set[str]]:
    components = []
    unvisited = set(adj)
    while unvisited:
        start = min(unvisited)
        stack = [start]
        comp = {start}
        unvisited.discard(start)
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w in unvisited:
                    unvisited.discard(w)
                    comp.add(w)
                    stack.append(w)
        components.append(comp)
    return components


def _has_undirected_cycle(adj: Mapping[str, set[str]]) -> bool:
    edges = sum(len(n) for n in adj.values()) // 2
    return edges > len(adj) - len(_connected_components(adj))


def validate(pedigree: Pedigree) -> list[Violation]:
    """Check every structural invariant; return findings instead of raising.

    Errors break the inference contracts (unresolved ids, multiple up edges,
    directed cycles, several components); warnings flag legal-but-suspect
    structure (sex/role mismatches, redundant same-couple unions).
    """
    out: list[Violation] = []
    persons = pedigree.persons

    for uid, u in pedigree.unions.items():
        for role, pid in (("mother", u.mother), ("father", u.father)):
            if pid not in persons:
                out.append(Violation(
                    "unresolved-reference", (uid, pid),
                    f"union {uid!r} {role} {pid!r} is not a person",
                ))
        for cid in u.children:
            if cid not in persons:
                out.append(Violation(
                    "unresolved-reference", (uid, cid),
                    f"union {uid!r} child {cid!r} is not a person",
                ))
        if not u.children:
            out.append(Violation(
                "empty-children", (uid,), f"union {uid!r} has no children",
            ))
        dupes = {c for c in u.children if u.children.count(c) > 1}
        for cid in sorted(dupes):
            out.append(Violation(
                "duplicate-child", (uid, cid),
                f"{cid!r} appears more than once among children of {uid!r}",
            ))
        both = {u.mother, u.father} & set(u.children)
        for pid in sorted(both):
            out.append(Violation(
                "parent-is-child", (uid, pid),
                f"{pid!r} is both parent and child of union {uid!r}",
            ))
        if u.mother == u.father:
            out.append(Violation(
                "single-parent", (uid, u.mother),
                f"union {uid!r} lists {u.mother!r} in both parent roles",
            ))
        for role, pid, bad_sex in (
            ("mother", u.mother, Sex.MALE),
            ("father", u.father, Sex.FEMALE),
        ):
            p = persons.get(pid)
            if p is None:
                continue
            if p.sex == bad_sex:
                out.append(Violation(
                    "role-sex-mismatch", (uid, pid),
                    f"{pid!r} has sex {p.sex.value} but fills the {role} "
                    f"role of union {uid!r}",
                    severity="warning",
                ))
            elif p.sex == Sex.UNKNOWN:
                out.append(Violation(
                    "role-sex-unknown", (uid, pid),
                    f"{pid!r} has unknown sex in the {role} role of union "
                    f"{uid!r}; only the {role}-compatible genotypes can "
                    "pass through this union",
                    severity="warning",
                ))

    for pid, edges in pedigree._up_edges.items():
        if len(edges) > 1:
            out.append(Violation(
                "multiple-up-edges", (pid, *sorted(edges)),
                f"multiple up edges for {pid!r}: {sorted(edges)}",
            ))

    couples: dict[tuple[str, str], list[str]] = {}
    for uid, u in pedigree.unions.items():
        couples.setdefault((u.mother, u.father), []).append(uid)
    for (m, f), uids in sorted(couples.items()):
        if len(uids) > 1:
            out.append(Violation(
                "redundant-couple-unions", tuple(sorted(uids)),
                f"couple ({m!r}, {f!r}) appears in {len(uids)} unions; one "
                "union listing all children is equivalent",
                severity="warning",
            ))

    if any(v.severity == "error" for v in out):
        return out

    # Directed acyclicity: DFS over person -> child reachability.
    children_of: dict[str, list[str]] = {pid: [] for pid in persons}
    for u in pedigree.unions.values():
        for parent in (u.mother, u.father):
            children_of[parent].extend(u.children)
    color = {pid: 0 for pid in persons}  # 0 new, 1 active, 2 done

    def dfs(start: str) -> tuple[str, ...] | None:
        stack = [(start, iter(children_of[start]))]
        color[start] = 1
        path = [start]
        while stack:
            node, it = stack[-1]
            advanced = False
            for child in it:
                if color[child] == 1:
                    return tuple(path + [child])
                if color[child] == 0:
                    color[child] = 1
                    path.append(child)
                    stack.append((child, iter(children_of[child])))
                    advanced = True
                    break
            if not advanced:
                color[node] = 2
                path.pop()
                stack.pop()
        return None

    for pid in persons:
        if color[pid] == 0:
            cycle = dfs(pid)
            if cycle is not None:
                out.append(Violation(
                    "directed-cycle", cycle,
                    "directed path leads back to " + repr(cycle[-1]),
                ))
                return out

    if len(persons) > 0:
        comps = _connected_components(pedigree.skeleton_adjacency())
        if len(comps) > 1:
            sizes = sorted(len({v for v in c if not v.startswith("e:")}) for c in comps)
            out.append(Violation(
                "disconnected", tuple(sorted(min(comps, key=min))),
                f"pedigree splits into {len(comps)} components (person counts "
                f"{sizes}); analyze each family separately",
            ))

    return out


# ----------------------------------------------------------------------
# serialization

def pedigree_to_document(pedigree: Pedigree) -> dict:
    """Plain-dict form of the canonical JSON schema."""
    return {
        "persons": [
            {"id": p.id, "sex": p.sex.value, "phenotype": p.phenotype.value}
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


def serialize_pedigree(pedigree: Pedigree) -> bytes:
    """Canonical bytes: UTF-8 JSON, keys sorted, persons/unions sorted by id."""
    doc = pedigree_to_document(pedigree)
    return json.dumps(doc, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False).encode("utf-8")


def pedigree_from_document(doc: object) -> Pedigree:
    if not isinstance(doc, dict):
        raise PedigreeError("pedigree document must be a JSON object")
    persons_raw = doc.get("persons")
    if not isinstance(persons_raw, list):
        raise PedigreeError("missing or non-list 'persons'")
    unions_raw = doc.get("unions", [])
    if not isinstance(unions_raw, list):
        raise PedigreeError("'unions' must be a list")

    persons = []
    for item in persons_raw:
        if not isinstance(item, dict) or "id" not in item:
            raise PedigreeError(f"person entry missing 'id': {item!r}")
        pid = item["id"]
        if not isinstance(pid, str) or not pid:
            raise PedigreeError(f"person id must be a non-empty string: {pid!r}")
        try:
            sex = Sex(item.get("sex", "unknown"))
        except ValueError:
            raise PedigreeError(f"person {pid!r}: bad sex {item.get('sex')!r}")
        try:
            phenotype = Phenotype(item.get("phenotype", "unobserved"))
        except ValueError:
            raise PedigreeError(
                f"person {pid!r}: bad phenotype {item.get('phenotype')!r}")
        persons.append(Person(pid, sex, phenotype))

    unions = []
    for item in unions_raw:
        if not isinstance(item, dict) or "id" not in item:
            raise PedigreeError(f"union entry missing 'id': {item!r}")
        uid = item["id"]
        for key in ("mother", "father"):
            if not isinstance(item.get(key), str):
                raise PedigreeError(f"union {uid!r}: missing {key!r}")
        children = item.get("children")
        if not isinstance(children, list) or not children:
            raise PedigreeError(f"union {uid!r}: children must be a non-empty list")
        unions.append(Union(uid, item["mother"], item["father"], tuple(children)))

    return Pedigree(persons, unions)


def parse_pedigree(data: bytes | str | dict) -> Pedigree:
    """Parse and fully validate a pedigree document; raise on any error.

    Accepts raw JSON bytes/text or an already-decoded dict. Warnings do not
    block parsing; use :func:`validate` to inspect them.
    """
    if isinstance(data, (bytes, str)):
        try:
            doc = json.loads(data)
        except json.JSONDecodeError as exc:
            raise PedigreeError(f"malformed JSON: {exc}") from exc
    else:
        doc = data
    pedigree = pedigree_from_document(doc)
    errors = [v for v in validate(pedigree) if v.severity == "error"]
    if errors:
        raise PedigreeError("; ".join(v.message for v in errors))
    return pedigree
