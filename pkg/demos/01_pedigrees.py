"""Build, validate, serialize and traverse a pedigree.

A pedigree is a directed acyclic hypergraph: persons are nodes, and each
reproductive union is one hyperedge from two parents to their children.
Multiple connections (here, a first-cousin marriage) are legal; directed
cycles are not.
"""

import json

from pedigree_infer import (
    find_feedback_set,
    parse_pedigree,
    serialize_pedigree,
    validate,
)

# First-cousin marriage: the union e3 closes an undirected loop through
# the grandparent couple.
document = {
    "persons": [
        {"id": "g1", "sex": "female", "phenotype": "unaffected"},
        {"id": "g2", "sex": "male", "phenotype": "unaffected"},
        {"id": "a", "sex": "female", "phenotype": "unaffected"},
        {"id": "b", "sex": "male", "phenotype": "unaffected"},
        {"id": "sa", "sex": "male", "phenotype": "unobserved"},
        {"id": "sb", "sex": "female", "phenotype": "unaffected"},
        {"id": "c", "sex": "male", "phenotype": "unobserved"},
        {"id": "d", "sex": "female", "phenotype": "unaffected"},
        {"id": "k", "sex": "female", "phenotype": "affected"},
    ],
    "unions": [
        {"id": "e0", "mother": "g1", "father": "g2", "children": ["a", "b"]},
        {"id": "e1", "mother": "a", "father": "sa", "children": ["c"]},
        {"id": "e2", "mother": "sb", "father": "b", "children": ["d"]},
        {"id": "e3", "mother": "d", "father": "c", "children": ["k"]},
    ],
}

pedigree = parse_pedigree(document)
print("persons:", pedigree.person_ids())
print("violations:", validate(pedigree))

# Neighborhood accessors for the affected child
rel = pedigree.relations("k")
print("k's parents:", rel.parents, "| root?", rel.is_root, "| leaf?", rel.is_leaf)

rel_c = pedigree.relations("c")
print("c's mates in e3:", rel_c.mates("e3"), "| siblings:", rel_c.siblings)

# Parents always precede children in the traversal
print("traversal:", pedigree.traversal_order())

# The loop makes the pedigree multiply connected: conditioning on one
# feedback person restores single-connectedness for exact inference.
fvs = find_feedback_set(pedigree)
print("feedback vertex set:", fvs.members)

# Canonical bytes round-trip exactly
blob = serialize_pedigree(pedigree)
assert serialize_pedigree(parse_pedigree(blob)) == blob
print("canonical form round-trips,", len(blob), "bytes")

# Structural errors are reported with the offending ids
broken = dict(document, unions=document["unions"] + [
    {"id": "e4", "mother": "g1", "father": "g2", "children": ["k"]}])
try:
    parse_pedigree(broken)
except Exception as exc:
    print("rejected:", exc)

print(json.dumps(json.loads(blob), indent=1)[:200], "...")
