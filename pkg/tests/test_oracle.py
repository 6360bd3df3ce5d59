import math

import numpy as np
import pytest

from pedigree_infer import (
    EvidenceSet,
    ImpossibleEvidenceError,
    OracleSizeError,
    Pattern,
    Sex,
    build_priors,
    parse_pedigree,
    sample_parameters,
)
from pedigree_infer.oracle import (
    JointTable,
    oracle_marginal,
    oracle_parent_conditional,
    oracle_posterior,
)

from _families import make, mendelian_parameters, person, random_pedigree, trio, union


def test_single_root_strict_tables():
    ped = make([person("solo", "female", "unaffected")], [])
    params = mendelian_parameters(Pattern.AR)
    assert oracle_marginal(ped, params) == 0.0  # log 1


def test_single_affected_root_impossible_under_strict_tables():
    ped = make([person("solo", "female", "affected")], [])
    params = mendelian_parameters(Pattern.AD)
    # strict tables put zero root mass on any mutant genotype
    assert oracle_marginal(ped, params) == float("-inf")


def test_trio_matches_handwritten_triple_sum():
    ped = trio()
    params = sample_parameters(build_priors(Pattern.AR, 20.0), 7)
    t = params.transition[Sex.MALE]       # child is male; autosomal = same
    l = params.emission
    pi0 = params.root
    total = 0.0
    for xm in range(3):
        for xf in range(3):
            for xc in range(3):
                total += (
                    pi0[Sex.FEMALE][xm] * l[Sex.FEMALE][xm, 0]
                    * pi0[Sex.MALE][xf] * l[Sex.MALE][xf, 0]
                    * t[xm, xf, xc] * l[Sex.MALE][xc, 1]
                    * (1.0 if xc == 0 else 0.0)  # carrier restriction, AR
                )
    assert oracle_marginal(ped, params) == pytest.approx(math.log(total), abs=1e-12)


def test_permutation_invariance_is_exact():
    base = {
        "persons": [person("mom", "female", "unaffected"),
                    person("dad", "male", "unaffected"),
                    person("kid", "female", "affected"),
                    person("aunt", "female", "unobserved")],
        "unions": [union("u", "mom", "dad", ["kid", "aunt"])],
    }
    renamed = {
        "persons": [person("zz_mom", "female", "unaffected"),
                    person("a_dad", "male", "unaffected"),
                    person("m_kid", "female", "affected"),
                    person("b_aunt", "female", "unobserved")],
        "unions": [union("u", "zz_mom", "a_dad", ["m_kid", "b_aunt"])],
    }
    params = sample_parameters(build_priors(Pattern.XL, 9.0), 2)
    lm1 = oracle_marginal(parse_pedigree(base), params)
    lm2 = oracle_marginal(parse_pedigree(renamed), params)
    assert lm1 == lm2
    p1 = oracle_posterior(parse_pedigree(base), params, None, "kid")
    p2 = oracle_posterior(parse_pedigree(renamed), params, None, "m_kid")
    assert np.array_equal(p1, p2)


def test_monotone_under_evidence_refinement():
    ped = trio()
    params = sample_parameters(build_priors(Pattern.AD, 15.0), 3)
    broad = EvidenceSet({"mom": [0, 1, 2]})
    narrow = EvidenceSet({"mom": [0, 1]})
    tighter = EvidenceSet({"mom": [1]})
    lms = [oracle_marginal(ped, params, ev) for ev in (broad, narrow, tighter)]
    assert lms[0] >= lms[1] >= lms[2]


def test_point_mass_evidence_posterior():
    ped = trio(child_pt="unobserved")
    params = sample_parameters(build_priors(Pattern.AR, 15.0), 4)
    post = oracle_posterior(ped, params, EvidenceSet({"kid": [1]}), "kid")
    assert post.tolist() == [0.0, 1.0, 0.0]


def test_posterior_sums_to_one_exactly():
    for seed in range(8):
        ped = random_pedigree(seed, want_loop=(seed % 2 == 0))
        params = sample_parameters(build_priors(Pattern.XL, 8.0), seed)
        for pid in ped.persons:
            post = oracle_posterior(ped, params, None, pid)
            assert abs(post.sum() - 1.0) <= 1e-14


def test_parent_conditional_slices_normalized():
    ped = trio(child_pt="unobserved")
    params = sample_parameters(build_priors(Pattern.AD, 5.0), 6)
    cond, joint = oracle_parent_conditional(ped, params, None, "kid")
    sums = cond.sum(axis=2)
    mass = joint.sum(axis=2)
    assert np.all((mass <= 0) | (np.abs(sums - 1) <= 1e-12))
    # joint marginalizes to the parents' pair marginal
    pair = JointTable(ped, params).marginal_over(["mom", "dad"])
    assert np.abs(joint.sum(axis=2) - pair).max() <= 1e-15


def test_impossible_evidence():
    ped = trio()  # affected child gets the carrier restriction
    params = mendelian_parameters(Pattern.AD)
    ev = EvidenceSet({"kid": [2]})  # force mutation-free genotype
    assert oracle_marginal(ped, params, ev) == float("-inf")
    with pytest.raises(ImpossibleEvidenceError):
        oracle_posterior(ped, params, ev, "kid")


def test_size_guard():
    persons = [person(f"p{i:02d}", "unknown", "unobserved") for i in range(40)]
    unions = []
    # one founder couple and a long chain of unions to stack up persons
    doc = {"persons": persons, "unions": unions}
    persons[0]["sex"] = "female"
    persons[1]["sex"] = "male"
    kids = [p["id"] for p in persons[2:]]
    unions.append(union("e0", "p00", "p01", kids))
    ped = parse_pedigree(doc)
    params = sample_parameters(build_priors(Pattern.XL, 5.0), 0)
    with pytest.raises(OracleSizeError):
        JointTable(ped, params)


def test_root_only_pedigree_multiplies_roots():
    doc = {
        "persons": [person("a", "female", "unaffected"),
                    person("b", "male", "unaffected"),
                    person("c", "female", "unobserved")],
        "unions": [union("e", "a", "b", ["c"])],
    }
    ped = parse_pedigree(doc)
    params = mendelian_parameters(Pattern.AR)
    # strict tables, unaffected roots, unobserved child: everything certain
    assert oracle_marginal(ped, params) == pytest.approx(0.0, abs=1e-15)
