from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from pedigree_infer import (
    ParameterSet,
    Pattern,
    Phenotype,
    Sex,
    SimulationError,
    apply_prior_strength,
    build_emission_prior,
    build_priors,
    build_root_prior,
    build_transition_prior,
    parameters_to_document,
    sample_parameters,
    simulate,
    state_space,
)
from pedigree_infer.mendel import _dirichlet_row, project_parent_index

from _families import make, mendelian_parameters, person, trio, union

PATTERNS = (Pattern.AD, Pattern.AR, Pattern.XL)
SEXES = (Sex.FEMALE, Sex.MALE, Sex.UNKNOWN)


# ----------------------------------------------------------------------
# state spaces

class TestStateSpace:
    def test_autosomal_three_states_every_sex(self):
        for pattern in (Pattern.AD, Pattern.AR):
            for sex in SEXES:
                space = state_space(pattern, sex)
                assert space.size == 3
                assert space.mutant_dose == (2, 1, 0)

    def test_ar_female_affected_only_homozygous(self):
        space = state_space(Pattern.AR, Sex.FEMALE)
        assert space.affected == (True, False, False)
        assert space.labels[0] == "aa"

    def test_ad_affected_any_dose(self):
        assert state_space(Pattern.AD, Sex.FEMALE).affected == (True, True, False)

    def test_xl_male_two_states(self):
        space = state_space(Pattern.XL, Sex.MALE)
        assert space.size == 2
        assert space.affected == (True, False)
        assert space.labels == ("xY", "XY")

    def test_xl_unknown_is_concatenation(self):
        female = state_space(Pattern.XL, Sex.FEMALE)
        male = state_space(Pattern.XL, Sex.MALE)
        unknown = state_space(Pattern.XL, Sex.UNKNOWN)
        assert unknown.labels == female.labels + male.labels
        assert unknown.size == 5
        assert unknown.affected == (True, False, False, True, False)

    def test_index_zero_is_fully_mutant(self):
        for pattern in PATTERNS:
            for sex in SEXES:
                space = state_space(pattern, sex)
                assert space.mutant_dose[0] == max(space.mutant_dose)

    def test_index_of_unknown_label(self):
        with pytest.raises(KeyError):
            state_space(Pattern.AD, Sex.FEMALE).index_of("zz")

    def test_carrier_indices(self):
        assert state_space(Pattern.XL, Sex.UNKNOWN).carrier_indices() == (0, 1, 3)


# ----------------------------------------------------------------------
# transition priors: independent allele-segregation oracle

_AUTOSOME = {0: ("m", "m"), 1: ("m", "n"), 2: ("n", "n")}
_X_FEMALE = {0: ("m", "m"), 1: ("m", "n"), 2: ("n", "n")}
_X_MALE = {0: ("m",), 1: ("n",)}


def _autosomal_oracle(im, if_):
    """Each parent passes one of two autosomal alleles, uniformly."""
    out = [Fraction(0)] * 3
    for am, af in product(_AUTOSOME[im], _AUTOSOME[if_]):
        dose = (am == "m") + (af == "m")
        out[2 - dose] += Fraction(1, 4)
    return out


def _x_oracle(im, if_, child_sex):
    """Mother passes one X; father passes X to daughters, Y to sons."""
    daughter = [Fraction(0)] * 3
    son = [Fraction(0)] * 2
    (fx,) = _X_MALE[if_]
    for mx in _X_FEMALE[im]:
        dose = (mx == "m") + (fx == "m")
        daughter[2 - dose] += Fraction(1, 2)
        son[0 if mx == "m" else 1] += Fraction(1, 2)
    if child_sex == Sex.FEMALE:
        return daughter
    if child_sex == Sex.MALE:
        return son
    return [d / 2 for d in daughter] + [s / 2 for s in son]


class TestTransitionPriorOracle:
    def test_autosomal_matches_allele_enumeration(self):
        for pattern in (Pattern.AD, Pattern.AR):
            for sex in SEXES:
                t = build_transition_prior(pattern, sex)
                for im in range(3):
                    for if_ in range(3):
                        expect = [float(x) for x in _autosomal_oracle(im, if_)]
                        assert t[im, if_].tolist() == expect

    def test_x_linked_matches_allele_enumeration(self):
        for sex in SEXES:
            t = build_transition_prior(Pattern.XL, sex)
            for im in range(3):
                for if_ in range(2):
                    expect = [float(x) for x in _x_oracle(im, if_, sex)]
                    assert t[im, if_].tolist() == expect

    def test_rows_sum_to_one_exactly(self):
        for pattern in PATTERNS:
            for sex in SEXES:
                t = build_transition_prior(pattern, sex)
                sums = t.sum(axis=2)
                assert np.abs(sums - 1.0).max() <= 1e-15

    def test_xl_male_child_independent_of_father(self):
        t = build_transition_prior(Pattern.XL, Sex.MALE)
        assert np.array_equal(t[:, 0, :], t[:, 1, :])


# ----------------------------------------------------------------------
# frozen reference tensors (blocks = mother state, rows = father state)

AD_AR_TRANSITION = np.array([
    [[1, 0, 0], [0.5, 0.5, 0], [0, 1, 0]],
    [[0.5, 0.5, 0], [0.25, 0.5, 0.25], [0, 0.5, 0.5]],
    [[0, 1, 0], [0, 0.5, 0.5], [0, 0, 1]],
])

XL_FEMALE_TRANSITION = np.array([
    [[1, 0, 0], [0, 1, 0]],
    [[0.5, 0.5, 0], [0, 0.5, 0.5]],
    [[0, 1, 0], [0, 0, 1]],
])

XL_MALE_TRANSITION = np.array([
    [[1, 0], [1, 0]],
    [[0.5, 0.5], [0.5, 0.5]],
    [[0, 1], [0, 1]],
])

XL_UNKNOWN_TRANSITION = np.array([
    [[0.5, 0, 0, 0.5, 0], [0, 0.5, 0, 0.5, 0]],
    [[0.25, 0.25, 0, 0.25, 0.25], [0, 0.25, 0.25, 0.25, 0.25]],
    [[0, 0.5, 0, 0, 0.5], [0, 0, 0.5, 0, 0.5]],
])

EMISSIONS = {
    (Pattern.AD, Sex.FEMALE): [[0, 1], [0, 1], [1, 0]],
    (Pattern.AR, Sex.FEMALE): [[0, 1], [1, 0], [1, 0]],
    (Pattern.XL, Sex.FEMALE): [[0, 1], [1, 0], [1, 0]],
    (Pattern.XL, Sex.MALE): [[0, 1], [1, 0]],
    (Pattern.XL, Sex.UNKNOWN): [[0, 1], [1, 0], [1, 0], [0, 1], [1, 0]],
}


class TestReferenceTensors:
    def test_autosomal_transition(self):
        for pattern in (Pattern.AD, Pattern.AR):
            for sex in SEXES:
                assert np.array_equal(build_transition_prior(pattern, sex),
                                      AD_AR_TRANSITION)

    def test_xl_transitions(self):
        assert np.array_equal(build_transition_prior(Pattern.XL, Sex.FEMALE),
                              XL_FEMALE_TRANSITION)
        assert np.array_equal(build_transition_prior(Pattern.XL, Sex.MALE),
                              XL_MALE_TRANSITION)
        assert np.array_equal(build_transition_prior(Pattern.XL, Sex.UNKNOWN),
                              XL_UNKNOWN_TRANSITION)

    def test_shapes(self):
        assert build_transition_prior(Pattern.AD, Sex.MALE).shape == (3, 3, 3)
        assert build_transition_prior(Pattern.XL, Sex.FEMALE).shape == (3, 2, 3)
        assert build_transition_prior(Pattern.XL, Sex.MALE).shape == (3, 2, 2)
        assert build_transition_prior(Pattern.XL, Sex.UNKNOWN).shape == (3, 2, 5)

    def test_emissions(self):
        for (pattern, sex), expect in EMISSIONS.items():
            assert build_emission_prior(pattern, sex).tolist() == expect
        # autosomal emissions identical across sexes
        for pattern in (Pattern.AD, Pattern.AR):
            for sex in (Sex.MALE, Sex.UNKNOWN):
                assert np.array_equal(build_emission_prior(pattern, sex),
                                      build_emission_prior(pattern, Sex.FEMALE))

    def test_emission_rows_are_point_masses(self):
        for pattern in PATTERNS:
            for sex in SEXES:
                m = build_emission_prior(pattern, sex)
                assert np.array_equal(m.sum(axis=1), np.ones(m.shape[0]))
                space = state_space(pattern, sex)
                for i, affected in enumerate(space.affected):
                    assert m[i, 1] == (1.0 if affected else 0.0)


class TestRootPrior:
    def test_mass_on_mutation_free(self):
        for pattern in PATTERNS:
            for sex in SEXES:
                v = build_root_prior(pattern, sex)
                space = state_space(pattern, sex)
                assert v.sum() == 1.0
                assert all(v[i] == 0 for i, d in enumerate(space.mutant_dose) if d > 0)

    def test_argmax_positions(self):
        assert build_root_prior(Pattern.AD, Sex.FEMALE).argmax() == 2
        assert build_root_prior(Pattern.XL, Sex.MALE).tolist() == [0.0, 1.0]
        unknown = build_root_prior(Pattern.XL, Sex.UNKNOWN)
        assert unknown.tolist() == [0, 0, 0.5, 0, 0.5]


class TestPriorStrength:
    def test_values(self):
        assert apply_prior_strength(np.array([0.5]), 1_000_000)[0] == 500001.0
        assert apply_prior_strength(np.array([0.0]), 123.0)[0] == 1.0
        assert apply_prior_strength(np.array([0.25]), 4.0)[0] == 2.0

    def test_non_positive_strength(self):
        with pytest.raises(ValueError):
            apply_prior_strength(np.array([0.5]), 0.0)
        with pytest.raises(ValueError):
            apply_prior_strength(np.array([0.5]), -1.0)

    def test_base_range_checked(self):
        with pytest.raises(ValueError):
            apply_prior_strength(np.array([1.5]), 10.0)

    def test_priorset_entries_at_least_one(self):
        priors = build_priors(Pattern.XL, 1000.0)
        for group in (priors.root, priors.transition, priors.emission):
            for arr in group.values():
                assert arr.min() >= 1.0


class TestSampling:
    def test_deterministic(self):
        priors = build_priors(Pattern.XL, 100.0)
        a = sample_parameters(priors, 42)
        b = sample_parameters(priors, 42)
        for sex in SEXES:
            assert np.array_equal(a.root[sex], b.root[sex])
            assert np.array_equal(a.transition[sex], b.transition[sex])
            assert np.array_equal(a.emission[sex], b.emission[sex])

    def test_different_seeds_differ(self):
        priors = build_priors(Pattern.AD, 10.0)
        a = sample_parameters(priors, 1)
        b = sample_parameters(priors, 2)
        assert not np.array_equal(a.root[Sex.FEMALE], b.root[Sex.FEMALE])

    def test_rows_sum_to_one(self):
        for pattern in PATTERNS:
            params = sample_parameters(build_priors(pattern, 7.0), 5)
            for sex in SEXES:
                assert np.abs(params.root[sex].sum() - 1) <= 1e-12
                assert np.abs(params.transition[sex].sum(axis=2) - 1).max() <= 1e-12
                assert np.abs(params.emission[sex].sum(axis=1) - 1).max() <= 1e-12

    def test_length_one_row_is_exact(self):
        rng = np.random.default_rng(0)
        assert _dirichlet_row(rng, np.array([3.7])).tolist() == [1.0]

    def test_dirichlet_mean(self):
        # mean of Dirichlet(a, a) is 1/2 per component
        rng = np.random.default_rng(123)
        alpha = np.array([500001.0, 500001.0])
        draws = np.array([_dirichlet_row(rng, alpha) for _ in range(1000)])
        assert np.abs(draws.mean(axis=0) - 0.5).max() < 0.01

    def test_strength_limit_recovers_base(self):
        priors = build_priors(Pattern.AD, 1e9)
        base = build_transition_prior(Pattern.AD, Sex.FEMALE)
        draws = [sample_parameters(priors, seed).transition[Sex.FEMALE]
                 for seed in range(100)]
        assert np.abs(np.mean(draws, axis=0) - base).max() < 1e-3


class TestProjection:
    def test_autosomal_identity(self):
        for sex in SEXES:
            for role in ("mother", "father"):
                assert [project_parent_index(Pattern.AD, sex, role, i)
                        for i in range(3)] == [0, 1, 2]

    def test_xl_unknown_slices(self):
        mother = [project_parent_index(Pattern.XL, Sex.UNKNOWN, "mother", i)
                  for i in range(5)]
        father = [project_parent_index(Pattern.XL, Sex.UNKNOWN, "father", i)
                  for i in range(5)]
        assert mother == [0, 1, 2, None, None]
        assert father == [None, None, None, 0, 1]

    def test_xl_mismatch_is_impossible(self):
        assert project_parent_index(Pattern.XL, Sex.MALE, "mother", 0) is None
        assert project_parent_index(Pattern.XL, Sex.FEMALE, "father", 1) is None

    def test_bad_role(self):
        with pytest.raises(ValueError):
            project_parent_index(Pattern.AD, Sex.FEMALE, "parent", 0)


class TestSimulate:
    def test_single_root_deterministic_tables(self):
        ped = make([person("solo", "female", "unobserved")], [])
        params = mendelian_parameters(Pattern.AR)
        out = simulate(ped, params, seed=0)
        assert out["solo"].state_label == "AA"
        assert out["solo"].phenotype == Phenotype.UNAFFECTED

    def test_forced_homozygous_parents_ar(self):
        params = mendelian_parameters(Pattern.AR)
        root = {s: np.zeros_like(params.root[s]) for s in SEXES}
        for s in SEXES:
            root[s][0] = 1.0  # all roots fully mutant
        forced = ParameterSet(Pattern.AR, root, params.transition, params.emission)
        out = simulate(trio(), forced, seed=3)
        assert out["kid"].state_label == "aa"
        assert out["kid"].phenotype == Phenotype.AFFECTED

    def test_heterozygous_parents_frequencies(self):
        params = mendelian_parameters(Pattern.AR)
        root = {s: np.zeros_like(params.root[s]) for s in SEXES}
        for s in SEXES:
            root[s][1] = 1.0  # all roots heterozygous
        het = ParameterSet(Pattern.AR, root, params.transition, params.emission)
        ped = trio()
        counts = np.zeros(3)
        for seed in range(10_000):
            counts[simulate(ped, het, seed=seed)["kid"].state_index] += 1
        freq = counts / counts.sum()
        assert np.abs(freq - np.array([0.25, 0.5, 0.25])).max() < 0.02

    def test_seed_determinism(self):
        params = sample_parameters(build_priors(Pattern.XL, 50.0), 1)
        a = simulate(cousin := _cousin(), params, seed=9)
        b = simulate(cousin, params, seed=9)
        assert a == b

    def test_unmappable_parent_raises(self):
        ped = make(
            [person("a", "male"), person("b", "male"), person("c", "female")],
            [union("e", "a", "b", ["c"])],
        )
        params = mendelian_parameters(Pattern.XL)
        with pytest.raises(SimulationError, match="mapped onto its parent role"):
            simulate(ped, params, seed=0)
        # autosomal inheritance does not care about the role sexes
        simulate(ped, mendelian_parameters(Pattern.AD), seed=0)


def _cousin():
    from _families import cousin_loop
    return cousin_loop()


def test_parameters_document_shape():
    params = sample_parameters(build_priors(Pattern.XL, 10.0), 0)
    doc = parameters_to_document(params)
    assert doc["pattern"] == "XL"
    assert doc["transition"]["male"]["shape"] == [3, 2, 2]
    assert len(doc["transition"]["unknown"]["values"]) == 30
    assert doc["labels"]["male"] == ["xY", "XY"]
