"""Ranking AD vs AR vs XL by Monte Carlo marginal likelihood.

For each pattern, the likelihood of the observed phenotypes is averaged
over parameter draws from that pattern's Mendelian prior (100 draws,
prior strength 1e6). The winner is the prediction; it only counts as
confident when its normalized score clears 80%, mirroring how a
specialist declines to call an ambiguous family.
"""

from pedigree_infer import parse_pedigree, predict

# Family 1: affected males only, connected through carrier females.
xl_family = parse_pedigree({
    "persons": [
        {"id": "gm", "sex": "female", "phenotype": "unobserved"},
        {"id": "gf", "sex": "male", "phenotype": "unaffected"},
        {"id": "mother", "sex": "female", "phenotype": "unaffected"},
        {"id": "father", "sex": "male", "phenotype": "unaffected"},
        {"id": "son1", "sex": "male", "phenotype": "affected"},
        {"id": "son2", "sex": "male", "phenotype": "affected"},
        {"id": "uncle", "sex": "male", "phenotype": "affected"},
    ],
    "unions": [
        {"id": "e0", "mother": "gm", "father": "gf",
         "children": ["mother", "uncle"]},
        {"id": "e1", "mother": "mother", "father": "father",
         "children": ["son1", "son2"]},
    ],
})

# Family 2: affected father and affected sons with a documented-clean
# maternal line; father-to-son transmission argues against XL.
paternal_family = parse_pedigree({
    "persons": [
        {"id": "gm", "sex": "female", "phenotype": "unaffected"},
        {"id": "gf", "sex": "male", "phenotype": "unaffected"},
        {"id": "mom", "sex": "female", "phenotype": "unaffected"},
        {"id": "uncle1", "sex": "male", "phenotype": "unaffected"},
        {"id": "uncle2", "sex": "male", "phenotype": "unaffected"},
        {"id": "dad", "sex": "male", "phenotype": "affected"},
        {"id": "son1", "sex": "male", "phenotype": "affected"},
        {"id": "son2", "sex": "male", "phenotype": "affected"},
    ],
    "unions": [
        {"id": "e0", "mother": "gm", "father": "gf",
         "children": ["mom", "uncle1", "uncle2"]},
        {"id": "e1", "mother": "mom", "father": "dad",
         "children": ["son1", "son2"]},
    ],
})

# Family 3: one shaded node; usually too little signal to call.
sparse_family = parse_pedigree({
    "persons": [
        {"id": "mom", "sex": "female", "phenotype": "unobserved"},
        {"id": "dad", "sex": "male", "phenotype": "unobserved"},
        {"id": "kid", "sex": "female", "phenotype": "affected"},
    ],
    "unions": [{"id": "u", "mother": "mom", "father": "dad",
                "children": ["kid"]}],
})

for name, family in (("affected-males family", xl_family),
                     ("paternal-line family", paternal_family),
                     ("single shaded node", sparse_family)):
    prediction = predict(family, samples=100, strength=1e6, seed=7)
    scores = ", ".join(f"{p.value}={v:.3f}"
                       for p, v in prediction.posterior.items())
    verdict = "confident" if prediction.confident else "inconclusive"
    print(f"{name:22s} -> {prediction.predicted.value} ({verdict})  [{scores}]")
