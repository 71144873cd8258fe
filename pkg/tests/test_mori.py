import pytest
from hypothesis import given, settings

import oracle
from conftest import blowups, transform, unimodular
from torifan import corpus
from torifan import lattice as la
from torifan.errors import NotWeakFano
from torifan.fan import build_fan
from torifan.mori import (
    Positivity,
    crepant_relations,
    extremal_collections,
    mori_decomposition,
    one_cycle,
    positivity_class,
    primitive_collections,
    primitive_relations,
)

F3 = build_fan(2, [(1, 0), (0, 1), (-1, 3), (0, -1)], [(0, 1), (1, 2), (2, 3), (0, 3)])


def _as_oracle_rows(fan):
    flags = dict(extremal_collections(fan))
    return [
        {"collection": list(r.collection),
         "rhs": {str(i): a for i, a in sorted(zip(r.sigma, r.coeffs))},
         "degree": r.degree, "extremal": flags[r.collection]}
        for r in primitive_relations(fan)
    ]


def test_frozen_collections_match(frozen_oracle):
    for name, row in frozen_oracle.items():
        got = [list(c) for c in primitive_collections(corpus.load(name))]
        assert got == row["collections"], name


def test_frozen_relations_and_extremality_match(frozen_oracle):
    checked = 0
    for name, row in frozen_oracle.items():
        if "relations" not in row:
            continue
        assert _as_oracle_rows(corpus.load(name)) == row["relations"], name
        checked += 1
    assert checked >= 55


@settings(max_examples=40, deadline=None)
@given(blowups(max_steps=3))
def test_relations_match_brute_force(fan):
    assert _as_oracle_rows(fan) == oracle.relations(fan.rays, fan.max_cones)


@settings(max_examples=40, deadline=None)
@given(blowups())
def test_relation_identities(fan):
    for rel in primitive_relations(fan):
        lhs = la.vsum((fan.rays[i] for i in rel.collection), fan.dim)
        rhs = la.vsum((la.scale(a, fan.rays[i]) for i, a in zip(rel.sigma, rel.coeffs)), fan.dim)
        assert lhs == rhs
        assert fan.is_face(rel.sigma)
        assert not set(rel.sigma) & set(rel.collection)
        assert all(a > 0 for a in rel.coeffs)
        cyc = one_cycle(fan, rel)
        assert la.vsum((la.scale(c, v) for c, v in zip(cyc, fan.rays)), fan.dim) == (0,) * fan.dim


@settings(max_examples=25, deadline=None)
@given(blowups(max_steps=3).flatmap(lambda f: unimodular(f.dim).map(lambda u: (f, u))))
def test_positivity_is_invariant(pair):
    fan, u = pair
    assert positivity_class(transform(fan, u)) == positivity_class(fan)


def test_positivity_classes():
    assert positivity_class(corpus.load("P2")) is Positivity.FANO
    assert positivity_class(corpus.load("F2")) is Positivity.WEAK_FANO
    assert positivity_class(F3) is Positivity.NEITHER
    with pytest.raises(NotWeakFano):
        crepant_relations(F3)


def test_f2_crepant_relation():
    fan, names = corpus.load("F2"), corpus.ray_names("F2")
    (rel,) = crepant_relations(fan)
    assert rel.describe(names) == "w2+w4=2w1" and rel.degree == 0


def test_mori_decomposition_of_non_extremal_relation():
    fan = corpus.load("W7")
    flags = dict(extremal_collections(fan))
    rels = primitive_relations(fan)
    target = next(r for r in rels if not flags[r.collection])
    weights = mori_decomposition(fan, target)
    total = [0] * fan.n_rays
    by_coll = {r.collection: r for r in rels}
    for coll, w in weights.items():
        assert w > 0 and flags[coll]
        for k, c in enumerate(one_cycle(fan, by_coll[coll])):
            total[k] += w * c
    assert total == list(one_cycle(fan, target))
