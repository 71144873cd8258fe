import pytest
from hypothesis import given, settings

import oracle
from conftest import blowups, transform, unimodular
from torifan import corpus
from torifan import lattice as la
from torifan.deform import (
    APPLICABLE,
    TOO_MANY_POSITIVE,
    deform,
    deformability,
    degree_matrix,
    fingerprint,
    identify,
    replaced_degree_matrix,
    supported_cones,
    supported_fan,
)
from torifan.errors import NotApplicable
from torifan.fan import isomorphism
from torifan.mori import Positivity, positivity_class
from torifan.special import special_report

# (relation, status, w, deformed fan's corpus name, positivity, same cones); derived once
# from the library and spot-checked by the independent degree-matrix oracle below
DEFORMATIONS = {
    "Z1": [("x1+x2=2x", APPLICABLE, "x3", None, "Fano", True)],
    "Z5": [("w2+w6=2w1", APPLICABLE, "w4", None, "Fano", False)],
    "Z7": [("w2+w5=2w1", APPLICABLE, "w4", None, "Fano", True)],
    "Z12": [("w2+w5=2w1", APPLICABLE, "w4", "Z19", "WeakFanoNotFano", True),
            ("y2+y4=2y1", APPLICABLE, "y3", "Z7", "WeakFanoNotFano", True)],
    "Z13": [("w2+w6=2w1", APPLICABLE, "w4", "Z24", "WeakFanoNotFano", False),
            ("y2+y4=2y1", APPLICABLE, "y3", "Z8", "WeakFanoNotFano", True)],
    "Z14": [("x1+x2=2x", APPLICABLE, "z", None, "Fano", True)],
    "Z18": [("x1+x2=2v6", TOO_MANY_POSITIVE, None, None, None, None)],
    "Z24": [("x1+x2=2v7", APPLICABLE, "v8", None, "Fano", True)],
    "Z25": [("x++x-=2x0", TOO_MANY_POSITIVE, None, None, None, None),
            ("x1+x2=2y-", TOO_MANY_POSITIVE, None, None, None, None)],
}


def _fourfolds():
    return [(n, corpus.load(n)) for n in corpus.names("fourfolds")]


@pytest.mark.parametrize("name", sorted(DEFORMATIONS))
def test_frozen_deformations(name):
    fan, names = corpus.load(name), corpus.ray_names(name)
    rows = []
    for cert in special_report(fan).certificates:
        verdict = deformability(fan, cert)
        row = [cert.relation.describe(names), verdict.status, None, None, None, None]
        if verdict.applicable:
            result = deform(fan, cert)
            row[2:] = [names[result.w_index], identify(result.deformed, _fourfolds()),
                       result.positivity.value, result.cones_preserved]
        rows.append(tuple(row))
    assert rows == DEFORMATIONS[name]


def test_column_replacement_matches_deformed_rays():
    """The replaced degree matrix is a Gale dual of the deformed rays (checked by brute force)."""
    count = 0
    for name, fan in _fourfolds():
        for cert in special_report(fan).certificates:
            verdict = deformability(fan, cert)
            if not verdict.applicable:
                continue
            result = deform(fan, cert)
            q = replaced_degree_matrix(fan, cert, verdict.w)
            assert oracle.lattice_gale_ok(result.deformed.rays, q), name
            assert la.same_row_lattice(q, degree_matrix(result.deformed))
            assert la.add(fan.rays[cert.x1], result.new_ray) == la.add(
                fan.rays[cert.x], fan.rays[verdict.w])
            count += 1
    assert count == 23


def test_not_applicable_raises():
    fan = corpus.load("Z25")
    cert = special_report(fan).certificates[0]
    with pytest.raises(NotApplicable):
        deform(fan, cert)


@settings(max_examples=40, deadline=None)
@given(blowups())
def test_degree_matrix_is_a_gale_dual(fan):
    assert oracle.lattice_gale_ok(fan.rays, degree_matrix(fan))


@settings(max_examples=30, deadline=None)
@given(blowups(dims=(2, 3), max_steps=3))
def test_supported_cones_contain_weak_fano_cones(fan):
    if positivity_class(fan) is Positivity.NEITHER:
        return
    assert set(fan.max_cones) <= set(supported_cones(fan.dim, fan.rays))
    if positivity_class(fan) is Positivity.FANO:
        rebuilt = supported_fan(fan.dim, fan.rays)
        assert rebuilt is not None and rebuilt.max_cones == fan.max_cones


@settings(max_examples=25, deadline=None)
@given(blowups(dims=(2, 3), max_steps=3).flatmap(lambda f: unimodular(f.dim).map(lambda u: (f, u))))
def test_fingerprint_is_invariant(pair):
    fan, u = pair
    assert fingerprint(transform(fan, u)) == fingerprint(fan)


def test_identify_uses_isomorphism():
    f1 = corpus.load("F1")
    pool = [(n, corpus.load(n)) for n in corpus.names("surfaces")]
    assert identify(f1, pool) == "F1"
    assert identify(corpus.load("P1xP1xP1"), pool) is None
    assert isomorphism(f1, corpus.load(identify(f1, pool))) is not None


def test_deformation_keeps_counts_and_smoothness():
    for name, fan in _fourfolds():
        for cert in special_report(fan).certificates:
            if not deformability(fan, cert).applicable:
                continue
            out = deform(fan, cert).deformed
            assert (out.n_rays, len(out.max_cones)) == (fan.n_rays, len(fan.max_cones)), name
            assert all(abs(la.det(out.cone_rays(c))) == 1 for c in out.max_cones)
