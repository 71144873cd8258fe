import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from conftest import blowups, projective_space, transform, unimodular
from torifan import corpus
from torifan.errors import (
    BadConeSize,
    DependentGenerators,
    DuplicateRay,
    FaceIntersectionViolation,
    FanError,
    NonPrimitiveRay,
    RayAlreadyPresent,
    UnusedRay,
)
from torifan.fan import (
    build_fan,
    bundle_fan,
    check_face_intersections,
    dump_fan,
    fan_from_collections,
    fan_from_dict,
    fan_from_rays_2d,
    isomorphism,
    load_fan,
    product_fan,
    quotient_fan,
    star_subdivision,
    subfan_in_span,
    suspension_fan,
)
from torifan.mori import positivity_class, primitive_relations

P2_RAYS = [(1, 0), (0, 1), (-1, -1)]


@pytest.mark.parametrize("rays, cones, error", [
    ([(2, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2), (0, 2)], NonPrimitiveRay),
    ([(1, 0), (1, 0), (-1, -1)], [(0, 1), (1, 2)], DuplicateRay),
    (P2_RAYS, [(0,), (1, 2)], BadConeSize),
    (P2_RAYS + [(1, 1)], [(0, 1), (1, 2), (0, 2)], UnusedRay),
    ([(1, 0), (-1, 0), (0, 1)], [(0, 1), (0, 2)], DependentGenerators),
    ([(1, 0), (0, 1), (1, 2)], [(0, 1), (0, 2)], FaceIntersectionViolation),
    (P2_RAYS, [(0, 3)], FanError),
    (P2_RAYS, [], FanError),
])
def test_invalid_fans_are_rejected(rays, cones, error):
    with pytest.raises(error):
        build_fan(2, rays, cones)


def test_p2_basics():
    fan = build_fan(2, P2_RAYS, [(1, 0), (2, 1), (0, 2)])
    assert fan.max_cones == ((0, 1), (0, 2), (1, 2))
    assert fan.smooth and fan.complete
    assert fan.is_face({0}) and not fan.is_face({0, 1, 2})
    assert fan.cones_containing([2]) == ((0, 2), (1, 2))


def test_incomplete_and_singular_are_detected():
    assert not build_fan(2, P2_RAYS, [(0, 1), (1, 2)]).complete
    weighted = build_fan(2, [(1, 0), (0, 1), (-1, -2)], [(0, 1), (1, 2), (0, 2)])
    assert weighted.complete and not weighted.smooth


@settings(max_examples=40, deadline=None)
@given(blowups(), st.randoms(use_true_random=False))
def test_completeness_against_point_sampling(fan, rnd):
    assert fan.smooth and fan.complete
    for _ in range(5):
        point = [rnd.randint(-10**6, 10**6) for _ in range(fan.dim)]
        assert oracle.covers_once(fan.rays, fan.max_cones, point) >= 1


@settings(max_examples=30, deadline=None)
@given(blowups())
def test_dropping_a_cone_breaks_completeness(fan):
    kept = fan.max_cones[1:]
    used = {i for c in kept for i in c}
    if len(used) == fan.n_rays:
        assert not build_fan(fan.dim, fan.rays, kept).complete


@pytest.mark.parametrize("name", ["P2", "W7", "F2xS6", "Z13", "Z26", "E4"])
def test_complete_corpus_fans_pass_pairwise_check(name):
    check_face_intersections(corpus.load(name))


def test_fan_from_rays_2d_keeps_input_order():
    fan = fan_from_rays_2d([(0, 1), (1, 0), (-1, -1)])
    assert fan.rays == ((0, 1), (1, 0), (-1, -1))
    assert fan.complete
    with pytest.raises(FanError):
        fan_from_rays_2d([(1, 0), (0, 1)])


def test_star_subdivision_of_p2_is_f1():
    f1 = star_subdivision(projective_space(2), (1, 1))
    hirzebruch = build_fan(2, [(1, 0), (0, 1), (-1, 1), (0, -1)], [(0, 1), (1, 2), (2, 3), (0, 3)])
    assert f1.smooth and f1.complete and f1.n_rays == 4
    assert isomorphism(f1, hirzebruch) is not None
    with pytest.raises(RayAlreadyPresent):
        star_subdivision(f1, (1, 1))


def test_product_and_bundle():
    p1 = build_fan(1, [(1,), (-1,)], [(0,), (1,)])
    square = product_fan(p1, p1)
    assert square.complete and square.n_rays == 4
    f2 = bundle_fan(p1, p1, {1: (2,)})
    assert f2.rays[3] == (2, -1)
    shapes = sorted(r.coeffs for r in primitive_relations(f2))
    assert shapes == [(), (2,)]


def test_suspension_adds_one_relation():
    base = projective_space(2)
    fan = suspension_fan(base, 0)
    rels = {r.collection: r for r in primitive_relations(fan)}
    assert rels[(3, 4)].sigma == (0,) and rels[(3, 4)].coeffs == (2,)
    assert len(rels) == 2


def test_fan_from_collections_recovers_p1xp1():
    fan = fan_from_collections(2, [(1, 0), (-1, 0), (0, 1), (0, -1)], [(0, 1), (2, 3)])
    assert fan.complete and len(fan.max_cones) == 4


def test_quotient_and_subfan():
    cube = corpus.load("P1xP1xP1")
    # star of the first ray modulo that ray is P1xP1
    star = cube.cones_containing([0])
    quotient = quotient_fan(cube, [cube.rays[0]], [tuple(i for i in c if i != 0) for c in star])
    assert quotient.dim == 2 and quotient.complete
    assert isomorphism(quotient, corpus.load("P1xP1")) is not None
    plane = subfan_in_span(cube, [2, 3, 4, 5])
    assert plane.dim == 2 and isomorphism(plane, corpus.load("P1xP1")) is not None


@settings(max_examples=40, deadline=None)
@given(blowups(dims=(2, 3), max_steps=3).flatmap(
    lambda f: st.tuples(st.just(f), unimodular(f.dim), st.permutations(range(f.n_rays)))))
def test_isomorphism_finds_hidden_transforms(triple):
    fan, mat, order = triple
    image = transform(fan, mat, order)
    iso = isomorphism(fan, image)
    assert iso is not None
    for i, v in enumerate(fan.rays):
        assert iso.apply(v) == image.rays[iso.ray_bijection[i]]


def test_non_isomorphic_pairs():
    assert isomorphism(corpus.load("F1"), corpus.load("P1xP1")) is None
    assert isomorphism(corpus.load("F2"), corpus.load("P1xP1")) is None
    assert isomorphism(corpus.load("P2"), corpus.load("F1")) is None


def test_json_round_trip(tmp_path):
    fan = corpus.load("Z12")
    path = tmp_path / "z12.json"
    dump_fan(fan, path)
    again = load_fan(path)
    assert again.rays == fan.rays and again.max_cones == fan.max_cones
    assert fan_from_dict(fan.to_dict()).max_cones == fan.max_cones


def test_random_relabeling_keeps_fan():
    fan = corpus.load("S6")
    order = list(range(fan.n_rays))
    random.Random(3).shuffle(order)
    assert isomorphism(fan, transform(fan, [[1, 0], [0, 1]], order)) is not None


@settings(max_examples=20, deadline=None)
@given(blowups(dims=(1, 2), max_steps=2), blowups(dims=(2,), max_steps=3))
def test_product_counts_and_positivity(a, b):
    prod = product_fan(a, b)
    assert len(prod.max_cones) == len(a.max_cones) * len(b.max_cones)
    assert prod.smooth and prod.complete
    ranks = [positivity_class(f).rank for f in (a, b)]
    assert positivity_class(prod).rank == min(ranks)
