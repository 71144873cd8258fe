"""Special primitive crepant contractions and special weak Fano fans.

A crepant relation ``x1 + x2 = 2x`` is special when the star of ``x`` descends
to a smooth complete weak Fano fan of dimension ``d - 2`` and a lattice
functional ``m`` exists with ``m = -1`` on ``x, x1, x2``, ``m = 0`` on the rays
of that star and ``m >= -1`` on every ray.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Optional, Sequence

from . import lattice as la
from .errors import BadRelationShape, DichotomyViolated, FanError, NotComplete, TorifanError
from .fan import Cone, Fan, quotient_fan, subfan_in_span
from .lp import linprog
from .mori import (
    Positivity,
    PrimitiveRelation,
    crepant_relations,
    extremal_collections,
    positivity_class,
    primitive_collections,
    primitive_relation,
    primitive_relations,
)

BAD_SHAPE = "BadRelationShape"
NOT_CREPANT = "NotCrepant"
NOT_EXTREMAL = "NotExtremal"
IMAGE_INVALID = "ImageInvalid"
IMAGE_NOT_WEAK_FANO = "ImageNotWeakFano"
NO_CERTIFICATE_M = "NoCertificateM"


class NotSpecial(TorifanError):
    def __init__(self, reason: str, detail: str = ""):
        super().__init__(f"{reason}: {detail}" if detail else reason)
        self.reason = reason
        self.detail = detail


def crepant_triple(rel: PrimitiveRelation) -> tuple[int, int, int]:
    """``(x1, x2, x)`` of a relation ``x1 + x2 = 2x``."""
    if not rel.is_crepant_shape:
        raise BadRelationShape(f"relation {rel.describe()} is not of the form x1+x2=2x")
    x1, x2 = rel.collection
    return x1, x2, rel.sigma[0]


def sigma_phi(fan: Fan, rel: PrimitiveRelation) -> tuple[Cone, ...]:
    """Cones avoiding ``{x, x1, x2}`` that are faces of a cone through ``x``.

    Includes the zero cone; ordered by dimension, then lexicographically.
    """
    x1, x2, x = crepant_triple(rel)
    banned = {x, x1, x2}
    out = set()
    for cone in fan.cones_containing([x]):
        rest = tuple(i for i in cone if i not in banned)
        for k in range(len(rest) + 1):
            out.update(combinations(rest, k))
    return tuple(sorted(out, key=lambda c: (len(c), c)))


def sigma_phi_rays(cones: Iterable[Cone]) -> tuple[int, ...]:
    return tuple(sorted({i for c in cones for i in c}))


def exceptional_image(fan: Fan, rel: PrimitiveRelation) -> Fan:
    """The fan of ``phi(E)``: the star of ``x`` modulo ``span{x, x1}``."""
    x1, _, x = crepant_triple(rel)
    cones = sigma_phi(fan, rel)
    tops = [c for c in cones if len(c) == fan.dim - 2]
    name = f"phi(E)[{fan.name}]" if fan.name else None
    image = quotient_fan(fan, [fan.rays[x], fan.rays[x1]], tops, name)
    if not (image.smooth and image.complete):
        raise NotComplete("the star of x does not descend to a smooth complete fan")
    return image


def _certificate_constraints(fan: Fan, rel: PrimitiveRelation, cones=None):
    x1, x2, x = crepant_triple(rel)
    cones = sigma_phi(fan, rel) if cones is None else cones
    a_ub = [[-c for c in v] for v in fan.rays]
    b_ub = [1] * fan.n_rays
    a_eq = [list(fan.rays[x])] + [list(fan.rays[y]) for y in sigma_phi_rays(cones)]
    b_eq = [-1] + [0] * (len(a_eq) - 1)
    return a_ub, b_ub, a_eq, b_eq


def find_certificate_m(fan: Fan, rel: PrimitiveRelation, cones=None) -> Optional[tuple[int, ...]]:
    """Lexicographically smallest lattice functional certifying the contraction.

    Per-coordinate bounds come from exact LPs over the polytope, which is
    bounded because the rays of a complete fan positively span ``N``.
    """
    a_ub, b_ub, a_eq, b_eq = _certificate_constraints(fan, rel, cones)
    d = fan.dim
    bounds = []
    for i in range(d):
        c = [int(j == i) for j in range(d)]
        lo = linprog(c, a_ub, b_ub, a_eq, b_eq)
        if lo.status == "infeasible":
            return None
        hi = linprog([-v for v in c], a_ub, b_ub, a_eq, b_eq)
        if lo.status != "optimal" or hi.status != "optimal":
            raise FanError("certificate polytope is unbounded: rays do not span N")
        bounds.append(range(math.ceil(lo.value), math.floor(-hi.value) + 1))
    for m in product(*bounds):
        if all(la.dot(row, m) <= b for row, b in zip(a_ub, b_ub)) and all(
            la.dot(row, m) == b for row, b in zip(a_eq, b_eq)
        ):
            return tuple(m)
    return None


@dataclass(frozen=True)
class ContractionCertificate:
    relation: PrimitiveRelation
    x1: int
    x2: int
    x: int
    sigma_phi: tuple[Cone, ...]
    image_fan: Fan
    m: tuple[int, ...]

    @property
    def sigma_phi_rays(self) -> tuple[int, ...]:
        return sigma_phi_rays(self.sigma_phi)

    def verify(self, fan: Fan) -> None:
        """Assert every certificate invariant against ``fan``."""
        trio = {self.x, self.x1, self.x2}
        assert self.relation.collection == (self.x1, self.x2)
        assert self.relation.sigma == (self.x,) and self.relation.coeffs == (2,)
        for tau in self.sigma_phi:
            assert not trio & set(tau)
            assert fan.is_face(set(tau) | {self.x})
        for i in trio:
            assert la.dot(self.m, fan.rays[i]) == -1
        for y in self.sigma_phi_rays:
            assert la.dot(self.m, fan.rays[y]) == 0
        assert all(la.dot(self.m, v) >= -1 for v in fan.rays)
        img = self.image_fan
        assert img.dim == fan.dim - 2 and img.smooth and img.complete
        assert positivity_class(img) is not Positivity.NEITHER

    def to_dict(self, names: Optional[Sequence[str]] = None) -> dict:
        def nm(i):
            return names[i] if names else i

        return {
            "x1": nm(self.x1),
            "x2": nm(self.x2),
            "x": nm(self.x),
            "m": list(self.m),
            "sigma_phi_rays": [nm(i) for i in self.sigma_phi_rays],
            "image": self.image_fan.to_dict(),
        }


def certify_contraction(fan: Fan, rel: PrimitiveRelation, check_extremal: bool = True) -> ContractionCertificate:
    """Build the full certificate, or raise :class:`NotSpecial` with a reason code."""
    if not rel.is_crepant_shape:
        reason = NOT_CREPANT if rel.degree != 0 else BAD_SHAPE
        raise NotSpecial(reason, rel.describe())
    if check_extremal and not dict(extremal_collections(fan)).get(rel.collection, False):
        raise NotSpecial(NOT_EXTREMAL, rel.describe())
    x1, x2, x = crepant_triple(rel)
    cones = sigma_phi(fan, rel)
    try:
        image = exceptional_image(fan, rel)
    except FanError as exc:
        raise NotSpecial(IMAGE_INVALID, str(exc)) from exc
    if positivity_class(image) is Positivity.NEITHER:
        raise NotSpecial(IMAGE_NOT_WEAK_FANO, image.name or "")
    m = find_certificate_m(fan, rel, cones)
    if m is None:
        raise NotSpecial(NO_CERTIFICATE_M, rel.describe())
    cert = ContractionCertificate(rel, x1, x2, x, cones, image, m)
    cert.verify(fan)
    return cert


def is_special_contraction(fan: Fan, rel: PrimitiveRelation) -> Optional[ContractionCertificate]:
    try:
        return certify_contraction(fan, rel)
    except NotSpecial:
        return None


def special_failure(fan: Fan, rel: PrimitiveRelation) -> Optional[str]:
    try:
        certify_contraction(fan, rel)
    except NotSpecial as exc:
        return exc.reason
    return None


@dataclass(frozen=True)
class RelationVerdict:
    relation: PrimitiveRelation
    certificate: Optional[ContractionCertificate]
    failure_reason: Optional[str] = None


@dataclass(frozen=True)
class SpecialReport:
    special_weak_fano: bool
    positivity: Positivity
    verdicts: tuple[RelationVerdict, ...] = ()

    @property
    def certificates(self) -> tuple[ContractionCertificate, ...]:
        return tuple(v.certificate for v in self.verdicts if v.certificate is not None)

    def __bool__(self) -> bool:
        return self.special_weak_fano


def special_report(fan: Fan) -> SpecialReport:
    pos = positivity_class(fan)
    if pos is Positivity.NEITHER:
        return SpecialReport(False, pos)
    verdicts = []
    for rel in crepant_relations(fan):
        try:
            verdicts.append(RelationVerdict(rel, certify_contraction(fan, rel)))
        except NotSpecial as exc:
            verdicts.append(RelationVerdict(rel, None, exc.reason))
    ok = pos is Positivity.WEAK_FANO and all(v.certificate for v in verdicts)
    return SpecialReport(ok, pos, tuple(verdicts))


def is_special_weak_fano(fan: Fan) -> bool:
    return special_report(fan).special_weak_fano


def interior_ray_violations(fan: Fan) -> list[tuple[int, int]]:
    """Two-element primitive collections ``{z1, z2}``, ``z1 + z2 != 0``, with no ray strictly between them."""
    bad = []
    for coll in primitive_collections(fan):
        if len(coll) != 2:
            continue
        z1, z2 = (fan.rays[i] for i in coll)
        if not any(la.add(z1, z2)):
            continue
        inside = False
        for k, v in enumerate(fan.rays):
            if k in coll:
                continue
            c = la.solve_rational([z1, z2], v)
            if c is not None and all(a > 0 for a in c):
                inside = True
                break
        if not inside:
            bad.append(coll)
    return bad


def interior_ray_property(fan: Fan) -> tuple[bool, list[tuple[int, int]]]:
    bad = interior_ray_violations(fan)
    return not bad, bad


@dataclass(frozen=True)
class StructureReport:
    I: tuple[int, ...]
    side: str  # "S1", "S2" or "both" (d = 2, where S1 is all of N_R)
    in_s1: tuple[int, ...]
    in_s2: tuple[int, ...]

    def to_dict(self) -> dict:
        return {"I": list(self.I), "side": self.side, "in_S1": list(self.in_s1), "in_S2": list(self.in_s2)}


def _in_any(cones: Sequence[Sequence[la.Vector]], v: la.Vector) -> bool:
    return any(la.solve_in_cone(list(c), v) is not None for c in cones)


def s1_s2_split(fan: Fan, cert: ContractionCertificate) -> StructureReport:
    """Locate the remaining rays in the plane ``S1`` or in the double star ``S2``."""
    x, x1, x2 = (fan.rays[i] for i in (cert.x, cert.x1, cert.x2))
    neg_x = la.scale(-1, x)
    skip = {cert.x, cert.x1, cert.x2, *cert.sigma_phi_rays}
    rest = tuple(i for i in range(fan.n_rays) if i not in skip)
    s1 = [(x, x1), (x, x2), (neg_x, x1), (neg_x, x2)]
    tops = [c for c in cert.sigma_phi if len(c) == fan.dim - 2]
    s2 = [(s,) + fan.cone_rays(c) for c in tops for s in (x, neg_x)]
    in_s1 = tuple(i for i in rest if _in_any(s1, fan.rays[i]))
    in_s2 = tuple(i for i in rest if _in_any(s2, fan.rays[i]))
    if fan.dim == 2:
        side = "both"
    elif len(in_s1) == len(rest):
        side = "S1"
    elif len(in_s2) == len(rest):
        side = "S2"
    else:
        raise DichotomyViolated(f"rays {sorted(set(rest) - set(in_s1))} outside S1 and "
                                f"{sorted(set(rest) - set(in_s2))} outside S2")
    return StructureReport(rest, side, in_s1, in_s2)


@dataclass(frozen=True)
class BundleSplit:
    fiber_rays: tuple[int, ...]
    base_rays: tuple[int, ...]
    fiber: Fan
    base: Fan

    def to_dict(self) -> dict:
        return {
            "G1": list(self.fiber_rays),
            "G2": list(self.base_rays),
            "fiber": self.fiber.to_dict(),
            "base": self.base.to_dict(),
        }


def _components(n: int, collections) -> list[tuple[int, ...]]:
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for coll in collections:
        for a, b in zip(coll, coll[1:]):
            parent[find(a)] = find(b)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted((tuple(g) for g in groups.values()), key=lambda g: g[0])


def _closed_side(fan: Fan, side: set[int]) -> bool:
    rels = primitive_relations(fan)
    return all(set(r.sigma) <= side for r in rels if set(r.collection) <= side)


def bundle_split(fan: Fan, containing: Iterable[int] = ()) -> Optional[BundleSplit]:
    """Smallest ray set ``G1`` (containing ``containing``) exhibiting a toric bundle.

    Every primitive collection must lie in ``G1`` or its complement, and the
    relations inside ``G1`` must stay inside ``G1``, so that ``G1`` spans a
    subspace carrying the fiber fan.  ``G1`` is a union of connected
    components of the primitive-collection hypergraph.
    """
    need = set(containing)
    comps = _components(fan.n_rays, primitive_collections(fan))
    options = []
    for k in range(1, len(comps)):
        for pick in combinations(comps, k):
            g1 = tuple(sorted(i for comp in pick for i in comp))
            if need <= set(g1):
                options.append(g1)
    options.sort(key=lambda g: (len(g), g))
    for g1 in options:
        if not _closed_side(fan, set(g1)):
            continue
        g2 = tuple(i for i in range(fan.n_rays) if i not in g1)
        try:
            split = _realize_split(fan, g1, g2)
        except (FanError, TorifanError):
            continue
        if split is not None:
            return split
    return None


def _realize_split(fan: Fan, g1, g2) -> Optional[BundleSplit]:
    gens = la.hermite_form([fan.rays[i] for i in g1])
    d1 = len(gens)
    if d1 in (0, fan.dim):
        return None
    fiber = subfan_in_span(fan, g1)
    if not (fiber.smooth and fiber.complete):
        return None
    side2 = set(g2)
    base_cones = {tuple(i for i in c if i in side2) for c in fan.max_cones}
    base_cones = [c for c in base_cones if len(c) == fan.dim - d1]
    base = quotient_fan(fan, gens, base_cones)
    if not (base.smooth and base.complete):
        return None
    return BundleSplit(tuple(g1), tuple(g2), fiber, base)


def is_product_split(fan: Fan, split: BundleSplit) -> bool:
    """True when the base rays also span a complementary sublattice (all lifts trivial)."""
    if not _closed_side(fan, set(split.base_rays)):
        return False
    b1 = la.hermite_form([fan.rays[i] for i in split.fiber_rays])
    b2 = la.hermite_form([fan.rays[i] for i in split.base_rays])
    if len(b1) + len(b2) != fan.dim:
        return False
    sat1 = _saturated_basis(b1)
    sat2 = _saturated_basis(b2)
    return abs(la.det(list(sat1) + list(sat2))) == 1


def _saturated_basis(gens) -> la.Matrix:
    u = la.adapted_basis(gens)
    inv = la.unimodular_inverse(u)
    cols = la.transpose(inv)
    return cols[: len(gens)]


def collections_meeting(fan: Fan, cert: ContractionCertificate) -> list[tuple[int, ...]]:
    """Primitive collections other than ``{x1, x2}`` that meet ``{x1, x2}``."""
    pair = {cert.x1, cert.x2}
    return [c for c in primitive_collections(fan) if set(c) != pair and pair & set(c)]
