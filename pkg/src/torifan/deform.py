"""Degree matrices and the one-parameter deformation of a special contraction.

For a special relation ``x1 + x2 = 2x`` whose certificate ``m`` is positive on
exactly one ray ``w`` (with ``m(w) = 1``), the general fiber of the family is
the fan with the same cones in which ``x2`` is replaced by ``x2 + w - x``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional, Sequence

from . import lattice as la
from .errors import DeformedFanInvalid, FanError, NewRayCollision, NotApplicable
from .fan import Cone, Fan, build_fan, cones_overlap, isomorphism
from .mori import Positivity, positivity_class, primitive_relations
from .special import ContractionCertificate

APPLICABLE = "Applicable"
TOO_MANY_POSITIVE = "TooManyPositive"
NO_POSITIVE = "NoPositive"
UNSUPPORTED_WEIGHT = "UnsupportedWeight"


def degree_matrix(fan: Fan) -> la.Matrix:
    """Rows span the relations among rays; column ``j`` is the class of ``D_j``."""
    return la.kernel_basis(fan.rays)


@dataclass(frozen=True)
class Deformability:
    status: str
    w: Optional[int] = None
    positive: tuple[int, ...] = ()

    @property
    def applicable(self) -> bool:
        return self.status == APPLICABLE


def deformability(fan: Fan, cert: ContractionCertificate) -> Deformability:
    positive = tuple(i for i, v in enumerate(fan.rays) if la.dot(cert.m, v) > 0)
    if not positive:
        return Deformability(NO_POSITIVE)
    if len(positive) >= 2:
        return Deformability(TOO_MANY_POSITIVE, positive=positive)
    (w,) = positive
    if la.dot(cert.m, fan.rays[w]) != 1:
        return Deformability(UNSUPPORTED_WEIGHT, w, positive)
    return Deformability(APPLICABLE, w, positive)


@dataclass(frozen=True)
class DeformationResult:
    deformed: Fan
    replaced_ray_index: int
    new_ray: la.Vector
    w_index: int
    certificate_m: tuple[int, ...]
    positivity: Positivity
    cones_preserved: bool = True


def deform(fan: Fan, cert: ContractionCertificate, name: Optional[str] = None) -> DeformationResult:
    verdict = deformability(fan, cert)
    if not verdict.applicable:
        raise NotApplicable(verdict.status)
    w = verdict.w
    x, x1, x2 = (fan.rays[i] for i in (cert.x, cert.x1, cert.x2))
    new_ray = la.sub(la.add(x2, fan.rays[w]), x)
    if new_ray in fan.ray_index:
        raise NewRayCollision(f"{list(new_ray)} is already a ray")
    rays = list(fan.rays)
    rays[cert.x2] = new_ray
    if name is None and fan.name:
        name = fan.name + "'"
    assert la.add(x1, new_ray) == la.add(x, fan.rays[w])
    preserved = True
    deformed = _same_cones(fan, rays, name)
    if deformed is None:
        preserved = False
        deformed = supported_fan(fan.dim, rays, prefer=fan.max_cones, name=name)
    if deformed is None:
        raise DeformedFanInvalid("no smooth complete fan on the deformed rays")
    return DeformationResult(
        deformed, cert.x2, new_ray, w, cert.m, positivity_class(deformed), preserved)


def _same_cones(fan: Fan, rays, name) -> Optional[Fan]:
    try:
        deformed = build_fan(fan.dim, rays, fan.max_cones, name)
    except FanError:
        return None
    return deformed if deformed.smooth and deformed.complete else None


def supported_cones(dim: int, rays: Sequence[la.Vector]) -> list[Cone]:
    """Unimodular cones whose rays span a hyperplane ``m = -1`` with ``m >= -1`` on every ray.

    These are the only possible maximal cones of a weak Fano fan on ``rays``.
    """
    out = []
    for cone in combinations(range(len(rays)), dim):
        gens = [rays[i] for i in cone]
        if abs(la.det(gens)) != 1:
            continue
        m = la.solve_rational(la.transpose(gens), (-1,) * dim)
        if all(la.dot(m, v) >= -1 for v in rays):
            out.append(cone)
    return out


def supported_fan(
    dim: int,
    rays: Sequence[Sequence[int]],
    prefer: Iterable[Cone] = (),
    name: Optional[str] = None,
) -> Optional[Fan]:
    """Smooth complete fan built from :func:`supported_cones`, favouring ``prefer``.

    Grows a fan across unmatched ridges by depth-first search; candidates
    from ``prefer`` are tried first, then the rest in lexicographic order.
    """
    rays = la.as_matrix(rays)
    liked = {tuple(sorted(c)) for c in prefer}
    cands = sorted(supported_cones(dim, rays), key=lambda c: (c not in liked, c))
    if not cands:
        return None
    by_ridge: dict[Cone, list[Cone]] = {}
    for c in cands:
        for i in range(dim):
            by_ridge.setdefault(c[:i] + c[i + 1:], []).append(c)

    def side(ridge: Cone, apex: int) -> int:
        normal = la.kernel_basis(la.transpose([rays[i] for i in ridge]))[0] if ridge else (1,)
        return la.dot(normal, rays[apex])

    def open_ridge(chosen: list[Cone]) -> Optional[tuple[Cone, int]]:
        count: dict[Cone, list[int]] = {}
        for c in chosen:
            for i in range(dim):
                count.setdefault(c[:i] + c[i + 1:], []).append(c[i])
        for ridge in sorted(count):
            if len(count[ridge]) == 1:
                return ridge, count[ridge][0]
        return None

    def grow(chosen: list[Cone]) -> Optional[list[Cone]]:
        found = open_ridge(chosen)
        if found is None:
            return chosen
        ridge, apex = found
        s0 = side(ridge, apex)
        for c in by_ridge.get(ridge, ()):
            if c in chosen:
                continue
            (new,) = set(c) - set(ridge)
            if side(ridge, new) * s0 >= 0:
                continue
            if any(cones_overlap(dim, rays, c, other) for other in chosen):
                continue
            result = grow(chosen + [c])
            if result is not None:
                return result
        return None

    cones = grow([cands[0]])
    if cones is None:
        return None
    try:
        fan = build_fan(dim, rays, cones, name)
    except FanError:
        return None
    return fan if fan.complete else None


def replaced_degree_matrix(fan: Fan, cert: ContractionCertificate, w: int) -> la.Matrix:
    """Degree matrix with ``[D_x] <- [D_x] + [D_x2]`` and ``[D_w] <- [D_x] + [D_x1]``.

    Its rows span the relations of the deformed fan whenever ``m`` vanishes
    off ``{x, x1, x2, w}``; used as an independent cross-check of :func:`deform`.
    """
    q = [list(row) for row in degree_matrix(fan)]
    for row in q:
        dx, dx1, dx2 = row[cert.x], row[cert.x1], row[cert.x2]
        row[cert.x] = dx + dx2
        row[w] = dx + dx1
    return la.as_matrix(q)


def fingerprint(fan: Fan) -> tuple:
    """Isomorphism invariant: dimension, ray count, positivity and relation shapes."""
    shapes = Counter(
        (len(r.collection), tuple(sorted(r.coeffs)), r.degree) for r in primitive_relations(fan)
    )
    return (
        fan.dim,
        fan.n_rays,
        positivity_class(fan).value,
        tuple(sorted((k, v) for k, v in shapes.items())),
    )


def identify(fan: Fan, candidates: Iterable[tuple[str, Fan]]) -> Optional[str]:
    """Name of the first candidate isomorphic to ``fan``."""
    fp = fingerprint(fan)
    for name, other in candidates:
        if other.dim == fan.dim and fingerprint(other) == fp and isomorphism(fan, other):
            return name
    return None
