"""Smooth complete simplicial fans and the operations used to build them.

A :class:`Fan` stores its rays in input order and refers to them by index
everywhere else; maximal cones are sorted tuples of ray indices.
"""

from __future__ import annotations

import json
from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property, cmp_to_key
from itertools import combinations, permutations
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from . import lattice as la
from .errors import (
    BadConeSize,
    CollapsedCone,
    DependentGenerators,
    DuplicateRay,
    FaceIntersectionViolation,
    FanError,
    NonPrimitiveImage,
    NonPrimitiveRay,
    NotSpanning,
    RayAlreadyPresent,
    UnusedRay,
)
from .lp import linprog

Vector = la.Vector
Cone = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class Fan:
    dim: int
    rays: tuple[Vector, ...]
    max_cones: tuple[Cone, ...]
    name: Optional[str] = None

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"<Fan{label} dim={self.dim} rays={len(self.rays)} cones={len(self.max_cones)}>"

    @property
    def n_rays(self) -> int:
        return len(self.rays)

    @cached_property
    def faces(self) -> frozenset[frozenset[int]]:
        out = set()
        for cone in self.max_cones:
            for k in range(len(cone) + 1):
                out.update(frozenset(c) for c in combinations(cone, k))
        return frozenset(out)

    def is_face(self, indices: Iterable[int]) -> bool:
        return frozenset(indices) in self.faces

    @cached_property
    def ray_index(self) -> dict[Vector, int]:
        return {r: i for i, r in enumerate(self.rays)}

    def cone_rays(self, cone: Iterable[int]) -> tuple[Vector, ...]:
        return tuple(self.rays[i] for i in cone)

    def cones_containing(self, indices: Iterable[int]) -> tuple[Cone, ...]:
        s = set(indices)
        return tuple(c for c in self.max_cones if s.issubset(c))

    def ray_matrix(self) -> la.Matrix:
        return self.rays

    def with_name(self, name: Optional[str]) -> "Fan":
        return Fan(self.dim, self.rays, self.max_cones, name)

    def to_dict(self) -> dict:
        return {
            "name": self.name or "",
            "dim": self.dim,
            "rays": [list(r) for r in self.rays],
            "max_cones": [list(c) for c in self.max_cones],
        }

    @cached_property
    def smooth(self) -> bool:
        return is_smooth(self)

    @cached_property
    def complete(self) -> bool:
        return is_complete(self)


def _canonical_cones(cones: Iterable[Iterable[int]]) -> tuple[Cone, ...]:
    return tuple(sorted(tuple(sorted(int(i) for i in c)) for c in cones))


def build_fan(
    dim: int,
    rays: Sequence[Sequence[int]],
    max_cones: Iterable[Iterable[int]],
    name: Optional[str] = None,
    *,
    check_intersections: bool = True,
) -> Fan:
    """Validate raw data and return a :class:`Fan`.

    Cone lists are canonicalized (each cone sorted, the list sorted).  Pairwise
    cone intersections are checked with an exact LP unless the fan already
    certifies itself as complete, in which case the check is implied.
    """
    rays_t = la.as_matrix(rays)
    for r in rays_t:
        if len(r) != dim:
            raise FanError(f"ray {list(r)} does not have dimension {dim}")
        if dim and not la.is_primitive(r):
            raise NonPrimitiveRay(f"ray {list(r)} is not primitive")
    if len(set(rays_t)) != len(rays_t):
        raise DuplicateRay("rays must be distinct")
    cones = _canonical_cones(max_cones)
    if len(set(cones)) != len(cones):
        raise FanError("duplicate maximal cone")
    used = set()
    for c in cones:
        if len(c) != dim or len(set(c)) != dim:
            raise BadConeSize(f"cone {list(c)} must have {dim} distinct rays")
        if any(i < 0 or i >= len(rays_t) for i in c):
            raise FanError(f"cone {list(c)} references an unknown ray")
        if la.rank([rays_t[i] for i in c]) < dim:
            raise DependentGenerators(f"cone {list(c)} is not simplicial")
        used.update(c)
    if not cones:
        raise FanError("a fan needs at least one maximal cone")
    unused = set(range(len(rays_t))) - used
    if unused:
        raise UnusedRay(f"rays {sorted(unused)} lie in no maximal cone")
    fan = Fan(dim, rays_t, cones, name)
    if check_intersections and not fan.complete:
        check_face_intersections(fan)
    return fan


def check_face_intersections(fan: Fan) -> None:
    """Raise FaceIntersectionViolation unless every two maximal cones meet in a common face.

    For cones A and B with common rays C, the intersection is the face on C
    iff no nontrivial nonnegative combination of A\\C and -(B\\C) lies in the
    span of C.
    """
    for a, b in combinations(fan.max_cones, 2):
        if _bad_intersection(fan, a, b):
            raise FaceIntersectionViolation(
                f"cones {list(a)} and {list(b)} do not meet in a common face")


def _bad_intersection(fan: Fan, a: Cone, b: Cone) -> bool:
    return cones_overlap(fan.dim, fan.rays, a, b)


def cones_overlap(dim: int, rays: Sequence[Vector], a: Cone, b: Cone) -> bool:
    """True if the simplicial cones on ``a`` and ``b`` do not meet in their common face."""
    common = set(a) & set(b)
    only_a = [rays[i] for i in a if i not in common]
    only_b = [rays[i] for i in b if i not in common]
    shared = [rays[i] for i in sorted(common)]
    cols = only_a + [la.scale(-1, v) for v in only_b] + shared + [la.scale(-1, v) for v in shared]
    n_pos = len(only_a) + len(only_b)
    a_eq = [[v[i] for v in cols] for i in range(dim)]
    a_eq.append([1] * n_pos + [0] * (2 * len(shared)))
    b_eq = [0] * dim + [1]
    return linprog([0] * len(cols), A_eq=a_eq, b_eq=b_eq, nonneg=True).status == "optimal"


def is_smooth(fan: Fan) -> bool:
    return all(abs(la.det(fan.cone_rays(c))) == 1 for c in fan.max_cones)


def _normal(vectors: Sequence[Vector], dim: int) -> Vector:
    if not vectors:
        return (1,) + (0,) * (dim - 1)
    basis = la.kernel_basis(la.transpose(vectors))
    return basis[0]


def is_complete(fan: Fan) -> bool:
    """Ridge pairing, opposite sides at every ridge, connectivity, and a one-sheeted cover.

    The last condition counts the maximal cones containing a point that lies
    on no facet hyperplane; a locally consistent closed pseudomanifold covers
    the sphere with constant degree, so one preimage there means exactly one
    everywhere.
    """
    d = fan.dim
    if d == 0:
        return fan.max_cones == ((),)
    ridges: dict[Cone, list[Cone]] = defaultdict(list)
    for c in fan.max_cones:
        for i in range(d):
            ridges[c[:i] + c[i + 1:]].append(c)
    bound = 1
    adjacency: dict[Cone, list[Cone]] = defaultdict(list)
    for ridge, cones in ridges.items():
        if len(cones) != 2:
            return False
        a, b = cones
        n = _normal(fan.cone_rays(ridge), d)
        bound = max(bound, max(abs(x) for x in n))
        (ia,) = set(a) - set(ridge)
        (ib,) = set(b) - set(ridge)
        sa, sb = la.dot(n, fan.rays[ia]), la.dot(n, fan.rays[ib])
        if sa == 0 or sb == 0 or (sa > 0) == (sb > 0):
            return False
        adjacency[a].append(b)
        adjacency[b].append(a)
    seen = {fan.max_cones[0]}
    queue = deque(seen)
    while queue:
        for nb in adjacency[queue.popleft()]:
            if nb not in seen:
                seen.add(nb)
                queue.append(nb)
    if len(seen) != len(fan.max_cones):
        return False
    base = 2 * bound * d + 1
    point = tuple(base ** i for i in range(d))
    hits = 0
    for c in fan.max_cones:
        coeffs = la.solve_rational(fan.cone_rays(c), point)
        if coeffs is not None and all(x > 0 for x in coeffs):
            hits += 1
    return hits == 1


def fan_from_rays_2d(rays: Sequence[Sequence[int]], name: Optional[str] = None) -> Fan:
    """Complete 2D fan whose maximal cones join angularly consecutive rays."""
    rays_t = la.as_matrix(rays)
    if len(rays_t) < 3:
        raise NotSpanning("at least three rays are needed to span the plane")

    def half(v):
        return 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1

    def cmp(i, j):
        u, v = rays_t[i], rays_t[j]
        if half(u) != half(v):
            return half(u) - half(v)
        cross = u[0] * v[1] - u[1] * v[0]
        return -1 if cross > 0 else (1 if cross < 0 else 0)

    order = sorted(range(len(rays_t)), key=cmp_to_key(cmp))
    cones = []
    for k, i in enumerate(order):
        j = order[(k + 1) % len(order)]
        u, v = rays_t[i], rays_t[j]
        if u[0] * v[1] - u[1] * v[0] <= 0:
            raise NotSpanning("rays do not positively span the plane")
        cones.append((i, j))
    return build_fan(2, rays_t, cones, name)


def fan_from_collections(
    dim: int, rays: Sequence[Sequence[int]], collections: Iterable[Iterable[int]],
    name: Optional[str] = None,
) -> Fan:
    """Fan whose cones are the ray sets containing no listed primitive collection."""
    colls = [frozenset(c) for c in collections]
    cones = [c for c in combinations(range(len(rays)), dim)
             if not any(p.issubset(c) for p in colls)]
    return build_fan(dim, rays, cones, name)


def product_fan(f1: Fan, f2: Fan, name: Optional[str] = None) -> Fan:
    z1, z2 = (0,) * f1.dim, (0,) * f2.dim
    rays = [r + z2 for r in f1.rays] + [z1 + r for r in f2.rays]
    n1 = f1.n_rays
    cones = [c1 + tuple(n1 + i for i in c2) for c1 in f1.max_cones for c2 in f2.max_cones]
    if name is None and f1.name and f2.name:
        name = f"{f1.name}x{f2.name}"
    return build_fan(f1.dim + f2.dim, rays, cones, name)


def bundle_fan(
    fiber: Fan,
    base: Fan,
    lift: Mapping[int, Sequence[int]] | Sequence[Sequence[int]],
    name: Optional[str] = None,
) -> Fan:
    """Toric ``fiber``-bundle over ``base``.

    Fiber rays embed as ``(r, 0)``; base ray ``b`` becomes ``(lift[b], b)``.
    ``lift`` maps base-ray indices to fiber-lattice vectors (missing = zero).
    """
    if isinstance(lift, Mapping):
        lifts = [tuple(lift.get(i, (0,) * fiber.dim)) for i in range(base.n_rays)]
    else:
        lifts = [tuple(v) for v in lift]
    for v in lifts:
        if len(v) != fiber.dim:
            raise FanError("lift vectors must live in the fiber lattice")
    zero = (0,) * base.dim
    rays = [r + zero for r in fiber.rays] + [lifts[i] + b for i, b in enumerate(base.rays)]
    n1 = fiber.n_rays
    cones = [c1 + tuple(n1 + i for i in c2) for c1 in fiber.max_cones for c2 in base.max_cones]
    return build_fan(fiber.dim + base.dim, rays, cones, name)


def suspension_fan(base: Fan, ray: int, name: Optional[str] = None) -> Fan:
    """Add ``x1 = (v, 1)`` and ``x2 = (v, -1)`` over ray ``v`` of ``base``.

    Every maximal cone ``s`` of ``base`` yields ``s + x1`` and ``s + x2``, so the
    primitive collections are those of ``base`` together with ``{x1, x2}``, whose
    relation is ``x1 + x2 = 2v``.
    """
    v = base.rays[ray]
    rays = [r + (0,) for r in base.rays] + [v + (1,), v + (-1,)]
    n = base.n_rays
    cones = [c + (n,) for c in base.max_cones] + [c + (n + 1,) for c in base.max_cones]
    return build_fan(base.dim + 1, rays, cones, name)


def star_subdivision(fan: Fan, new_ray: Sequence[int], name: Optional[str] = None) -> Fan:
    """Insert ``new_ray`` and cone it over the faces of the cones it meets."""
    new_ray = tuple(new_ray)
    if new_ray in fan.ray_index:
        raise RayAlreadyPresent(f"{list(new_ray)} is already a ray")
    if not la.is_primitive(new_ray):
        raise NonPrimitiveRay(f"ray {list(new_ray)} is not primitive")
    support = None
    for c in fan.max_cones:
        coeffs = la.solve_in_cone(fan.cone_rays(c), new_ray)
        if coeffs is not None:
            support = tuple(i for i, a in zip(c, coeffs) if a > 0)
            break
    if support is None:
        raise FanError(f"{list(new_ray)} lies outside the support of the fan")
    n = fan.n_rays
    cones = []
    for c in fan.max_cones:
        if set(support).issubset(c):
            for s in support:
                cones.append(tuple(i for i in c if i != s) + (n,))
        else:
            cones.append(c)
    return build_fan(fan.dim, list(fan.rays) + [new_ray], cones, name)


def quotient_fan(
    fan: Fan,
    sublattice_gens: Sequence[Sequence[int]],
    subfan: Iterable[Iterable[int]],
    name: Optional[str] = None,
) -> Fan:
    """Image of ``subfan`` in ``N / (saturated span of sublattice_gens)``.

    Only the maximal members of ``subfan`` matter; they must map to
    ``(d - k)``-dimensional cones.  Result rays are ordered by source index.
    """
    proj = la.quotient_projection(sublattice_gens, fan.dim)
    qdim = fan.dim - len(sublattice_gens)
    cones = [tuple(sorted(c)) for c in subfan]
    tops = [c for c in cones if len(c) == max((len(x) for x in cones), default=0)]
    src_rays = sorted({i for c in tops for i in c})
    images: dict[int, Vector] = {}
    for i in src_rays:
        img = la.apply(proj, fan.rays[i])
        if not any(img):
            raise CollapsedCone(f"ray {i} maps to zero")
        if not la.is_primitive(img):
            raise NonPrimitiveImage(f"ray {i} maps to non-primitive {list(img)}")
        images[i] = img
    seen: dict[Vector, int] = {}
    for i, img in images.items():
        if img in seen:
            raise NonPrimitiveImage(f"rays {seen[img]} and {i} have the same image {list(img)}")
        seen[img] = i
    pos = {i: k for k, i in enumerate(src_rays)}
    out_cones = []
    for c in tops:
        if len(c) != qdim:
            raise CollapsedCone(f"cone {list(c)} cannot map onto a {qdim}-dimensional cone")
        if qdim and la.rank([images[i] for i in c]) < qdim:
            raise CollapsedCone(f"cone {list(c)} collapses in the quotient")
        out_cones.append(tuple(pos[i] for i in c))
    return build_fan(qdim, [images[i] for i in src_rays], out_cones, name)


def subfan_in_span(fan: Fan, indices: Iterable[int], name: Optional[str] = None) -> Fan:
    """Fan formed by the cones on ``indices``, in coordinates of their saturated span."""
    idx = sorted(indices)
    vecs = [fan.rays[i] for i in idx]
    gens = la.hermite_form(vecs)
    u = la.adapted_basis(gens)
    k = len(gens)
    coords = [la.apply(u[:k], v) for v in vecs]
    pos = {i: j for j, i in enumerate(idx)}
    sub = set(idx)
    cones = {tuple(pos[i] for i in c if i in sub) for c in fan.max_cones}
    cones = [c for c in cones if len(c) == k]
    return build_fan(k, coords, cones, name)


@dataclass(frozen=True)
class LatticeIso:
    """Unimodular map ``v -> v @ matrix`` carrying one fan onto another."""

    matrix: la.Matrix
    ray_bijection: tuple[int, ...]

    def apply(self, v: Sequence[int]) -> Vector:
        return tuple(la.dot(v, col) for col in la.transpose(self.matrix))


def isomorphism(f1: Fan, f2: Fan) -> Optional[LatticeIso]:
    """Search for a lattice isomorphism between two fans.

    A maximal cone of ``f1`` is sent onto each ordered maximal cone of ``f2``
    in turn; the linear map is then forced, and accepted if unimodular and
    fan-preserving.  The first match in that order is returned.
    """
    if (f1.dim, f1.n_rays, len(f1.max_cones)) != (f2.dim, f2.n_rays, len(f2.max_cones)):
        return None
    d = f1.dim
    if d == 0:
        return LatticeIso((), ())
    source = f1.max_cones[0]
    src = [f1.rays[i] for i in source]
    src_inv = la.unimodular_inverse(src)
    if src_inv is None:
        return _isomorphism_rational(f1, f2)
    target_cones = set(f2.max_cones)
    for cone in f2.max_cones:
        for perm in permutations(cone):
            tgt = [f2.rays[i] for i in perm]
            mat = la.matmul(src_inv, tgt)
            iso = _try_map(f1, f2, mat, target_cones)
            if iso is not None:
                return iso
    return None


def _try_map(f1: Fan, f2: Fan, mat, target_cones) -> Optional[LatticeIso]:
    if abs(la.det(mat)) != 1:
        return None
    cols = la.transpose(mat)
    bij = []
    for r in f1.rays:
        img = tuple(la.dot(r, c) for c in cols)
        j = f2.ray_index.get(img)
        if j is None:
            return None
        bij.append(j)
    if len(set(bij)) != len(bij):
        return None
    for c in f1.max_cones:
        if tuple(sorted(bij[i] for i in c)) not in target_cones:
            return None
    return LatticeIso(la.as_matrix(mat), tuple(bij))


def _isomorphism_rational(f1: Fan, f2: Fan) -> Optional[LatticeIso]:
    from fractions import Fraction

    source = f1.max_cones[0]
    src = [f1.rays[i] for i in source]
    target_cones = set(f2.max_cones)
    d = f1.dim
    for cone in f2.max_cones:
        for perm in permutations(cone):
            tgt = [f2.rays[i] for i in perm]
            cols = []
            for j in range(d):
                sol = la.solve_rational(la.transpose(src), [t[j] for t in tgt])
                cols.append(sol)
            mat = [[cols[j][i] for j in range(d)] for i in range(d)]
            if any(Fraction(x).denominator != 1 for row in mat for x in row):
                continue
            iso = _try_map(f1, f2, la.as_matrix(mat), target_cones)
            if iso is not None:
                return iso
    return None


def fan_from_dict(data: Mapping) -> Fan:
    return build_fan(int(data["dim"]), data["rays"], data["max_cones"], data.get("name") or None)


def load_fan(path: str | Path) -> Fan:
    with open(path, encoding="utf-8") as fh:
        return fan_from_dict(json.load(fh))


def dump_fan(fan: Fan, path: str | Path) -> None:
    Path(path).write_text(fan_json(fan) + "\n", encoding="utf-8")


def fan_json(fan: Fan) -> str:
    return json.dumps(fan.to_dict(), sort_keys=True)
