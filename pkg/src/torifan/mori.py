"""Primitive collections, primitive relations and the Mori cone of a smooth fan."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from . import lattice as la
from .errors import FanError, NotWeakFano, SumNotLocated
from .fan import Fan
from .lp import in_cone

Collection = tuple[int, ...]


class Positivity(str, enum.Enum):
    FANO = "Fano"
    WEAK_FANO = "WeakFanoNotFano"
    NEITHER = "Neither"

    @property
    def rank(self) -> int:
        return {"Fano": 2, "WeakFanoNotFano": 1, "Neither": 0}[self.value]


@dataclass(frozen=True)
class PrimitiveRelation:
    """``sum(rays in collection) = sum(coeffs[j] * rays[sigma[j]])``."""

    collection: Collection
    sigma: tuple[int, ...]
    coeffs: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.collection) - sum(self.coeffs)

    @property
    def is_crepant_shape(self) -> bool:
        """True for relations of the form ``x1 + x2 = 2x``."""
        return len(self.collection) == 2 and self.coeffs == (2,)

    def describe(self, names: Optional[Sequence[str]] = None) -> str:
        def nm(i):
            return names[i] if names else f"v{i}"

        lhs = "+".join(nm(i) for i in self.collection)
        terms = [(f"{a}" if a != 1 else "") + nm(i) for i, a in zip(self.sigma, self.coeffs)]
        return f"{lhs}={'+'.join(terms) if terms else '0'}"

    def to_dict(self) -> dict:
        return {
            "collection": list(self.collection),
            "sigma": list(self.sigma),
            "coeffs": list(self.coeffs),
            "degree": self.degree,
        }


def _canonical(collections) -> tuple[Collection, ...]:
    return tuple(sorted({tuple(sorted(c)) for c in collections}, key=lambda c: (len(c), c)))


@lru_cache(maxsize=512)
def primitive_collections(fan: Fan) -> tuple[Collection, ...]:
    """Minimal non-faces, grown level by level from faces whose every facet is a face."""
    faces = fan.faces
    found = set()
    level = [f for f in faces if len(f) == 1]
    for _ in range(fan.dim + 1):
        candidates = set()
        for face in level:
            for r in range(fan.n_rays):
                if r not in face:
                    candidates.add(face | {r})
        for cand in candidates:
            if cand not in faces and all(cand - {x} in faces for x in cand):
                found.add(cand)
        level = [f for f in faces if len(f) == len(level[0]) + 1] if level else []
        if not level:
            break
    return _canonical(found)


def primitive_relation(fan: Fan, collection: Sequence[int]) -> PrimitiveRelation:
    """Locate the sum of the collection in the relative interior of its cone."""
    coll = tuple(sorted(collection))
    total = la.vsum((fan.rays[i] for i in coll), fan.dim)
    if not any(total):
        return PrimitiveRelation(coll, (), ())
    for cone in fan.max_cones:
        coeffs = la.solve_rational(fan.cone_rays(cone), total)
        if coeffs is None or any(c < 0 for c in coeffs):
            continue
        support = [(i, c) for i, c in zip(cone, coeffs) if c > 0]
        if any(c.denominator != 1 for _, c in support):
            raise FanError(f"fractional primitive relation for {list(coll)}: fan is not smooth")
        return PrimitiveRelation(coll, tuple(i for i, _ in support), tuple(int(c) for _, c in support))
    raise SumNotLocated(f"sum of collection {list(coll)} lies in no cone")


@lru_cache(maxsize=512)
def primitive_relations(fan: Fan) -> tuple[PrimitiveRelation, ...]:
    return tuple(primitive_relation(fan, p) for p in primitive_collections(fan))


def one_cycle(fan: Fan, rel: PrimitiveRelation) -> tuple[int, ...]:
    coeffs = [0] * fan.n_rays
    for i in rel.collection:
        coeffs[i] += 1
    for i, a in zip(rel.sigma, rel.coeffs):
        coeffs[i] -= a
    return tuple(coeffs)


def _positively_proportional(u: Sequence[int], v: Sequence[int]) -> bool:
    n = len(u)
    if any(u[i] * v[j] != u[j] * v[i] for i in range(n) for j in range(i + 1, n)):
        return False
    return la.dot(u, v) > 0


@lru_cache(maxsize=512)
def extremal_collections(fan: Fan) -> tuple[tuple[Collection, bool], ...]:
    """Flag each primitive collection whose cycle spans an extremal ray of NE(X).

    A cycle is extremal iff it is not a nonnegative rational combination of
    the cycles that are not positively proportional to it.
    """
    rels = primitive_relations(fan)
    cycles = [one_cycle(fan, r) for r in rels]
    out = []
    for rel, cyc in zip(rels, cycles):
        others = [c for c in cycles if not _positively_proportional(c, cyc)]
        out.append((rel.collection, in_cone(others, cyc) is None))
    return tuple(out)


def extremal_relations(fan: Fan) -> tuple[PrimitiveRelation, ...]:
    flags = dict(extremal_collections(fan))
    return tuple(r for r in primitive_relations(fan) if flags[r.collection])


def is_extremal(fan: Fan, rel: PrimitiveRelation) -> bool:
    return dict(extremal_collections(fan))[rel.collection]


def mori_decomposition(fan: Fan, rel: PrimitiveRelation) -> dict[Collection, Fraction]:
    """Nonnegative weights on extremal cycles summing to the cycle of ``rel``."""
    ext = extremal_relations(fan)
    coeffs = in_cone([one_cycle(fan, e) for e in ext], one_cycle(fan, rel))
    if coeffs is None:
        raise FanError("cycle outside the cone of extremal cycles: fan is not projective")
    return {e.collection: c for e, c in zip(ext, coeffs) if c}


def positivity_class(fan: Fan) -> Positivity:
    degrees = [r.degree for r in primitive_relations(fan)]
    if all(d > 0 for d in degrees):
        return Positivity.FANO
    if all(d >= 0 for d in degrees):
        return Positivity.WEAK_FANO
    return Positivity.NEITHER


def crepant_relations(fan: Fan) -> tuple[PrimitiveRelation, ...]:
    """Extremal relations of degree zero, i.e. the primitive crepant contractions."""
    if positivity_class(fan) is Positivity.NEITHER:
        raise NotWeakFano(f"{fan.name or 'fan'} has a primitive relation of negative degree")
    return tuple(r for r in extremal_relations(fan) if r.degree == 0)
