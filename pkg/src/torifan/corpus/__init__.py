"""Named fans: weak del Pezzo surfaces, the 3-folds they fiber into, and the special 4-folds.

The catalog (``data/catalog.json``) maps each name to a construction recipe,
optional ray names, relations that must appear on the realized fan, and the
properties the fan is expected to have.  Fans with hand-fixed coordinates live
in ``data/fans/`` in the ordinary fan JSON format.  Set ``TORIFAN_CORPUS_DIR``
to point at another directory with the same layout.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence

from .. import lattice as la
from ..deform import TOO_MANY_POSITIVE, deform, deformability, fingerprint
from ..errors import FanError, TorifanError, UnknownName
from ..fan import (
    Fan,
    bundle_fan,
    fan_from_rays_2d,
    isomorphism,
    load_fan,
    product_fan,
    star_subdivision,
    suspension_fan,
)
from ..mori import PrimitiveRelation, crepant_relations, positivity_class, primitive_relations
from ..special import special_report

ENV_VAR = "TORIFAN_CORPUS_DIR"
SECTIONS = ("curves", "surfaces", "threefolds", "fourfolds", "products", "nonspecial")


def data_dir() -> Path:
    override = os.environ.get(ENV_VAR)
    return Path(override) if override else Path(__file__).parent / "data"


@dataclass(frozen=True)
class Expected:
    positivity: Optional[str] = None
    special: Optional[bool] = None
    num_crepant: Optional[int] = None
    deformable: Optional[bool] = None
    deforms_to: Optional[str] = None


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    section: str
    construction: Mapping[str, Any]
    ray_names: Optional[tuple[str, ...]] = None
    relations: tuple[str, ...] = ()
    relations_complete: bool = False
    expected: Expected = field(default_factory=Expected)
    cross_checks: tuple[Mapping[str, Any], ...] = ()


def _entry_from_json(raw: Mapping[str, Any]) -> CorpusEntry:
    names = raw.get("ray_names")
    return CorpusEntry(
        name=raw["name"],
        section=raw["section"],
        construction=raw["construction"],
        ray_names=tuple(names) if names else None,
        relations=tuple(raw.get("relations", ())),
        relations_complete=bool(raw.get("relations_complete", False)),
        expected=Expected(**raw.get("expected", {})),
        cross_checks=tuple(raw.get("cross_checks", ())),
    )


@lru_cache(maxsize=8)
def _catalog(root: str) -> tuple[CorpusEntry, ...]:
    with open(Path(root) / "catalog.json", encoding="utf-8") as fh:
        raw = json.load(fh)
    entries = tuple(_entry_from_json(e) for e in raw["entries"])
    seen = set()
    for e in entries:
        if e.name in seen:
            raise FanError(f"duplicate catalog name {e.name!r}")
        if e.section not in SECTIONS:
            raise FanError(f"{e.name}: unknown section {e.section!r}")
        seen.add(e.name)
    return entries


def catalog() -> tuple[CorpusEntry, ...]:
    return _catalog(str(data_dir()))


def names(section: Optional[str] = None) -> tuple[str, ...]:
    return tuple(e.name for e in catalog() if section is None or e.section == section)


def entry(name: str) -> CorpusEntry:
    for e in catalog():
        if e.name == name:
            return e
    raise UnknownName(name)


def load(name: str) -> Fan:
    """Realized and validated fan for a catalog name (memoized)."""
    return _load(str(data_dir()), name)


@lru_cache(maxsize=None)
def _load(root: str, name: str) -> Fan:
    return realize(entry(name).construction, name)


def ray_names(name: str) -> tuple[str, ...]:
    return _ray_names(str(data_dir()), name)


@lru_cache(maxsize=None)
def _ray_names(root: str, name: str) -> tuple[str, ...]:
    e = entry(name)
    if e.ray_names:
        return e.ray_names
    return default_ray_names(e.construction, load(name).n_rays)


def default_ray_names(construction: Mapping[str, Any], n_rays: int) -> tuple[str, ...]:
    kind = construction["kind"]
    if kind == "product":
        a, b = (ray_names(f) for f in construction["factors"])
        if set(a) & set(b):
            b = tuple(n + "'" for n in b)
        return a + b
    if kind == "bundle":
        return ray_names(construction["fiber"]) + ray_names(construction["base"])
    if kind == "suspension":
        return ray_names(construction["base"]) + ("x1", "x2")
    if kind == "star":
        base = ray_names(construction["base"])
        return base + tuple(f"e{k}" for k in range(1, n_rays - len(base) + 1))
    return tuple(f"v{k}" for k in range(1, n_rays + 1))


def _base_ray(base: str, ray: int | str) -> int:
    if isinstance(ray, int):
        return ray
    try:
        return ray_names(base).index(ray)
    except ValueError:
        raise FanError(f"{base} has no ray named {ray!r}") from None


def _side(text: str, names_: Sequence[str]) -> dict[str, int]:
    """Parse ``"x1+2x"`` into ``{"x1": 1, "x": 2}``; names may themselves contain ``+``."""
    text = text.replace(" ", "")
    out: dict[str, int] = {}
    if text == "0":
        return out
    by_length = sorted(names_, key=len, reverse=True)
    i = 0
    while i < len(text):
        m = re.match(r"\d*", text[i:])
        coeff = int(m.group() or 1)
        i += m.end()
        for nm in by_length:
            end = i + len(nm)
            if text.startswith(nm, i) and (end == len(text) or text[end] == "+"):
                break
        else:
            raise FanError(f"cannot parse {text!r}")
        out[nm] = out.get(nm, 0) + coeff
        i = end + 1 if end < len(text) else end
    return out


def _combination(expr: str, names_: Sequence[str], rays: Sequence[la.Vector], dim: int) -> la.Vector:
    """Evaluate an expression such as ``"w4+w5"`` or ``"2w3"`` on named rays."""
    out = (0,) * dim
    for nm, k in _side(expr, names_).items():
        out = la.add(out, la.scale(k, rays[names_.index(nm)]))
    return out


def realize(construction: Mapping[str, Any], name: Optional[str] = None) -> Fan:
    kind = construction.get("kind")
    if kind == "surface":
        return fan_from_rays_2d(construction["rays"], name)
    if kind == "explicit":
        path = data_dir() / construction["file"]
        return load_fan(path).with_name(name)
    if kind == "product":
        a, b = (load(f) for f in construction["factors"])
        return product_fan(a, b, name)
    if kind == "bundle":
        fiber, base = load(construction["fiber"]), load(construction["base"])
        fnames = ray_names(construction["fiber"])
        lifts = {}
        for key, value in construction.get("lifts", {}).items():
            idx = _base_ray(construction["base"], key)
            if isinstance(value, str):
                lifts[idx] = _combination(value, fnames, fiber.rays, fiber.dim)
            else:
                lifts[idx] = tuple(value)
        return bundle_fan(fiber, base, lifts, name)
    if kind == "suspension":
        base = load(construction["base"])
        return suspension_fan(base, _base_ray(construction["base"], construction["ray"]), name)
    if kind == "star":
        fan = load(construction["base"])
        for ray in construction["rays"]:
            fan = star_subdivision(fan, ray)
        return fan.with_name(name)
    raise FanError(f"unknown construction kind {kind!r}")


# relation text ------------------------------------------------------------

def parse_relation(text: str, names_: Sequence[str]) -> tuple[frozenset[str], tuple[tuple[str, int], ...]]:
    """Canonical form of ``"x1+x2=2x"``: the collection and the sorted right-hand side."""
    lhs, rhs = text.split("=")
    return frozenset(_side(lhs, names_)), tuple(sorted(_side(rhs, names_).items()))


def relation_text(rel: PrimitiveRelation, names_: Sequence[str]) -> str:
    return rel.describe(names_)


def named_relations(name: str) -> tuple[str, ...]:
    fan, nm = load(name), ray_names(name)
    return tuple(relation_text(r, nm) for r in primitive_relations(fan))


# verification -------------------------------------------------------------

def _same_fan(fan: Fan, other: Fan) -> bool:
    return other.dim == fan.dim and isomorphism(fan, other) is not None


def verify_entry(name: str) -> dict:
    """Realize one entry and compare it with its declared data."""
    e = entry(name)
    report: dict[str, Any] = {"name": name, "section": e.section}
    failures: list[str] = []
    try:
        fan = load(name)
    except TorifanError as exc:
        report.update(ok=False, failures=[f"construction: {type(exc).__name__}: {exc}"])
        return report
    if not (fan.smooth and fan.complete):
        failures.append("fan is not smooth and complete")
    report.update(dim=fan.dim, n_rays=fan.n_rays, n_cones=len(fan.max_cones))

    nm = ray_names(name)
    realized = {parse_relation(t, nm) for t in named_relations(name)}
    declared = {parse_relation(t, nm) for t in e.relations}
    missing = [t for t in e.relations if parse_relation(t, nm) not in realized]
    if missing:
        failures.append(f"declared relations not realized: {missing}")
    if e.relations_complete and realized != declared:
        failures.append("realized relations differ from the declared complete list")

    pos = positivity_class(fan)
    report["positivity"] = pos.value
    if e.expected.positivity is not None and pos.value != e.expected.positivity:
        failures.append(f"positivity {pos.value}, expected {e.expected.positivity}")

    if pos.value != "Neither":
        crepant = crepant_relations(fan)
        report["num_crepant"] = len(crepant)
        if e.expected.num_crepant is not None and len(crepant) != e.expected.num_crepant:
            failures.append(f"{len(crepant)} crepant relations, expected {e.expected.num_crepant}")
        sp = special_report(fan)
        report["special_weak_fano"] = sp.special_weak_fano
        report["relations"] = [
            {
                "relation": relation_text(v.relation, ray_names(name)),
                "special": v.certificate is not None,
                "failure_reason": v.failure_reason,
                "deformability": deformability(fan, v.certificate).status if v.certificate else None,
            }
            for v in sp.verdicts
        ]
        if e.expected.special is not None and sp.special_weak_fano != e.expected.special:
            failures.append(f"special_weak_fano {sp.special_weak_fano}, expected {e.expected.special}")
        statuses = [deformability(fan, c).status for c in sp.certificates]
        nondeformable = TOO_MANY_POSITIVE in statuses
        report["nondeformable"] = nondeformable
        if e.expected.deformable is not None and e.expected.deformable == nondeformable:
            failures.append(f"deformability statuses {statuses}")
        if e.expected.deforms_to is not None:
            if not sp.certificates:
                failures.append("no special relation to deform along")
            else:
                target = load(e.expected.deforms_to)
                result = deform(fan, sp.certificates[0])
                if not _same_fan(result.deformed, target):
                    failures.append(f"deformation is not isomorphic to {e.expected.deforms_to}")
    elif e.expected.special:
        failures.append("not weak Fano")

    for k, check in enumerate(e.cross_checks):
        try:
            other = realize(check)
        except TorifanError as exc:
            failures.append(f"cross-check {k}: {type(exc).__name__}: {exc}")
            continue
        if not _same_fan(fan, other):
            failures.append(f"cross-check {k} ({check['kind']}) is not isomorphic")

    report["ok"] = not failures
    report["failures"] = failures
    return report


def isomorphic_pairs(section: str) -> list[tuple[str, str]]:
    """Pairs of entries in ``section`` whose fans are isomorphic."""
    members = names(section)
    prints = {n: fingerprint(load(n)) for n in members}
    out = []
    for a, b in combinations(members, 2):
        if prints[a] == prints[b] and isomorphism(load(a), load(b)) is not None:
            out.append((a, b))
    return out


def verify_all() -> dict:
    """Verify every entry, check sections for duplicates, and count the headline sets."""
    entries = [verify_entry(n) for n in names()]
    by_name = {r["name"]: r for r in entries}
    duplicates = {s: [list(p) for p in isomorphic_pairs(s)]
                  for s in ("surfaces", "threefolds", "fourfolds")}
    four = [by_name[n] for n in names("fourfolds")]
    surfaces = [by_name[n] for n in names("surfaces")]
    counts = {
        "surfaces": len(surfaces),
        "fano_surfaces": sum(r.get("positivity") == "Fano" for r in surfaces),
        "fourfolds": len(four),
        "special_fourfolds": sum(bool(r.get("special_weak_fano")) for r in four),
        "nondeformable": sum(bool(r.get("nondeformable")) for r in four),
    }
    ok = all(r["ok"] for r in entries) and not any(duplicates.values())
    return {
        "ok": ok,
        "counts": counts,
        "isomorphic_pairs": duplicates,
        "failed": [r["name"] for r in entries if not r["ok"]],
        "entries": entries,
    }
