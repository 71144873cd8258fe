"""Command-line front end.

Exit codes: 0 when the requested property holds, 1 when it does not, 2 for
unusable input (bad arguments, unreadable or invalid fan data, unknown names).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Callable, Optional, Sequence

from . import corpus
from . import lattice as la
from .deform import (
    deform,
    deformability,
    degree_matrix,
    identify,
    replaced_degree_matrix,
)
from .errors import DichotomyViolated, FanError, TorifanError, UnknownName
from .fan import Fan, fan_from_dict, isomorphism
from .mori import (
    crepant_relations,
    extremal_collections,
    one_cycle,
    positivity_class,
    primitive_relations,
)
from .special import (
    ContractionCertificate,
    bundle_split,
    collections_meeting,
    interior_ray_property,
    s1_s2_split,
    special_report,
)

EXIT_OK, EXIT_PROPERTY, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


class Loaded:
    def __init__(self, fan: Fan, names: Sequence[str], label: str):
        self.fan = fan
        self.names = tuple(names)
        self.label = label


def _load(args, prefix: str = "", require_complete: bool = True) -> Loaded:
    src = _read(args, prefix)
    if require_complete and not (src.fan.smooth and src.fan.complete):
        raise InputError(f"{src.label}: fan is not smooth and complete")
    return src


def _read(args, prefix: str) -> Loaded:
    path = getattr(args, prefix + "fan")
    name = getattr(args, prefix + "name")
    if name is not None:
        try:
            return Loaded(corpus.load(name), corpus.ray_names(name), name)
        except UnknownName:
            raise InputError(f"unknown corpus name {name!r}") from None
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError("top level must be an object")
        fan = fan_from_dict(data)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except (ValueError, KeyError, TypeError, AttributeError) as exc:
        raise InputError(f"{path}: malformed fan file ({exc})") from None
    except FanError as exc:
        raise InputError(f"{path}: {type(exc).__name__}: {exc}") from None
    names = data.get("ray_names") or [f"v{i}" for i in range(fan.n_rays)]
    if not isinstance(names, list) or len(names) != fan.n_rays or not all(isinstance(n, str) for n in names):
        raise InputError(f"{path}: ray_names must list one string per ray")
    return Loaded(fan, names, fan.name or path)


def _corpus_name(fan: Fan) -> Optional[str]:
    pool = [(n, corpus.load(n)) for n in corpus.names() if corpus.load(n).dim == fan.dim]
    return identify(fan, pool)


def _fan_ref(fan: Fan) -> Any:
    return _corpus_name(fan) or fan.to_dict()


def _relation_rows(fan: Fan, names: Sequence[str]) -> list[dict]:
    flags = dict(extremal_collections(fan))
    rows = []
    for rel in primitive_relations(fan):
        rows.append({
            "relation": rel.describe(names),
            "collection": [names[i] for i in rel.collection],
            "degree": rel.degree,
            "extremal": flags[rel.collection],
            "cycle": list(one_cycle(fan, rel)),
        })
    return rows


def _certificate_row(fan: Fan, names, cert: ContractionCertificate) -> dict:
    row = cert.to_dict(names)
    row["image"] = _fan_ref(cert.image_fan)
    row["relation"] = cert.relation.describe(names)
    return row


def _pick(certs, index: Optional[int]) -> list[ContractionCertificate]:
    if index is None:
        return list(certs)
    if not 0 <= index < len(certs):
        raise InputError(f"--relation {index} out of range: {len(certs)} special relation(s)")
    return [certs[index]]


# commands -----------------------------------------------------------------

def cmd_verify(args) -> tuple[int, dict]:
    src = _load(args, require_complete=False)
    fan = src.fan
    report: dict[str, Any] = {
        "fan": src.label,
        "dim": fan.dim,
        "n_rays": fan.n_rays,
        "n_cones": len(fan.max_cones),
        "smooth": fan.smooth,
        "complete": fan.complete,
    }
    if not (fan.smooth and fan.complete):
        return EXIT_PROPERTY, report
    sp = special_report(fan)
    report["positivity"] = sp.positivity.value
    report["special_weak_fano"] = sp.special_weak_fano
    report["num_crepant"] = len(sp.verdicts)
    return EXIT_OK, report


def cmd_relations(args) -> tuple[int, dict]:
    src = _load(args)
    return EXIT_OK, {
        "fan": src.label,
        "positivity": positivity_class(src.fan).value,
        "relations": _relation_rows(src.fan, src.names),
    }


def cmd_special(args) -> tuple[int, dict]:
    src = _load(args)
    fan, names = src.fan, src.names
    sp = special_report(fan)
    rows = []
    for v in sp.verdicts:
        if v.certificate is not None:
            rows.append(_certificate_row(fan, names, v.certificate))
        else:
            x1, x2 = v.relation.collection
            rows.append({
                "relation": v.relation.describe(names),
                "x1": names[x1],
                "x2": names[x2],
                "x": names[v.relation.sigma[0]] if v.relation.sigma else None,
                "failure_reason": v.failure_reason,
            })
    report = {
        "fan": src.label,
        "positivity": sp.positivity.value,
        "special_weak_fano": sp.special_weak_fano,
        "relations": rows,
    }
    if sp.special_weak_fano:
        ok, bad = interior_ray_property(fan)
        report["interior_ray_property"] = {"holds": ok, "violations": [[names[i] for i in p] for p in bad]}
    return (EXIT_OK if sp.special_weak_fano else EXIT_PROPERTY), report


def _structure_row(fan: Fan, names, cert: ContractionCertificate) -> dict:
    row: dict[str, Any] = {"relation": cert.relation.describe(names)}
    try:
        st = s1_s2_split(fan, cert)
    except DichotomyViolated as exc:
        row["side"] = None
        row["error"] = str(exc)
        return row
    row["side"] = st.side
    row["I"] = [names[i] for i in st.I]
    split = bundle_split(fan, containing=(cert.x, cert.x1, cert.x2))
    if split is not None:
        row["bundle"] = {
            "fiber_rays": [names[i] for i in split.fiber_rays],
            "base_rays": [names[i] for i in split.base_rays],
            "fiber": _fan_ref(split.fiber),
            "base": _fan_ref(split.base),
        }
    row["collections_meeting_x1_x2"] = [[names[i] for i in c] for c in collections_meeting(fan, cert)]
    return row


def cmd_structure(args) -> tuple[int, dict]:
    src = _load(args)
    sp = special_report(src.fan)
    certs = _pick(sp.certificates, args.relation)
    rows = [_structure_row(src.fan, src.names, c) for c in certs]
    ok = bool(certs) and all(r["side"] for r in rows)
    return (EXIT_OK if ok else EXIT_PROPERTY), {"fan": src.label, "structure": rows}


def cmd_deform(args) -> tuple[int, dict]:
    src = _load(args)
    fan, names = src.fan, src.names
    certs = special_report(fan).certificates
    if not certs:
        return EXIT_PROPERTY, {"fan": src.label, "applicable": False, "reason": "NoSpecialRelation"}
    (cert,) = _pick(certs, args.relation or 0)
    verdict = deformability(fan, cert)
    report: dict[str, Any] = {"fan": src.label, "relation": cert.relation.describe(names)}
    if not verdict.applicable:
        report.update(applicable=False, reason=verdict.status,
                      positive_rays=[names[i] for i in verdict.positive])
        return EXIT_PROPERTY, report
    try:
        result = deform(fan, cert)
    except TorifanError as exc:
        report.update(applicable=False, reason=type(exc).__name__, detail=str(exc))
        return EXIT_PROPERTY, report
    new_names = list(names)
    new_names[result.replaced_ray_index] = names[result.replaced_ray_index] + "'"
    deformed = result.deformed
    consistent = la.same_row_lattice(
        replaced_degree_matrix(fan, cert, result.w_index), degree_matrix(deformed))
    report.update(
        applicable=True,
        w_index=result.w_index,
        w=names[result.w_index],
        replaced=names[result.replaced_ray_index],
        new_ray=list(result.new_ray),
        cones_preserved=result.cones_preserved,
        degree_matrix_consistent=consistent,
        deformed_fan=deformed.to_dict(),
        deformed_relations=[r.describe(new_names) for r in primitive_relations(deformed)],
        positivity=result.positivity.value,
    )
    target = _corpus_name(deformed)
    if target is not None:
        report["identified_as"] = target
    return EXIT_OK, report


def cmd_isomorphic(args) -> tuple[int, dict]:
    a, b = _load(args), _load(args, "other_")
    iso = isomorphism(a.fan, b.fan)
    report: dict[str, Any] = {"first": a.label, "second": b.label, "isomorphic": iso is not None}
    if iso is not None:
        report["matrix"] = [list(r) for r in iso.matrix]
        report["ray_map"] = {a.names[i]: b.names[j] for i, j in enumerate(iso.ray_bijection)}
    return (EXIT_OK if iso is not None else EXIT_PROPERTY), report


def cmd_degree_matrix(args) -> tuple[int, dict]:
    src = _load(args)
    q = degree_matrix(src.fan)
    return EXIT_OK, {"fan": src.label, "columns": list(src.names), "matrix": [list(r) for r in q]}


def cmd_corpus_list(args) -> tuple[int, dict]:
    rows = []
    for e in corpus.catalog():
        if args.section and e.section != args.section:
            continue
        rows.append({"name": e.name, "section": e.section, "construction": e.construction["kind"]})
    return EXIT_OK, {"entries": rows}


def cmd_corpus_verify_all(args) -> tuple[int, dict]:
    report = corpus.verify_all()
    return (EXIT_OK if report["ok"] else EXIT_PROPERTY), report


# text rendering -----------------------------------------------------------

def _text(command: str, report: dict) -> str:
    if command == "relations":
        lines = [f"{report['fan']}: {report['positivity']}"]
        for r in report["relations"]:
            tag = " extremal" if r["extremal"] else ""
            lines.append(f"  {r['relation']:<28} deg {r['degree']}{tag}")
        return "\n".join(lines)
    if command == "corpus verify-all":
        lines = [f"{e['name']:<12} {'ok' if e['ok'] else 'FAIL ' + '; '.join(e['failures'])}"
                 for e in report["entries"]]
        lines.append("counts: " + ", ".join(f"{k}={v}" for k, v in sorted(report["counts"].items())))
        return "\n".join(lines)
    if command == "corpus list":
        return "\n".join(f"{r['name']:<12} {r['section']:<11} {r['construction']}" for r in report["entries"])
    lines = []
    for key in sorted(report):
        value = report[key]
        if isinstance(value, (list, dict)):
            value = json.dumps(value, sort_keys=True)
        lines.append(f"{key}: {value}")
    return "\n".join(lines)


# parser -------------------------------------------------------------------

def _add_source(p: argparse.ArgumentParser, prefix: str = "", required: bool = True) -> None:
    dest = prefix.replace("-", "_")
    group = p.add_mutually_exclusive_group(required=required)
    group.add_argument(f"--{prefix}fan", dest=dest + "fan", metavar="FILE", help="fan JSON file")
    group.add_argument(f"--{prefix}name", dest=dest + "name", metavar="NAME", help="corpus entry name")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="torifan", description="Exact toolkit for smooth complete toric fans.")
    fmt = argparse.ArgumentParser(add_help=False)
    out = fmt.add_mutually_exclusive_group()
    out.add_argument("--json", dest="as_json", action="store_true", help="emit JSON")
    out.add_argument("--text", dest="as_json", action="store_false", help="emit a text summary (default)")
    sub = parser.add_subparsers(dest="command", required=True)

    commands: list[tuple[str, Callable, str]] = [
        ("verify", cmd_verify, "validate a fan and classify it"),
        ("relations", cmd_relations, "primitive relations with degrees and extremality"),
        ("special", cmd_special, "certificates for the crepant relations"),
        ("structure", cmd_structure, "S1/S2 dichotomy and bundle structure per special relation"),
        ("deform", cmd_deform, "deform along a special relation"),
        ("degree-matrix", cmd_degree_matrix, "Hermite-reduced degree matrix"),
    ]
    for name, func, help_ in commands:
        p = sub.add_parser(name, parents=[fmt], help=help_)
        _add_source(p)
        if name in ("structure", "deform"):
            p.add_argument("--relation", type=int, metavar="INDEX",
                           help="index among the special relations (default: all / first)")
        p.set_defaults(func=func, label=name)

    p = sub.add_parser("isomorphic", parents=[fmt], help="search for a lattice isomorphism between two fans")
    _add_source(p)
    _add_source(p, "other-")
    p.set_defaults(func=cmd_isomorphic, label="isomorphic")

    p = sub.add_parser("corpus", help="catalog operations")
    csub = p.add_subparsers(dest="corpus_command", required=True)
    q = csub.add_parser("list", parents=[fmt], help="list catalog entries")
    q.add_argument("--section", choices=corpus.SECTIONS)
    q.set_defaults(func=cmd_corpus_list, label="corpus list")
    q = csub.add_parser("verify-all", parents=[fmt], help="verify every catalog entry")
    q.set_defaults(func=cmd_corpus_verify_all, label="corpus verify-all")
    return parser


def execute(argv: Optional[Sequence[str]] = None) -> tuple[int, dict, str]:
    """Run a command and return ``(exit_code, report, rendered_output)``."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_INPUT
        return code, {}, ""
    try:
        code, report = args.func(args)
    except InputError as exc:
        return EXIT_INPUT, {"error": str(exc)}, f"error: {exc}"
    except TorifanError as exc:
        return EXIT_INPUT, {"error": f"{type(exc).__name__}: {exc}"}, f"error: {type(exc).__name__}: {exc}"
    if args.as_json:
        rendered = json.dumps(report, sort_keys=True, indent=2)
    else:
        rendered = _text(args.label, report)
    return code, report, rendered


def main(argv: Optional[Sequence[str]] = None) -> int:
    code, report, rendered = execute(argv)
    if rendered:
        stream = sys.stderr if "error" in report and len(report) == 1 else sys.stdout
        print(rendered, file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
