"""Regenerate ``data/oracle.json`` from the brute-force reference code.

Run from the repository root: ``python tests/freeze_oracle.py``.  Only the
corpus fans (their rays and cones) come from the library; every derived value
is computed in ``oracle.py``.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))

import oracle  # noqa: E402
from torifan import corpus  # noqa: E402

MAX_RAYS = 10
MAX_RHO = 6


def crepant_triples(fan, rels):
    out = []
    for r in rels:
        if r["degree"] == 0 and r["extremal"] and len(r["collection"]) == 2:
            rhs = {int(k): v for k, v in r["rhs"].items()}
            if list(rhs.values()) == [2]:
                out.append((*r["collection"], next(iter(rhs))))
    return out


def main() -> None:
    frozen = {}
    for name in corpus.names():
        fan = corpus.load(name)
        if fan.n_rays > MAX_RAYS:
            continue
        rho = fan.n_rays - fan.dim
        colls = oracle.primitive_collections(fan.n_rays, fan.max_cones)
        row = {"rho": rho, "collections": [list(c) for c in colls]}
        if rho <= MAX_RHO:
            rels = oracle.relations(fan.rays, fan.max_cones)
            row["relations"] = rels
            faces = oracle.faces(fan.max_cones)
            certs = []
            for x1, x2, x in crepant_triples(fan, rels):
                zero_on = [y for y in range(fan.n_rays)
                           if y not in (x, x1, x2) and frozenset((x, y)) in faces]
                m = oracle.certificate_box(fan.rays, x, x1, x2, zero_on)
                certs.append({"x1": x1, "x2": x2, "x": x, "sigma_phi_rays": zero_on,
                              "m_in_box": list(m) if m else None})
            row["crepant"] = certs
        frozen[name] = row
    out = HERE / "data" / "oracle.json"
    out.write_text(json.dumps(frozen, sort_keys=True, indent=1) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
