from __future__ import annotations

import json
import sys
from itertools import combinations
from pathlib import Path

import pytest
from hypothesis import strategies as st

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))

from torifan.fan import Fan, build_fan, star_subdivision  # noqa: E402


def projective_space(d: int) -> Fan:
    rays = [tuple(int(i == j) for j in range(d)) for i in range(d)] + [(-1,) * d]
    cones = list(combinations(range(d + 1), d))
    return build_fan(d, rays, cones, f"P{d}")


@st.composite
def blowups(draw, dims=(2, 3), max_steps=4) -> Fan:
    """Smooth projective fans: P^d followed by star subdivisions at sums over faces."""
    d = draw(st.sampled_from(dims))
    fan = projective_space(d)
    for _ in range(draw(st.integers(0, max_steps))):
        faces = sorted(tuple(sorted(f)) for f in fan.faces if len(f) >= 2)
        if not faces:
            break
        face = draw(st.sampled_from(faces))
        ray = tuple(sum(fan.rays[i][k] for i in face) for k in range(d))
        fan = star_subdivision(fan, ray)
    return fan


@st.composite
def unimodular(draw, d: int):
    """Product of random elementary matrices and a signed permutation."""
    mat = [[int(i == j) for j in range(d)] for i in range(d)]
    for _ in range(draw(st.integers(0, 6))):
        i, j = draw(st.sampled_from([(a, b) for a in range(d) for b in range(d) if a != b]))
        c = draw(st.integers(-2, 2))
        mat[i] = [x + c * y for x, y in zip(mat[i], mat[j])]
    perm = draw(st.permutations(range(d)))
    signs = draw(st.lists(st.sampled_from([1, -1]), min_size=d, max_size=d))
    return [[s * x for x in mat[p]] for p, s in zip(perm, signs)]


def transform(fan: Fan, mat, order=None) -> Fan:
    """Apply ``v -> v @ mat`` and optionally reorder the rays."""
    d = fan.dim
    rays = [tuple(sum(v[i] * mat[i][j] for i in range(d)) for j in range(d)) for v in fan.rays]
    order = list(order) if order is not None else list(range(fan.n_rays))
    pos = {old: new for new, old in enumerate(order)}
    new_rays = [rays[i] for i in order]
    cones = [[pos[i] for i in c] for c in fan.max_cones]
    return build_fan(d, new_rays, cones)


@pytest.fixture(scope="session")
def frozen_oracle() -> dict:
    return json.loads((HERE / "data" / "oracle.json").read_text(encoding="utf-8"))


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[key])
