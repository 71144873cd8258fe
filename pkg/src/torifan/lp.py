"""Exact rational linear programming (dense two-phase simplex, Bland's rule).

The problems solved here are tiny (a handful of variables and at most a few
dozen constraints), so a dense Fraction tableau is plenty fast and keeps every
decision exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

Number = int | Fraction


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    x: Optional[tuple[Fraction, ...]] = None
    value: Optional[Fraction] = None

    @property
    def feasible(self) -> bool:
        return self.status != "infeasible"


def _pivot(t: list[list[Fraction]], r: int, c: int) -> None:
    pv = t[r][c]
    if pv != 1:
        t[r] = [x / pv for x in t[r]]
    row = t[r]
    for i, other in enumerate(t):
        if i != r and other[c] != 0:
            f = other[c]
            t[i] = [x - f * y for x, y in zip(other, row)]


def _run(t, basis, cost, cols) -> str:
    m = len(t)
    while True:
        in_basis = set(basis)
        entering = None
        for j in cols:
            if j in in_basis:
                continue
            reduced = cost[j] - sum(cost[basis[i]] * t[i][j] for i in range(m))
            if reduced < 0:
                entering = j
                break
        if entering is None:
            return "optimal"
        best = None
        for i in range(m):
            a = t[i][entering]
            if a > 0:
                ratio = t[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return "unbounded"
        _pivot(t, best[1], entering)
        basis[best[1]] = entering


def linprog(
    c: Sequence[Number],
    A_ub: Sequence[Sequence[Number]] = (),
    b_ub: Sequence[Number] = (),
    A_eq: Sequence[Sequence[Number]] = (),
    b_eq: Sequence[Number] = (),
    nonneg: bool = False,
) -> LPResult:
    """Minimize ``c @ x`` subject to ``A_ub @ x <= b_ub`` and ``A_eq @ x = b_eq``.

    Variables are free unless ``nonneg`` is set.
    """
    n = len(c)
    split = not nonneg
    nx = 2 * n if split else n
    n_ub = len(A_ub)
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []

    def expand(a):
        a = [Fraction(v) for v in a]
        return a + [-v for v in a] if split else a

    for k, (a, b) in enumerate(zip(A_ub, b_ub)):
        slack = [Fraction(int(k == j)) for j in range(n_ub)]
        rows.append(expand(a) + slack)
        rhs.append(Fraction(b))
    for a, b in zip(A_eq, b_eq):
        rows.append(expand(a) + [Fraction(0)] * n_ub)
        rhs.append(Fraction(b))
    m = len(rows)
    nv = nx + n_ub
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]
    # artificial variable per row
    t = [rows[i] + [Fraction(int(i == j)) for j in range(m)] + [rhs[i]] for i in range(m)]
    basis = [nv + i for i in range(m)]
    phase1 = [Fraction(0)] * nv + [Fraction(1)] * m
    _run(t, basis, phase1, range(nv + m))
    if sum(t[i][-1] for i in range(m) if basis[i] >= nv) != 0:
        return LPResult("infeasible")
    # drive zero-level artificials out of the basis, dropping redundant rows
    i = 0
    while i < len(t):
        if basis[i] >= nv:
            j = next((j for j in range(nv) if t[i][j] != 0), None)
            if j is None:
                del t[i]
                del basis[i]
                continue
            _pivot(t, i, j)
            basis[i] = j
        i += 1
    t = [row[:nv] + [row[-1]] for row in t]
    cost = [Fraction(v) for v in c]
    cost = cost + [-v for v in cost] if split else cost
    cost = cost + [Fraction(0)] * n_ub
    status = _run(t, basis, cost, range(nv))
    if status == "unbounded":
        return LPResult("unbounded")
    values = [Fraction(0)] * nv
    for i, b in enumerate(basis):
        values[b] = t[i][-1]
    x = tuple(values[j] - values[n + j] for j in range(n)) if split else tuple(values[:n])
    value = sum((Fraction(ci) * xi for ci, xi in zip(c, x)), Fraction(0))
    return LPResult("optimal", x, value)


def in_cone(generators: Sequence[Sequence[int]], point: Sequence[int]) -> Optional[tuple[Fraction, ...]]:
    """Nonnegative coefficients expressing ``point`` in the cone of arbitrary generators."""
    dim = len(point)
    if not generators:
        return () if not any(point) else None
    a_eq = [[g[i] for g in generators] for i in range(dim)]
    res = linprog([0] * len(generators), A_eq=a_eq, b_eq=list(point), nonneg=True)
    return res.x if res.status == "optimal" else None
