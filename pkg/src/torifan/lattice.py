"""Exact integer linear algebra on lattices ``N = Z^d``.

Vectors are tuples of Python ints and matrices are tuples of row tuples.
Nothing in here touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence

from .errors import DependentGenerators

Vector = tuple[int, ...]
Matrix = tuple[Vector, ...]


def as_matrix(rows: Iterable[Iterable[int]]) -> Matrix:
    return tuple(tuple(int(a) for a in row) for row in rows)


def dot(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(u, v))


def add(u: Sequence[int], v: Sequence[int]) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Sequence[int], v: Sequence[int]) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def scale(c: int, v: Sequence[int]) -> Vector:
    return tuple(c * a for a in v)


def vsum(vectors: Iterable[Sequence[int]], dim: int) -> Vector:
    total = [0] * dim
    for v in vectors:
        for i, a in enumerate(v):
            total[i] += a
    return tuple(total)


def is_primitive(v: Sequence[int]) -> bool:
    g = 0
    for a in v:
        g = gcd(g, a)
    return g == 1


def transpose(mat: Sequence[Sequence[int]]) -> Matrix:
    return tuple(zip(*mat)) if mat else ()


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def det(mat: Sequence[Sequence[int]]) -> int:
    """Determinant of a square integer matrix (fraction-free Bareiss)."""
    n = len(mat)
    if n == 0:
        return 1
    a = [list(r) for r in mat]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def hermite_with_transform(mat: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix]:
    """Row Hermite normal form ``H = U @ mat`` with ``U`` unimodular.

    Pivots are positive, entries above a pivot lie in ``[0, pivot)`` and zero
    rows are collected at the bottom.
    """
    a = [list(r) for r in mat]
    m = len(a)
    n = len(a[0]) if m else 0
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    p = 0
    for col in range(n):
        if p == m:
            break
        while True:
            nz = [i for i in range(p, m) if a[i][col] != 0]
            if not nz:
                break
            best = min(nz, key=lambda i: (abs(a[i][col]), i))
            a[p], a[best] = a[best], a[p]
            u[p], u[best] = u[best], u[p]
            clean = True
            for i in range(p + 1, m):
                if a[i][col]:
                    q = a[i][col] // a[p][col]
                    a[i] = [x - q * y for x, y in zip(a[i], a[p])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[p])]
                    if a[i][col]:
                        clean = False
            if clean:
                break
        if p < m and a[p][col] != 0:
            if a[p][col] < 0:
                a[p] = [-x for x in a[p]]
                u[p] = [-x for x in u[p]]
            for i in range(p):
                q = a[i][col] // a[p][col]
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[p])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[p])]
            p += 1
    return as_matrix(a), as_matrix(u)


def hermite_form(mat: Sequence[Sequence[int]]) -> Matrix:
    """Nonzero rows of the row Hermite normal form: a canonical row-lattice basis."""
    h, _ = hermite_with_transform(mat)
    return tuple(r for r in h if any(r))


def rank(mat: Sequence[Sequence[int]]) -> int:
    return len(hermite_form(mat)) if mat else 0


def kernel_basis(mat: Sequence[Sequence[int]]) -> Matrix:
    """Z-basis of the left kernel ``{v : v @ mat = 0}`` in Hermite form.

    For the ``n x d`` ray matrix of a fan these rows are the relations among
    the rays, i.e. the columns of a degree matrix.
    """
    n = len(mat)
    if n == 0:
        return ()
    if not mat[0]:
        return as_matrix([[int(i == j) for j in range(n)] for i in range(n)])
    h, u = hermite_with_transform(mat)
    kernel = [u[i] for i in range(n) if not any(h[i])]
    if not kernel:
        return ()
    return hermite_form(kernel)


def same_row_lattice(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> bool:
    return hermite_form(a) == hermite_form(b)


def solve_rational(
    generators: Sequence[Sequence[int]], point: Sequence[int]
) -> Optional[tuple[Fraction, ...]]:
    """Solve ``sum c_i g_i = point`` exactly for linearly independent ``g_i``.

    Returns ``None`` when the point is outside the span.
    """
    k = len(generators)
    dim = len(point)
    if k == 0:
        return () if not any(point) else None
    rows = [[Fraction(generators[j][i]) for j in range(k)] + [Fraction(point[i])]
            for i in range(dim)]
    piv_cols = []
    r = 0
    for c in range(k):
        pr = next((i for i in range(r, dim) if rows[i][c] != 0), None)
        if pr is None:
            raise DependentGenerators(f"generators {list(map(list, generators))} are dependent")
        rows[r], rows[pr] = rows[pr], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(dim):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    if any(rows[i][k] != 0 for i in range(r, dim)):
        return None
    return tuple(rows[i][k] for i in range(k))


def check_independent(generators: Sequence[Sequence[int]]) -> None:
    if generators and rank(generators) < len(generators):
        raise DependentGenerators(f"generators {list(map(list, generators))} are dependent")


def solve_in_cone(
    generators: Sequence[Sequence[int]], point: Sequence[int]
) -> Optional[tuple[Fraction, ...]]:
    """Coefficients ``c_i >= 0`` with ``sum c_i g_i = point``, or ``None``.

    Raises DependentGenerators if the generators are linearly dependent.
    """
    check_independent(generators)
    coeffs = solve_rational(generators, point)
    if coeffs is None or any(c < 0 for c in coeffs):
        return None
    return coeffs


def adapted_basis(generators: Sequence[Sequence[int]]) -> Matrix:
    """Unimodular ``U`` such that ``U @ g`` vanishes below row ``k`` for every generator.

    The first ``k`` rows of ``U`` give coordinates on the saturation of the
    span of the ``k`` generators; the last ``d - k`` rows project onto the
    torsion-free quotient.
    """
    check_independent(generators)
    if not generators:
        raise ValueError("adapted_basis needs at least one generator to fix the dimension")
    _, u = hermite_with_transform(transpose(generators))
    return u


def quotient_projection(generators: Sequence[Sequence[int]], dim: Optional[int] = None) -> Matrix:
    """Integer matrix of a surjection ``Z^d -> Z^(d-k)`` killing the saturated span."""
    if not generators:
        if dim is None:
            raise ValueError("dim is required when there are no generators")
        return as_matrix([[int(i == j) for j in range(dim)] for i in range(dim)])
    u = adapted_basis(generators)
    return u[len(generators):]


def apply(mat: Sequence[Sequence[int]], v: Sequence[int]) -> Vector:
    return tuple(dot(row, v) for row in mat)


def unimodular_inverse(mat: Sequence[Sequence[int]]) -> Optional[Matrix]:
    """Integer inverse of a square matrix, or ``None`` if ``|det| != 1``."""
    n = len(mat)
    if n == 0:
        return ()
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(mat)]
    for c in range(n):
        pr = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if pr is None:
            return None
        aug[c], aug[pr] = aug[pr], aug[c]
        pv = aug[c][c]
        aug[c] = [x / pv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    inv = [row[n:] for row in aug]
    if any(x.denominator != 1 for row in inv for x in row):
        return None
    return as_matrix([[int(x) for x in row] for row in inv])
