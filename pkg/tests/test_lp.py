from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from torifan.lp import in_cone, linprog

vec3 = st.lists(st.integers(-3, 3), min_size=3, max_size=3)


def test_bounded_optimum():
    # max x + y  s.t.  x + 2y <= 4, 3x + y <= 6, x, y >= 0
    res = linprog([-1, -1], A_ub=[[1, 2], [3, 1]], b_ub=[4, 6], nonneg=True)
    assert res.status == "optimal"
    assert res.x == (Fraction(8, 5), Fraction(6, 5))
    assert res.value == Fraction(-14, 5)


def test_infeasible_and_unbounded():
    assert linprog([0], A_ub=[[1], [-1]], b_ub=[-1, -1]).status == "infeasible"
    assert linprog([-1], A_ub=[[-1]], b_ub=[0], nonneg=True).status == "unbounded"


def test_free_variables_and_equalities():
    res = linprog([1, 0], A_eq=[[1, 1]], b_eq=[-3], A_ub=[[0, 1]], b_ub=[2])
    assert res.status == "optimal" and res.x[0] == -5


def test_redundant_equalities():
    res = linprog([0, 0], A_eq=[[1, 1], [2, 2]], b_eq=[1, 2], nonneg=True)
    assert res.feasible


@settings(max_examples=150)
@given(st.lists(vec3, min_size=1, max_size=6), vec3)
def test_in_cone_matches_exhaustive_search(gens, target):
    coeffs = in_cone(gens, target)
    assert (coeffs is not None) == oracle.in_cone_exhaustive(gens, target)
    if coeffs is not None:
        assert all(c >= 0 for c in coeffs)
        assert [sum(c * g[i] for c, g in zip(coeffs, gens)) for i in range(3)] == list(target)
