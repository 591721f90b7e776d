from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog

from matchlab.lp import LPError, linprog_exact


def test_simple_optimum():
    r = linprog_exact([-1, -1], [[1, 2], [3, 1]], [4, 6])
    assert r.status == "optimal"
    assert r.x == (F(8, 5), F(6, 5)) and r.value == F(-14, 5)


def test_redundant_equalities_are_dropped():
    r = linprog_exact([1, 2], [[1, 1], [2, 2]], [3, 6])
    assert r.optimal and r.x == (3, 0)


def test_inconsistent_system_is_infeasible():
    assert linprog_exact([1, 1], [[1, 1], [1, 1]], [1, 2]).status == "infeasible"


def test_free_variable_can_go_negative():
    r = linprog_exact([1, 0], [[1, 1]], [1], free=[0])
    assert r.status == "unbounded"
    r = linprog_exact([1, 0], [[1, -1]], [-2], free=[0])
    assert r.optimal and r.x == (-2, 0)
    r = linprog_exact([0, 1], [[1, 1]], [-2], free=[0])
    assert r.optimal and r.x == (-2, 0)


def test_dimension_check():
    with pytest.raises(LPError):
        linprog_exact([1, 2], [[1]], [1])


def test_degenerate_cycling_example_terminates():
    # Beale's example cycles under the textbook largest-coefficient rule
    c = [F(-3, 4), 150, F(-1, 50), 6, 0, 0, 0]
    a = [
        [F(1, 4), -60, F(-1, 25), 9, 1, 0, 0],
        [F(1, 2), -90, F(-1, 50), 3, 0, 1, 0],
        [0, 0, 1, 0, 0, 0, 1],
    ]
    r = linprog_exact(c, a, [0, 0, 1])
    assert r.optimal and r.value == F(-1, 20)


@given(
    st.integers(1, 4).flatmap(lambda rows: st.tuples(
        st.lists(st.lists(st.integers(-4, 4), min_size=5, max_size=5), min_size=rows, max_size=rows),
        st.lists(st.integers(-5, 5), min_size=rows, max_size=rows),
        st.lists(st.integers(-3, 3), min_size=5, max_size=5),
    ))
)
def test_agrees_with_floating_simplex(problem):
    a, b, c = problem
    # box the variables through an extra row so the problem stays bounded
    a_box = [row + [0] for row in a] + [[1] * 5 + [1]]
    c_box = c + [0]
    r = linprog_exact(c_box, a_box, b + [10])
    ref = linprog(np.array(c_box, float), A_eq=np.array(a_box, float),
                  b_eq=np.array(b + [10], float), bounds=[(0, None)] * 6, method="highs")
    if ref.status == 2:
        assert r.status == "infeasible"
    else:
        assert r.optimal
        assert float(r.value) == pytest.approx(ref.fun, abs=1e-7)
        assert all(x >= 0 for x in r.x)
        for row, rhs in zip(a_box, b + [10]):
            assert sum(F(v) * x for v, x in zip(row, r.x)) == rhs
