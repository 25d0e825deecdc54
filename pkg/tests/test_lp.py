from fractions import Fraction as F

import numpy as np
import pytest
from scipy.optimize import linprog

from delegation.lp import InfeasibleError, UnboundedError, maximize


def test_simple_maximum():
    # max x + y s.t. x + 2y <= 4, 3x + y <= 6
    r = maximize([1, 1], [[1, 2], [3, 1]], [4, 6])
    assert r.value == F(14, 5)
    assert r.x == (F(8, 5), F(6, 5))


def test_equality_and_negative_rhs():
    # max x s.t. x + y == 1, -x <= -1/2
    r = maximize([1, 0], [[-1, 0]], [F(-1, 2)], [[1, 1]], [1])
    assert r.value == 1
    assert r.x == (1, 0)


def test_infeasible():
    with pytest.raises(InfeasibleError):
        maximize([1], [[1], [-1]], [1, -2])


def test_unbounded():
    with pytest.raises(UnboundedError):
        maximize([1, 0], [[0, 1]], [1])


def test_outputs_are_fractions():
    r = maximize(["1/3"], [[1]], ["2/7"])
    assert r.value == F(2, 21) and all(isinstance(v, F) for v in r.x)


def test_degenerate_problem_terminates():
    # a classic cycling example for naive pivoting; Bland's rule must finish
    c = [F(3, 4), -150, F(1, 50), -6]
    A = [[F(1, 4), -60, F(-1, 25), 9], [F(1, 2), -90, F(-1, 50), 3], [0, 0, 1, 0]]
    r = maximize(c, A, [0, 0, 1])
    assert r.value == F(1, 20)


@pytest.mark.parametrize("seed", range(200))
def test_matches_scipy(seed):
    rng = np.random.default_rng(seed)
    n, m = rng.integers(1, 5), rng.integers(1, 5)
    A = rng.integers(-4, 5, size=(m, n))
    b = rng.integers(-2, 6, size=m)
    c = rng.integers(-3, 4, size=n)
    has_eq = rng.random() < 0.3
    A_eq = rng.integers(-3, 4, size=(1, n)) if has_eq else np.zeros((0, n), dtype=int)
    b_eq = rng.integers(0, 4, size=1) if has_eq else np.zeros(0, dtype=int)
    ref = linprog(-c, A_ub=A, b_ub=b, A_eq=A_eq if has_eq else None, b_eq=b_eq if has_eq else None,
                  bounds=[(0, None)] * n, method="highs")
    args = ([int(v) for v in c], A.tolist(), b.tolist(), A_eq.tolist(), b_eq.tolist())
    if ref.status == 2:
        with pytest.raises(InfeasibleError):
            maximize(*args)
    elif ref.status == 3:
        with pytest.raises(UnboundedError):
            maximize(*args)
    else:
        r = maximize(*args)
        assert float(r.value) == pytest.approx(-ref.fun, abs=1e-7)
        x = np.array([float(v) for v in r.x])
        assert np.all(A @ x <= b + 1e-9)
        if has_eq:
            assert np.allclose(A_eq @ x, b_eq)
