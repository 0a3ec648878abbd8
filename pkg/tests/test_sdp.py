import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from quaddeg.checks import lambda_max_problem
from quaddeg.sdp import SdpProblem, SdpStatus, solve


def _lp(c, a_rows, b):
    """Diagonal LP ``min c.x, A x = b, x >= 0`` written as 1x1 PSD blocks."""
    n = len(c)
    pairs = [([np.array([[a]]) for a in row], bi) for row, bi in zip(a_rows, b)]
    return SdpProblem.from_pairs([1] * n, [np.array([[ci]]) for ci in c], pairs)


def test_tiny_lp():
    sol = solve(_lp([1.0, 2.0], [[1.0, 1.0]], [1.0]))
    assert sol.status is SdpStatus.OPTIMAL
    assert sol.value == pytest.approx(1.0, abs=1e-8)
    assert sol.dual_value == pytest.approx(1.0, abs=1e-8)
    assert sol.x[0][0, 0] == pytest.approx(1.0, abs=1e-7)


def test_lp_against_scipy_linprog(rng):
    from scipy.optimize import linprog

    for _ in range(5):
        a = rng.uniform(0.1, 1.0, size=(3, 6))
        x0 = rng.uniform(0.1, 1.0, size=6)
        b = a @ x0
        c = rng.uniform(0.0, 1.0, size=6)
        ref = linprog(c, A_eq=a, b_eq=b, bounds=[(0, None)] * 6, method="highs")
        sol = solve(_lp(c, a, b))
        assert sol.status is SdpStatus.OPTIMAL
        assert sol.value == pytest.approx(ref.fun, abs=1e-7)


@settings(max_examples=15)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_lambda_max_matches_eigvalsh(seed, n):
    rng = np.random.Generator(np.random.PCG64(seed))
    a = rng.normal(size=(n, n))
    h = a + a.T
    sol = solve(lambda_max_problem(h))
    assert sol.status is SdpStatus.OPTIMAL
    ref = np.linalg.eigvalsh(h)[-1]
    assert abs(sol.value - ref) <= 1e-7 * max(1.0, abs(ref))
    # the slack t I - H is singular at the optimum and the dual block is a density matrix
    assert np.linalg.eigvalsh(sol.x[0])[0] == pytest.approx(0.0, abs=1e-6)
    assert np.trace(sol.z[0]) == pytest.approx(1.0, abs=1e-6)


def test_trace_constrained_min_eigen():
    # min <H, X> s.t. tr X = 1 gives the smallest eigenvalue
    h = np.array([[2.0, 1.0, 0.0], [1.0, 3.0, 0.5], [0.0, 0.5, -1.0]])
    prob = SdpProblem.from_pairs([3], [h], [([np.eye(3)], 1.0)])
    sol = solve(prob)
    assert sol.value == pytest.approx(np.linalg.eigvalsh(h)[0], abs=1e-8)
    assert abs(sol.gap) < 1e-7


def test_residuals_small_at_optimum():
    sol = solve(lambda_max_problem(np.diag([1.0, 5.0, 2.0])))
    assert sol.primal_residual < 1e-8
    assert sol.dual_residual < 1e-8
    assert sol.iterations < 60


def test_iteration_cap_reports_status():
    sol = solve(lambda_max_problem(np.diag([1.0, 5.0, 2.0])), max_iter=1)
    assert sol.status is SdpStatus.MAX_ITER


def test_apply_and_adjoint_are_dual(rng):
    prob = lambda_max_problem(np.diag([1.0, 2.0]))
    x = rng.normal(size=(2, 2))
    x = x + x.T
    y = rng.normal(size=prob.n_constraints)
    lhs = y @ prob.apply_constraints([x])
    rhs = np.sum(prob.adjoint(y)[0] * x)
    assert lhs == pytest.approx(rhs)


def test_problem_validation():
    with pytest.raises(ValueError):
        SdpProblem.from_pairs([2], [np.zeros((2, 2))], [([np.eye(2), np.eye(1)], 1.0)])
    with pytest.raises(ValueError):
        SdpProblem.from_pairs([2], [np.zeros((2, 2))], [([np.eye(3)], 1.0)])
    with pytest.raises(ValueError):
        SdpProblem([2], [np.array([[0.0, 1.0], [0.0, 0.0]])], [sp.csr_matrix(np.eye(1, 4))], np.ones(1))
    with pytest.raises(ValueError):
        SdpProblem([2], [np.zeros((2, 2))], [sp.csr_matrix(np.eye(1, 4))], np.ones(2))


def test_free_variable_problem():
    prob = lambda_max_problem(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert prob.n_free == 1
    assert solve(prob).u[0] == pytest.approx(1.0, abs=1e-7)
