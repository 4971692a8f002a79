import numpy as np
import pytest

from opx import builtin, solve
from opx.oracle import build_grid, stieltjes


@pytest.fixture(scope="session")
def gue_eq():
    return solve(builtin("gue"), 1.0)


@pytest.fixture(scope="session")
def c2lip_eq():
    return solve(builtin("c2lip(0,1)"), 1.0)


_TABLES = {}


@pytest.fixture(scope="session")
def table_for():
    """Cached (field_id, N, n_max) -> RecurrenceTable factory."""
    def get(field_id, N, n_max):
        key = (field_id, N, n_max)
        if key not in _TABLES:
            field = builtin(field_id)
            grid = build_grid(field, N, n_max)
            _TABLES[key] = stieltjes(grid, n_max)
        return _TABLES[key]
    return get


def energy_oracle_kkt(field, c, lo, hi, m=400):
    """Exact minimizer of the discretized weighted log-energy on the
    m-point simplex (KKT equality solve; inequality constraints verified
    inactive).  Returns (ell, energy, weights, points)."""
    x = lo + (hi - lo) * (np.arange(m) + 0.5) / m
    dx = (hi - lo) / m
    D = np.abs(x[:, None] - x[None, :])
    np.fill_diagonal(D, 1.0)
    L = -np.log(D)
    np.fill_diagonal(L, 1.0 - np.log(dx / 2))
    V = c * np.asarray(field.v(x), dtype=float)
    A = np.zeros((m + 1, m + 1))
    A[:m, :m] = 2 * L
    A[:m, m] = 1.0
    A[m, :m] = 1.0
    rhs = np.concatenate([-V, [1.0]])
    sol = np.linalg.solve(A, rhs)
    w, mu = sol[:m], sol[m]
    assert w.min() > 0, "discrete equilibrium support shrank; KKT solve invalid"
    return mu, float(w @ L @ w + V @ w), w, x


def discrete_energy(field, c, x, w):
    dx = x[1] - x[0]
    D = np.abs(x[:, None] - x[None, :])
    np.fill_diagonal(D, 1.0)
    L = -np.log(D)
    np.fill_diagonal(L, 1.0 - np.log(dx / 2))
    V = c * np.asarray(field.v(x), dtype=float)
    return float(w @ L @ w + V @ w)
