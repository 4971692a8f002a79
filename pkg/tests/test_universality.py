import math

import numpy as np
import pytest

from opx import builtin
from opx.asymptotics import AsymptoticContext
from opx.errors import DomainError, ResolutionError
from opx.special import airy
from opx.universality import (airy_handle, bulk_rescaled, edge_rescaled,
                              finite_handle, fredholm_det, gap_convergence,
                              sine_handle)


def test_kernel_handle_symmetry(table_for, gue_eq):
    f = builtin("gue")
    K = finite_handle(table_for("gue", 40, 42), f, 40)
    rng = np.random.default_rng(2)
    for _ in range(10):
        x, y = rng.uniform(-1.5, 1.5, 2)
        assert abs(K(x, y) - K(y, x)) < 1e-12


def test_sine_diagonal_is_one():
    S = sine_handle()
    assert S(0.7, 0.7) == 1.0


def test_airy_diagonal_rule_via_kernel_handle():
    A = airy_handle()
    u = -0.3
    ai, aip = airy(u)
    assert abs(A(u, u) - (aip ** 2 - u * ai ** 2)) < 1e-14


def test_bulk_rescaled_diagonal_near_one(table_for, gue_eq):
    f = builtin("gue")
    tab = table_for("gue", 60, 62)
    val = bulk_rescaled(tab, f, 60, gue_eq, 0.0, 0.0, 0.0)
    assert abs(float(val) - 1.0) < 0.03


def test_bulk_rescaled_vs_sinc(table_for, gue_eq):
    f = builtin("gue")
    tab = table_for("gue", 60, 62)
    val = float(bulk_rescaled(tab, f, 60, gue_eq, 0.0, 0.5, -0.5))
    want = math.sin(math.pi) / math.pi if False else np.sinc(1.0)
    assert abs(val - np.sinc(1.0)) <= 0.05


def test_bulk_rescaled_parity(table_for, gue_eq):
    f = builtin("gue")
    tab = table_for("gue", 60, 62)
    a = float(bulk_rescaled(tab, f, 60, gue_eq, 0.0, 0.8, 0.3))
    b = float(bulk_rescaled(tab, f, 60, gue_eq, 0.0, -0.8, -0.3))
    assert abs(a - b) < 1e-10


def test_bulk_rescaled_outside_support(table_for, gue_eq):
    f = builtin("gue")
    tab = table_for("gue", 60, 62)
    with pytest.raises(DomainError):
        bulk_rescaled(tab, f, 60, gue_eq, gue_eq.beta + 0.5, 0.0, 0.0)


def test_bulk_universality_sup_bound(table_for, gue_eq, c2lip_eq):
    u = np.linspace(-2, 2, 9)
    S = np.sinc(u[:, None] - u[None, :])
    sups = {}
    for fid, eq, a in (("gue", gue_eq, 0.0),
                       ("c2lip(0,1)", c2lip_eq, (c2lip_eq.alpha + c2lip_eq.beta) / 2)):
        f = builtin(fid)
        for N in (20, 60):
            tab = table_for(fid, N, N + 2)
            K = bulk_rescaled(tab, f, N, eq, a, u[:, None], u[None, :])
            sups[(fid, N)] = float(np.abs(K - S).max())
        assert sups[(fid, 60)] <= 0.05
        assert sups[(fid, 60)] < sups[(fid, 20)]


def test_edge_rescaled_diagonal(table_for, gue_eq):
    f = builtin("gue")
    tab = table_for("gue", 60, 62)
    lam = 0.75 * (-gue_eq.h_beta_prime_at_beta())
    val = float(edge_rescaled(tab, f, 60, lam, gue_eq.beta, 0.0, 0.0))
    ai, aip = airy(0.0)
    assert abs(val - aip ** 2) / aip ** 2 < 0.10


def test_edge_rescaled_confluent_consistency(table_for, gue_eq):
    f = builtin("gue")
    tab = table_for("gue", 60, 62)
    lam = 0.75 * (-gue_eq.h_beta_prime_at_beta())
    d = float(edge_rescaled(tab, f, 60, lam, gue_eq.beta, 0.5, 0.5))
    o = float(edge_rescaled(tab, f, 60, lam, gue_eq.beta, 0.5, 0.5 + 1e-4))
    assert abs(d - o) < 1e-6


def test_edge_error_decreasing_in_N(table_for, gue_eq):
    from opx.special import airy_kernel
    f = builtin("gue")
    lam = 0.75 * (-gue_eq.h_beta_prime_at_beta())
    errs = []
    for N in (20, 60):
        tab = table_for("gue", N, N + 2)
        val = float(edge_rescaled(tab, f, N, lam, gue_eq.beta, 0.5, 0.0))
        errs.append(abs(val - airy_kernel(0.5, 0.0)))
    assert errs[1] < errs[0]


def test_edge_universality_sup_bound(table_for, gue_eq):
    from opx.special import airy_kernel
    f = builtin("gue")
    tab = table_for("gue", 60, 62)
    lam = 0.75 * (-gue_eq.h_beta_prime_at_beta())
    u = np.linspace(-1, 1, 9)
    K = edge_rescaled(tab, f, 60, lam, gue_eq.beta, u[:, None], u[None, :])
    A = airy_kernel(u[:, None], u[None, :])
    assert float(np.abs(K - A).max()) <= 0.1


def test_fredholm_empty_interval():
    assert fredholm_det(sine_handle(), (0.5, 0.5)) == 1.0
    assert fredholm_det(sine_handle(), (1.0, 0.25)) == 1.0


def test_fredholm_sine_monotone():
    vals = [fredholm_det(sine_handle(), (0.0, s)) for s in (0.5, 1.0, 2.0)]
    assert vals[0] > vals[1] > vals[2] > 0
    assert all(v <= 1.0 for v in vals)


def test_fredholm_sine_known_value():
    # the unit-gap probability of the sine process, cross-checked at two
    # quadrature orders internally
    q = fredholm_det(sine_handle(), (0.0, 1.0))
    assert abs(q - 0.1702) < 5e-4


def test_fredholm_airy_refinement_stability():
    v40 = fredholm_det(airy_handle(), (0.0, math.inf), quad_n=40, check_refinement=False)
    v80 = fredholm_det(airy_handle(), (0.0, math.inf), quad_n=80, check_refinement=False)
    assert abs(v40 - v80) < 1e-8
    assert 0 < v80 <= 1


def test_fredholm_infinite_interval_non_airy_rejected(table_for):
    with pytest.raises(DomainError):
        fredholm_det(sine_handle(), (0.0, math.inf))


def test_gap_convergence_gue(table_for, gue_eq):
    rep = gap_convergence(builtin("gue"), 1.0, [20, 40, 60], 1.0, eq=gue_eq)
    assert rep["bulk_dev_decreasing"]
    assert rep["edge_dev_decreasing"]
    assert rep["rows"][-1]["bulk_dev"] < 0.03


def test_gap_zero_length_is_one(gue_eq):
    rep = gap_convergence(builtin("gue"), 1.0, [20], 0.0, eq=gue_eq)
    assert rep["rows"][0]["bulk_gap"] == 1.0


def test_gap_cross_field_universality(gue_eq, c2lip_eq):
    rg = gap_convergence(builtin("gue"), 1.0, [60], 1.0, eq=gue_eq)
    rc = gap_convergence(builtin("c2lip(0,1)"), 1.0, [60], 1.0, eq=c2lip_eq)
    assert abs(rg["rows"][0]["bulk_gap"] - rc["rows"][0]["bulk_gap"]) < 0.03


def test_determinants_in_unit_interval(table_for, gue_eq):
    rep = gap_convergence(builtin("gue"), 1.0, [40], 1.5, eq=gue_eq)
    for r in rep["rows"]:
        for key in ("bulk_gap", "edge_gap", "bulk_limit", "edge_limit"):
            assert 0 < r[key] <= 1.0
