import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from opx.errors import CatalogError, ValidationError
from opx.fields import builtin

ALL_IDS = ["gue", "quartic(1)", "quartic(0)", "c2lip(0,1)", "c2lip(0.5,2)"]


def test_gue_values():
    f = builtin("gue")
    assert f.v(2.0) == 4.0
    assert f.v1(3.0) == 6.0
    assert f.v2(-1.0) == 2.0


def test_c2lip_piecewise_second_derivative():
    f = builtin("c2lip(0,1)")
    assert f.v2(-1.0) == 1.0
    assert f.v2(1.0) == 7.0
    assert f.v(0.0) == 0.0


def test_quartic_first_derivative():
    f = builtin("quartic(1)")
    assert f.v1(1.0) == 2.0  # 4x^3 - 2x at x=1


def test_unknown_id_raises():
    with pytest.raises(CatalogError):
        builtin("wigner")
    with pytest.raises(CatalogError):
        builtin("quartic(abc)")


def test_invalid_parameterizations():
    with pytest.raises(ValidationError):
        builtin("c2lip(0,-1)")
    with pytest.raises(ValidationError):
        builtin("quartic(2)")


@pytest.mark.parametrize("fid", ALL_IDS)
def test_catalog_invariants_on_grid(fid):
    builtin(fid).check_consistency(n_grid=1000)


def test_c2lip_kink_one_sided_slopes():
    # v2 difference quotients across the kink equal the one-sided slopes
    # 0 and 6*c0 to machine precision: C^2 but not C^3
    f = builtin("c2lip(0,2)")
    h = 1e-8
    left = (f.v2(0.0) - f.v2(-h)) / h
    right = (f.v2(h) - f.v2(0.0)) / h
    assert left == 0.0
    assert abs(right - 12.0) < 1e-5


@given(x=st.floats(min_value=-7.5, max_value=7.5))
@settings(max_examples=200, deadline=None)
def test_gue_derivative_consistency(x):
    f = builtin("gue")
    h = 1e-6
    fd = (f.v(x + h) - f.v(x - h)) / (2 * h)
    assert abs(fd - f.v1(x)) < 1e-6 * max(1.0, abs(f.v1(x)))


@given(x=st.floats(min_value=-7.5, max_value=7.5))
@settings(max_examples=200, deadline=None)
def test_c2lip_derivative_consistency(x):
    f = builtin("c2lip(0,1)")
    h = 1e-6
    fd = (f.v(x + h) - f.v(x - h)) / (2 * h)
    assert abs(fd - f.v1(x)) < 2e-5 * max(1.0, abs(f.v1(x)))


def test_convexity_flags():
    assert builtin("gue").convex
    assert builtin("c2lip(0,1)").convex
    assert builtin("quartic(0)").convex
    assert not builtin("quartic(1)").convex


def test_growth_hints():
    assert builtin("gue").growth_hint == 8.0
    assert builtin("quartic(0.5)").growth_hint == 4.0
    assert builtin("c2lip(0,1)").growth_hint == 8.0


def test_vectorized_evaluation():
    f = builtin("c2lip(0,1)")
    x = np.linspace(-2, 2, 11)
    assert f.v(x).shape == x.shape
    assert np.all(f.v2(x) >= 1.0)
