from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftau.errors import TruncationError
from conftau.series import LaurentSeries, poisson_bracket, project_parts

coef = st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False)


def small_series(draw_dict):
    return LaurentSeries.from_dict(draw_dict, 6, 6)


series_st = st.dictionaries(st.integers(-3, 3), coef, max_size=5).map(small_series)


def test_project_parts_simple_split():
    s = LaurentSeries.from_dict({1: 2, 0: 3, -1: 5})
    plus, zero, minus = project_parts(s)
    assert plus.as_dict() == {1: 2}
    assert zero == 3
    assert minus.as_dict() == {-1: 5}


def test_project_parts_zero():
    plus, zero, minus = project_parts(LaurentSeries.zeros())
    assert plus.max_abs() == 0 and zero == 0 and minus.max_abs() == 0


def test_project_parts_square():
    L = LaurentSeries.from_dict({1: 1.0, -1: 0.1})
    plus, zero, minus = project_parts(L * L)
    assert plus.as_dict(1e-15) == pytest.approx({2: 1.0})
    assert zero == pytest.approx(0.2)
    assert minus.as_dict(1e-15) == pytest.approx({-2: 0.01})


@given(series_st)
def test_project_parts_recombine_and_idempotent(s):
    plus, zero, minus = project_parts(s)
    assert (plus + zero + minus - s).max_abs() == 0
    p2, z2, m2 = project_parts(plus)
    assert (p2 - plus).max_abs() == 0 and z2 == 0 and m2.max_abs() == 0
    p3, z3, m3 = project_parts(minus)
    assert (m3 - minus).max_abs() == 0 and z3 == 0 and p3.max_abs() == 0


@given(st.lists(coef, min_size=13, max_size=13))
def test_sample_roundtrip(c):
    s = LaurentSeries(c, 6, 6)
    back = LaurentSeries.from_samples(s.circle_sample(512), 6, 6)
    assert (back - s).max_abs() < 1e-12


def test_evaluation_matches_sampling():
    s = LaurentSeries.from_dict({2: 1 + 1j, -3: 0.5, 0: -2})
    w = np.exp(2j * np.pi * np.arange(64) / 64)
    assert np.allclose(s(w), s.circle_sample(64), atol=1e-13)


def test_product_overflow_raises():
    s = LaurentSeries.from_dict({3: 1.0}, 4, 4)
    with pytest.raises(TruncationError):
        s * s


def test_reciprocal():
    s = LaurentSeries.from_dict({1: 1.0, -1: 0.1})
    one = s * s.reciprocal()
    assert abs(one[0] - 1) < 1e-12
    assert (one - 1.0).max_abs() < 1e-10


def test_bracket_w_with_t0():
    w = LaurentSeries.from_dict({1: 1.0})
    res = poisson_bracket(w, lambda t0: LaurentSeries.constant(t0), 1.3)
    assert (res - w).max_abs() < 1e-10


def test_bracket_circle_family_canonical():
    t0 = 1.7
    L = lambda t: LaurentSeries.from_dict({1: np.sqrt(t)})
    M = lambda t: LaurentSeries.constant(t)
    assert (poisson_bracket(L, M, t0) - L(t0)).max_abs() < 1e-10


def test_bracket_string_circle():
    t0 = 0.8
    L = lambda t: LaurentSeries.from_dict({1: np.sqrt(t)})
    Lb = lambda t: LaurentSeries.from_dict({-1: np.sqrt(t)})
    res = poisson_bracket(L, Lb, t0)
    assert (res - 1.0).max_abs() < 1e-8


def test_bracket_exact_derivative_variant():
    t0 = 2.0
    L = LaurentSeries.from_dict({1: np.sqrt(t0)})
    dL = LaurentSeries.from_dict({1: 0.5 / np.sqrt(t0)})
    Lb = LaurentSeries.from_dict({-1: np.sqrt(t0)})
    dLb = LaurentSeries.from_dict({-1: 0.5 / np.sqrt(t0)})
    res = poisson_bracket(L, Lb, t0, df_dt0=dL, dg_dt0=dLb)
    assert (res - 1.0).max_abs() < 1e-14


def _family(c1, c2):
    return lambda t: LaurentSeries.from_dict({1: c1 * t, -1: c2 * t * t, 0: t}, 6, 6)


@settings(max_examples=30)
@given(coef, coef, coef, coef)
def test_bracket_antisymmetric(a, b, c, d):
    f, g = _family(a, b), _family(c, d)
    assert (poisson_bracket(f, g, 0.7) + poisson_bracket(g, f, 0.7)).max_abs() < 1e-14


def test_bracket_leibniz():
    t0 = 1.1
    f = lambda t: LaurentSeries.from_dict({1: t}, 8, 8)
    g = lambda t: LaurentSeries.from_dict({-1: t * t}, 8, 8)
    h = lambda t: LaurentSeries.from_dict({2: np.sqrt(t)}, 8, 8)
    lhs = poisson_bracket(lambda t: f(t) * g(t), h, t0)
    rhs = f(t0) * poisson_bracket(g, h, t0) + g(t0) * poisson_bracket(f, h, t0)
    assert (lhs - rhs).max_abs() < 1e-7
