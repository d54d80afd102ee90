from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from geofun.errors import NumericError
from geofun.quadrature import PanelQuadrature, adaptive_simpson, bisect_increasing, newton_bracketed


def test_simpson_known_integrals():
    assert adaptive_simpson(math.sin, 0.0, math.pi) == pytest.approx(2.0, abs=1e-12)
    assert adaptive_simpson(lambda x: x ** 3, 0.0, 2.0) == pytest.approx(4.0, abs=1e-14)
    assert adaptive_simpson(math.exp, 1.0, 1.0) == 0.0
    assert adaptive_simpson(math.exp, 0.0, -1.0) == pytest.approx(math.exp(-1.0) - 1.0, abs=1e-12)


def test_simpson_depth_limit():
    with pytest.raises(NumericError):
        adaptive_simpson(lambda x: 1.0 / math.sqrt(x) if x > 0 else 1e300, 0.0, 1.0, max_depth=10)


@given(st.floats(0.0, 4.0))
def test_panel_quadrature_exponential(x):
    q = PanelQuadrature(np.exp, 4.0)
    assert abs(float(q(x)) - math.expm1(x)) <= 1e-12 * math.exp(x)


def test_panel_lookup():
    q = PanelQuadrature(np.exp, 1.0)
    assert q.limit == 1.0 and q.anchors.size == 9
    k = q.panel_of_value(q.anchors[3] + 1e-9)
    assert k == 3


def test_newton_and_bisection_cube_root():
    target = np.array([0.001, 0.5, 7.0, 26.0])
    exact = np.cbrt(target)
    lo, hi = np.zeros(4), np.full(4, 3.0)
    x = newton_bracketed(lambda x: x ** 3, lambda x: 3 * x ** 2, target, lo, hi)
    assert np.allclose(x, exact, rtol=1e-13, atol=0)
    y = bisect_increasing(lambda x: x ** 3, target, lo, hi)
    assert np.allclose(y, exact, rtol=0, atol=1e-13)


def test_root_finders_report_nonconvergence():
    with pytest.raises(NumericError):
        newton_bracketed(lambda x: x ** 3, lambda x: 3 * x ** 2, np.array([2.0]), np.zeros(1), np.full(1, 3.0),
                         x0=np.array([3.0]), tol=1e-16, max_iter=2)
    with pytest.raises(NumericError):
        bisect_increasing(lambda x: x, np.array([0.3]), np.zeros(1), np.ones(1), tol=1e-15, max_iter=5)


def test_bisection_independent_of_batch():
    f = lambda x: x + 0.3 * np.sin(7 * x)  # noqa: E731
    targets = np.linspace(0.01, 2.0, 97)
    lo, hi = np.zeros(97), np.full(97, 3.0)
    batch = bisect_increasing(f, targets, lo, hi)
    single = np.array([bisect_increasing(f, t, 0.0, 3.0) for t in targets])
    assert np.array_equal(batch, single)
