from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import integrate as sp_integrate
from scipy import optimize

from geofun.axioms import SampleSpec
from geofun.connection import build_spray, extracted_connection, gaussian_connection, zero_connection
from geofun.core import SpaceContext
from geofun.errors import DomainError, NumericError
from geofun.geodesics import (
    ODEProblem,
    check_arc_closure,
    compare,
    estimate_initial_velocity,
    integrate,
    shoot,
    subdivide,
)
from geofun.solutions import SOLUTION_IDS, gaussian_v, make_solution


def v_oracle(x):
    return sp_integrate.quad(lambda t: math.exp(0.5 * t * t), 0.0, x, epsabs=1e-13, epsrel=1e-13)[0]


def v_inverse_oracle(y):
    return optimize.bisect(lambda x: v_oracle(x) - y, -2.0, 2.0, xtol=1e-15, maxiter=200)


def test_linear_subdivision_points():
    g = subdivide(make_solution("linear", 2), [0.0, 0.0], [1.0, 1.0], 2)
    assert np.array_equal(g.points, np.repeat(np.arange(5)[:, None] / 4, 2, axis=1))
    assert g.midpoint_consistency == 0.0


@pytest.mark.parametrize("sid", SOLUTION_IDS)
def test_depth_one_midpoint(sid):
    f = make_solution(sid, 2)
    a, b = np.array([0.4, -0.2]), np.array([-0.5, 0.9])
    g = subdivide(f, a, b, 1)
    assert np.max(np.abs(g.points[1] - f(a, b, 0.5))) == 0.0
    assert np.max(np.abs(f(f(a, b, 0.0), f(a, b, 1.0), 0.5) - f(a, b, 0.5))) <= 1e-12


def test_gaussian_1d_grid_against_oracle():
    g = subdivide(make_solution("reparam:gaussian", 1), [1.0], [0.0], 3)
    v1 = v_oracle(1.0)
    expected = [v_inverse_oracle((1 - j / 8) * v1) for j in range(9)]
    assert np.max(np.abs(g.points[:, 0] - expected)) <= 1e-12


@pytest.mark.parametrize("sid", SOLUTION_IDS)
def test_refinement_endpoints_reversal(sid):
    f = make_solution(sid, 2)
    a, b = np.array([0.6, -0.3]), np.array([-0.2, 0.8])
    g6, g7 = subdivide(f, a, b, 6), subdivide(f, a, b, 7)
    assert np.max(np.abs(g7.points[::2] - g6.points)) <= 1e-10
    assert g7.midpoint_consistency <= 1e-10
    assert np.max(np.abs(g6.points[0] - a)) <= 1e-12 and np.max(np.abs(g6.points[-1] - b)) <= 1e-12
    back = subdivide(f, b, a, 6).curve
    assert g6.curve.reversed().sup_distance(back) <= 1e-9


def test_subdivide_validation():
    f = make_solution("linear", 2)
    with pytest.raises(DomainError):
        subdivide(f, [0, 0], [1, 1], 0)
    g = subdivide(f, [0, 0], [1, 1], 3)
    with pytest.raises(DomainError):
        g.index_of(0.3)


def test_subdivide_reports_grid_index():
    f = make_solution("reparam:gaussian", 1)
    with pytest.raises(NumericError) as info:
        subdivide(f, [8.5], [0.0], 2)
    assert info.value.diagnostic["index"] == 0


def test_arc_closure():
    f = make_solution("linear", 2)
    g = subdivide(f, [0.0, 0.0], [1.0, 2.0], 4)
    spec = SampleSpec(n_samples=1, grid_gammas=((0.0, 1.0, 0.5), (0.25, 0.75, 0.5), (0.5, 0.5, 0.3125)))
    assert check_arc_closure(f, g, spec).max_residual == 0.0
    fg = make_solution("reparam:gaussian", 2)
    r = check_arc_closure(fg, subdivide(fg, [0.5, 0.0], [0.0, 0.5], 8), SampleSpec(n_samples=5000))
    assert r.passed and r.max_residual <= 1e-8


def test_arc_closure_rejects_other_curves():
    f = make_solution("reparam:gaussian", 2)
    g = subdivide(make_solution("linear", 2), [0.5, 0.0], [-1.0, 0.5], 6)
    assert not check_arc_closure(f, g, SampleSpec(n_samples=2000)).passed


def test_zero_connection_straight_line():
    c = integrate(ODEProblem(np.zeros(2), np.ones(2), zero_connection(2)), grid=np.linspace(0, 1, 11))
    assert np.allclose(c.points, np.repeat(np.linspace(0, 1, 11)[:, None], 2, axis=1), atol=1e-14)


def test_blow_up_guard():
    with pytest.raises(NumericError) as info:
        integrate(ODEProblem(np.array([1.0]), np.array([1.0]), lambda x, v: 50 * x ** 3, bound=10.0))
    assert 0 < info.value.diagnostic["escape_time"] < 1


def test_problem_validation():
    with pytest.raises(DomainError):
        ODEProblem(np.zeros(1), np.zeros(1), zero_connection(1), step=0.0)
    with pytest.raises(DomainError):
        integrate(ODEProblem(np.zeros(1), np.zeros(1), zero_connection(1)), grid=np.array([0.5, 1.0]))


def test_gaussian_spray_trajectory_straightens_under_v():
    v = gaussian_v()
    s = build_spray(v, SpaceContext(1))
    c = integrate(ODEProblem(np.array([0.8]), np.array([-1.1]), s, step=1e-3), grid=np.linspace(0, 1, 65))
    vg = v.forward(c.points[:, 0])
    assert np.max(np.abs(vg[2:] - 2 * vg[1:-1] + vg[:-2])) <= 1e-10


def test_rk4_order_on_gaussian_spray():
    s = build_spray(gaussian_v(), SpaceContext(2))
    x0, v0 = np.array([0.5, 0.0]), np.array([-0.8, 1.2])

    def end(h):
        return integrate(ODEProblem(x0, v0, s, step=h), grid=np.array([0.0, 1.0])).points[-1]

    g = [end(h) for h in (0.1, 0.05, 0.025, 0.0125)]
    e = [np.linalg.norm(g[i] - g[i + 1]) for i in range(3)]
    assert e[0] / e[1] >= 12
    for i in range(2):
        assert 3.7 <= math.log2(e[i] / e[i + 1]) <= 4.3


def test_initial_velocity_estimate_linear():
    g = subdivide(make_solution("linear", 2), [0.0, 1.0], [2.0, -1.0], 8)
    assert np.allclose(estimate_initial_velocity(g), [2.0, -2.0], atol=1e-12)


def test_shooting_failure_reports_residual():
    s = build_spray(gaussian_v(), SpaceContext(2))
    with pytest.raises(NumericError) as info:
        shoot(s, np.array([0.5, 0.0]), np.array([0.0, 0.5]), np.array([3.0, 3.0]), max_iter=1)
    assert info.value.diagnostic["last_residual"] > 1e-10


def test_compare_cases():
    lin = compare(make_solution("linear", 2), zero_connection(2), [0.5, -0.3], [-0.4, 0.6])
    assert lin.sup_distance <= 1e-12 and lin.shooting.iterations == 0
    f = make_solution("reparam:gaussian", 2)
    a, b = [0.5, 0.0], [0.0, 0.5]
    sp = compare(f, build_spray(f.v, f.context), a, b)
    assert sp.sup_distance <= 1e-5 and sp.shooting.iterations <= 20
    an = compare(f, gaussian_connection(f.context), a, b)
    assert abs(an.sup_distance - sp.sup_distance) <= 1e-12
    d = sp.to_dict()
    assert d["grid_points"] == 257 and d["terminal_miss"] <= 1e-10


@pytest.mark.slow
def test_compare_extracted():
    f = make_solution("reparam:gaussian", 2)
    res = compare(f, extracted_connection(f), [0.5, 0.0], [0.0, 0.5])
    assert res.sup_distance <= 1e-4 and res.shooting.iterations <= 20
