from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, optimize

from geofun.core import SpaceContext
from geofun.errors import DomainError, NumericError
from geofun.solutions import (
    CATALOG,
    FIXTURE_IDS,
    SOLUTION_IDS,
    LinearSolution,
    ReparamSolution,
    gaussian_v,
    get_entry,
    identity_v,
    make_solution,
    v_for,
    weierstrass_v,
)
from geofun.weierstrass import WeierstrassConfig, weierstrass_integral, weierstrass_w


def gaussian_series(x: float) -> float:
    """Termwise integral of exp(t^2/2) = sum t^(2n) / (2^n n!), truncated once terms drop below 1e-17."""
    total, n = 0.0, 0
    while True:
        term = x ** (2 * n + 1) / (2.0 ** n * math.factorial(n) * (2 * n + 1))
        total += term
        if abs(term) < 1e-17:
            return total
        n += 1


def gaussian_quad(x: float) -> float:
    return integrate.quad(lambda t: math.exp(0.5 * t * t), 0.0, x, epsabs=1e-13, epsrel=1e-13)[0]


def weierstrass_oracle(cfg: WeierstrassConfig, x: float) -> float:
    """Antiderivative of the full N-term series by QUADPACK's cosine-weighted rule, band by band."""
    total = cfg.kappa * x
    for n in range(cfg.n_terms):
        val, _ = integrate.quad(lambda t: 1.0, 0.0, x, weight="cos", wvar=cfg.b ** n * math.pi,
                                epsabs=1e-14, epsrel=1e-13, limit=400)
        total += cfg.a ** n * val
    return total


@pytest.fixture(scope="module")
def gv():
    return gaussian_v()


@pytest.fixture(scope="module")
def wv():
    return weierstrass_v()


# --- gaussian v


def test_gaussian_forward_zero_and_oddness(gv):
    assert gv.forward(0.0) == 0.0
    for x in (0.5, 1.0, 2.0):
        assert gv.forward(-x) == -gv.forward(x)


def test_gaussian_forward_one_matches_series(gv):
    assert abs(float(gv.forward(1.0)) - gaussian_series(1.0)) <= 1e-12


@pytest.mark.parametrize("x", [0.05, 0.3, 1.7, 3.0, 5.5, 7.9])
def test_gaussian_forward_matches_quadpack(gv, x):
    ref = gaussian_quad(x)
    assert abs(float(gv.forward(x)) - ref) <= 1e-12 * max(1.0, ref)


def test_gaussian_inverse_roundtrip_and_monotone(gv):
    x = np.linspace(-6.0, 6.0, 2401)
    y = gv.forward(x)
    assert np.all(np.diff(y) > 0)
    assert np.max(np.abs(gv.inverse(y) - x)) <= 1e-12


def test_gaussian_derivatives(gv):
    t = np.array([-1.5, 0.0, 0.7])
    h = 1e-5
    assert np.allclose(gv.d1(t), (gv.forward(t + h) - gv.forward(t - h)) / (2 * h), rtol=1e-9)
    assert np.allclose(gv.d2(t), t * np.exp(t * t / 2), rtol=0, atol=1e-15)


def test_gaussian_range_bound(gv):
    with pytest.raises(DomainError):
        gv.forward(8.5)
    with pytest.raises(DomainError):
        gv.inverse(float(gv.forward(8.0)) * 2)
    with pytest.raises(DomainError):
        gaussian_v(limit=9.0)


def test_gaussian_cache_is_close(gv):
    cached = gaussian_v(cache_grid=4001)
    x = np.linspace(-3.0, 3.0, 101)
    assert np.max(np.abs(cached.forward(x) - gv.forward(x))) <= 1e-6


def test_gaussian_midpoint_1d_against_bisection_oracle():
    f = make_solution("reparam:gaussian", 1)
    target = 0.5 * gaussian_series(1.0)
    oracle = optimize.bisect(lambda x: gaussian_quad(x) - target, 0.0, 1.0, xtol=1e-15, maxiter=200)
    assert abs(float(f([1.0], [0.0], 0.5)[0]) - oracle) <= 1e-12


# --- weierstrass v


def test_weierstrass_config_validation():
    with pytest.raises(DomainError):
        WeierstrassConfig(a=0.5, b=7)
    with pytest.raises(DomainError):
        WeierstrassConfig(b=12)
    with pytest.raises(DomainError):
        WeierstrassConfig(kappa=1.9)
    with pytest.raises(DomainError):
        WeierstrassConfig(a=1.2)


def test_weierstrass_truncation_budget():
    with pytest.raises(NumericError):
        weierstrass_v(WeierstrassConfig(n_terms=10))


def test_weierstrass_series_bounds():
    cfg = WeierstrassConfig()
    x = np.linspace(-3.0, 3.0, 20001)
    assert np.max(np.abs(weierstrass_w(cfg, x))) <= cfg.sup_bound
    assert weierstrass_w(cfg, 0.0) == pytest.approx(2.0 - 2.0 ** -39, abs=1e-15)
    assert np.max(np.abs(weierstrass_integral(cfg, x))) <= cfg.antiderivative_bound


def test_weierstrass_inverse_zero_and_monotone(wv):
    assert wv.inverse(0.0) == 0.0
    grid = np.round(np.arange(-200, 201) * 0.01, 12)
    assert np.all(np.diff(wv.inverse(grid)) > 0)


@pytest.mark.parametrize("x", [0.37, 0.001, 1.23456, 2.9])
def test_weierstrass_inverse_matches_cosine_quadrature(wv, x):
    assert abs(float(wv.inverse(x)) - weierstrass_oracle(WeierstrassConfig(), x)) <= 1e-12


def test_weierstrass_roundtrip(wv):
    assert abs(float(wv.forward(wv.inverse(0.37))) - 0.37) <= 1e-9
    oracle_y = weierstrass_oracle(WeierstrassConfig(), 0.37)
    assert abs(float(wv.forward(oracle_y)) - 0.37) <= 1e-9
    x = np.linspace(-3.0, 3.0, 1001)
    assert np.max(np.abs(wv.forward(wv.inverse(x)) - x)) <= 1e-12


def test_weierstrass_d1_is_inverse_slope(wv):
    t = np.array([-0.4, 0.2, 1.1])
    cfg = WeierstrassConfig()
    assert np.allclose(wv.d1(t) * (weierstrass_w(cfg, wv.forward(t)) + cfg.kappa), 1.0)
    assert wv.d2 is None


@pytest.mark.parametrize("make", [identity_v, gaussian_v, weierstrass_v])
def test_oddness_on_samples(make):
    v = make()
    alpha = np.random.default_rng(11).uniform(-3.0, 3.0, 1000)
    assert np.max(np.abs(v.forward(-alpha) + v.forward(alpha))) <= 1e-9
    assert np.max(np.abs(v.inverse(-alpha) + v.inverse(alpha))) <= 1e-9


# --- solutions and catalog


def test_reduction_identity_to_linear():
    rng = np.random.default_rng(5)
    for dim in (1, 2, 3):
        a, b = rng.uniform(-2, 2, size=(2, 10_000, dim))
        g = rng.uniform(size=10_000)
        lin = LinearSolution(SpaceContext(dim))
        rep = ReparamSolution(SpaceContext(dim), identity_v())
        assert np.max(np.abs(rep(a, b, g) - lin(a, b, g))) <= 1e-12


@pytest.mark.parametrize("sid", SOLUTION_IDS)
def test_diagonal_branch(sid):
    f = make_solution(sid, 2)
    a = np.array([0.4, -1.1])
    assert np.array_equal(f(a, a, 0.3), a)
    if isinstance(f, ReparamSolution):
        near = a + np.array([1e-14, 0.0])
        assert np.array_equal(f(a, near, 0.3), a)


def test_reparam_under_gram_context():
    gram = np.array([[2.0, 0.4], [0.4, 1.0]])
    f = make_solution("reparam:gaussian", 2, gram=gram)
    rng = np.random.default_rng(2)
    a, b = rng.uniform(-1, 1, size=(2, 200, 2))
    al, be, g = rng.uniform(size=(3, 200))
    lhs = f(a, b, (1 - g) * al + g * be)
    rhs = f(f(a, b, al), f(a, b, be), g)
    assert np.max(np.abs(lhs - rhs)) <= 1e-9
    assert np.max(np.abs(f(a, b, 1.0) - b)) <= 1e-12


def test_out_of_range_raises_domain_error():
    f = make_solution("reparam:gaussian", 1)
    with pytest.raises(DomainError):
        f([9.0], [0.0], 0.5)


def test_catalog():
    assert SOLUTION_IDS == ("linear", "reparam:identity", "reparam:gaussian", "reparam:weierstrass")
    assert "broken-fixture" in FIXTURE_IDS
    assert get_entry("reparam:weierstrass").build(1).smoothness == "C1"
    assert CATALOG["linear"].exact and not CATALOG["reparam:gaussian"].exact
    with pytest.raises(DomainError):
        get_entry("reparam:nope")
    assert v_for(make_solution("linear", 2)).label == "identity"
    with pytest.raises(DomainError):
        v_for(make_solution("broken-fixture", 2))


points2 = st.lists(st.floats(-2.0, 2.0), min_size=2, max_size=2)


@given(points2, points2, st.floats(0.0, 1.0))
def test_gaussian_symmetry_property(a, b, g):
    f = make_solution("reparam:gaussian", 2)
    assert np.max(np.abs(f(a, b, 1.0 - g) - f(b, a, g))) <= 1e-8


@given(points2, points2, st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_linear_composition_property(a, b, al, be, g):
    f = make_solution("linear", 2)
    lhs = f(a, b, (1 - g) * al + g * be)
    rhs = f(f(a, b, al), f(a, b, be), g)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * (1 + np.max(np.abs(a)) + np.max(np.abs(b)))


@pytest.mark.parametrize("sid", SOLUTION_IDS)
def test_batch_and_single_evaluation_agree_bitwise(sid):
    f = make_solution(sid, 2)
    rng = np.random.default_rng(0)
    a, b = rng.uniform(-1.5, 1.5, size=(2, 64, 2))
    g = rng.uniform(size=64)
    batch = f(a, b, g)
    single = np.array([f(a[i], b[i], g[i]) for i in range(64)])
    assert np.array_equal(batch, single)
