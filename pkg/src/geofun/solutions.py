"""Concrete solutions of the functional equations.

``LinearSolution`` is the affine interpolation (1-g)a + g b. ``ReparamSolution``
bends each straight segment by an odd increasing homeomorphism ``v`` acting on
the coordinate along the segment direction. The catalog maps string ids to
factories plus their pass thresholds.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import GeodesicSolution, SpaceContext
from .errors import DomainError, NumericError
from .quadrature import PanelQuadrature, bisect_increasing, newton_bracketed
from .weierstrass import WeierstrassConfig, weierstrass_integral, weierstrass_w


@dataclass(frozen=True, eq=False)
class OddHomeomorphism:
    """Odd, strictly increasing bijection of R with its inverse.

    ``d1``/``d2`` are the first and second derivatives of ``forward`` when
    known; ``d2`` is ``None`` when the second derivative does not exist.
    ``limit`` bounds |alpha| for ``forward`` (``inf`` when unbounded).
    """

    forward: Callable
    inverse: Callable
    d1: Optional[Callable] = None
    d2: Optional[Callable] = None
    label: str = "v"
    limit: float = math.inf
    params: dict = field(default_factory=dict)

    def __call__(self, alpha):
        return self.forward(alpha)


def _odd(func):
    """Evaluate ``func`` on |x| and restore the sign, so oddness holds bitwise."""

    def wrapped(x):
        x = np.asarray(x, dtype=float)
        return np.copysign(func(np.abs(x)), x)

    return wrapped


def identity_v() -> OddHomeomorphism:
    ident = lambda x: np.array(x, dtype=float)  # noqa: E731
    return OddHomeomorphism(
        forward=ident,
        inverse=ident,
        d1=lambda x: np.ones_like(np.asarray(x, dtype=float)),
        d2=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        label="identity",
    )


def _pchip_cache(func, limit, n):
    from scipy.interpolate import PchipInterpolator

    grid = np.linspace(-limit, limit, n)
    return PchipInterpolator(grid, func(grid), extrapolate=False)


def _gauss_density(t):
    return np.exp(0.5 * np.square(t))


@functools.lru_cache(maxsize=8)
def _gaussian_quadrature(limit: float, abs_tol: float) -> PanelQuadrature:
    return PanelQuadrature(_gauss_density, limit, abs_tol=abs_tol)


def gaussian_v(limit: float = 8.0, abs_tol: float = 1e-12, inverse_tol: float = 1e-13,
               max_iter: int = 200, cache_grid: int | None = None) -> OddHomeomorphism:
    """v(alpha) = integral_0^alpha exp(beta^2 / 2) d beta, restricted to |alpha| <= limit.

    The inverse runs a bracketed Newton iteration with the analytic
    derivative exp(t^2/2). ``cache_grid`` switches ``forward`` to monotone
    cubic interpolation of exact values on that many nodes.
    """
    if not 0 < limit <= 8.0:
        raise DomainError("gaussian_v supports limit in (0, 8]; the integrand overflows beyond")
    quad = _gaussian_quadrature(float(limit), float(abs_tol))
    vmax = float(quad.anchors[-1])

    def forward_abs(x):
        if np.any(x > quad.limit):
            raise DomainError(f"|alpha| = {float(np.max(x))} exceeds quadrature range {quad.limit}")
        return quad(x)

    def inverse_abs(y):
        if np.any(y > vmax):
            raise DomainError(f"|v| = {float(np.max(y))} exceeds range v({quad.limit}) = {vmax}")
        k = quad.panel_of_value(y)
        lo = k * quad.panel
        hi = lo + quad.panel
        # tangent at the left end lands right of the root since v is convex on [0, inf)
        x0 = lo + (y - quad.anchors[k]) / _gauss_density(lo)
        return newton_bracketed(quad, _gauss_density, y, lo, hi, x0=x0, tol=inverse_tol,
                                max_iter=max_iter)

    forward = _odd(forward_abs)
    if cache_grid:
        forward = _pchip_cache(forward, quad.limit, int(cache_grid))
    return OddHomeomorphism(
        forward=forward,
        inverse=_odd(inverse_abs),
        d1=_gauss_density,
        d2=lambda t: np.asarray(t, dtype=float) * _gauss_density(t),
        label="gaussian",
        limit=quad.limit,
        params={"limit": quad.limit, "abs_tol": abs_tol, "inverse_tol": inverse_tol,
                "cache_grid": cache_grid},
    )


def weierstrass_v(cfg: WeierstrassConfig | None = None, inverse_tol: float = 1e-13,
                  max_iter: int = 200, cache_grid: int | None = None,
                  cache_limit: float = 4.0) -> OddHomeomorphism:
    """Homeomorphism whose inverse is alpha -> integral_0^alpha (w(beta) + kappa) d beta.

    The inverse is the band-by-band antiderivative of the truncated series
    plus kappa*alpha; ``forward`` inverts it by bisection, bracketed with the
    bounds kappa - sup|w| <= derivative <= kappa + sup|w|.
    """
    cfg = cfg or WeierstrassConfig()
    if cfg.tail_bound > cfg.series_tol:
        raise NumericError("Weierstrass series truncation budget exceeded",
                           {"tail_bound": cfg.tail_bound, "series_tol": cfg.series_tol})
    kappa, sup_w, sup_int = cfg.kappa, cfg.sup_bound, cfg.antiderivative_bound

    def inverse_abs(x):
        return weierstrass_integral(cfg, x) + kappa * x

    def forward_abs(y):
        lo = np.maximum.reduce([(y - sup_int) / kappa, y / (kappa + sup_w), np.zeros_like(y)])
        hi = np.minimum((y + sup_int) / kappa, y / (kappa - sup_w))
        return bisect_increasing(inverse_abs, y, lo, hi, tol=inverse_tol, max_iter=max_iter)

    forward = _odd(forward_abs)
    if cache_grid:
        forward = _pchip_cache(forward, cache_limit, int(cache_grid))

    def d1(t):
        return 1.0 / (weierstrass_w(cfg, forward(t)) + kappa)

    return OddHomeomorphism(
        forward=forward,
        inverse=_odd(inverse_abs),
        d1=d1,
        d2=None,
        label="weierstrass",
        params={"a": cfg.a, "b": cfg.b, "n_terms": cfg.n_terms, "kappa": kappa,
                "inverse_tol": inverse_tol, "cache_grid": cache_grid},
    )


# --------------------------------------------------------------------------
# solutions


class LinearSolution(GeodesicSolution):
    """f(a, b, g) = (1 - g) a + g b."""

    smoothness = "C∞"
    label = "linear"

    def _eval(self, a, b, gamma):
        g = gamma[..., None]
        out = (1.0 - g) * a + g * b
        same = np.all(a == b, axis=-1, keepdims=True)
        return np.where(same, a, out)


class ReparamSolution(GeodesicSolution):
    """Straight segments reparametrized through v along the segment direction.

    For a != b with e = (a - b)/|a - b| and v_ab(c) = c + (v((c e)) - (c e)) e,
    f(a, b, g) = v_ab^{-1}((1 - g) v_ab(a) + g v_ab(b)); for a = b, f = a.
    Pairs closer than ``eq_threshold * (1 + |a| + |b|)`` take the a = b branch.
    """

    def __init__(self, context: SpaceContext, v: OddHomeomorphism, eq_threshold: float = 1e-12,
                 smoothness: str = "C1"):
        super().__init__(context)
        self.v = v
        self.eq_threshold = eq_threshold
        self.smoothness = smoothness
        self.label = f"reparam:{v.label}"

    def _eval(self, a, b, gamma):
        ctx, v = self.context, self.v
        diff = a - b
        dist = ctx.norm(diff)
        same = dist <= self.eq_threshold * (1.0 + ctx.norm(a) + ctx.norm(b))
        e = diff / np.where(same, 1.0, dist)[..., None]
        ae, be = ctx.dot(a, e), ctx.dot(b, e)
        va, vb = v.forward(ae), v.forward(be)
        g = gamma
        ca = a + ((va - ae)[..., None]) * e
        cb = b + ((vb - be)[..., None]) * e
        c = (1.0 - g)[..., None] * ca + g[..., None] * cb
        ce = ctx.dot(c, e)
        out = c + ((v.inverse(ce) - ce)[..., None]) * e
        if not np.all(np.isfinite(out)):
            raise NumericError("non-finite value in reparametrized solution",
                               {"label": self.label})
        return np.where(same[..., None], a, out)


class ConstantSolution(GeodesicSolution):
    """Negative control f(a, b, g) = a: violates the endpoint law at g = 1."""

    label = "broken-fixture"

    def _eval(self, a, b, gamma):
        return np.array(a, dtype=float, copy=True)


class QuadraticTimeSolution(GeodesicSolution):
    """Negative control (1 - g^2) a + g^2 b: correct endpoints, wrong composition."""

    label = "broken:quadratic-time"

    def _eval(self, a, b, gamma):
        g2 = np.square(gamma)[..., None]
        return (1.0 - g2) * a + g2 * b


class BulgeSolution(GeodesicSolution):
    """Negative control (1 - g) a + g b + g (1 - g) e_1: correct endpoints, f(a, a, g) != a."""

    label = "broken:bulge"

    def _eval(self, a, b, gamma):
        g = gamma[..., None]
        bump = np.zeros(self.dim)
        bump[0] = 1.0
        return (1.0 - g) * a + g * b + g * (1.0 - g) * bump


# --------------------------------------------------------------------------
# catalog

EXACT_THRESHOLDS = {"boundary": 1e-12, "composition": 1e-12, "derived": 1e-12}
QUADRATURE_THRESHOLDS = {"boundary": 1e-9, "composition": 1e-8, "derived": 1e-8}


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    factory: Callable[..., GeodesicSolution]
    thresholds: dict
    exact: bool
    fixture: bool = False
    has_spray: bool = False

    def build(self, dim: int, gram=None, **options) -> GeodesicSolution:
        return self.factory(SpaceContext(dim, gram), **options)


def _reparam(v_builder, smoothness):
    def factory(ctx, **options):
        eq = options.pop("eq_threshold", 1e-12)
        return ReparamSolution(ctx, v_builder(**options), eq_threshold=eq, smoothness=smoothness)

    return factory


CATALOG: dict[str, CatalogEntry] = {
    e.id: e
    for e in [
        CatalogEntry("linear", lambda ctx, **_: LinearSolution(ctx), EXACT_THRESHOLDS, exact=True,
                     has_spray=True),
        CatalogEntry("reparam:identity", _reparam(identity_v, "C∞"), EXACT_THRESHOLDS, exact=True,
                     has_spray=True),
        CatalogEntry("reparam:gaussian", _reparam(gaussian_v, "C∞"), QUADRATURE_THRESHOLDS,
                     exact=False, has_spray=True),
        CatalogEntry("reparam:weierstrass", _reparam(weierstrass_v, "C1"), QUADRATURE_THRESHOLDS,
                     exact=False),
        CatalogEntry("broken-fixture", lambda ctx, **_: ConstantSolution(ctx), EXACT_THRESHOLDS,
                     exact=True, fixture=True),
        CatalogEntry("broken:quadratic-time", lambda ctx, **_: QuadraticTimeSolution(ctx),
                     EXACT_THRESHOLDS, exact=True, fixture=True),
        CatalogEntry("broken:bulge", lambda ctx, **_: BulgeSolution(ctx), EXACT_THRESHOLDS,
                     exact=True, fixture=True),
    ]
}

SOLUTION_IDS = tuple(k for k, e in CATALOG.items() if not e.fixture)
FIXTURE_IDS = tuple(k for k, e in CATALOG.items() if e.fixture)


def get_entry(solution_id: str) -> CatalogEntry:
    try:
        return CATALOG[solution_id]
    except KeyError:
        raise DomainError(f"unknown solution id {solution_id!r}; known: {', '.join(CATALOG)}") from None


def make_solution(solution_id: str, dim: int, gram=None, **options) -> GeodesicSolution:
    return get_entry(solution_id).build(dim, gram, **options)


def v_for(solution: GeodesicSolution) -> OddHomeomorphism:
    """The homeomorphism behind a solution; the linear solution uses the identity."""
    if isinstance(solution, ReparamSolution):
        return solution.v
    if isinstance(solution, LinearSolution):
        return identity_v()
    raise DomainError(f"{solution.label} is not built from an odd homeomorphism")
