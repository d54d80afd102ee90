"""Connection coefficients recovered from a solution, and sprays built from v.

Extraction differentiates the midpoint map m(y, z) = f(y, z, 1/2) twice:
Gamma^i_jk(a) = -4 d^2 m^i / dy^j dz^k at y = z = a. The affine part
(y + z)/2 has zero mixed partials and is subtracted before differencing,
so the linear solution yields exactly zero.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .axioms import SampleSpec, sample_ball
from .core import Chart, GeodesicSolution, SpaceContext, as_points
from .errors import DomainError, NumericError
from .solutions import OddHomeomorphism

log = logging.getLogger(__name__)

DEFAULT_LAMBDAS = (0.0, 0.5, 1.0, 2.0, -1.0)


@dataclass(frozen=True)
class FDScheme:
    """Central-difference settings. Cancellation in the mixed stencil grows like 1e-16/h^2."""

    h: float = 1e-3
    richardson: bool = False
    order: int = 2

    def __post_init__(self):
        if not self.h > 0:
            raise DomainError("step h must be positive")
        if self.order != 2:
            raise DomainError("only second-order central differences are supported")
        if self.h < 1e-5:
            log.warning("FD step %g is below 1e-5; rounding noise ~1e-16/h^2 will dominate", self.h)

    def halved(self) -> "FDScheme":
        return FDScheme(self.h / 2, self.richardson, self.order)


@dataclass(frozen=True, eq=False)
class ConnectionField:
    """a -> Gamma^i_jk(a) as an (n, n, n) array indexed [i][j][k]."""

    eval: Callable
    dim: int
    symmetric_jk: bool = True
    provenance: dict = field(default_factory=dict)

    def __call__(self, a):
        return self.eval(a)

    def acceleration(self, x, v):
        """-Gamma^i_jk(x) v^j v^k, the geodesic right-hand side."""
        return -np.einsum("ijk,j,k->i", self.eval(x), v, v)


def zero_connection(dim: int) -> ConnectionField:
    zero = np.zeros((dim, dim, dim))
    return ConnectionField(lambda a: zero.copy(), dim, provenance={"kind": "analytic", "label": "zero"})


def gaussian_connection(ctx: SpaceContext) -> ConnectionField:
    """Gamma^i_jk(a) = (A_j delta^i_k + A_k delta^i_j)/2 with A = G a, the quadratic form of s(a, b) = (a b) b."""
    n = ctx.dim
    eye = np.eye(n)
    gram = np.eye(n) if ctx.gram is None else ctx.gram

    def gamma(a):
        A = gram @ np.asarray(a, dtype=float)
        return 0.5 * (np.einsum("j,ik->ijk", A, eye) + np.einsum("k,ij->ijk", A, eye))

    return ConnectionField(gamma, n, provenance={"kind": "analytic", "label": "gaussian"})


# --------------------------------------------------------------------------
# extraction


def _midpoint_defect(f: GeodesicSolution, y, z):
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    m = f.eval(y, z, np.full(y.shape[:-1], 0.5))
    if not np.all(np.isfinite(m)):
        bad = int(np.flatnonzero(~np.all(np.isfinite(m), axis=-1))[0])
        raise NumericError("non-finite value in extraction stencil",
                           {"y": y[bad].tolist(), "z": z[bad].tolist()})
    return m - (0.5 * y + 0.5 * z)


def _stencil_gammas(f: GeodesicSolution, a: np.ndarray, steps) -> list[np.ndarray]:
    """Raw stencil estimates for each step in ``steps``, from a single batched evaluation."""
    n = a.size
    eye = np.eye(n)
    pairs = [(j, k) for j in range(n) for k in range(j, n)]
    ys, zs = [], []
    for h in steps:
        for j, k in pairs:
            for sy, sz in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
                ys.append(a + sy * h * eye[j])
                zs.append(a + sz * h * eye[k])
    d = _midpoint_defect(f, np.array(ys), np.array(zs)).reshape(len(steps), len(pairs), 4, n)
    out = []
    for q, h in enumerate(steps):
        mixed = ((d[q, :, 0] - d[q, :, 1]) - (d[q, :, 2] - d[q, :, 3])) / (4.0 * h * h)
        gamma = np.empty((n, n, n))
        for p, (j, k) in enumerate(pairs):
            gamma[:, j, k] = gamma[:, k, j] = -4.0 * mixed[p]
        out.append(gamma)
    return out


def extract_gamma(f: GeodesicSolution, a, scheme: FDScheme = FDScheme()) -> np.ndarray:
    """Connection components at ``a`` from the 4-point mixed stencil (j <= k, mirrored)."""
    a = as_points(a, f.dim, "a")
    if not scheme.richardson:
        return _stencil_gammas(f, a, [scheme.h])[0]
    g, g2 = _stencil_gammas(f, a, [scheme.h, scheme.h / 2])
    return (4.0 * g2 - g) / 3.0


@dataclass
class Extraction:
    point: list
    gamma: np.ndarray
    reliable: bool
    differences: list

    def to_dict(self) -> dict:
        return {"point": self.point, "gamma": self.gamma.tolist(), "reliable": self.reliable,
                "step_differences": self.differences}


def extract_with_diagnostics(f: GeodesicSolution, a, scheme: FDScheme = FDScheme(),
                             floor: float = 1e-9) -> Extraction:
    """Extraction plus a two-step convergence test.

    Raw stencils at h, h/2, h/4 must agree to ``floor`` or shrink by a factor
    of at least 3 per halving (second order predicts 4); otherwise the result
    is flagged unreliable.
    """
    a = as_points(a, f.dim, "a")
    raw = _stencil_gammas(f, a, [scheme.h / 2 ** k for k in range(3)])
    d1 = float(np.max(np.abs(raw[0] - raw[1])))
    d2 = float(np.max(np.abs(raw[1] - raw[2])))
    reliable = bool(d1 <= floor or (d2 * 3.0 <= d1 and np.all(np.isfinite(raw[2]))))
    gamma = (4.0 * raw[1] - raw[0]) / 3.0 if scheme.richardson else raw[0]
    return Extraction(a.tolist(), gamma, reliable, [d1, d2])


def extracted_connection(f: GeodesicSolution, scheme: FDScheme = FDScheme()) -> ConnectionField:
    return ConnectionField(lambda a: extract_gamma(f, a, scheme), f.dim,
                           provenance={"kind": "extracted", "solution": f.label, "h": scheme.h,
                                       "richardson": scheme.richardson})


def check_first_derivative(f: GeodesicSolution, a, scheme: FDScheme = FDScheme()) -> tuple[float, float]:
    """Max deviation of d m^i/dy^j and d m^i/dz^j at y = z = a from delta^i_j / 2."""
    a = as_points(a, f.dim, "a")
    n, h = a.size, scheme.h
    eye = np.eye(n)
    base = np.broadcast_to(a, (n, n))
    half = np.full(n, 0.5)
    dy = (f.eval(base + h * eye, base, half) - f.eval(base - h * eye, base, half)) / (2 * h)
    dz = (f.eval(base, base + h * eye, half) - f.eval(base, base - h * eye, half)) / (2 * h)
    # rows index the differentiation variable j, columns the component i
    target = 0.5 * eye
    return float(np.max(np.abs(dy.T - target))), float(np.max(np.abs(dz.T - target)))


class ChartedSolution(GeodesicSolution):
    """The same solution read in another chart: fbar = chart o f o (chart^-1 x chart^-1)."""

    def __init__(self, f: GeodesicSolution, chart: Chart):
        super().__init__(f.context)
        self.base = f
        self.chart = chart
        self.label = f"{f.label}@{chart.label}"
        self.smoothness = f.smoothness

    def _eval(self, a, b, gamma):
        return self.chart.forward(self.base.eval(self.chart.inverse(a), self.chart.inverse(b), gamma))


def transformation_residual(gamma, gamma_bar, jac, hess) -> np.ndarray:
    """H^i_jk + Gbar^i_lm J^l_j J^m_k - J^i_l G^l_jk."""
    return (hess + np.einsum("ilm,lj,mk->ijk", gamma_bar, jac, jac)
            - np.einsum("il,ljk->ijk", jac, gamma))


def gamma_bar_flat(chart: Chart, a) -> np.ndarray:
    """Components in the new chart when the old-chart components vanish: -H (J^-1)(J^-1)."""
    jinv = np.linalg.inv(chart.jacobian(a))
    return -np.einsum("ijk,jl,km->ilm", chart.hessian(a), jinv, jinv)


@dataclass
class TransformationCheck:
    point: list
    residual: float
    gamma: np.ndarray
    gamma_bar: np.ndarray

    def to_dict(self):
        return {"point": self.point, "residual": self.residual}


def check_transformation_law(f: GeodesicSolution, chart: Chart, a,
                             scheme: FDScheme = FDScheme(richardson=True)) -> TransformationCheck:
    """Extract Gamma at ``a`` and Gamma-bar at chart(a) from the conjugated solution, then test the law."""
    a = as_points(a, f.dim, "a")
    abar = chart.forward(a)
    back = chart.inverse(abar)
    if not np.allclose(back, a, rtol=0, atol=1e-10):
        raise NumericError("chart inversion failed", {"point": a.tolist(), "roundtrip": back.tolist()})
    gamma = extract_gamma(f, a, scheme)
    gamma_bar = extract_gamma(ChartedSolution(f, chart), abar, scheme)
    res = transformation_residual(gamma, gamma_bar, chart.jacobian(a), chart.hessian(a))
    return TransformationCheck(a.tolist(), float(np.max(np.abs(res))), gamma, gamma_bar)


# --------------------------------------------------------------------------
# sprays


@dataclass(frozen=True, eq=False)
class Spray:
    """s(a, b) = r((a b)/|b|) |b| b for b != 0 and s(a, 0) = 0."""

    context: SpaceContext
    r: Callable
    label: str = "spray"
    r_source: str = "analytic"

    def __call__(self, a, b):
        ctx = self.context
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        nb = ctx.norm(b)
        nz = nb > 0
        safe = np.where(nz, nb, 1.0)
        t = ctx.dot(a, b) / safe
        coef = np.where(nz, np.asarray(self.r(np.where(nz, t, 0.0)), dtype=float) * nb, 0.0)
        return coef[..., None] * b

    def acceleration(self, x, v):
        return -self(x, v)


def build_spray(v: OddHomeomorphism, ctx: SpaceContext, fd_step: float = 1e-5) -> Spray:
    """Spray of the reparametrized solution: r = v''/v'.

    Without an analytic second derivative r falls back to a central
    difference of v', flagged by ``r_source``.
    """
    d1 = v.d1
    if d1 is None:
        raise DomainError(f"v={v.label} has no first derivative")

    def check_d1(t):
        val = np.asarray(d1(t), dtype=float)
        if np.any(val <= 0) or not np.all(np.isfinite(val)):
            raise NumericError("v' must be positive and finite at probed points",
                               {"v": v.label, "t": np.asarray(t).tolist()})
        return val

    if v.d2 is not None:
        d2 = v.d2

        def r(t):
            return np.asarray(d2(t), dtype=float) / check_d1(t)

        source = "analytic"
    else:

        def r(t):
            t = np.asarray(t, dtype=float)
            return (check_d1(t + fd_step) - check_d1(t - fd_step)) / (2 * fd_step * check_d1(t))

        source = "finite-difference"
    return Spray(ctx, r, label=f"spray:{v.label}", r_source=source)


def homogeneity_residual(s: Spray, a, b, lambdas=DEFAULT_LAMBDAS) -> float:
    """max over rows and lambda of |s(a, lambda b) - lambda^2 s(a, b)|."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    base = s(a, b)
    worst = 0.0
    for lam in lambdas:
        d = s(a, lam * b) - lam * lam * base
        worst = max(worst, float(np.max(np.linalg.norm(d, axis=-1))))
    return worst


def check_homogeneity(s: Spray, spec: SampleSpec, lambdas=DEFAULT_LAMBDAS) -> float:
    """Homogeneity residual over ``spec.n_samples`` seeded pairs (a, b) from the sampling ball."""
    rng = np.random.default_rng(spec.seed)
    a = sample_ball(rng, s.context, spec.n_samples, spec.point_radius)
    b = sample_ball(rng, s.context, spec.n_samples, spec.point_radius)
    return homogeneity_residual(s, a, b, lambdas)
