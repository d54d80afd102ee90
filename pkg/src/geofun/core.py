"""Shared vocabulary: the model space, points, curves, charts and the solution interface.

The manifold is modelled as E = R^n with one global chart (the identity).
Points are numpy arrays whose last axis has length ``n``; every operation
broadcasts over leading batch axes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, ClassVar

import numpy as np

from .errors import DomainError, NumericError

DEFAULT_ATOL = 1e-9

SMOOTHNESS_TAGS = ("C0", "C1", "C∞")


@dataclass(frozen=True, eq=False)
class SpaceContext:
    """Dimension plus a symmetric positive-definite scalar product.

    ``gram`` is the matrix G of the form (a b) = a^T G b; ``None`` means the
    standard dot product.
    """

    dim: int
    gram: np.ndarray | None = None

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise DomainError(f"dim must be a positive integer, got {self.dim!r}")
        if self.gram is not None:
            g = np.array(self.gram, dtype=float)
            if g.shape != (self.dim, self.dim):
                raise DomainError(f"gram must be {self.dim}x{self.dim}, got shape {g.shape}")
            if not np.all(np.isfinite(g)) or not np.allclose(g, g.T, rtol=0, atol=1e-14):
                raise DomainError("gram must be finite and symmetric")
            if np.linalg.eigvalsh(g).min() <= 0:
                raise DomainError("gram must be positive definite")
            g.setflags(write=False)
            object.__setattr__(self, "gram", g)

    def dot(self, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if self.gram is None:
            return np.einsum("...i,...i->...", a, b)
        return np.einsum("...i,ij,...j->...", a, self.gram, b)

    def norm(self, a):
        return np.sqrt(self.dot(a, a))

    def cholesky(self) -> np.ndarray:
        """Lower factor L with G = L L^T (identity for the dot product)."""
        if self.gram is None:
            return np.eye(self.dim)
        return np.linalg.cholesky(self.gram)

    def describe(self) -> dict:
        return {"dim": self.dim, "gram": None if self.gram is None else self.gram.tolist()}


def as_points(x, dim: int, name: str = "point") -> np.ndarray:
    """Validate and convert to a float array of points with trailing axis ``dim``."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.shape[-1] != dim:
        raise DomainError(f"{name} has trailing dimension {arr.shape[-1]}, expected {dim}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} has non-finite coordinates")
    return arr


def as_unit_param(gamma) -> np.ndarray:
    g = np.asarray(gamma, dtype=float)
    if not np.all(np.isfinite(g)) or np.any(g < 0.0) or np.any(g > 1.0):
        raise DomainError("parameter must lie in [0, 1]")
    return g


def norm(ctx: SpaceContext, a) -> np.ndarray | float:
    """Norm induced by the context's scalar product."""
    a = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(a)):
        raise DomainError("norm of a non-finite vector")
    if a.shape[-1:] != (ctx.dim,):
        raise DomainError(f"expected trailing dimension {ctx.dim}, got shape {a.shape}")
    out = ctx.norm(a)
    return float(out) if np.ndim(out) == 0 else out


def affine_combine(alpha, a, beta, b) -> np.ndarray:
    """Componentwise ``alpha*a + beta*b``; ``alpha``/``beta`` broadcast over batch axes."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape[-1:] != b.shape[-1:]:
        raise DomainError(f"dimension mismatch: {a.shape[-1:]} vs {b.shape[-1:]}")
    alpha = np.asarray(alpha, dtype=float)[..., None]
    beta = np.asarray(beta, dtype=float)[..., None]
    return alpha * a + beta * b


def lerp_param(alpha, beta, gamma):
    """(1-gamma)*alpha + gamma*beta, exact at gamma in {0, 1} and when alpha == beta."""
    alpha, beta, gamma = np.broadcast_arrays(
        np.asarray(alpha, float), np.asarray(beta, float), np.asarray(gamma, float)
    )
    d = beta - alpha
    out = np.where(gamma <= 0.5, alpha + gamma * d, beta - (1.0 - gamma) * d)
    return out[()] if out.ndim == 0 else out


class GeodesicSolution:
    """A map f(a, b, gamma) solving the endpoint and composition equations.

    Subclasses implement :meth:`_eval` on validated, broadcast arrays:
    ``a`` and ``b`` of shape ``(..., n)`` and ``gamma`` of shape ``(...)``.
    """

    smoothness: ClassVar[str] = "C0"
    label: str = "solution"

    def __init__(self, context: SpaceContext):
        self.context = context

    @property
    def dim(self) -> int:
        return self.context.dim

    def eval(self, a, b, gamma) -> np.ndarray:
        a = as_points(a, self.dim, "a")
        b = as_points(b, self.dim, "b")
        gamma = as_unit_param(gamma)
        shape = np.broadcast_shapes(a.shape[:-1], b.shape[:-1], gamma.shape)
        a = np.broadcast_to(a, shape + (self.dim,))
        b = np.broadcast_to(b, shape + (self.dim,))
        gamma = np.broadcast_to(gamma, shape)
        return self._eval(a, b, gamma)

    __call__ = eval

    def _eval(self, a: np.ndarray, b: np.ndarray, gamma: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}(label={self.label!r}, dim={self.dim})"


@dataclass(frozen=True, eq=False)
class Curve:
    """Sampled curve: strictly increasing parameters and one point per parameter."""

    params: np.ndarray
    points: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.params, dtype=float)
        p = np.asarray(self.points, dtype=float)
        if t.ndim != 1 or t.size < 1:
            raise DomainError("params must be a non-empty 1-D grid")
        if np.any(np.diff(t) <= 0):
            raise DomainError("params must be strictly increasing")
        if p.ndim == 1:
            p = p[:, None]
        if p.shape[0] != t.size:
            raise DomainError(f"{p.shape[0]} points for {t.size} parameters")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(p))):
            raise DomainError("curve contains non-finite values")
        t.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "params", t)
        object.__setattr__(self, "points", p)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.params.size

    def reversed(self) -> "Curve":
        """Same point sequence traversed backwards, reparametrized onto the same interval."""
        t = self.params
        return Curve(t[0] + t[-1] - t[::-1], self.points[::-1])

    def sup_distance(self, other: "Curve") -> float:
        if self.points.shape != other.points.shape:
            raise DomainError("curves sampled on different grids")
        return float(np.max(np.linalg.norm(self.points - other.points, axis=1)))


def restrict_curve(g: Callable, alpha: float, beta: float, domain=(-np.inf, np.inf)) -> Callable:
    """Arc gamma -> g((1-gamma)*alpha + gamma*beta) on [0, 1].

    ``domain`` is the closed parameter interval on which ``g`` may be
    evaluated; ``alpha == beta`` yields a constant arc.
    """
    lo, hi = domain
    for name, v in (("alpha", alpha), ("beta", beta)):
        if not (np.isfinite(v) and lo <= v <= hi):
            raise DomainError(f"{name}={v} outside curve domain [{lo}, {hi}]")

    def arc(gamma):
        return g(lerp_param(alpha, beta, as_unit_param(gamma)))

    arc.alpha, arc.beta = alpha, beta
    return arc


@dataclass(frozen=True, eq=False)
class Chart:
    """A global diffeomorphism of R^n used as a second coordinate system.

    ``jacobian(p)[..., i, j]`` is d xbar^i / d x^j and ``hessian(p)[..., i, j, k]``
    is d^2 xbar^i / d x^j d x^k, both at the point with old coordinates ``p``.
    """

    forward: Callable
    inverse: Callable
    jacobian: Callable
    hessian: Callable
    label: str = "chart"
    meta: dict = field(default_factory=dict)


def identity_chart(dim: int) -> Chart:
    eye = np.eye(dim)
    zero = np.zeros((dim, dim, dim))

    def jac(p):
        p = np.asarray(p, float)
        return np.broadcast_to(eye, p.shape[:-1] + (dim, dim)).copy()

    def hess(p):
        p = np.asarray(p, float)
        return np.broadcast_to(zero, p.shape[:-1] + (dim, dim, dim)).copy()

    ident = lambda p: np.array(p, dtype=float)  # noqa: E731
    return Chart(ident, ident, jac, hess, label="identity")


def quadratic_chart(dim: int, eps: float = 0.1, seed: int = 7, max_iter: int = 50) -> Chart:
    """xbar^i = x^i + eps * sum_jk c^i_jk x^j x^k with fixed small coefficients.

    The coefficients are scaled so that sum_jk |c^i_jk + c^i_kj| <= 1 for
    every ``i``; with ``eps <= 0.1`` the map is invertible on the unit ball.
    """
    if not 0 < eps <= 0.1:
        raise DomainError("eps must lie in (0, 0.1]")
    rng = np.random.default_rng(seed)
    c = rng.uniform(-1.0, 1.0, size=(dim, dim, dim))
    sym = c + c.transpose(0, 2, 1)
    c = c / np.abs(sym).sum(axis=(1, 2)).max()
    csym = c + c.transpose(0, 2, 1)

    def forward(x):
        x = np.asarray(x, float)
        return x + eps * np.einsum("ijk,...j,...k->...i", c, x, x)

    def jacobian(x):
        x = np.asarray(x, float)
        return np.eye(dim) + eps * np.einsum("ijk,...k->...ij", csym, x)

    def hessian(x):
        x = np.asarray(x, float)
        return np.broadcast_to(eps * csym, x.shape[:-1] + (dim, dim, dim)).copy()

    def inverse(y):
        y = np.asarray(y, float)
        x = y.copy()
        for _ in range(max_iter):
            r = forward(x) - y
            step = np.linalg.solve(jacobian(x), r[..., None])[..., 0]
            x = x - step
            if np.all(np.abs(step) <= 1e-16 * (1.0 + np.abs(x))):
                return x
        if np.all(np.abs(forward(x) - y) <= 1e-13 * (1.0 + np.abs(y))):
            return x
        raise NumericError(f"chart inverse did not converge in {max_iter} Newton steps",
                           {"target": y.tolist(), "last_iterate": x.tolist()})

    return Chart(forward, inverse, jacobian, hessian, label=f"quadratic(eps={eps})",
                 meta={"eps": eps, "coefficients": c})
