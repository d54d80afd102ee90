"""Geodesics two ways: dyadic subdivision of a solution and integration of the geodesic ODE."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .axioms import AxiomResult, SampleSpec
from .core import Curve, GeodesicSolution, as_points
from .errors import DomainError, GeofunError, NumericError


@dataclass(frozen=True, eq=False)
class SubdivisionCurve:
    """Solution sampled on j / 2^depth, directly and by recursive midpoints.

    ``points[j] = f(a, b, j/2^depth)``; ``midpoint_points`` is built from
    [a, b] alone by inserting f(u, w, 1/2) between neighbours ``depth`` times.
    """

    a: np.ndarray
    b: np.ndarray
    depth: int
    params: np.ndarray
    points: np.ndarray
    midpoint_points: np.ndarray

    @property
    def curve(self) -> Curve:
        return Curve(self.params, self.points)

    @property
    def midpoint_consistency(self) -> float:
        return float(np.max(np.linalg.norm(self.points - self.midpoint_points, axis=1)))

    def index_of(self, t) -> np.ndarray:
        scaled = np.asarray(t, dtype=float) * 2 ** self.depth
        idx = np.rint(scaled).astype(np.int64)
        if np.any(idx != scaled) or np.any(idx < 0) or np.any(idx > 2 ** self.depth):
            raise DomainError(f"parameter not on the depth-{self.depth} dyadic grid")
        return idx


def _eval_or_locate(f: GeodesicSolution, a, b, gamma):
    try:
        out = f.eval(a, b, gamma)
        if np.all(np.isfinite(out)):
            return out
    except GeofunError:
        pass
    a, b, gamma = np.broadcast_arrays(a, b, np.asarray(gamma)[..., None])
    for j in range(a.shape[0]):
        try:
            val = f.eval(a[j], b[j], gamma[j, 0])
        except GeofunError as exc:
            raise NumericError(f"evaluation failed at grid index {j}: {exc}", {"index": j}) from exc
        if not np.all(np.isfinite(val)):
            raise NumericError(f"non-finite value at grid index {j}", {"index": j})
    raise NumericError("evaluation failed")


def subdivide(f: GeodesicSolution, a, b, depth: int) -> SubdivisionCurve:
    if int(depth) != depth or depth < 1:
        raise DomainError("depth must be a positive integer")
    a = as_points(a, f.dim, "a")
    b = as_points(b, f.dim, "b")
    m = 2 ** depth
    params = np.arange(m + 1) / m
    direct = _eval_or_locate(f, a, b, params)

    pts = np.stack([a, b])
    for _ in range(depth):
        mids = _eval_or_locate(f, pts[:-1], pts[1:], np.full(pts.shape[0] - 1, 0.5))
        out = np.empty((2 * pts.shape[0] - 1, f.dim))
        out[0::2], out[1::2] = pts, mids
        pts = out
    return SubdivisionCurve(a, b, int(depth), params, direct, pts)


def check_arc_closure(f: GeodesicSolution, g: SubdivisionCurve, spec: SampleSpec,
                      threshold: float = 1e-8) -> AxiomResult:
    """Membership test g((1-c) al + c be) = f(g(al), g(be), c) on dyadic triples within the depth.

    With al = i/2^k, be = j/2^k and c = m/2^(depth-k) the left-hand parameter
    is (i 2^(depth-k) + m (j - i)) / 2^depth, always on the grid.
    """
    rng = np.random.default_rng(spec.seed)
    K = g.depth
    n = spec.n_samples
    k = rng.integers(0, K + 1, size=n)
    span = 2 ** k
    i = (rng.random(n) * (span + 1)).astype(np.int64)
    j = (rng.random(n) * (span + 1)).astype(np.int64)
    sub = 2 ** (K - k)
    m = (rng.random(n) * (sub + 1)).astype(np.int64)
    alpha, beta, gamma = i / span, j / span, m / sub
    if spec.grid_gammas is not None:
        extra = np.asarray(spec.grid_gammas, dtype=float)
        alpha = np.concatenate([alpha, extra[:, 0]])
        beta = np.concatenate([beta, extra[:, 1]])
        gamma = np.concatenate([gamma, extra[:, 2]])
    ia, ib = g.index_of(alpha), g.index_of(beta)
    offset = gamma * (ib - ia)
    if np.any(offset != np.rint(offset)):
        raise DomainError("closure triple leaves the dyadic grid")
    it = ia + np.rint(offset).astype(np.int64)
    lhs = g.points[it]
    rhs = f.eval(g.points[ia], g.points[ib], gamma)
    r = np.linalg.norm(lhs - rhs, axis=1)
    w = int(np.argmax(r))
    return AxiomResult("arc_closure", float(r[w]), float(np.percentile(r, 99)), threshold, int(r.size), 0,
                       {"alpha": float(alpha[w]), "beta": float(beta[w]), "gamma": float(gamma[w]),
                        "residual": float(r[w])})


# --------------------------------------------------------------------------
# ODE leg


def _acceleration_of(rhs) -> Callable:
    if hasattr(rhs, "acceleration"):
        return rhs.acceleration
    if callable(rhs):
        return rhs
    raise DomainError("rhs must be a ConnectionField, a Spray or a callable accel(x, v)")


@dataclass(frozen=True, eq=False)
class ODEProblem:
    """x'' = accel(x, x') from x(t0) = x0, x'(t0) = v0, stepped with at most ``step``."""

    x0: np.ndarray
    v0: np.ndarray
    rhs: object
    t_span: tuple = (0.0, 1.0)
    step: float = 1e-3
    bound: float = 1e3

    def __post_init__(self):
        if not self.step > 0:
            raise DomainError("step must be positive")
        if not self.t_span[1] > self.t_span[0]:
            raise DomainError("t_span must be increasing")


def _rk4_step(accel, x, v, dt):
    a1 = accel(x, v)
    x2, v2 = x + 0.5 * dt * v, v + 0.5 * dt * a1
    a2 = accel(x2, v2)
    x3, v3 = x + 0.5 * dt * v2, v + 0.5 * dt * a2
    a3 = accel(x3, v3)
    x4, v4 = x + dt * v3, v + dt * a3
    a4 = accel(x4, v4)
    x_new = x + (dt / 6.0) * (v + 2.0 * v2 + 2.0 * v3 + v4)
    v_new = v + (dt / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
    return x_new, v_new


def integrate(problem: ODEProblem, grid=None) -> Curve:
    """Classical RK4 on (x, x'), aligned to the output grid.

    Each output interval is split into ceil(width / step) equal steps, so the
    grid values are integrator states rather than interpolants.
    """
    accel = _acceleration_of(problem.rhs)
    t0, t1 = problem.t_span
    if grid is None:
        count = int(np.ceil((t1 - t0) / problem.step - 1e-9))
        grid = np.linspace(t0, t1, count + 1)
    grid = np.asarray(grid, dtype=float)
    if grid[0] != t0 or np.any(np.diff(grid) <= 0):
        raise DomainError("output grid must start at t0 and increase")
    x = np.array(problem.x0, dtype=float)
    v = np.array(problem.v0, dtype=float)
    out = np.empty((grid.size, x.size))
    out[0] = x
    for n in range(1, grid.size):
        width = grid[n] - grid[n - 1]
        substeps = max(1, int(np.ceil(width / problem.step - 1e-9)))
        dt = width / substeps
        for s in range(substeps):
            x, v = _rk4_step(accel, x, v, dt)
            if not (np.all(np.isfinite(x)) and np.linalg.norm(x) <= problem.bound):
                t_esc = grid[n - 1] + (s + 1) * dt
                raise NumericError(f"trajectory left the ball of radius {problem.bound} at t={t_esc:.6g}",
                                   {"escape_time": t_esc, "bound": problem.bound})
        out[n] = x
    return Curve(grid, out)


def estimate_initial_velocity(g: SubdivisionCurve, levels: int = 5, coarsest: int = 3) -> np.ndarray:
    """Richardson-extrapolated one-sided difference quotient of the curve at t = 0."""
    K = g.depth
    first = min(coarsest, K)
    ks = list(range(first, min(K, first + levels - 1) + 1))
    table = [(g.points[2 ** (K - k)] - g.points[0]) * 2 ** k for k in ks]
    for order in range(1, len(table)):
        fac = 2.0 ** order
        table = [(fac * table[m + 1] - table[m]) / (fac - 1.0) for m in range(len(table) - 1)]
    return table[-1]


@dataclass
class ShootingResult:
    v0: np.ndarray
    iterations: int
    miss: float
    history: list
    trajectory: Curve | None = None


def shoot(rhs, a, b, v_guess, step: float = 1e-3, tol: float = 1e-10, max_iter: int = 20,
          bound: float = 1e3, grid=None) -> ShootingResult:
    """Find x'(0) with x(1) = b by Broyden's secant update on the terminal miss.

    The Jacobian estimate starts at the identity, which is exact for the
    zero connection. Each trial is integrated on ``grid`` (default [0, 1]) and
    the converged trajectory is returned with the result.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    grid = np.array([0.0, 1.0]) if grid is None else np.asarray(grid, dtype=float)
    if grid[-1] != 1.0:
        raise DomainError("shooting grid must end at t = 1")

    def run(w):
        curve = integrate(ODEProblem(a, w, rhs, step=step, bound=bound), grid=grid)
        return curve, curve.points[-1] - b

    w = np.array(v_guess, dtype=float)
    curve, F = run(w)
    J = np.eye(a.size)
    history = [float(np.linalg.norm(F))]
    for it in range(max_iter + 1):
        if history[-1] <= tol:
            return ShootingResult(w, it, history[-1], history, curve)
        if it == max_iter:
            break
        dw = -np.linalg.solve(J, F)
        w_new = w + dw
        curve, F_new = run(w_new)
        J = J + np.outer(F_new - F - J @ dw, dw) / (dw @ dw)
        w, F = w_new, F_new
        history.append(float(np.linalg.norm(F)))
    raise NumericError(f"shooting did not converge in {max_iter} iterations (miss {history[-1]:.3g})",
                       {"last_residual": history[-1], "history": history})


@dataclass
class Comparison:
    sup_distance: float
    shooting: ShootingResult
    subdivision: SubdivisionCurve
    trajectory: Curve

    def to_dict(self) -> dict:
        return {
            "sup_distance": self.sup_distance,
            "shooting_iterations": self.shooting.iterations,
            "terminal_miss": self.shooting.miss,
            "miss_history": self.shooting.history,
            "initial_velocity": self.shooting.v0.tolist(),
            "midpoint_consistency": self.subdivision.midpoint_consistency,
            "grid_points": len(self.trajectory),
        }


def compare(f: GeodesicSolution, rhs, a, b, depth: int = 8, step: float = 1e-3,
            tol: float = 1e-10, max_iter: int = 20) -> Comparison:
    """Sup distance on the dyadic grid between the subdivision curve and the shot ODE trajectory."""
    g = subdivide(f, a, b, depth)
    guess = estimate_initial_velocity(g)
    shot = shoot(rhs, g.a, g.b, guess, step=step, tol=tol, max_iter=max_iter, grid=g.params)
    traj = shot.trajectory
    dist = float(np.max(np.linalg.norm(traj.points - g.points, axis=1)))
    return Comparison(dist, shot, g, traj)
