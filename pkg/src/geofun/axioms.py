"""Sampled verification of the functional equations.

Every check draws a seeded sample (points uniform in a ball, parameters
uniform in [0, 1], plus the corner grid {0, 1/4, 1/2, 3/4, 1}^3), evaluates a
residual per sample and reports the maximum, the 99th percentile and the
argmax witness.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import GeodesicSolution, SpaceContext, lerp_param
from .errors import DomainError, GeofunError
from .solutions import LinearSolution

CORNER_VALUES = (0.0, 0.25, 0.5, 0.75, 1.0)
DEFAULT_THRESHOLDS = {"boundary": 1e-9, "composition": 1e-8, "derived": 1e-8, "jensen": 1e-12}


@dataclass(frozen=True)
class SampleSpec:
    n_samples: int = 10_000
    point_radius: float = 2.0
    seed: int = 0
    grid_gammas: tuple | None = None
    include_corners: bool = True

    def __post_init__(self):
        if self.n_samples < 1:
            raise DomainError("n_samples must be >= 1")
        if not self.point_radius > 0:
            raise DomainError("point_radius must be positive")
        if self.grid_gammas is not None:
            g = np.asarray(self.grid_gammas, dtype=float)
            if g.ndim != 2 or g.shape[1] != 3 or np.any(g < 0) or np.any(g > 1):
                raise DomainError("grid_gammas must be (alpha, beta, gamma) triples in [0, 1]")

    def describe(self) -> dict:
        d = asdict(self)
        if self.grid_gammas is not None:
            d["grid_gammas"] = [list(map(float, t)) for t in self.grid_gammas]
        return d


@dataclass(frozen=True)
class Samples:
    a: np.ndarray
    b: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray

    def __len__(self):
        return self.gamma.size

    def witness(self, i: int) -> dict:
        return {
            "index": int(i),
            "a": self.a[i].tolist(),
            "b": self.b[i].tolist(),
            "alpha": float(self.alpha[i]),
            "beta": float(self.beta[i]),
            "gamma": float(self.gamma[i]),
        }


def sample_ball(rng: np.random.Generator, ctx: SpaceContext, count: int, radius: float) -> np.ndarray:
    """Uniform sample from the ball of ``radius`` in the context norm."""
    u = rng.standard_normal((count, ctx.dim))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    u *= radius * rng.uniform(size=(count, 1)) ** (1.0 / ctx.dim)
    if ctx.gram is None:
        return u
    return np.linalg.solve(ctx.cholesky().T, u.T).T


def draw_samples(ctx: SpaceContext, spec: SampleSpec) -> Samples:
    rng = np.random.default_rng(spec.seed)
    n = spec.n_samples
    a = sample_ball(rng, ctx, n, spec.point_radius)
    b = sample_ball(rng, ctx, n, spec.point_radius)
    alpha, beta, gamma = rng.uniform(size=(3, n))
    extra = []
    if spec.include_corners:
        extra.extend(itertools.product(CORNER_VALUES, repeat=3))
    if spec.grid_gammas is not None:
        extra.extend(tuple(map(float, t)) for t in spec.grid_gammas)
    if extra:
        trip = np.array(extra, dtype=float)
        idx = np.arange(len(extra)) % n
        a = np.concatenate([a, a[idx]])
        b = np.concatenate([b, b[idx]])
        alpha = np.concatenate([alpha, trip[:, 0]])
        beta = np.concatenate([beta, trip[:, 1]])
        gamma = np.concatenate([gamma, trip[:, 2]])
    return Samples(a, b, alpha, beta, gamma)


@dataclass
class AxiomResult:
    name: str
    max_residual: float
    p99_residual: float
    threshold: float
    n_samples: int
    n_failed_evals: int = 0
    witness: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.max_residual) and self.max_residual <= self.threshold)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


@dataclass
class AxiomReport:
    solution: str
    dim: int
    sample_spec: dict
    results: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def __getitem__(self, name: str) -> AxiomResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def merge(self, other: "AxiomReport") -> "AxiomReport":
        return AxiomReport(self.solution, self.dim, self.sample_spec, self.results + other.results)

    def to_dict(self) -> dict:
        return {
            "solution": self.solution,
            "dim": self.dim,
            "sample_spec": self.sample_spec,
            "passed": self.passed,
            "results": [r.to_dict() for r in self.results],
        }


# --------------------------------------------------------------------------
# evaluation helpers


def _safe_eval(f: GeodesicSolution, a, b, gamma):
    """Batch evaluation; on failure fall back to per-sample calls and mark bad rows NaN."""
    try:
        out = f.eval(a, b, gamma)
        if np.all(np.isfinite(out)):
            return out, {}
    except GeofunError:
        pass
    out = np.full(np.broadcast_shapes(a.shape, b.shape), np.nan)
    errors = {}
    gamma = np.broadcast_to(gamma, out.shape[:-1])
    for i in range(out.shape[0]):
        try:
            out[i] = f.eval(a[i], b[i], gamma[i])
        except (GeofunError, FloatingPointError) as exc:
            errors[i] = f"{type(exc).__name__}: {exc}"
    return out, errors


def _defect(x, y):
    return np.linalg.norm(x - y, axis=-1)


def _run_chunks(residual_fn, n: int, chunk_size: int | None, workers: int):
    """Apply ``residual_fn(slice)`` over consecutive chunks; result independent of ``workers``."""
    size = n if not chunk_size else int(chunk_size)
    slices = [slice(i, min(i + size, n)) for i in range(0, n, size)]
    if workers > 1 and len(slices) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(residual_fn, slices))
    else:
        parts = [residual_fn(s) for s in slices]
    residuals = np.concatenate([p[0] for p in parts])
    errors = {}
    for s, (_, errs) in zip(slices, parts):
        errors.update({s.start + k: v for k, v in errs.items()})
    return residuals, errors


def _summarize(name, residuals, errors, samples: Samples, threshold, extra_witness=None) -> AxiomResult:
    r = np.where(np.isnan(residuals), np.inf, residuals)
    i = int(np.argmax(r))
    witness = samples.witness(i)
    witness["residual"] = float(r[i])
    if i in errors:
        witness["error"] = errors[i]
    if extra_witness:
        witness.update(extra_witness(i))
    return AxiomResult(
        name=name,
        max_residual=float(r[i]),
        p99_residual=float(np.percentile(r, 99, method="higher")),
        threshold=float(threshold),
        n_samples=int(r.size),
        n_failed_evals=len(errors),
        witness=witness,
    )


def _threshold(thresholds, key):
    if thresholds and key in thresholds:
        return thresholds[key]
    return DEFAULT_THRESHOLDS[key]


def _report(f, spec, results):
    return AxiomReport(f.label, f.dim, spec.describe(), results)


# --------------------------------------------------------------------------
# checks


def check_boundary(f: GeodesicSolution, spec: SampleSpec, thresholds=None, *,
                   chunk_size: int | None = None, workers: int = 1) -> AxiomReport:
    """Endpoint law: f(a, b, 0) = a and f(a, b, 1) = b."""
    s = draw_samples(f.context, spec)

    def residual(sl):
        a, b = s.a[sl], s.b[sl]
        zeros = np.zeros(a.shape[0])
        f0, e0 = _safe_eval(f, a, b, zeros)
        f1, e1 = _safe_eval(f, a, b, zeros + 1.0)
        return np.maximum(_defect(f0, a), _defect(f1, b)), {**e0, **e1}

    r, errs = _run_chunks(residual, len(s), chunk_size, workers)
    return _report(f, spec, [_summarize("boundary", r, errs, s, _threshold(thresholds, "boundary"))])


def check_composition(f: GeodesicSolution, spec: SampleSpec, thresholds=None, *,
                      chunk_size: int | None = None, workers: int = 1) -> AxiomReport:
    """Composition law: f(a, b, (1-g)al + g be) = f(f(a, b, al), f(a, b, be), g)."""
    s = draw_samples(f.context, spec)

    def residual(sl):
        a, b = s.a[sl], s.b[sl]
        al, be, g = s.alpha[sl], s.beta[sl], s.gamma[sl]
        mixed = np.clip(lerp_param(al, be, g), 0.0, 1.0)
        lhs, e0 = _safe_eval(f, a, b, mixed)
        fa, e1 = _safe_eval(f, a, b, al)
        fb, e2 = _safe_eval(f, a, b, be)
        ok = np.all(np.isfinite(fa), axis=1) & np.all(np.isfinite(fb), axis=1)
        rhs = np.full_like(lhs, np.nan)
        e3 = {}
        if ok.any():
            part, perr = _safe_eval(f, fa[ok], fb[ok], g[ok])
            rhs[ok] = part
            rows = np.flatnonzero(ok)
            e3 = {int(rows[k]): v for k, v in perr.items()}
        return _defect(lhs, rhs), {**e0, **e1, **e2, **e3}

    r, errs = _run_chunks(residual, len(s), chunk_size, workers)
    return _report(f, spec, [_summarize("composition", r, errs, s, _threshold(thresholds, "composition"))])


def check_derived(f: GeodesicSolution, spec: SampleSpec, thresholds=None, *,
                  chunk_size: int | None = None, workers: int = 1) -> AxiomReport:
    """Consequences of the two laws: f(a, a, g) = a and f(a, b, 1-g) = f(b, a, g)."""
    s = draw_samples(f.context, spec)
    tol = _threshold(thresholds, "derived")

    def diagonal(sl):
        a, g = s.a[sl], s.gamma[sl]
        out, errs = _safe_eval(f, a, a, g)
        return _defect(out, a), errs

    def symmetry(sl):
        a, b, g = s.a[sl], s.b[sl], s.gamma[sl]
        lhs, e0 = _safe_eval(f, a, b, 1.0 - g)
        rhs, e1 = _safe_eval(f, b, a, g)
        return _defect(lhs, rhs), {**e0, **e1}

    results = []
    for name, fn in (("diagonal", diagonal), ("symmetry", symmetry)):
        r, errs = _run_chunks(fn, len(s), chunk_size, workers)
        results.append(_summarize(name, r, errs, s, tol))
    return _report(f, spec, results)


def check_axioms(f: GeodesicSolution, spec: SampleSpec, thresholds=None, **kw) -> AxiomReport:
    """Boundary, composition and derived checks merged into one report."""
    report = check_boundary(f, spec, thresholds, **kw)
    report = report.merge(check_composition(f, spec, thresholds, **kw))
    return report.merge(check_derived(f, spec, thresholds, **kw))


def dyadic_midpoint_profile(depth: int) -> np.ndarray:
    """Values on j/2^depth obtained only from q(0)=0, q(1)=1 and repeated midpoint averaging."""
    q = np.array([0.0, 1.0])
    for _ in range(depth):
        mids = 0.5 * (q[:-1] + q[1:])
        out = np.empty(2 * q.size - 1)
        out[0::2], out[1::2] = q, mids
        q = out
    return q


def check_jensen_characterization(spec: SampleSpec | None = None, depth: int = 10,
                                  solution: GeodesicSolution | None = None,
                                  threshold: float | None = None) -> AxiomReport:
    """Scalar profile q(g) = f(0, e_1, g) . e_1 of the linear solution on a dyadic grid.

    Checks q(0) = 0, q(1) = 1, q(1/2) = 1/2, the Jensen identity
    q((al + be)/2) = (q(al) + q(be))/2 for all grid pairs whose midpoint lies
    on the grid, and q = identity against the midpoint-recursion profile.
    """
    spec = spec or SampleSpec(n_samples=1)
    f = solution or LinearSolution(SpaceContext(1))
    tol = DEFAULT_THRESHOLDS["jensen"] if threshold is None else threshold
    m = 2 ** depth
    grid = np.arange(m + 1) / m
    e1 = np.zeros(f.dim)
    e1[0] = 1.0
    origin = np.zeros(f.dim)
    q = f.eval(origin, e1, grid) @ e1

    i, j = np.meshgrid(np.arange(m + 1), np.arange(m + 1), indexing="ij")
    same_parity = (i + j) % 2 == 0
    i, j = i[same_parity], j[same_parity]
    jensen = np.abs(q[(i + j) // 2] - 0.5 * (q[i] + q[j]))
    k = int(np.argmax(jensen))

    oracle = dyadic_midpoint_profile(depth)
    ident = np.abs(q - oracle)
    kk = int(np.argmax(ident))

    def point(name, value, witness):
        return AxiomResult(name, float(value), float(value), tol, 1, 0, witness)

    results = [
        point("jensen_q0", abs(q[0]), {"gamma": 0.0, "q": float(q[0])}),
        point("jensen_q1", abs(q[-1] - 1.0), {"gamma": 1.0, "q": float(q[-1])}),
        point("jensen_qhalf", abs(q[m // 2] - 0.5), {"gamma": 0.5, "q": float(q[m // 2])}),
        AxiomResult("jensen_midpoint", float(jensen[k]), float(np.percentile(jensen, 99)), tol,
                    int(jensen.size), 0,
                    {"alpha": float(grid[i[k]]), "beta": float(grid[j[k]]), "residual": float(jensen[k])}),
        AxiomResult("jensen_identity", float(ident[kk]), float(np.percentile(ident, 99)), tol,
                    int(ident.size), 0,
                    {"gamma": float(grid[kk]), "q": float(q[kk]), "expected": float(oracle[kk])}),
    ]
    return AxiomReport(f.label, f.dim, {"depth": depth, **spec.describe()}, results)
