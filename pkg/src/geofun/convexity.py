"""Line and ball properties of reparametrized solutions.

A reparametrized solution only moves points along the line through a and b,
so f(a, b, g) lies on the segment [a, b], every ball is stable under f, and
the chord between two arc points points along a - b.
"""

from __future__ import annotations

import numpy as np

from .axioms import AxiomReport, AxiomResult, SampleSpec, draw_samples, sample_ball
from .core import GeodesicSolution

CONVEXITY_THRESHOLDS = {"segment": 1e-9, "ball": 1e-9, "direction": 1e-9}


def _tol(thresholds, key):
    return (thresholds or {}).get(key, CONVEXITY_THRESHOLDS[key])


def _result(name, r, threshold, witness_fn, extra=None):
    i = int(np.argmax(r))
    witness = witness_fn(i)
    witness["residual"] = float(r[i])
    witness.update(extra or {})
    return AxiomResult(name, float(r[i]), float(np.percentile(r, 99)), float(threshold), int(r.size), 0, witness)


def check_segment(f: GeodesicSolution, spec: SampleSpec, thresholds=None) -> AxiomResult:
    """| |a - f| + |f - b| - |a - b| | with f = f(a, b, g): zero exactly when f is on the segment."""
    s = draw_samples(f.context, spec)
    ctx = f.context
    x = f.eval(s.a, s.b, s.gamma)
    r = np.abs(ctx.norm(s.a - x) + ctx.norm(x - s.b) - ctx.norm(s.a - s.b))
    return _result("segment", r, _tol(thresholds, "segment"), s.witness)


def check_ball_stability(f: GeodesicSolution, spec: SampleSpec, thresholds=None) -> AxiomResult:
    """Overshoot max(0, |f(a, b, g) - c| - rho) for a, b drawn from random balls B(c, rho).

    Centres are uniform in the sampling ball and radii uniform in
    [radius/20, radius]. A violation is an overshoot above the slack.
    """
    ctx = f.context
    rng = np.random.default_rng([spec.seed, 1])
    n, R = spec.n_samples, spec.point_radius
    c = sample_ball(rng, ctx, n, R)
    rho = rng.uniform(R / 20.0, R, size=n)
    a = c + sample_ball(rng, ctx, n, 1.0) * rho[:, None]
    b = c + sample_ball(rng, ctx, n, 1.0) * rho[:, None]
    g = rng.uniform(size=n)
    x = f.eval(a, b, g)
    over = np.maximum(ctx.norm(x - c) - rho, 0.0)
    slack = _tol(thresholds, "ball")

    def witness(i):
        return {"centre": c[i].tolist(), "radius": float(rho[i]), "a": a[i].tolist(), "b": b[i].tolist(),
                "gamma": float(g[i])}

    return _result("ball_stability", over, slack, witness, {"violations": int(np.sum(over > slack))})


def check_direction(f: GeodesicSolution, spec: SampleSpec, thresholds=None, min_separation: float = 1e-3) -> AxiomResult:
    """Unit chord (f(a,b,al) - f(a,b,be)) / |.| against sign(be - al) (a - b)/|a - b|.

    Pairs with |al - be| or |a - b| below ``min_separation`` are skipped,
    since normalising a near-zero chord only measures rounding.
    """
    s = draw_samples(f.context, spec)
    ctx = f.context
    keep = (np.abs(s.alpha - s.beta) >= min_separation) & (ctx.norm(s.a - s.b) >= min_separation)
    idx = np.flatnonzero(keep)
    a, b = s.a[idx], s.b[idx]
    chord = f.eval(a, b, s.alpha[idx]) - f.eval(a, b, s.beta[idx])
    unit = chord / ctx.norm(chord)[:, None]
    e = (a - b) / ctx.norm(a - b)[:, None]
    expected = np.sign(s.beta[idx] - s.alpha[idx])[:, None] * e
    r = ctx.norm(unit - expected)
    return _result("direction", r, _tol(thresholds, "direction"), lambda i: s.witness(int(idx[i])),
                   {"skipped": int(len(s) - idx.size)})


def check_convexity(f: GeodesicSolution, spec: SampleSpec, thresholds=None) -> AxiomReport:
    results = [check_segment(f, spec, thresholds), check_ball_stability(f, spec, thresholds),
               check_direction(f, spec, thresholds)]
    return AxiomReport(f.label, f.dim, spec.describe(), results)
