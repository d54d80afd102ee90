"""Weierstrass function and the difference-quotient probes used to show roughness.

The geodesics built from the Weierstrass solution are C^1 but have no second
derivative anywhere; the probes below measure that from samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

HARDY_BOUND = 1.0 + 1.5 * math.pi


@dataclass(frozen=True)
class WeierstrassConfig:
    """Parameters of w(x) = sum_{n<N} a^n cos(b^n pi x) and the shift kappa.

    ``integral_terms`` caps the number of bands used for the antiderivative.
    Band n contributes at most (a/b)^n / pi there, so bands whose tail falls
    below 2^-60 are dropped as well (13 bands for the defaults).
    """

    a: float = 0.5
    b: int = 13
    n_terms: int = 40
    kappa: float = 2.5
    integral_terms: int = 20
    series_tol: float = 1e-11

    def __post_init__(self):
        if not 0.0 < self.a < 1.0:
            raise DomainError(f"amplitude a must lie in (0, 1), got {self.a}")
        if int(self.b) != self.b or self.b < 1 or self.b % 2 == 0:
            raise DomainError(f"frequency b must be a positive odd integer, got {self.b}")
        if self.a * self.b <= HARDY_BOUND:
            raise DomainError(f"a*b = {self.a * self.b:.6g} must exceed 1 + 3*pi/2 = {HARDY_BOUND:.6g}")
        if self.kappa <= self.sup_bound:
            raise DomainError(f"kappa = {self.kappa} must exceed sup|w| bound 1/(1-a) = {self.sup_bound:.6g}")
        if self.n_terms < 1 or self.integral_terms < 1:
            raise DomainError("series term counts must be positive")

    @property
    def sup_bound(self) -> float:
        return 1.0 / (1.0 - self.a)

    @property
    def tail_bound(self) -> float:
        """Truncation error bound a^N / (1 - a) of the cosine series."""
        return self.a ** self.n_terms / (1.0 - self.a)

    @property
    def antiderivative_bound(self) -> float:
        """sup |integral_0^x w| <= sum a^n / (b^n pi)."""
        return 1.0 / (math.pi * (1.0 - self.a / self.b))

    @property
    def integral_bands(self) -> int:
        ratio = self.a / self.b
        floor = 2.0 ** -60
        n = 1
        while n < min(self.n_terms, self.integral_terms) and ratio ** n / (math.pi * (1 - ratio)) >= floor:
            n += 1
        return n

    def _bands(self, count):
        n = np.arange(count)
        return self.a ** n, np.pi * float(self.b) ** n


def weierstrass_w(cfg: WeierstrassConfig, x, n_terms: int | None = None) -> np.ndarray:
    """Truncated series sum_{n<N} a^n cos(b^n pi x)."""
    amp, freq = cfg._bands(cfg.n_terms if n_terms is None else n_terms)
    x = np.asarray(x, dtype=float)
    return np.sum(np.cos(x[..., None] * freq) * amp, axis=-1)


def weierstrass_integral(cfg: WeierstrassConfig, x) -> np.ndarray:
    """Antiderivative of the truncated series vanishing at 0, integrated band by band."""
    amp, freq = cfg._bands(cfg.integral_bands)
    x = np.asarray(x, dtype=float)
    return np.sum(np.sin(x[..., None] * freq) * (amp / freq), axis=-1)


# --------------------------------------------------------------------------
# difference-quotient probes


def _check_probe(t, steps, domain):
    steps = np.asarray(steps, dtype=float)
    if steps.ndim != 1 or steps.size == 0 or np.any(steps <= 0):
        raise DomainError("steps must be a non-empty list of positive reals")
    lo, hi = domain
    hmax = float(steps.max())
    if t - hmax < lo or t + hmax > hi:
        raise DomainError(f"probe t={t} with h up to {hmax} leaves domain [{lo}, {hi}]")
    return steps


def _values(g, ts):
    out = np.asarray(g(np.asarray(ts, dtype=float)), dtype=float)
    return out.reshape(len(ts), -1)


def second_divided_difference_profile(g, t: float, steps, domain=(0.0, 1.0)) -> list[float]:
    """|g(t+h) - 2 g(t) + g(t-h)| / h^2 for each h (Euclidean norm for vector curves)."""
    steps = _check_probe(t, steps, domain)
    ts = np.concatenate([[t], t + steps, t - steps])
    vals = _values(g, ts)
    k = steps.size
    centre, plus, minus = vals[0], vals[1:k + 1], vals[k + 1:]
    num = np.linalg.norm(plus - 2.0 * centre + minus, axis=1)
    return (num / steps ** 2).tolist()


def first_difference_convergence(g, t: float, steps, domain=(0.0, 1.0)) -> list[float]:
    """Forward quotients (g(t+h) - g(t)) / h, one per step (vectors for curves in R^n, n > 1)."""
    steps = _check_probe(t, steps, domain)
    vals = _values(g, np.concatenate([[t], t + steps]))
    q = (vals[1:] - vals[0]) / steps[:, None]
    return q[:, 0].tolist() if q.shape[1] == 1 else q.tolist()


def dyadic_steps(coarsest: int = 4, finest: int = 12) -> list[float]:
    return [2.0 ** -k for k in range(coarsest, finest + 1)]


def growth_ratio(profile) -> float:
    """Mean of the two finest-scale values over the mean of the two coarsest."""
    p = np.asarray(profile, dtype=float)
    coarse = p[:2].mean()
    fine = p[-2:].mean()
    if coarse == 0.0:
        return math.inf if fine > 0 else 1.0
    return float(fine / coarse)


def cauchy_summary(quotients) -> dict:
    """Gap statistics for a sequence of difference quotients ordered coarse to fine.

    ``trend_slope`` is the least-squares slope of log gap against log h (h
    halving per entry); a positive slope means the gaps shrink with h.
    """
    q = np.asarray(quotients, dtype=float)
    if q.ndim == 1:
        q = q[:, None]
    gaps = np.linalg.norm(np.diff(q, axis=0), axis=1)
    half = gaps.size // 2
    coarse_max = float(gaps[:half].max()) if half else float("nan")
    fine_max = float(gaps[half:].max())
    positive = gaps > 0
    if positive.sum() >= 2:
        log_h = -np.log(2.0) * np.arange(gaps.size)
        slope = float(np.polyfit(log_h[positive], np.log(gaps[positive]), 1)[0])
    else:
        slope = math.inf
    strictly = bool(np.all(np.diff(gaps) < 0))
    return {
        "gaps": gaps.tolist(),
        "trend_slope": slope,
        "coarse_half_max_gap": coarse_max,
        "fine_half_max_gap": fine_max,
        "strictly_decreasing": strictly,
        "cauchy": bool(gaps.max() == 0 or (slope > 0 and fine_max < coarse_max)),
    }
