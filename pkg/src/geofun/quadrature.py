"""Scalar quadrature and monotone root finding used by the odd homeomorphisms."""

from __future__ import annotations

import math

import numpy as np

from .errors import NumericError


def _simpson(fa, fm, fb, width):
    return width * (fa + 4.0 * fm + fb) / 6.0


def adaptive_simpson(func, a: float, b: float, abs_tol: float = 1e-12,
                     rel_tol: float = 1e-15, max_depth: int = 60) -> float:
    """Integrate a scalar function over [a, b] by adaptive Simpson with Richardson correction.

    A panel is accepted once |S_left + S_right - S_whole| <= 15 * tol with
    tol = max(abs_tol, rel_tol * |S_whole|), split evenly between children.
    """
    if a == b:
        return 0.0
    fa, fm, fb = func(a), func(0.5 * (a + b)), func(b)
    whole = _simpson(fa, fm, fb, b - a)
    tol = max(abs_tol, rel_tol * abs(whole))
    pieces = []
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, s, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = func(lm), func(rm)
        left = _simpson(flo, flm, fmid, mid - lo)
        right = _simpson(fmid, frm, fhi, hi - mid)
        delta = left + right - s
        if depth >= max_depth:
            raise NumericError("adaptive Simpson exceeded maximum depth",
                               {"interval": [lo, hi], "defect": delta})
        if abs(delta) <= 15.0 * max(eps, rel_tol * abs(left + right)):
            pieces.append(left + right + delta / 15.0)
        else:
            stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * eps, depth + 1))
            stack.append((lo, mid, flo, flm, fmid, left, 0.5 * eps, depth + 1))
    return math.fsum(pieces)


class PanelQuadrature:
    """Vectorized integral of a smooth integrand from 0 to |x|.

    Anchors at multiples of ``panel`` are integrated once by adaptive Simpson;
    the remainder from the last anchor to |x| uses Gauss-Legendre with
    ``nodes`` points, which is exact to rounding for smooth integrands on
    panels this short.
    """

    def __init__(self, integrand, limit: float, panel: float = 0.125, nodes: int = 16,
                 abs_tol: float = 1e-12):
        self.integrand = integrand
        self.panel = float(panel)
        self.n_panels = int(math.ceil(limit / panel))
        self.limit = self.n_panels * self.panel
        scalar = lambda t: float(integrand(np.float64(t)))  # noqa: E731
        parts = [adaptive_simpson(scalar, k * self.panel, (k + 1) * self.panel, abs_tol=abs_tol)
                 for k in range(self.n_panels)]
        anchors = np.zeros(self.n_panels + 1)
        for k in range(1, self.n_panels + 1):
            anchors[k] = math.fsum(parts[:k])
        anchors.setflags(write=False)
        self.anchors = anchors
        x, w = np.polynomial.legendre.leggauss(nodes)
        self._xi = 0.5 * (x + 1.0)
        self._w = 0.5 * w

    def __call__(self, x) -> np.ndarray:
        """Integral over [0, x] for 0 <= x <= limit (no sign handling)."""
        x = np.asarray(x, dtype=float)
        k = np.minimum(np.floor(x / self.panel).astype(np.int64), self.n_panels - 1)
        left = k * self.panel
        width = x - left
        t = left[..., None] + width[..., None] * self._xi
        return self.anchors[k] + width * np.sum(self.integrand(t) * self._w, axis=-1)

    def panel_of_value(self, y) -> np.ndarray:
        """Index k with anchors[k] <= y < anchors[k+1], clipped to valid panels."""
        k = np.searchsorted(self.anchors, y, side="right") - 1
        return np.clip(k, 0, self.n_panels - 1)


def newton_bracketed(func, deriv, target, lo, hi, x0=None, tol: float = 1e-13,
                     max_iter: int = 200):
    """Solve func(x) = target for increasing ``func`` on brackets [lo, hi], elementwise.

    Newton steps with the analytic derivative; a step leaving the current
    bracket is replaced by bisection. Converged when the update is at most
    ``tol * max(1, |x|)``.
    """
    target = np.asarray(target, dtype=float)
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    x = 0.5 * (lo + hi) if x0 is None else np.clip(np.asarray(x0, dtype=float), lo, hi)
    active = np.ones(x.shape, dtype=bool)
    for _ in range(max_iter):
        r = func(x) - target
        lo = np.where(r < 0, x, lo)
        hi = np.where(r > 0, x, hi)
        step = r / deriv(x)
        x_new = x - step
        out = ~((x_new >= lo) & (x_new <= hi)) | ~np.isfinite(x_new)
        x_new = np.where(out, 0.5 * (lo + hi), x_new)
        x_new = np.where(r == 0, x, x_new)
        done = np.abs(x_new - x) <= tol * np.maximum(1.0, np.abs(x))
        x = np.where(active, x_new, x)
        active &= ~done
        if not active.any():
            return x
    raise NumericError("Newton inversion did not converge",
                       {"max_iter": max_iter, "unconverged": int(active.sum()),
                        "worst_target": float(np.max(np.abs(target[active]))) if target.ndim else float(target)})


def bisect_increasing(func, target, lo, hi, tol: float = 1e-13, max_iter: int = 200):
    """Solve func(x) = target for increasing ``func`` with func(lo) <= target <= func(hi).

    Each element stops on its own once its bracket is narrower than ``tol``
    or cannot be split further in double precision, so a value does not
    depend on which other values share the batch.
    """
    target = np.asarray(target, dtype=float)
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    result = 0.5 * (lo + hi)
    active = np.ones(result.shape, dtype=bool)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        done = active & ((hi - lo <= tol) | (mid == lo) | (mid == hi))
        result = np.where(done, mid, result)
        active &= ~done
        if not active.any():
            return result
        below = func(mid) < target
        lo = np.where(active & below, mid, lo)
        hi = np.where(active & ~below, mid, hi)
    raise NumericError("bisection did not converge",
                       {"max_iter": max_iter, "max_width": float(np.max(np.where(active, hi - lo, 0.0)))})
