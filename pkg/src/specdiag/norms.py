"""L^p norms against each family's measure, returned in log form.

Finite p: composite Gauss rules on the (truncated) domain, with panel
boundaries forced at zeros of the integrand (|f|^p has kinks there unless p
is an even integer) and Gauss-Jacobi end panels absorbing the algebraic
endpoint weights.  The panel count doubles until two successive estimates
agree to ``tol``.

p = ∞: maximum over a sampling grid, polished by a vectorized
golden-section search around the largest local maxima; the grid doubles
until the estimate is stable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bases import BasisFamily, Custom, Hermite, Jacobi, Laguerre, Torus, WeightSpec
from .core import CoefficientSequence
from .errors import AccuracyError, AdmissibilityError, ParameterError
from .quadrature import composite_rule
from .transforms import GridFunction, SmoothFunction, coefficient_evaluator

INF = math.inf
INTEGRAL_TOL = 1e-12
SUP_TOL = 1e-8
MAX_DOUBLINGS = 6
PANEL_ORDER = 20
TAIL_TOL = 1e-14
ZERO_TOL = 1e-12
SOFT_MIN = 0.05


@dataclass(frozen=True)
class LogNorm:
    """A norm stored as its logarithm; ``-inf`` encodes the zero norm."""

    log_value: float

    @property
    def value(self) -> float:
        return math.exp(self.log_value) if self.log_value > -INF else 0.0

    @property
    def is_zero(self) -> bool:
        return self.log_value == -INF

    def scaled(self, alpha: complex) -> "LogNorm":
        if alpha == 0:
            return LogNorm(-INF)
        return LogNorm(self.log_value + math.log(abs(alpha)))

    def __float__(self):
        return self.value


def _log(x: float) -> float:
    return math.log(x) if x > 0 else -INF


def check_p(p) -> float:
    p = float(p)
    if not (p >= 1):
        raise ParameterError(f"p must lie in [1, ∞], got {p}")
    return p


def laguerre_condition(alpha: float, p: float) -> bool:
    """Admissibility of L^p for the Laguerre operator with parameter α.

    All p in [1, ∞] when α ≥ 0; 2/(α+2) < p < -2/α when -1 < α < 0.
    """
    if not alpha > -1:
        raise ParameterError(f"Laguerre parameter needs α > -1, got {alpha}")
    p = check_p(p)
    if alpha >= 0:
        return True
    return 2.0 / (alpha + 2.0) < p < -2.0 / alpha


def require_admissible(b: BasisFamily, p: float):
    if isinstance(b, Laguerre) and not laguerre_condition(b.alpha, p):
        lo, hi = 2 / (b.alpha + 2), -2 / b.alpha
        raise AdmissibilityError(
            f"p={p:g} is not admissible for Laguerre α={b.alpha:g}: need {lo:.6g} < p < {hi:.6g}"
        )


# ---------------------------------------------------------------------------
# integrand geometry per family


def _envelope_length(b: BasisFamily, degree: int, p: float) -> float:
    if isinstance(b, Hermite):
        q = min(p, 2.0) if p < INF else 2.0
        return math.sqrt(2 * degree + 1) + math.sqrt(80.0 / q) + 1.0
    if isinstance(b, Laguerre):
        q = min(p, 2.0) if p < INF else 2.0
        return 4 * degree + 2 * abs(b.alpha) + 12.0 + 80.0 / q
    raise ParameterError(f"{b.kind} has a bounded domain")


def _interval(b: BasisFamily, T: float | None):
    if isinstance(b, Torus):
        return 0.0, 2 * math.pi
    if isinstance(b, Jacobi):
        return -1.0, 1.0
    if isinstance(b, Hermite):
        return -T, T
    return 0.0, T


def _sample_points(b: BasisFamily, a: float, c: float, n: int) -> np.ndarray:
    u = np.linspace(0.0, 1.0, n)
    if isinstance(b, Jacobi):
        return -np.cos(np.pi * u)
    if isinstance(b, Laguerre):
        # oscillations crowd toward 0
        pts = a + (c - a) * u * u
        if b.alpha < 0:
            pts[0] = (c - a) * 1e-12
        return pts
    return a + (c - a) * u


def _bisect_roots(fun, lo, hi, iters=60):
    """Vectorized bisection on brackets where fun(lo), fun(hi) differ in sign."""
    flo = fun(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = fun(mid)
        left = np.sign(fm) == np.sign(flo)
        lo = np.where(left, mid, lo)
        flo = np.where(left, fm, flo)
        hi = np.where(left, hi, mid)
    return 0.5 * (lo + hi)


def _zero_breakpoints(evaluate, pts, vals, p):
    """Panel breakpoints at zeros and small local minima of |f|.

    Returns (points, exponents).  Exact zeros (to rounding) carry the
    exponent p of the factor |t - t0|^p; other small minima (a complex f
    passing close to 0) get exponent 0 and are meant for graded panels.
    """
    mag = np.abs(vals)
    scale = np.max(mag)
    empty = np.array([])
    if scale == 0:
        return empty, empty
    roots = []
    for part in (np.real, np.imag):
        comp = part(vals)
        if not np.any(comp):
            continue
        s = np.sign(comp)
        idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
        if idx.size:
            roots.append(_bisect_roots(lambda t: part(evaluate(t)), pts[idx].copy(), pts[idx + 1].copy()))
        roots.append(pts[np.nonzero(comp == 0)[0]])
    zeros = np.unique(np.concatenate(roots)) if roots else empty
    if zeros.size:
        zeros = zeros[np.abs(evaluate(zeros)) <= ZERO_TOL * scale]
    # small interior minima of the samples, polished
    i = np.nonzero((mag[1:-1] <= mag[:-2]) & (mag[1:-1] <= mag[2:]) & (mag[1:-1] <= SOFT_MIN * scale))[0] + 1
    soft = empty
    if i.size:
        soft = _golden_argmin(lambda t: np.abs(evaluate(t)), pts[i - 1], pts[i + 1])
        tiny = np.abs(evaluate(soft)) <= ZERO_TOL * scale
        zeros = np.concatenate([zeros, soft[tiny]])
        soft = soft[~tiny]
    span = pts[-1] - pts[0]
    zeros = _dedupe(np.sort(zeros), 1e-12 * span)
    if zeros.size and soft.size:
        soft = soft[np.min(np.abs(soft[:, None] - zeros[None, :]), axis=1) > 1e-9 * span]
    soft = _dedupe(np.sort(soft), 1e-12 * span)
    bps = np.concatenate([zeros, soft])
    exps = np.concatenate([np.full(zeros.size, float(p)), np.zeros(soft.size)])
    order = np.argsort(bps)
    return bps[order], exps[order]


def _dedupe(x, gap):
    if x.size < 2:
        return x
    return x[np.concatenate([[True], np.diff(x) > gap])]


def _golden_argmin(fun, lo, hi, iters=100):
    g = (math.sqrt(5) - 1) / 2
    for _ in range(iters):
        x1 = hi - g * (hi - lo)
        x2 = lo + g * (hi - lo)
        left = fun(x1) < fun(x2)
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
    return 0.5 * (lo + hi)


def _integral(b, evaluate, p, a, c, left_exp, right_exp, breakpoints, panels):
    bps, zexp = breakpoints
    rule = composite_rule((a, c), panels, PANEL_ORDER, breakpoints=bps,
                          left_exponent=left_exp, right_exponent=right_exp, zero_exponents=zexp,
                          graded=bps[zexp == 0])
    vals = np.abs(evaluate(rule.nodes)) ** p
    total = float(rule.weights @ vals)
    if isinstance(b, Torus):
        total /= 2 * math.pi
    return total


def _finite_p_log_norm(b: BasisFamily, evaluate, degree: int, p: float, tol: float) -> float:
    """log ‖f‖_p for finite p.  ``evaluate`` gives the smooth part for Laguerre."""
    left_exp = right_exp = 0.0
    T = None
    if isinstance(b, Jacobi):
        left_exp, right_exp = b.beta, b.alpha
    if isinstance(b, Laguerre):
        left_exp = 0.5 * b.alpha * p
    if isinstance(b, (Hermite, Laguerre)):
        T = _envelope_length(b, degree, p)
    even = p == int(p) and int(p) % 2 == 0
    panels0 = max(4, 2 * (degree + 2))

    shift = 0.0
    if isinstance(b, Torus):
        # start the period at the largest sample so no dip sits on the seam
        grid = np.linspace(0.0, 2 * math.pi, max(512, 64 * (degree + 2)), endpoint=False)
        shift = float(grid[np.argmax(np.abs(evaluate(grid)))])

    for _ in range(MAX_DOUBLINGS):
        a, c = _interval(b, T)
        a, c = a + shift, c + shift
        bps = (np.array([]), np.array([]))
        if not even:
            pts = _sample_points(b, a, c, max(512, 64 * (degree + 2)))
            bps = _zero_breakpoints(evaluate, pts, evaluate(pts), p)
        panels = panels0
        prev = _integral(b, evaluate, p, a, c, left_exp, right_exp, bps, panels)
        history = [prev]
        for _ in range(MAX_DOUBLINGS):
            panels *= 2
            cur = _integral(b, evaluate, p, a, c, left_exp, right_exp, bps, panels)
            history.append(cur)
            if abs(cur - prev) <= tol * abs(cur) or cur == prev == 0:
                break
            prev = cur
        else:
            raise AccuracyError(f"L^{p:g} integral of {b.kind} function did not converge", history[-2:])
        if T is None or cur == 0:
            break
        # tail on [T, 2T] (both sides for Hermite), crude but conservative
        tail_pts = np.linspace(T, 2 * T, 4001)
        tail_vals = np.abs(evaluate(tail_pts)) ** p
        if isinstance(b, Laguerre) and left_exp:
            tail_vals = tail_vals * tail_pts ** left_exp
        if isinstance(b, Hermite):
            tail_vals = tail_vals + np.abs(evaluate(-tail_pts)) ** p
        tail = float(np.max(tail_vals)) * T
        if tail <= TAIL_TOL * cur:
            break
        T *= 2
        panels0 *= 2
    else:
        raise AccuracyError(f"truncation length for {b.kind} L^{p:g} norm did not settle", (T,))
    return _log(cur) / p


def _golden_max(fun, lo, hi, iters=80):
    """Vectorized golden-section maximization of fun on [lo_k, hi_k]."""
    g = (math.sqrt(5) - 1) / 2
    x1 = hi - g * (hi - lo)
    x2 = lo + g * (hi - lo)
    f1, f2 = fun(x1), fun(x2)
    best = np.maximum(f1, f2)
    for _ in range(iters):
        left = f1 > f2
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        x2n = np.where(left, x1, lo + g * (hi - lo))
        x1n = np.where(left, hi - g * (hi - lo), x2)
        f2n = np.where(left, f1, np.nan)
        f1n = np.where(left, np.nan, f2)
        newx = np.where(left, x1n, x2n)
        fn = fun(newx)
        x1, x2 = x1n, x2n
        f1 = np.where(left, fn, f1n)
        f2 = np.where(left, f2n, fn)
        best = np.maximum(best, fn)
    return best


def _sup_log_norm(b: BasisFamily, evaluate, degree: int, tol: float) -> float:
    """log sup |f| for the full function ``evaluate``."""
    if isinstance(b, (Hermite, Laguerre)):
        T = _envelope_length(b, degree, INF)
    else:
        T = None
    a, c = _interval(b, T)
    mag = lambda t: np.abs(evaluate(t))
    n = 4 * (degree + 1) * 8
    prev = None
    history = []
    for _ in range(MAX_DOUBLINGS + 1):
        pts = _sample_points(b, a, c, n)
        if isinstance(b, Laguerre) and b.alpha > 0:
            pts[0] = 0.0
        vals = mag(pts)
        best = float(np.max(vals))
        interior = np.nonzero((vals[1:-1] >= vals[:-2]) & (vals[1:-1] >= vals[2:]))[0] + 1
        if interior.size:
            top = interior[np.argsort(vals[interior])[-8:]]
            polished = _golden_max(mag, pts[top - 1], pts[top + 1])
            best = max(best, float(np.max(polished)))
        history.append(best)
        if prev is not None and abs(best - prev) <= tol * best:
            return _log(best)
        prev = best
        n *= 2
    raise AccuracyError(f"sup norm of {b.kind} function did not stabilise", history[-2:])


def function_log_norm(b: BasisFamily, full, smooth, degree: int, p: float,
                      tol: float | None = None) -> float:
    """log ‖f‖_p given evaluators for f (``full``) and its smooth part.

    ``smooth`` is only consulted for Laguerre families (f = t^{α/2} smooth);
    ``degree`` sets the oscillation scale (sampling density, envelope).
    """
    p = check_p(p)
    if isinstance(b, Custom):
        raise ParameterError("custom families need a GridFunction with quadrature weights")
    if p == INF:
        return _sup_log_norm(b, full, degree, SUP_TOL if tol is None else tol)
    ev = smooth if isinstance(b, Laguerre) else full
    return _finite_p_log_norm(b, ev, degree, p, INTEGRAL_TOL if tol is None else tol)


def coefficient_log_norm(c: CoefficientSequence, b: BasisFamily, p: float, tol: float | None = None) -> float:
    """log ‖Σ c(n) b_n‖_p; Parseval for p = 2 is *not* used here."""
    nz = np.nonzero(c.values)[0]
    if nz.size == 0:
        return -INF
    degree = int(np.max(np.abs(c.indices[nz])))
    full = coefficient_evaluator(c, b, smooth=False)
    smooth = coefficient_evaluator(c, b, smooth=True) if isinstance(b, Laguerre) else full
    return function_log_norm(b, full, smooth, degree, p, tol)


def parseval_log_norm(c: CoefficientSequence) -> float:
    """log of the L² norm from coefficients (orthonormal basis)."""
    s = float(np.sum(np.abs(c.values) ** 2))
    return 0.5 * _log(s)


def lp_norm(f, p: float, w: WeightSpec | None = None, *, family: BasisFamily | None = None,
            degree: int | None = None, tol: float | None = None) -> LogNorm:
    """L^p norm of ``f`` as a :class:`LogNorm`.

    ``f`` may be
      * a ``(CoefficientSequence, BasisFamily)`` pair,
      * a :class:`GridFunction` (p = ∞ takes the sample max; finite p
        needs quadrature ``weights`` on the grid; ``w`` supplies the measure
        density if the weights are plain),
      * a :class:`SmoothFunction` together with ``family=`` (and a
        ``degree`` hint for the oscillation scale).
    """
    p = check_p(p)
    if isinstance(f, tuple):
        c, b = f
        return LogNorm(coefficient_log_norm(c, b, p, tol))
    if isinstance(f, GridFunction):
        vals = np.abs(f.values)
        if p == INF:
            return LogNorm(_log(float(np.max(vals))) if vals.size else -INF)
        if f.weights is None:
            raise ParameterError("finite-p norm of grid samples needs quadrature weights")
        wts = np.asarray(f.weights, dtype=float)
        if w is not None:
            wts = wts * w.measure_density(f.grid)
        return LogNorm(_log(float(wts @ vals**p)) / p)
    if isinstance(f, SmoothFunction):
        if family is None:
            raise ParameterError("a SmoothFunction needs family= to fix domain and measure")
        b = family
        deg = 32 if degree is None else int(degree)
        if isinstance(b, Laguerre) and b.alpha:
            if f.smooth_part:
                smooth = f
                full = lambda t: f(t) * np.asarray(t) ** (0.5 * b.alpha)
            else:
                full = f
                smooth = lambda t: f(t) / np.asarray(t) ** (0.5 * b.alpha)
        else:
            full = smooth = f
        return LogNorm(function_log_norm(b, full, smooth, deg, p, tol))
    raise ParameterError(f"cannot take the norm of {type(f).__name__}")


def basis_function_norm(b: BasisFamily, n: int, p: float, tol: float | None = None) -> LogNorm:
    """‖b_n‖_p of a single basis function."""
    c = CoefficientSequence.delta(b.index_set(abs(n)), n)
    if isinstance(b, Torus):
        return LogNorm(0.0)
    return LogNorm(coefficient_log_norm(c, b, p, tol))
