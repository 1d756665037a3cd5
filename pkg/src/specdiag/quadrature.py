"""Gauss rules for the classical weights and composite rules for the rest.

Nodes come from the symmetric tridiagonal (Jacobi) matrix of the weight and
are polished by Newton steps on the orthonormal recurrence; weights come
from the Christoffel function ``1 / sum_k p_k(x)^2`` evaluated in log form,
which stays accurate where eigenvector components would underflow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal
from scipy.special import logsumexp

from .bases import BasisFamily, Custom, Hermite, Jacobi, Laguerre, Torus, WeightSpec, scaled_recurrence
from .errors import DomainError, ParameterError, QuadratureError


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    exactness_degree: int
    weight: WeightSpec | None = None

    def __post_init__(self):
        x = np.asarray(self.nodes, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if x.shape != w.shape or x.ndim != 1:
            raise QuadratureError("nodes and weights must be 1-d arrays of equal length")
        if x.size > 1 and np.any(np.diff(x) <= 0):
            raise QuadratureError("nodes must be strictly increasing")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise QuadratureError("weights must be finite and non-negative")
        x.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "nodes", x)
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return self.nodes.size

    def integrate(self, values) -> complex | float:
        return np.tensordot(self.weights, np.asarray(values), axes=(0, 0))


def _poly_family(weight: WeightSpec) -> BasisFamily:
    if weight.kind == "jacobi":
        return Jacobi(weight.alpha, weight.beta)
    if weight.kind == "hermite":
        return Hermite()
    if weight.kind == "laguerre":
        return Laguerre(weight.alpha)
    raise ParameterError(f"no orthogonal polynomial family for weight {weight.kind!r}")


def _as_weight(w) -> WeightSpec:
    if isinstance(w, WeightSpec):
        return w
    if isinstance(w, BasisFamily) and not isinstance(w, Custom):
        return w.weight
    if isinstance(w, str):
        return WeightSpec(w)
    raise ParameterError(f"cannot interpret {w!r} as a weight")


@lru_cache(maxsize=256)
def _gauss_nodes_logsum(kind, alpha, beta, m):
    family = _poly_family(WeightSpec(kind, alpha, beta))
    diag, off = family.jacobi_matrix(m)
    try:
        if m == 1:
            x = diag[:1].copy()
        else:
            x = eigh_tridiagonal(diag, off, eigvals_only=True)
    except (LinAlgError, ValueError) as exc:
        raise QuadratureError(f"Golub-Welsch eigenvalue solve failed for m={m}: {exc}") from exc
    x = np.sort(x)
    for _ in range(2):
        mant, _, dmant = scaled_recurrence(family, m + 1, x, derivative=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = mant[m] / dmant[m]
        gap = np.min(np.diff(x)) if m > 1 else 1.0
        ok = np.isfinite(step) & (np.abs(step) < 0.1 * gap)
        x = np.where(ok, x - step, x)
    if kind == "jacobi":
        x = np.clip(x, np.nextafter(-1.0, 0.0), np.nextafter(1.0, 0.0))
    mant, logs = scaled_recurrence(family, m, x)
    with np.errstate(divide="ignore"):
        terms = 2 * np.log(np.abs(mant)) + 2 * logs
    logsum = logsumexp(terms, axis=0)
    x.setflags(write=False)
    logsum.setflags(write=False)
    return x, logsum


def gauss_rule(weight, m: int) -> QuadratureRule:
    """m-node Gauss rule for a classical weight.

    ``weight`` is a :class:`WeightSpec` (or a family / kind name).  The
    weights integrate against the *Gauss density*: (1-t)^α(1+t)^β, e^{-t²},
    t^α e^{-t}; on the torus the rule is m equispaced points with weights
    1/m (exact for trigonometric polynomials of degree < m).
    """
    if int(m) != m or m < 1:
        raise ParameterError(f"number of nodes must be a positive integer, got {m}")
    m = int(m)
    w = _as_weight(weight)
    if w.kind == "torus":
        return QuadratureRule(2 * np.pi * np.arange(m) / m, np.full(m, 1.0 / m), m - 1, w)
    x, logsum = _gauss_nodes_logsum(w.kind, float(w.alpha), float(w.beta), m)
    with np.errstate(under="ignore"):
        weights = np.exp(-logsum)
    return QuadratureRule(x, weights, 2 * m - 1, w)


def family_rule(b: BasisFamily, m: int, smooth: bool = False) -> QuadratureRule:
    """Rule integrating against the family's own L² measure.

    Exact for products b_j b_k with j + k ≤ 2m - 1.  ``smooth=True`` (Laguerre)
    returns weights for integrands written as t^α G(t), i.e. the weight
    absorbs t^α so that only the smooth parts need evaluating.
    """
    if isinstance(b, Custom):
        if b.rule is None:
            raise ParameterError("custom family has no quadrature rule")
        x, w = b.rule(m)
        return QuadratureRule(np.asarray(x, float), np.asarray(w, float), 2 * m - 1, None)
    w = b.weight
    if isinstance(b, Torus):
        return gauss_rule(w, m)
    x, logsum = _gauss_nodes_logsum(w.kind, float(w.alpha), float(w.beta), int(m))
    if isinstance(b, Jacobi):
        logw = -logsum
    elif isinstance(b, Hermite):
        logw = -logsum + x * x
    else:
        logw = -logsum + x
        if not smooth and b.alpha:
            logw = logw - b.alpha * np.log(x)
    with np.errstate(under="ignore", over="ignore"):
        return QuadratureRule(x, np.exp(logw), 2 * m - 1, w)


def _jacobi_unit_rule(order, left_exp, right_exp):
    if left_exp == 0 and right_exp == 0:
        return gauss_rule(WeightSpec("jacobi", 0.0, 0.0), order)
    return gauss_rule(WeightSpec("jacobi", float(right_exp), float(left_exp)), order)


def _panel(a, b, order, left_exp=0.0, right_exp=0.0):
    """Nodes/weights for ∫_a^b F(t) (t-a)^left (b-t)^right dt."""
    r = _jacobi_unit_rule(order, left_exp, right_exp)
    half = 0.5 * (b - a)
    x = a + half * (r.nodes + 1)
    w = r.weights * half ** (1 + left_exp + right_exp)
    return x, w


def composite_rule(
    interval,
    panels: int,
    order: int,
    *,
    T: float | None = None,
    breakpoints=(),
    left_exponent: float = 0.0,
    right_exponent: float = 0.0,
    zero_exponents=None,
    graded=(),
    grading: float = 0.15,
    grading_floor: float = 1e-11,
) -> QuadratureRule:
    """Piecewise Gauss-Legendre rule.

    Infinite ends are truncated at ``T`` ([0, T] or [-T, T]).  The rule
    integrates F against (t-a)^left_exponent (b-t)^right_exponent on the
    (truncated) interval [a, b]; the end panels use Gauss-Jacobi rules so
    those algebraic end singularities are handled exactly.  ``breakpoints``
    are forced panel boundaries (kinks of the integrand).

    ``zero_exponents`` (one per breakpoint, 0 for none) marks breakpoints
    where the integrand behaves like |t - t0|^s · smooth; the two adjacent
    panels then use Gauss-Jacobi rules for that factor, folded back into the
    weights so the rule still integrates the integrand itself.

    ``graded`` breakpoints (a subset of ``breakpoints``) get geometrically
    shrinking panels on both sides, ratio ``grading``, down to
    ``grading_floor`` times the interval length; this resolves integrands
    with a sharp but smooth feature at the point.
    """
    if int(panels) != panels or panels < 1 or int(order) != order or order < 1:
        raise ParameterError("panels and order must be positive integers")
    a, b = (float(v) for v in interval)
    if math.isinf(a) or math.isinf(b):
        if T is None or not T > 0:
            raise DomainError("infinite interval needs a truncation length T > 0")
        a = -T if math.isinf(a) else a
        b = T if math.isinf(b) else b
    if not (np.isfinite(a) and np.isfinite(b) and a < b):
        raise DomainError(f"invalid interval [{a}, {b}]")
    if left_exponent <= -1 or right_exponent <= -1:
        raise ParameterError("end exponents must exceed -1")
    bps = np.asarray(breakpoints, dtype=float).reshape(-1)
    zexp = np.zeros(bps.size) if zero_exponents is None else np.broadcast_to(
        np.asarray(zero_exponents, dtype=float), bps.shape)
    inside = (bps > a) & (bps < b)
    sing = dict(zip(bps[inside].tolist(), zexp[inside].tolist()))
    cuts = np.unique(np.concatenate([[a, b], bps[inside]]))
    edges = []
    total = b - a
    graded = {float(g) for g in np.asarray(graded, dtype=float).reshape(-1) if a < g < b}
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        k = max(1, int(math.ceil(panels * (hi - lo) / total)))
        e = np.linspace(lo, hi, k + 1)
        width = e[1] - e[0]
        levels = max(0, int(math.ceil(math.log(grading_floor * total / width) / math.log(grading))))
        geo = width * grading ** np.arange(1, levels + 1)
        extra = []
        if lo in graded:
            extra.append(lo + geo)
        if hi in graded:
            extra.append(hi - geo)
        if extra:
            e = np.unique(np.concatenate([e] + extra))
        edges.append(e[:-1])
    edges = np.concatenate(edges + [[b]])
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    unit = gauss_rule(WeightSpec("jacobi", 0.0, 0.0), int(order))
    x = lo[:, None] + half[:, None] * (unit.nodes + 1)
    w = half[:, None] * unit.weights
    last = lo.size - 1
    special = {0, last} | {i for i in range(lo.size) if sing.get(lo[i]) or sing.get(hi[i])}
    for i in special:
        le = left_exponent if i == 0 else sing.get(lo[i], 0.0)
        re = right_exponent if i == last else sing.get(hi[i], 0.0)
        if not (le or re):
            continue
        xi, wi = _panel(lo[i], hi[i], int(order), le, re)
        if i != 0 and le:
            wi = wi / (xi - lo[i]) ** le
        if i != last and re:
            wi = wi / (hi[i] - xi) ** re
        x[i], w[i] = xi, wi
    x, w = x.ravel(), w.ravel()
    n = int(order)
    if left_exponent:
        w[n:] *= (x[n:] - a) ** left_exponent
    if right_exponent:
        w[:-n] *= (b - x[:-n]) ** right_exponent
    return QuadratureRule(x, w, 2 * int(order) - 1, None)
