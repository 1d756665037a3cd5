"""Forward transforms (analysis) and partial-sum synthesis."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bases import BasisFamily, Laguerre, Torus
from .core import CoefficientSequence, IndexSet
from .errors import DomainError, ParameterError, QuadratureError
from .quadrature import family_rule, gauss_rule

ANALYSIS_MARGIN = 16
REFINE_TOL = 1e-10
MAX_REFINE = 4


@dataclass(frozen=True)
class SmoothFunction:
    """A test function given by an evaluator on arrays of points.

    For Laguerre families ``smooth_part=True`` means the evaluator returns
    g where f = t^{α/2} g.
    """

    evaluator: Callable
    domain: tuple | None = None
    smooth_part: bool = False
    name: str = ""

    def __call__(self, t):
        return np.asarray(self.evaluator(np.asarray(t, dtype=float)))


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples of a function on a grid, optionally with quadrature weights."""

    grid: np.ndarray
    values: np.ndarray
    family: BasisFamily | None = None
    weights: np.ndarray | None = None
    smooth: bool = False

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values)
        if g.shape != v.shape:
            raise ParameterError("grid and values must have the same shape")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)


def _check_domain_match(f: SmoothFunction, b: BasisFamily):
    if f.domain is None:
        return
    lo, hi = b.domain
    flo, fhi = f.domain
    if not (math.isclose(flo, lo) or flo == lo) or not (math.isclose(fhi, hi) or fhi == hi):
        raise DomainError(f"function domain {f.domain} does not match {b.kind} domain {b.domain}")


def _project(f: SmoothFunction, b: BasisFamily, max_degree: int, m: int) -> np.ndarray:
    if isinstance(b, Torus):
        rule = gauss_rule(b.weight, m)
        vals = f(rule.nodes)
        mat = np.conj(b.matrix(max_degree, rule.nodes))
    elif isinstance(b, Laguerre):
        rule = family_rule(b, m, smooth=True)
        vals = f(rule.nodes)
        if not f.smooth_part and b.alpha:
            vals = vals / rule.nodes ** (0.5 * b.alpha)
        mat = b.matrix(max_degree, rule.nodes, smooth=True)
    else:
        rule = family_rule(b, m)
        vals = f(rule.nodes)
        mat = b.matrix(max_degree, rule.nodes)
        if not b.is_real:
            mat = np.conj(mat)
    vals = np.asarray(vals, dtype=complex)
    if vals.shape != rule.nodes.shape:
        raise QuadratureError("function evaluator must return one value per point")
    if not np.all(np.isfinite(vals)):
        raise QuadratureError(f"function is not finite at the {b.kind} quadrature nodes")
    return (rule.weights * vals) @ mat


def _nodes_for(b: BasisFamily, max_degree: int) -> int:
    if isinstance(b, Torus):
        return 2 * max_degree + 1 + ANALYSIS_MARGIN
    return max_degree + ANALYSIS_MARGIN


def analyze(f: SmoothFunction, b: BasisFamily, max_degree: int, *, tol: float = REFINE_TOL,
            max_refine: int = MAX_REFINE) -> CoefficientSequence:
    """Transform coefficients ⟨f, b_n⟩ for all indices up to ``max_degree``.

    Starts with N + 16 Gauss nodes (2N + 17 equispaced points on the torus)
    and doubles the rule until no coefficient moves by more than
    ``tol`` relative to the largest one.  Small coefficients are kept as
    computed.
    """
    if int(max_degree) != max_degree or max_degree < 0:
        raise ParameterError(f"truncation degree must be a non-negative integer, got {max_degree}")
    max_degree = int(max_degree)
    _check_domain_match(f, b)
    m = _nodes_for(b, max_degree)
    coarse = _project(f, b, max_degree, m)
    for _ in range(max_refine):
        m *= 2
        fine = _project(f, b, max_degree, m)
        scale = max(np.max(np.abs(fine)), np.finfo(float).tiny)
        if np.max(np.abs(fine - coarse)) <= tol * scale:
            return CoefficientSequence(b.index_set(max_degree), fine)
        coarse = fine
    raise QuadratureError(
        f"{b.kind} transform did not settle to {tol:g} after {max_refine} rule doublings (last m={m})"
    )


def coefficient_evaluator(c: CoefficientSequence, b: BasisFamily, smooth: bool = False) -> Callable:
    """Vectorized t ↦ Σ c(n) b_n(t), using only indices up to the last nonzero one."""
    if c.index_set.kind != b.index_kind:
        raise ParameterError(f"{c.index_set.kind} coefficients do not index a {b.kind} family")
    nz = np.nonzero(c.values)[0]
    if nz.size == 0:
        return lambda t: np.zeros(np.shape(t), dtype=complex)
    top = int(np.max(np.abs(c.indices[nz])))
    sub = c.truncated(top).values
    real_out = b.is_real and np.all(sub.imag == 0)
    coeffs = sub.real if real_out else sub

    if hasattr(b, "series"):
        return lambda t: b.series(coeffs, t, smooth)

    def evaluate(t):
        mat = b.matrix(top, t, smooth)
        return mat @ coeffs

    return evaluate


def coefficient_function(c: CoefficientSequence, b: BasisFamily, name: str = "") -> SmoothFunction:
    """The finite series Σ c(n) b_n as a :class:`SmoothFunction`.

    Laguerre series are stored by their smooth part.
    """
    smooth = isinstance(b, Laguerre)
    return SmoothFunction(coefficient_evaluator(c, b, smooth), b.domain, smooth_part=smooth, name=name)


def synthesize(c: CoefficientSequence, b: BasisFamily, grid, smooth: bool = False) -> GridFunction:
    """Partial sum Σ c(n) b_n sampled on ``grid``."""
    grid = b.check_domain(grid)
    vals = coefficient_evaluator(c, b, smooth)(grid)
    return GridFunction(grid, vals, b, smooth=smooth)


@dataclass(frozen=True)
class DecayReport:
    suprema: dict
    algebraic_exponent: float | None
    geometric_log_slope: float | None
    fit_range: tuple | None
    noise_floor: float

    def as_dict(self) -> dict:
        return {
            "suprema": {str(k): v for k, v in self.suprema.items()},
            "algebraic_exponent": self.algebraic_exponent,
            "geometric_log_slope": self.geometric_log_slope,
            "fit_range": list(self.fit_range) if self.fit_range else None,
            "noise_floor": self.noise_floor,
        }


DECAY_POWERS = (1, 2, 4, 8)


def decay_report(c: CoefficientSequence, noise_floor: float = 1e-13) -> DecayReport:
    """Polynomial-weight suprema and fitted decay rates of a coefficient sequence.

    Fits use only coefficients above ``noise_floor`` times the largest one.
    The algebraic exponent is minus the slope of log|c(n)| against
    log(1 + |n|) on the last decade of those indices; the geometric slope is
    the slope of log|c(n)| against |n|.  Either is ``None`` when fewer than
    two distinct |n| are available.
    """
    mags = np.abs(c.values)
    top = mags.max() if mags.size else 0.0
    if top == 0:
        raise ParameterError("decay report of the zero sequence is undefined")
    n = np.abs(c.indices)
    sup = {k: float(np.max((1.0 + n) ** k * mags)) for k in DECAY_POWERS}
    keep = mags > noise_floor * top
    nk, mk = n[keep], mags[keep]
    geo = None
    if np.unique(nk).size >= 2:
        geo = float(np.polyfit(nk, np.log(mk), 1)[0])
    alg = None
    fit_range = None
    nmax = int(nk.max())
    sel = nk >= nmax / 10
    if np.unique(nk[sel]).size >= 2:
        alg = float(-np.polyfit(np.log1p(nk[sel]), np.log(mk[sel]), 1)[0])
        fit_range = (int(nk[sel].min()), nmax)
    return DecayReport(sup, alg, geo, fit_range, noise_floor)
