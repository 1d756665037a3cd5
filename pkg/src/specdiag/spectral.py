"""Local spectrum, local spectral radius (two ways), resolvent checks.

Iterate norms ‖Tⁿf‖_p are kept in log form.  With R the largest |eig| on
the support and c* the largest coefficient there,

    log‖Tⁿf‖ = n log R + log c* + log‖Σ (e_k/R)ⁿ (c_k/c*) b_k‖,

and the last series has coefficients bounded by 1, so nothing overflows
however large n or R get.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .bases import BasisFamily, Hermite, Jacobi, Laguerre, Torus, eig_map
from .core import (DEFAULT_MAX_DEGREE, DEFAULT_THRESHOLD, CoefficientSequence, SupportSet,
                   resolvent_coeffs, resolvent_derivative_coeffs, support)
from .errors import ParameterError
from .norms import INF, basis_function_norm, check_p, coefficient_log_norm, require_admissible
from .oracle import apply_operator_grid
from .transforms import SmoothFunction, analyze, coefficient_function

FORMULA_TOL_L2 = 1e-6
FORMULA_TOL_LP = 1e-4
BOUND_TOL = 1e-9
BOUND_TOL_SUP = 1e-6
UNBOUNDED_FRACTION = 1e-6


def coefficients_of(f, b: BasisFamily, N: int = DEFAULT_MAX_DEGREE) -> CoefficientSequence:
    """Transform coefficients of ``f``; a CoefficientSequence passes through."""
    if isinstance(f, CoefficientSequence):
        if f.index_set.kind != b.index_kind:
            raise ParameterError(f"{f.index_set.kind} coefficients do not index a {b.kind} family")
        return f
    if not isinstance(f, SmoothFunction):
        f = SmoothFunction(f)
    return analyze(f, b, N)


@dataclass(frozen=True)
class LocalSpectrum:
    points: tuple
    support: SupportSet

    @property
    def tail_flag(self) -> bool:
        return self.support.tail_flag

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def as_set(self) -> set:
        return set(self.points)


def _spectrum(c: CoefficientSequence, b: BasisFamily, threshold: float) -> LocalSpectrum:
    supp = support(c, threshold)
    pts = []
    for n in supp:
        z = b.eigenvalue(n)
        if z not in pts:
            pts.append(z)
    return LocalSpectrum(tuple(pts), supp)


def local_spectrum(f, b: BasisFamily, N: int = DEFAULT_MAX_DEGREE,
                   threshold: float = DEFAULT_THRESHOLD) -> LocalSpectrum:
    """Distinct eigenvalues over the numerical support of the transform of f."""
    return _spectrum(coefficients_of(f, b, N), b, threshold)


def radius_via_support(f, b: BasisFamily, N: int = DEFAULT_MAX_DEGREE,
                       threshold: float = DEFAULT_THRESHOLD) -> float:
    """max |eig| over the support; 0 when the support is empty."""
    spec = local_spectrum(f, b, N, threshold)
    return max((abs(z) for z in spec.points), default=0.0)


@dataclass(frozen=True, eq=False)
class IterateRecord:
    """log‖Tⁿf‖_p for n = 0..n_max+1 and the derived sequences.

    ``a[n-1]`` is a_n = ‖Tⁿf‖^{1/n} and ``ratios[n-1]`` is
    ‖T^{n+1}f‖/‖Tⁿf‖, both for n = 1..n_max.
    """

    p: float
    n_max: int
    log_norms: np.ndarray
    a: np.ndarray
    ratios: np.ndarray
    limit_estimate: float
    a_limit: float
    a_half_gap: float

    def rows(self):
        return [(n, float(self.a[n - 1]), float(self.ratios[n - 1])) for n in range(1, self.n_max + 1)]


def _iterate_log_norms(c: CoefficientSequence, b: BasisFamily, p: float, n_max: int,
                       threshold: float) -> np.ndarray:
    supp = support(c, threshold)
    out = np.full(n_max + 2, -INF)
    if supp.is_empty:
        return out
    pos = np.array([c.index_set.position(n) for n in supp])
    ck = c.values[pos]
    ek = b.eigenvalues(np.array(supp.indices))
    cmax = float(np.max(np.abs(ck)))
    mag = np.abs(ek)
    R = float(np.max(mag))
    phase = np.where(mag > 0, ek / np.where(mag > 0, mag, 1), 0)
    with np.errstate(divide="ignore"):
        rel = np.log(mag) - (math.log(R) if R > 0 else 0.0)
    for n in range(n_max + 2):
        if n == 0:
            w = ck / cmax
        elif R == 0:
            break
        else:
            with np.errstate(under="ignore"):
                w = np.where(mag > 0, np.exp(n * rel) * phase**n, 0) * ck / cmax
        vals = np.zeros(c.index_set.size, dtype=complex)
        vals[pos] = w
        if p == 2:
            ln = 0.5 * math.log(float(np.sum(np.abs(w) ** 2)))
        else:
            ln = coefficient_log_norm(c.with_values(vals), b, p)
        out[n] = ln + math.log(cmax) + (n * math.log(R) if n else 0.0)
    return out


def radius_via_iterates(f, b: BasisFamily, p: float = 2, n_max: int = 60,
                        N: int = DEFAULT_MAX_DEGREE, threshold: float = DEFAULT_THRESHOLD) -> IterateRecord:
    """a_n = ‖Tⁿf‖_p^{1/n} and the consecutive-norm ratios for n = 1..n_max.

    The iterates are taken from the support-thresholded coefficients (the
    discarded noise would otherwise be amplified by |eig|ⁿ).  p = 2 uses
    Parseval; other p integrate the synthesized iterates.  The limit
    estimate is the ratio at n_max, which converges geometrically for
    finitely supported data; a_{n_max} and |a_{n_max} - a_{n_max/2}| are
    reported alongside.
    """
    p = check_p(p)
    require_admissible(b, p)
    if int(n_max) != n_max or n_max < 1:
        raise ParameterError(f"n_max must be a positive integer, got {n_max}")
    n_max = int(n_max)
    c = coefficients_of(f, b, N)
    logs = _iterate_log_norms(c, b, p, n_max, threshold)
    n = np.arange(1, n_max + 1)
    with np.errstate(under="ignore"):
        a = np.exp(logs[1:n_max + 1] / n)
        ratios = np.where(np.isfinite(logs[1:n_max + 1]), np.exp(logs[2:] - np.where(
            np.isfinite(logs[1:n_max + 1]), logs[1:n_max + 1], 0.0)), 0.0)
    a_lim = float(a[-1])
    a_half = float(a[max(n_max // 2, 1) - 1])
    return IterateRecord(p, n_max, logs, a, ratios, float(ratios[-1]), a_lim, abs(a_lim - a_half))


@lru_cache(maxsize=4096)
def _basis_norm(b: BasisFamily, n: int, p: float) -> float:
    return basis_function_norm(b, n, p).value


def conjugate_exponent(p: float) -> float:
    if p == 1:
        return INF
    if p == INF:
        return 1.0
    return p / (p - 1)


@dataclass(frozen=True, eq=False)
class SpectralReport:
    family: dict
    p: float
    spectrum_points: tuple
    radius_support: float
    iterates: IterateRecord
    limit_estimate: float
    residual: float
    tail_flag: bool
    possibly_unbounded: bool
    checks: dict
    tolerances: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "family": self.family,
            "p": "inf" if self.p == INF else self.p,
            "spectrum": [{"re": z.real, "im": z.imag} for z in self.spectrum_points],
            "radius_support": self.radius_support,
            "iterates": [{"n": n, "a_n": a, "ratio": r} for n, a, r in self.iterates.rows()],
            "limit_estimate": self.limit_estimate,
            "residual": self.residual,
            "tail_flag": self.tail_flag,
            "checks": {k: bool(self.checks[k]) for k in ("liminf_bound", "limsup_bound", "formula")},
        }


def _bound_checks(c, b, supp, p, it: IterateRecord, tol) -> tuple[bool, bool]:
    """Finite-n forms of the two one-sided inequalities.

    upper: ‖Tⁿf‖ ≤ Σ |e_k|ⁿ|c_k|‖b_k‖_p, so a_n ≤ R K^{1/n} with K = Σ|c_k|‖b_k‖_p.
    lower: |c_k||e_k|ⁿ = |⟨Tⁿf, b_k⟩| ≤ ‖Tⁿf‖_p ‖b_k‖_q, so
           |e_k| ≤ a_n (‖b_k‖_q / |c_k|)^{1/n}.
    """
    if supp.is_empty:
        return True, True
    q = conjugate_exponent(p)
    idx = list(supp.indices)
    ck = np.abs(np.array([c[k] for k in idx]))
    ek = np.abs(b.eigenvalues(np.array(idx)))
    R = float(ek.max())
    if isinstance(b, Torus):
        np_, nq = np.ones(len(idx)), np.ones(len(idx))
    else:
        np_ = np.array([1.0 if p == 2 else _basis_norm(b, k, p) for k in idx])
        nq = np.array([1.0 if q == 2 else _basis_norm(b, k, q) for k in idx])
    K = float(np.sum(ck * np_))
    n = np.arange(1, it.n_max + 1)
    upper = bool(np.all(it.a <= R * K ** (1.0 / n) * (1 + tol) + 1e-300))
    lower = True
    for e, cabs, bq in zip(ek, ck, nq):
        if e == 0:
            continue
        bound = it.a * (bq / cabs) ** (1.0 / n) * (1 + tol)
        if np.any(e > bound):
            lower = False
            break
    return lower, upper


def verify_lsrf(f, b: BasisFamily, p: float = 2, n_max: int = 60, N: int = DEFAULT_MAX_DEGREE,
                threshold: float = DEFAULT_THRESHOLD, tolerances: dict | None = None) -> SpectralReport:
    """Compare the iterate-based radius with the support-based one.

    ``checks`` holds ``formula`` (|limit - radius| ≤ tol), ``limsup_bound``
    and ``liminf_bound`` (finite-n one-sided inequalities, every n ≤ n_max).
    Failures are reported, not raised.  When the support reaches the
    truncation edge with non-negligible weight the radius is only a lower
    bound and ``possibly_unbounded`` is set.
    """
    p = check_p(p)
    tol = {
        "formula": FORMULA_TOL_L2 if p == 2 else FORMULA_TOL_LP,
        "bound": BOUND_TOL_SUP if p == INF else BOUND_TOL,
    }
    tol.update(tolerances or {})
    c = coefficients_of(f, b, N)
    spec = _spectrum(c, b, threshold)
    supp = spec.support
    radius = max((abs(z) for z in spec.points), default=0.0)
    it = radius_via_iterates(c, b, p, n_max, N, threshold)
    residual = abs(it.limit_estimate - radius)
    unbounded = False
    if supp.tail_flag:
        weights = {n: abs(b.eigenvalue(n) * c[n]) for n in supp}
        top = max(weights.values())
        edge = max(w for n, w in weights.items() if c.index_set.near_edge(n))
        unbounded = top > 0 and edge > UNBOUNDED_FRACTION * top
    lower, upper = _bound_checks(c, b, supp, p, it, tol["bound"])
    checks = {"liminf_bound": lower, "limsup_bound": upper, "formula": residual <= tol["formula"]}
    return SpectralReport(b.describe(), p, spec.points, radius, it, it.limit_estimate, residual,
                          supp.tail_flag, unbounded, checks, tol)


# ---------------------------------------------------------------------------
# resolvent


def default_grid(b: BasisFamily, N: int, size: int = 1024) -> np.ndarray:
    if isinstance(b, Torus):
        return 2 * np.pi * np.arange(size) / size
    if isinstance(b, Jacobi):
        return np.linspace(-1, 1, size + 2)[1:-1]
    if isinstance(b, Hermite):
        L = math.sqrt(2 * N + 1) + 4
        return np.linspace(-L, L, size)
    L = 4 * N + 2 * abs(b.alpha) + 20
    return np.linspace(L / size, L, size)


@dataclass(frozen=True, eq=False)
class ResolventReport:
    z: complex
    residual: float
    analyticity: dict
    shrink_factor: float
    phi: CoefficientSequence

    def as_dict(self) -> dict:
        return {
            "z": {"re": self.z.real, "im": self.z.imag},
            "residual": self.residual,
            "analyticity": [{"h": h, "mismatch": m} for h, m in self.analyticity.items()],
            "shrink_factor": self.shrink_factor,
        }


def verify_resolvent(f, b: BasisFamily, z: complex, N: int = 64, grid=None,
                     threshold: float = DEFAULT_THRESHOLD, steps=(1e-5, 1e-6),
                     spacing: float | None = None) -> ResolventReport:
    """Check that φ_z built from c/(eig - z) solves (T - z)φ_z = f.

    The residual is measured with the finite-difference operator on
    ``grid`` (sup norm, relative to f).  Analyticity in z is probed by
    comparing difference quotients of the coefficients with the exact
    z-derivative, sup over the support, for each step in ``steps``.
    """
    z = complex(z)
    c = coefficients_of(f, b, N)
    e = eig_map(b)
    psi = resolvent_coeffs(c, e, z, threshold)
    chi = resolvent_derivative_coeffs(c, e, z, threshold)
    phi = coefficient_function(psi, b)
    t = default_grid(b, N) if grid is None else np.asarray(grid, dtype=float)
    tphi = apply_operator_grid(b, phi, t, spacing, adaptive=True)
    if isinstance(f, CoefficientSequence):
        ref = coefficient_function(f, b)(t)
    else:
        fs = f if isinstance(f, SmoothFunction) else SmoothFunction(f)
        ref = fs(t)
        if isinstance(b, Laguerre) and not fs.smooth_part and b.alpha:
            ref = ref / t ** (0.5 * b.alpha)
    resid = tphi.values - z * phi(t) - ref
    scale = float(np.max(np.abs(ref)))
    residual = float(np.max(np.abs(resid)) / scale) if scale > 0 else float(np.max(np.abs(resid)))

    mismatch = {}
    cscale = max(chi.max_abs(), np.finfo(float).tiny)
    for h in steps:
        shifted = resolvent_coeffs(c, e, z + h, threshold)
        dq = (shifted.values - psi.values) / h
        mismatch[h] = float(np.max(np.abs(dq - chi.values)) / cscale)
    vals = [mismatch[h] for h in steps]
    shrink = vals[0] / vals[1] if len(vals) > 1 and vals[1] > 0 else INF
    return ResolventReport(z, residual, mismatch, shrink, psi)


@dataclass(frozen=True)
class SvepReport:
    max_surviving: float
    exceptional_indices: tuple
    distinct_points: int
    trials: int

    @property
    def passed(self) -> bool:
        return self.max_surviving == 0


def svep_probe(b: BasisFamily, z_grid, N: int = 32, rng=None, trials: int = 8) -> SvepReport:
    """Random sequences s with (eig(λ) - z) s(λ) = 0 imposed for every z.

    A coefficient survives only where eig(λ) equals every z in the grid, so
    two distinct points leave nothing.  ``exceptional_indices`` lists the
    λ whose eigenvalue hits some grid point (the only places a single z
    lets s be nonzero).
    """
    zs = np.unique(np.asarray(z_grid, dtype=complex).ravel())
    rng = np.random.default_rng(rng)
    idx = b.index_set(N).indices
    ev = b.eigenvalues(idx)
    hits = np.abs(ev[:, None] - zs[None, :]) <= 1e-14 * (1 + np.abs(zs[None, :]))
    keep = hits.all(axis=1) if zs.size else np.ones(idx.size, dtype=bool)
    worst = 0.0
    for _ in range(trials):
        s = rng.standard_normal(idx.size) + 1j * rng.standard_normal(idx.size)
        worst = max(worst, float(np.max(np.abs(np.where(keep, s, 0)), initial=0.0)))
    exceptional = tuple(int(n) for n in idx[hits.any(axis=1)])
    return SvepReport(worst, exceptional, int(zs.size), trials)
