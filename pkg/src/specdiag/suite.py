"""Per-family invariant suite behind ``specdiag verify``."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .bases import BasisFamily, Hermite, Jacobi, Laguerre, Torus, eig_map
from .core import CoefficientSequence, neumann_partial_sum, resolvent_coeffs
from .norms import laguerre_condition
from .oracle import crosscheck_eigenrelation, operator_function
from .quadrature import family_rule
from .spectral import (default_grid, radius_via_iterates, svep_probe, verify_lsrf,
                       verify_resolvent)
from .transforms import analyze, coefficient_function

DEFAULT_MODES = {
    "torus": "2,1;5,1",
    "jacobi": "3,1;7,1",
    "hermite": "0,1;4,1",
    "laguerre": "0,1;6,1",
}

LAGUERRE_TRUTH_TABLE = {(0.0, 1.0): True, (-0.5, 2.0): True, (-0.5, 1.0): False,
                        (-0.5, 4.0): False, (1.0, math.inf): True}


@dataclass(frozen=True)
class CheckRow:
    name: str
    passed: bool
    value: float
    limit: float
    seconds: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{self.name:<28} {status}  value={self.value:.3e}  limit={self.limit:.3e}  ({self.seconds:.2f}s)"


def parse_mode_sum(text: str, b: BasisFamily, N: int) -> CoefficientSequence:
    """Coefficients from ``"k1,c1;k2,c2;..."`` (c may be complex, e.g. ``1+2j``)."""
    mapping = {}
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        k, c = part.split(",")
        mapping[int(k)] = mapping.get(int(k), 0) + complex(c.replace(" ", ""))
    return CoefficientSequence.from_mapping(b.index_set(N), mapping)


def gram_error(b: BasisFamily, N: int) -> float:
    """max |G - I| over the Gram matrix of the first basis functions."""
    m = b.index_set(N).size + 8
    rule = family_rule(b, m, smooth=isinstance(b, Laguerre))
    B = b.matrix(N, rule.nodes, smooth=isinstance(b, Laguerre))
    G = (B.conj().T * rule.weights) @ B
    return float(np.max(np.abs(G - np.eye(G.shape[0]))))


def random_mode_sum(b: BasisFamily, N: int, rng, modes: int = 4) -> CoefficientSequence:
    idx = b.index_set(N).indices
    ks = rng.choice(idx, size=modes, replace=False)
    cs = rng.standard_normal(modes)
    if not b.is_real:
        cs = cs + 1j * rng.standard_normal(modes)
    return CoefficientSequence.from_mapping(b.index_set(N), dict(zip(ks.tolist(), cs)))


def diagonalization_error(b: BasisFamily, c: CoefficientSequence, N: int) -> float:
    """Relative gap between analyze(T f) (grid oracle) and eig ⊙ analyze(f)."""
    f = coefficient_function(c, b)
    c0 = analyze(f, b, N)
    c1 = analyze(operator_function(b, f), b, N, tol=1e-7)
    ev = b.eigenvalues(c0.indices)
    return float(np.max(np.abs(c1.values - ev * c0.values)) / np.max(np.abs(ev * c0.values)))


def _timed(name, fn, limit, compare="le"):
    t0 = time.perf_counter()
    value = float(fn())
    ok = value <= limit if compare == "le" else value >= limit
    return CheckRow(name, bool(ok), value, limit, time.perf_counter() - t0)


def run_suite(b: BasisFamily, N: int = 256, n_max: int = 60, p: float = 2.0,
              threshold: float = 1e-12, modes: str | None = None, seed: int = 0) -> list[CheckRow]:
    """Invariant checks for one family; each row carries its own pass flag."""
    rng = np.random.default_rng(seed)
    rows = []
    kind = b.kind
    gram_n = 16 if isinstance(b, Torus) else 32
    gram_tol = 1e-10 if isinstance(b, (Torus, Jacobi)) else 1e-8
    rows.append(_timed("orthonormality", lambda: gram_error(b, gram_n), gram_tol))

    def eigenrelation():
        grid = default_grid(b, 8, 512)
        if isinstance(b, Jacobi):
            grid = np.linspace(-0.95, 0.95, 512)
        if isinstance(b, Laguerre):
            grid = np.linspace(0.5, 40, 512)
        return max(crosscheck_eigenrelation(b, n, grid) for n in (0, 1, 3, 5))

    rows.append(_timed("eigenrelation_oracle", eigenrelation, 1e-6))

    def diagonal():
        return max(diagonalization_error(b, random_mode_sum(b, 32, rng), 32) for _ in range(3))

    rows.append(_timed("diagonalization", diagonal, 1e-6))

    c = parse_mode_sum(modes or DEFAULT_MODES[kind], b, N)
    rep2 = verify_lsrf(c, b, 2, n_max, N, threshold)
    rows.append(CheckRow("formula_p2", rep2.checks["formula"], rep2.residual,
                         rep2.tolerances["formula"], 0.0))
    rows.append(CheckRow("one_sided_bounds_p2",
                         rep2.checks["liminf_bound"] and rep2.checks["limsup_bound"], 0.0, 0.0, 0.0))

    def monotone():
        unit = c.scaled(1 / math.sqrt(float(np.sum(np.abs(c.values) ** 2))))
        it = radius_via_iterates(unit, b, 2, n_max, N, threshold)
        drop = float(np.max(np.maximum(-np.diff(it.a), 0), initial=0.0))
        over = float(np.max(it.a) - rep2.radius_support)
        return max(drop, over, 0.0)

    rows.append(_timed("monotone_below_radius", monotone, 1e-9))

    extra = p if p != 2 else math.inf
    if not isinstance(b, Laguerre) or laguerre_condition(b.alpha, extra):
        t0 = time.perf_counter()
        rep = verify_lsrf(c, b, extra, n_max, N, threshold)
        rows.append(CheckRow(f"formula_p{extra:g}", all(rep.checks.values()), rep.residual,
                             rep.tolerances["formula"], time.perf_counter() - t0))

    def scale_invariance():
        alpha = 3.7 - 1.2j
        a1 = radius_via_iterates(c, b, 2, 20, N, threshold).a
        a2 = radius_via_iterates(c.scaled(alpha), b, 2, 20, N, threshold).a
        n = np.arange(1, 21)
        return float(np.max(np.abs(a2 / a1 - abs(alpha) ** (1 / n))))

    rows.append(_timed("scale_invariance", scale_invariance, 1e-10))

    def empty_support():
        z = CoefficientSequence.zeros(b.index_set(N))
        rep = verify_lsrf(z, b, 2, 10, N, threshold)
        return rep.radius_support + float(np.max(rep.iterates.a)) + (0 if rep.spectrum_points == () else 1)

    rows.append(_timed("empty_support", empty_support, 0.0))

    def resolvent():
        single = parse_mode_sum("3,1", b, 16)
        zval = 1.0 if isinstance(b, Torus) else 0.5 + 1.0j
        rep = verify_resolvent(single, b, zval, N=16)
        return rep.residual if 5 <= rep.shrink_factor <= 20 else math.inf

    rows.append(_timed("resolvent_residual", resolvent, 1e-8))

    def neumann():
        e = eig_map(b)
        emax = float(np.max(np.abs(e.values(c.indices[c.values != 0]))))
        z = 2 * emax * np.exp(0.3j) if emax > 0 else 1.0
        exact = resolvent_coeffs(c, e, z, threshold).values
        approx = neumann_partial_sum(c, e, z, 60).values
        return float(np.max(np.abs(approx - exact)))

    rows.append(_timed("neumann_consistency", neumann, 1e-10))

    def svep():
        rep = svep_probe(b, [0.3 + 0.1j, -0.7], 32, rng)
        return rep.max_surviving

    rows.append(_timed("svep_probe", svep, 0.0))

    if isinstance(b, Laguerre):
        def table():
            return sum(laguerre_condition(a, q) != want for (a, q), want in LAGUERRE_TRUTH_TABLE.items())

        rows.append(_timed("laguerre_admissibility", table, 0.0))
    return rows
