"""Acceptance suite: one test per criterion, each at its stated tolerance.

Every criterion records a PASS/FAIL line that is printed in the pytest
terminal summary (and immediately with ``-s``).  Run on its own with
``python3 -m pytest tests/test_acceptance.py -v``.
"""
import json
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from specdiag import (CoefficientSequence, Hermite, Jacobi, Laguerre, SmoothFunction, Torus,
                      analyze, basis_function_norm, decay_report, eig_map, laguerre_condition,
                      neumann_partial_sum, resolvent_coeffs, verify_lsrf, verify_resolvent)
from specdiag.spectral import radius_via_iterates
from specdiag.suite import LAGUERRE_TRUTH_TABLE, diagonalization_error, gram_error, parse_mode_sum, random_mode_sum

INF = math.inf
RESULTS = {}
SEED = int(os.environ.get("SPECDIAG_SEED", "0"))

TWO_MODE = [
    (Torus(), "2,1;5,1", 5.0),
    (Jacobi(0.5, 0.5), "3,1;7,1", 56.0),
    (Hermite(), "0,1;4,1", 9.0),
    (Laguerre(0.0), "0,1;6,1", 6.0),
]


def record(key, ok, detail):
    line = f"criterion {key:>3}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[key] = line
    print(line)


def label(b):
    return " ".join(f"{k}={v}" for k, v in b.describe().items() if k != "poly")


# 1 -------------------------------------------------------------------------
def gram_cases():
    yield Torus(), 16, 1e-10
    for a in (-0.5, 0.0, 0.5, 1.0):
        for b in (-0.5, 0.0, 0.5, 1.0):
            yield Jacobi(a, b), 32, 1e-10
    yield Hermite(), 32, 1e-8
    for a in (-0.5, 0.0, 1.0):
        yield Laguerre(a), 32, 1e-8


def test_c01_orthonormality():
    worst = []
    for b, N, tol in gram_cases():
        assert b.index_set(N).size == 33
        err = gram_error(b, N)
        worst.append((err / tol, err, label(b)))
    ratio, err, who = max(worst)
    ok = ratio < 1
    record("1", ok, f"{len(worst)} Gram matrices 33x33; worst {who}: {err:.2e} ({ratio:.1e} of tol)")
    assert ok


# 2 -------------------------------------------------------------------------
DIAG_FAMILIES = [Torus(), Jacobi(0.5, 0.5), Jacobi(-0.5, 1.0), Hermite(), Laguerre(0.0), Laguerre(-0.5), Laguerre(1.0)]


def test_c02_diagonalization():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for b in DIAG_FAMILIES:
        for _ in range(5):
            worst = max(worst, diagonalization_error(b, random_mode_sum(b, 32, rng), 32))
    ok = worst < 1e-6
    record("2", ok, f"5 random mode sums x {len(DIAG_FAMILIES)} families, N=32; max relative error {worst:.2e} (< 1e-6)")
    assert ok


# 3 -------------------------------------------------------------------------
def test_c03_formula_residual_p2():
    rows = []
    for b, modes, _ in TWO_MODE:
        rep = verify_lsrf(parse_mode_sum(modes, b, 256), b, 2, 60)
        rows.append((b, rep))
    worst = max(rep.residual for _, rep in rows)
    ok = worst < 1e-6
    RESULTS["3a"] = (ok, f"ratio limit vs radius_support, n_max=60: max residual {worst:.1e}")
    assert ok


@pytest.mark.parametrize("b,modes,expected", TWO_MODE, ids=[b.kind for b, _, _ in TWO_MODE])
def test_c03_stated_radius_values(b, modes, expected, request):
    rep = verify_lsrf(parse_mode_sum(modes, b, 256), b, 2, 60)
    ok = rep.radius_support == expected and abs(rep.limit_estimate - expected) < 1e-6
    RESULTS.setdefault("3b", []).append((ok, f"{b.kind} {modes!r} -> {rep.radius_support:g} (stated {expected:g})"))
    if b.kind == "jacobi":
        request.applymarker(pytest.mark.xfail(
            strict=True, reason="stated value 56 = 7*8 disagrees with -n(n+a+b+1) = -63 at n=7, a=b=1/2"))
    assert ok


# 4 -------------------------------------------------------------------------
def _bounds_hold(b, c, radius):
    it = radius_via_iterates(c, b, 2, 60)
    increasing = bool(np.all(np.diff(it.a) >= -1e-12 * it.a[1:]))
    below = bool(np.all(it.a <= radius + 1e-9))
    return increasing, below, it.a


@pytest.mark.parametrize("b,modes,expected", TWO_MODE, ids=[b.kind for b, _, _ in TWO_MODE])
def test_c04_one_sided_bounds_as_stated(b, modes, expected, request):
    c = parse_mode_sum(modes, b, 256)
    radius = verify_lsrf(c, b, 2, 10).radius_support
    inc, below, a = _bounds_hold(b, c, radius)
    ok = inc and below
    RESULTS.setdefault("4a", []).append((ok, f"{b.kind}: a_1={a[0]:.6g}, radius={radius:g}"))
    if not ok:
        request.applymarker(pytest.mark.xfail(
            strict=True, reason="a_1 = ||f||-weighted mean exceeds the radius for inputs with ||f||_2 > 1"))
    assert ok


def test_c04_one_sided_bounds_unit_norm_inputs():
    msgs, ok = [], True
    for b, modes, _ in TWO_MODE:
        c = parse_mode_sum(modes, b, 256)
        c = c.scaled(1 / math.sqrt(float(np.sum(np.abs(c.values) ** 2))))
        radius = verify_lsrf(c, b, 2, 10).radius_support
        inc, below, a = _bounds_hold(b, c, radius)
        rep = verify_lsrf(c, b, 2, 60)
        good = inc and below and rep.checks["liminf_bound"] and rep.checks["limsup_bound"]
        ok &= good
        msgs.append(f"{b.kind}:{'ok' if good else 'bad'}")
    RESULTS["4b"] = (ok, "unit-L2 inputs: a_n nondecreasing, <= radius + 1e-9, finite-n bounds hold: " + " ".join(msgs))
    assert ok


# 5 -------------------------------------------------------------------------
def test_c05_lp_sweep():
    worst, n = 0.0, 0
    who = ""
    for b, modes, _ in TWO_MODE + [(Laguerre(-0.5), "0,1;6,1", 6.0), (Laguerre(1.0), "0,1;6,1", 6.0)]:
        c = parse_mode_sum(modes, b, 256)
        for p in (1, 2, 4, INF):
            if isinstance(b, Laguerre) and not laguerre_condition(b.alpha, p):
                continue
            rep = verify_lsrf(c, b, p, 60)
            n += 1
            if rep.residual >= worst:
                worst, who = rep.residual, f"{label(b)} p={p:g}"
    ok = worst < 1e-4
    record("5", ok, f"{n} (family, p) runs, n_max=60; max |limit - radius| {worst:.1e} at {who} (< 1e-4)")
    assert ok


# 6 -------------------------------------------------------------------------
def test_c06_resolvent():
    f = SmoothFunction(lambda t: np.exp(3j * t))
    grid = 2 * np.pi * np.arange(1024) / 1024
    rep = verify_resolvent(f, Torus(), 1.0, N=16, grid=grid)
    ok = rep.residual < 1e-8 and 7 < rep.shrink_factor < 13
    record("6", ok, f"residual {rep.residual:.1e} (< 1e-8); mismatch shrink h 1e-5 -> 1e-6: x{rep.shrink_factor:.2f}")
    assert ok


# 7 -------------------------------------------------------------------------
def test_c07_neumann():
    worst, smallest_blowup = 0.0, INF
    for b, modes, _ in TWO_MODE:
        c = parse_mode_sum(modes, b, 256)
        e = eig_map(b)
        emax = float(np.max(np.abs(e.values(c.indices[c.values != 0]))))
        z = 2 * emax * np.exp(0.7j)
        exact = resolvent_coeffs(c, e, z).values
        worst = max(worst, float(np.max(np.abs(neumann_partial_sum(c, e, z, 60).values - exact))))
        zin = 0.5 * emax * np.exp(0.7j)
        exact_in = resolvent_coeffs(c, e, zin).values
        err30 = np.max(np.abs(neumann_partial_sum(c, e, zin, 30).values - exact_in))
        err60 = np.max(np.abs(neumann_partial_sum(c, e, zin, 60).values - exact_in))
        smallest_blowup = min(smallest_blowup, float(err60 / max(err30, 1e-300)), float(err60))
    ok = worst < 1e-10 and smallest_blowup > 1e6
    record("7", ok, f"|z|=2max|eig|: max error {worst:.1e} (< 1e-10); |z|=0.5max|eig|: error >= {smallest_blowup:.1e} and growing")
    assert ok


# 8 -------------------------------------------------------------------------
def test_c08_laguerre_truth_table():
    got = {k: laguerre_condition(*k) for k in LAGUERRE_TRUTH_TABLE}
    ok = got == LAGUERRE_TRUTH_TABLE
    record("8", ok, "admissibility table " + ", ".join(f"{k}:{'T' if v else 'F'}" for k, v in got.items()))
    assert ok


# 9 -------------------------------------------------------------------------
def test_c09_basis_norm_growth():
    ns = np.array([50, 71, 100, 141, 200])
    families = [Jacobi(0, 0), Jacobi(0.5, 0.5), Jacobi(1, 1), Jacobi(-0.5, -0.5), Hermite(),
                Laguerre(0.0), Laguerre(-0.5), Laguerre(1.0)]
    worst, who, count = -INF, "", 0
    for b in families:
        for p in (1, 2, 4, INF):
            if isinstance(b, Laguerre) and not laguerre_condition(b.alpha, p):
                continue
            logs = [basis_function_norm(b, int(n), p).log_value for n in ns]
            slope = np.polyfit(np.log(ns), logs, 1)[0]
            count += 1
            if slope > worst:
                worst, who = slope, f"{label(b)} p={p:g}"
    torus = [basis_function_norm(Torus(), int(n), p).log_value for n in ns for p in (1, 2, 4, INF)]
    ok = worst < 2 and all(v == 0.0 for v in torus)
    record("9", ok, f"{count} (family, p) fits over n in [50,200]: max slope {worst:.3f} at {who}; torus slope exactly 0")
    assert ok


# 10 ------------------------------------------------------------------------
def test_c10_geometric_decay():
    c = analyze(SmoothFunction(lambda t: 1 / (2 - np.cos(t))), Torus(), 64)
    slope = decay_report(c).geometric_log_slope
    target = math.log(2 - math.sqrt(3))
    rel = abs(slope - target) / abs(target)
    ok = rel < 0.05
    record("10", ok, f"log-slope {slope:.6f} vs log(2-sqrt3) = {target:.6f}: relative gap {rel:.1e} (< 5%)")
    assert ok


# 11 ------------------------------------------------------------------------
def _cli(*args, out=None):
    cmd = [sys.executable, "-m", "specdiag", *args]
    return subprocess.run(cmd, capture_output=True, text=True)


def test_c11_cli_contract(tmp_path):
    failures = []
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    base = ["radius", "--family", "jacobi", "--alpha", "0.5", "--beta", "0.5", "--func", "3,1;7,1", "--p", "4"]
    r1, r2 = _cli(*base, "--out", str(a)), _cli(*base, "--out", str(b))
    if not (r1.returncode == r2.returncode == 0 and a.read_bytes() == b.read_bytes()):
        failures.append("determinism")
    json.loads(a.read_text())
    expectations = [
        (("transform", "--func", "cos3t", "--N", "8"), 0),
        (("radius", "--func", "2,1;5,1"), 0),
        (("transform", "--family", "laguerre", "--alpha", "-0.5", "--p", "1", "--func", "0,1"), 2),
        (("radius", "--family", "hermite", "--func", "cos3t"), 2),
        (("resolvent", "--func", "3,1", "--z", "1"), 0),
        (("resolvent", "--func", "3,1", "--z", "3i"), 3),
    ]
    for args, want in expectations:
        got = _cli(*args).returncode
        if got != want:
            failures.append(f"{args[0]} exit {got}!={want}")
    t0 = time.perf_counter()
    verify_codes = {}
    for fam in (["torus"], ["jacobi", "--alpha", "0.5", "--beta", "0.5"], ["hermite"], ["laguerre"]):
        verify_codes[fam[0]] = _cli("verify", "--family", *fam).returncode
    elapsed = time.perf_counter() - t0
    if any(verify_codes.values()):
        failures.append(f"verify codes {verify_codes}")
    if elapsed >= 300:
        failures.append(f"verify took {elapsed:.0f}s")
    ok = not failures
    record("11", ok, f"byte-identical JSON, exit codes 0/2/3, verify all families -> 0 in {elapsed:.1f}s"
           + ("" if ok else f"; problems: {failures}"))
    assert ok


def summarize():
    """Fold the multi-part criteria into single lines (called from conftest)."""
    lines = []
    if "3a" in RESULTS or "3b" in RESULTS:
        ok_a, msg_a = RESULTS.get("3a", (False, "not run"))
        parts = RESULTS.get("3b", [])
        ok_b = bool(parts) and all(ok for ok, _ in parts)
        bad = "; ".join(m for ok, m in parts if not ok)
        lines.append(f"criterion   3: {'PASS' if ok_a and ok_b else 'FAIL'}  {msg_a}"
                     + (f"; stated values not reproduced: {bad}" if bad else "; stated values reproduced"))
    if "4a" in RESULTS or "4b" in RESULTS:
        parts = RESULTS.get("4a", [])
        ok_a = bool(parts) and all(ok for ok, _ in parts)
        ok_b, msg_b = RESULTS.get("4b", (False, "not run"))
        bad = "; ".join(m for ok, m in parts if not ok)
        lines.append(f"criterion   4: {'PASS' if ok_a and ok_b else 'FAIL'}  "
                     + (f"as stated fails ({bad}); " if bad else "as stated holds; ") + msg_b)
    ordered = []
    for key in ("1", "2", "3", "4", "5", "6", "7", "8", "9", "10", "11"):
        if key in ("3", "4"):
            ordered.extend(l for l in lines if l.startswith(f"criterion   {key}:"))
        elif key in RESULTS:
            ordered.append(RESULTS[key])
    return ordered


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
