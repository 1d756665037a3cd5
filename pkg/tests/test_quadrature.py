import math

import numpy as np
import pytest
from scipy.special import gamma, roots_jacobi

from specdiag import Hermite, Jacobi, Laguerre, Torus, composite_rule, family_rule, gauss_rule
from specdiag.bases import WeightSpec
from specdiag.errors import DomainError, ParameterError, QuadratureError
from specdiag.quadrature import QuadratureRule


def test_small_rules():
    r = gauss_rule(WeightSpec("jacobi", 0, 0), 2)
    assert np.allclose(r.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)])
    assert np.allclose(r.weights, [1, 1])
    h = gauss_rule(WeightSpec("hermite"), 1)
    assert h.nodes[0] == pytest.approx(0, abs=1e-15) and h.weights[0] == pytest.approx(math.sqrt(math.pi))


@pytest.mark.parametrize("a,b", [(0.5, 0.5), (-0.5, 1.0), (2.0, 0.3)])
def test_jacobi_rule_matches_scipy(a, b):
    x, w = roots_jacobi(30, a, b)
    r = gauss_rule(WeightSpec("jacobi", a, b), 30)
    assert np.allclose(r.nodes, x, atol=1e-14)
    assert np.allclose(r.weights, w, rtol=1e-12)


@pytest.mark.parametrize("kind,alpha", [("hermite", 0.0), ("laguerre", 0.0), ("laguerre", -0.5), ("laguerre", 2.5)])
def test_moments_are_exact(kind, alpha):
    m = 20
    r = gauss_rule(WeightSpec(kind, alpha), m)
    for k in range(0, 2 * m, 3):
        got = r.integrate(r.nodes**k)
        if kind == "hermite":
            ref = 0.0 if k % 2 else gamma((k + 1) / 2)
        else:
            ref = gamma(k + alpha + 1)
        scale = gamma((k + 2) / 2) if kind == "hermite" else ref
        assert abs(got - ref) <= 1e-12 * scale


def test_torus_rule_exactness():
    r = gauss_rule(WeightSpec("torus"), 16)
    assert r.exactness_degree == 15
    assert abs(r.integrate(np.exp(15j * r.nodes))) < 1e-14
    assert abs(r.integrate(np.exp(16j * r.nodes)) - 1) < 1e-14


def test_large_rules_stay_accurate():
    r = gauss_rule(WeightSpec("hermite"), 400)
    assert r.integrate(np.ones(400)) == pytest.approx(math.sqrt(math.pi), rel=1e-12)
    r = gauss_rule(WeightSpec("laguerre", 0.5), 400)
    assert r.integrate(r.nodes) == pytest.approx(gamma(2.5), rel=1e-11)


def test_family_rule_integrates_products():
    for fam in (Jacobi(0.5, -0.5), Hermite(), Laguerre(1.0), Laguerre(-0.5)):
        r = family_rule(fam, 30)
        B = fam.matrix(20, r.nodes)
        G = (B.T * r.weights) @ B
        assert np.max(np.abs(G - np.eye(21))) < 1e-10


def test_composite_end_singularities_and_breakpoints():
    r = composite_rule((0, 1), 4, 10, left_exponent=-0.5)
    assert r.integrate(np.ones_like(r.nodes)) == pytest.approx(2.0, rel=1e-14)
    r = composite_rule((-1, 1), 3, 10, breakpoints=[1 / 3])
    assert r.integrate(np.abs(r.nodes - 1 / 3)) == pytest.approx((4 / 3) ** 2 / 2 + (2 / 3) ** 2 / 2, rel=1e-14)
    r = composite_rule((-1, 1), 3, 10, breakpoints=[0.2], zero_exponents=[1.3])
    ref = (1.2**2.3 + 0.8**2.3) / 2.3
    assert r.integrate(np.abs(r.nodes - 0.2) ** 1.3) == pytest.approx(ref, rel=1e-13)


def test_composite_infinite_needs_truncation():
    with pytest.raises(DomainError):
        composite_rule((0, math.inf), 4, 10)
    r = composite_rule((0, math.inf), 40, 20, T=40)
    assert r.integrate(np.exp(-r.nodes)) == pytest.approx(1.0, rel=1e-14)


def test_rule_validation():
    with pytest.raises(ParameterError):
        gauss_rule("hermite", 0)
    with pytest.raises(QuadratureError):
        QuadratureRule([0.0, 0.0], [1.0, 1.0], 1)
    with pytest.raises(QuadratureError):
        QuadratureRule([0.0, 1.0], [1.0, -1.0], 1)
