import math

import mpmath as mp
import numpy as np
import pytest
from scipy.special import eval_jacobi

from specdiag import Custom, Hermite, Jacobi, Laguerre, Torus, eval_basis, jacobi_sup_bound
from specdiag.bases import jacobi_normalization_log
from specdiag.errors import DomainError, ParameterError

mp.mp.dps = 40


def mp_jacobi_orthonormal(n, a, b, t):
    norm = mp.sqrt((2 * n + a + b + 1) * mp.gamma(n + a + b + 1) * mp.factorial(n)
                   / (2 ** (a + b + 1) * mp.gamma(n + a + 1) * mp.gamma(n + b + 1)))
    return norm * mp.jacobi(n, a, b, t)


def mp_hermite_function(n, t):
    t = mp.mpf(t)
    return mp.hermite(n, t) * mp.exp(-t * t / 2) / mp.sqrt(2**n * mp.factorial(n) * mp.sqrt(mp.pi))


def mp_laguerre_function(n, a, t):
    t = mp.mpf(t)
    return (mp.sqrt(mp.factorial(n) / mp.gamma(n + a + 1)) * mp.exp(-t / 2) * t ** (mp.mpf(a) / 2)
            * mp.laguerre(n, a, t))


def test_torus_eigenvalues_and_values():
    b = Torus((1, 0, 2))  # P(x) = 1 + 2x²
    assert b.eigenvalue(3) == pytest.approx(1 + 2 * (3j) ** 2)
    assert eval_basis(b, -2, 0.3) == pytest.approx(np.exp(-0.6j))
    assert eval_basis(b, 1, 2 * np.pi + 0.1) == pytest.approx(np.exp(0.1j))


def test_eigenvalue_formulas():
    assert Jacobi(0, 0).eigenvalue(3) == -12
    assert Jacobi(0.5, 0.5).eigenvalue(7) == -63
    assert Hermite().eigenvalue(1) == -3
    assert Laguerre(0.7).eigenvalue(5) == -5


@pytest.mark.parametrize("a,b", [(0, 0), (0.5, 0.5), (-0.5, 1), (1, -0.5), (2.5, 0.3)])
@pytest.mark.parametrize("n", [0, 1, 2, 7, 40])
def test_jacobi_against_mpmath(a, b, n):
    fam = Jacobi(a, b)
    for t in (-0.97, -0.3, 0.013, 0.61, 0.999):
        ref = float(mp_jacobi_orthonormal(n, a, b, t))
        assert eval_basis(fam, n, t) == pytest.approx(ref, rel=1e-11, abs=1e-13)


def test_jacobi_standard_matches_scipy():
    fam = Jacobi(0.5, -0.25)
    t = np.linspace(-1, 1, 11)
    assert np.allclose(fam.standard(9, t), eval_jacobi(9, 0.5, -0.25, t), rtol=1e-12)


def test_jacobi_normalization_at_degree_zero():
    a, b = -0.5, -0.5
    assert math.exp(jacobi_normalization_log(0, a, b)) == pytest.approx(1 / math.sqrt(math.pi))


@pytest.mark.parametrize("n", [0, 1, 5, 30, 120])
def test_hermite_against_mpmath(n):
    fam = Hermite()
    for t in (-7.5, -1.2, 0.0, 0.4, 3.3, 15.0):
        ref = float(mp_hermite_function(n, t))
        assert eval_basis(fam, n, t) == pytest.approx(ref, rel=1e-10, abs=1e-14)


@pytest.mark.parametrize("a", [-0.5, 0.0, 1.0, 3.2])
@pytest.mark.parametrize("n", [0, 1, 6, 50])
def test_laguerre_against_mpmath(a, n):
    fam = Laguerre(a)
    for t in (0.05, 1.1, 7.3, 40.0, 260.0):
        ref = float(mp_laguerre_function(n, a, t))
        assert eval_basis(fam, n, t) == pytest.approx(ref, rel=1e-10, abs=1e-14)


def test_large_degree_stays_finite():
    h = eval_basis(Hermite(), 3000, np.linspace(-80, 80, 7))
    assert np.all(np.isfinite(h)) and np.max(np.abs(h)) < 1
    lag = eval_basis(Laguerre(0.5), 2000, np.array([1.0, 100.0, 9000.0]))
    assert np.all(np.isfinite(lag))


def test_series_matches_matrix():
    fam = Laguerre(1.5)
    t = np.linspace(0.1, 30, 17)
    c = np.random.default_rng(1).standard_normal(25)
    assert np.allclose(fam.series(c, t), fam.matrix(24, t) @ c, rtol=1e-12, atol=1e-15)


def test_domain_and_parameter_errors():
    with pytest.raises(DomainError):
        eval_basis(Jacobi(0, 0), 2, 1.5)
    with pytest.raises(DomainError):
        eval_basis(Laguerre(-0.5), 2, 0.0)
    with pytest.raises(DomainError):
        eval_basis(Laguerre(0), 2, -1.0)
    with pytest.raises(ParameterError):
        Jacobi(-1.0, 0.0)
    with pytest.raises(ParameterError):
        Laguerre(-1.0)


def test_jacobi_sup_bound_dominates():
    t = np.linspace(-1, 1, 2001)
    for n in (3, 10, 40):
        for a, b in ((0.5, 0.5), (1.0, -0.5), (2.0, 0.0)):
            sup = np.max(np.abs(Jacobi(a, b).standard(n, t)))
            assert sup <= jacobi_sup_bound(n, a, b) * (1 + 1e-12)
    with pytest.raises(ParameterError):
        jacobi_sup_bound(3, -0.7, -0.6)


def test_custom_family_roundtrip():
    fam = Custom(lambda n, t: np.sqrt(2) * np.cos(n * np.pi * t) if n else np.ones_like(t),
                 lambda n: -(n * np.pi) ** 2, (0.0, 1.0))
    assert fam.eigenvalue(2) == pytest.approx(-4 * np.pi**2)
    assert fam.matrix(3, np.array([0.0, 0.5])).shape == (2, 4)
