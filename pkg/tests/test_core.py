import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specdiag import (CoefficientSequence, EigenvalueMap, Hermite, IndexSet, Jacobi, Torus,
                      apply_power, eig_map, neumann_partial_sum, resolvent_coeffs,
                      resolvent_derivative_coeffs, support)
from specdiag.errors import (ParameterError, PowerOverflowError, SingularResolventError,
                             ZeroShiftError)


def test_index_sets():
    z = IndexSet("integers", 3)
    assert z.indices.tolist() == [-3, -2, -1, 0, 1, 2, 3]
    assert z.size == 7 and z.position(-3) == 0 and -4 not in z
    n = IndexSet("naturals", 3)
    assert n.indices.tolist() == [0, 1, 2, 3] and -1 not in n
    with pytest.raises(ParameterError):
        IndexSet("reals", 3)
    with pytest.raises(ParameterError):
        IndexSet("naturals", -1)


def test_sequence_is_readonly_and_finite():
    c = CoefficientSequence.delta(IndexSet("naturals", 4), 2, 3.0)
    assert c[2] == 3 and c[0] == 0
    with pytest.raises(ValueError):
        c.values[0] = 1
    with pytest.raises(ParameterError):
        CoefficientSequence(IndexSet("naturals", 1), [1.0, np.inf])
    with pytest.raises(ParameterError):
        CoefficientSequence(IndexSet("naturals", 1), [1.0])


def test_truncation_keeps_or_refuses():
    c = CoefficientSequence.from_mapping(IndexSet("integers", 5), {-2: 1, 2: 1j})
    small = c.truncated(2)
    assert small[-2] == 1 and small[2] == 1j
    with pytest.raises(ParameterError):
        c.truncated(1)


def test_support_threshold_and_tail_flag():
    idx = IndexSet("naturals", 10)
    c = CoefficientSequence.from_mapping(idx, {1: 1.0, 3: 1e-13, 9: 1e-3})
    s = support(c, 1e-12)
    assert s.indices == (1, 9) and s.tail_flag
    assert support(CoefficientSequence.zeros(idx)).is_empty


def test_apply_power_matches_direct():
    b = Jacobi(0.0, 0.0)
    c = CoefficientSequence.delta(IndexSet("naturals", 5), 3, 2.0)
    out = apply_power(c, eig_map(b), 3)
    assert out[3] == pytest.approx(2.0 * (-12.0) ** 3)


def test_apply_power_overflow_is_typed():
    c = CoefficientSequence.delta(IndexSet("naturals", 200), 200)
    with pytest.raises(PowerOverflowError) as err:
        apply_power(c, eig_map(Jacobi(0, 0)), 100)
    assert err.value.index == 200


def test_resolvent_examples():
    idx = IndexSet("naturals", 5)
    c = CoefficientSequence.delta(idx, 3)
    r = resolvent_coeffs(c, eig_map(Jacobi(0, 0)), 0)
    assert r[3] == pytest.approx(-1 / 12)
    d = resolvent_derivative_coeffs(c, eig_map(Jacobi(0, 0)), 0)
    assert d[3] == pytest.approx(1 / 144)
    with pytest.raises(SingularResolventError):
        resolvent_coeffs(c, eig_map(Jacobi(0, 0)), -12)


def test_neumann_converges_outside_and_rejects_zero():
    idx = IndexSet("naturals", 4)
    c = CoefficientSequence.from_mapping(idx, {0: 1, 4: 0.5})
    e = eig_map(Hermite())
    z = 20.0
    approx = neumann_partial_sum(c, e, z, 60)
    exact = resolvent_coeffs(c, e, z)
    assert np.max(np.abs(approx.values - exact.values)) < 1e-14
    with pytest.raises(ZeroShiftError):
        neumann_partial_sum(c, e, 0, 5)


def test_custom_eigenvalue_map_without_vectorization():
    e = EigenvalueMap("square", lambda n: n * n)
    assert e.values([1, 2, 3]).tolist() == [1, 4, 9]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False),
                min_size=7, max_size=7),
       st.integers(0, 6))
def test_power_is_multiplicative(vals, n):
    c = CoefficientSequence(IndexSet("integers", 3), vals)
    e = eig_map(Torus((1, 0.5)))
    two_step = apply_power(apply_power(c, e, n), e, 1)
    one_step = apply_power(c, e, n + 1)
    assert np.allclose(two_step.values, one_step.values, rtol=1e-12, atol=0)


@settings(max_examples=40, deadline=None)
@given(st.floats(-50, 50), st.floats(-50, 50))
def test_resolvent_solves_diagonal_equation(re, im):
    z = complex(re, im)
    idx = IndexSet("integers", 4)
    c = CoefficientSequence(idx, np.arange(1, 10) * (1 + 0.5j))
    e = eig_map(Torus())
    if np.min(np.abs(e.values(idx.indices) - z)) < 1e-6:
        return
    psi = resolvent_coeffs(c, e, z)
    back = (e.values(idx.indices) - z) * psi.values
    assert np.allclose(back, c.values, rtol=1e-12)
