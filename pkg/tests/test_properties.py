from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from qnormal.densities import DistributionSpec, density, poly_w, poly_W
from qnormal.moments import moment_fCN, moment_fN, moment_fQ
from qnormal.orthopoly import (
    c_coefficient,
    eval_int_poly,
    expand_xn_in_qhermite,
    hermite_expansion_poly,
    qhermite_H,
)
from qnormal.qseries import q_binomial, q_factorial, q_pochhammer, s_polynomial, s_polynomials

q_open = st.floats(min_value=-0.95, max_value=0.95, allow_nan=False)
unit = st.floats(min_value=-0.95, max_value=0.95, allow_nan=False)
small_n = st.integers(min_value=0, max_value=12)
rational_q = st.fractions(min_value=Fraction(-9, 10), max_value=Fraction(9, 10), max_denominator=50)


@given(small_n, st.integers(min_value=0, max_value=12), q_open)
def test_binomial_symmetry(n, k, q):
    if k <= n:
        assert np.isclose(q_binomial(n, k, q), q_binomial(n, n - k, q), rtol=1e-12, atol=1e-15)


@given(small_n, rational_q)
def test_pochhammer_factorial_exact(n, q):
    assert q_pochhammer(q, q, n).value == (1 - q) ** n * q_factorial(n, q)


@given(small_n, unit, unit, q_open)
def test_s_polynomial_symmetric_and_recursive(n, a, b, q):
    assert s_polynomial(n, a, b, q) == s_polynomial(n, b, a, q)
    assert np.isclose(s_polynomials(n, a, b, q)[n], s_polynomial(n, a, b, q), rtol=1e-9, atol=1e-12)


@given(st.integers(min_value=1, max_value=14), rational_q)
def test_c_coefficient_quotient_exact(n, q):
    for m in range(n // 2 + 1):
        assert eval_int_poly(hermite_expansion_poly(m, n), q) * (1 - q) ** m == c_coefficient(m, n, q)


@given(st.integers(min_value=0, max_value=14), q_open, st.floats(min_value=-1, max_value=1))
def test_reconstruction(n, q, u):
    x = u * 2 / np.sqrt(1 - q)
    expansion = expand_xn_in_qhermite(n, q, "H")
    # near x = 0 the terms cancel, so compare against their total magnitude
    scale = sum(abs(c * expansion.basis.evaluate(i, x)) for i, c in expansion.coefficients)
    assert abs(expansion.evaluate(x) - x ** n) <= 1e-10 * scale


@given(st.integers(min_value=0, max_value=10), unit, unit, q_open, st.floats(-1, 1))
def test_shift_identities(k, a, b, q, x):
    assert poly_w(k, x, a, b, q) == poly_w(0, x, a * q ** k, b * q ** k, q)
    assert poly_W(k, x, a, b, q) == poly_W(0, x, a, b * q ** k, q)


@settings(max_examples=40)
@given(q_open, unit, unit, st.floats(-1, 1))
def test_densities_nonnegative_and_mirror(q, a, b, u):
    fq = density(DistributionSpec.al_salam_chihara(a, b, q), u)
    assert fq >= 0
    assert np.isclose(fq, density(DistributionSpec.al_salam_chihara(-a, -b, q), -u), rtol=1e-12)
    half = 2 / np.sqrt(1 - q)
    y = a * half
    fc = density(DistributionSpec.conditional_q_normal(y, b, q), u * half)
    assert fc >= 0
    assert np.isclose(fc, density(DistributionSpec.conditional_q_normal(-y, b, q), -u * half),
                      rtol=1e-12)


@given(q_open, unit, st.floats(-1, 1))
def test_conditional_first_two_moments(q, rho, u):
    y = u * 2 / np.sqrt(1 - q)
    assert np.isclose(moment_fCN(1, y, rho, q), rho * y)
    assert np.isclose(moment_fCN(2, y, rho, q), rho ** 2 * qhermite_H(2, y, q) + 1)


@given(q_open, unit, unit)
def test_moment_reductions(q, a, b):
    assert np.isclose(moment_fQ(1, a, b, q), (a + b) / 2)
    assert np.isclose(moment_fN(4, q), 2 + q, rtol=1e-12, atol=1e-12)


@given(q_open, st.integers(min_value=1, max_value=6))
def test_even_moments_positive(q, j):
    assert moment_fN(2 * j, q) > 0
