import math
from fractions import Fraction

import numpy as np
import pytest

from qnormal.orthopoly import (
    PolynomialFamily,
    asc_P,
    asc_Q,
    c_coefficient,
    c_coefficient_poly,
    chebyshev_u,
    classical_hermite_coefficient,
    coefficient_table,
    eval_int_poly,
    expand_U_in_qhermite,
    expand_xn_in_qhermite,
    expand_xn_in_U,
    hermite_expansion_coefficient,
    hermite_expansion_poly,
    hermite_prob,
    qhermite_h,
    qhermite_H,
)
from qnormal.qseries import q_binomial

RNG = np.random.default_rng(11)


class TestRecurrences:
    def test_chebyshev(self):
        assert chebyshev_u(0, 0.3) == 1
        assert chebyshev_u(2, 1.0) == 3
        theta = math.pi / 3
        # sin(4 theta) / sin(theta) = -1 and sin(3 theta) = 0 at theta = pi/3
        assert chebyshev_u(3, math.cos(theta)) == pytest.approx(-1.0, abs=1e-12)
        assert chebyshev_u(2, math.cos(theta)) == pytest.approx(0.0, abs=1e-12)
        x = RNG.uniform(-1, 1, 20)
        th = np.arccos(x)
        assert np.allclose(chebyshev_u(7, x), np.sin(8 * th) / np.sin(th), atol=1e-12)

    def test_qhermite_h(self):
        assert qhermite_h(1, 0.4, 0.3) == pytest.approx(0.8)
        assert qhermite_h(2, 0.3, 0.5) == pytest.approx(-0.14)
        x = RNG.uniform(-1, 1, 20)
        for n in range(13):
            assert np.allclose(qhermite_h(n, x, 0), chebyshev_u(n, x), atol=1e-12)
        with pytest.raises(ValueError):
            qhermite_h(2, 0.1, 1)

    def test_qhermite_H(self):
        x = RNG.uniform(-2, 2, 20)
        for q in (-0.5, 0.3, 0.9):
            assert np.allclose(qhermite_H(2, x, q), x * x - 1, atol=1e-14)
        for n in range(13):
            assert np.allclose(qhermite_H(n, x, 0), chebyshev_u(n, x / 2), atol=1e-12)
            assert np.allclose(qhermite_H(n, x, 1), hermite_prob(n, x), atol=1e-12 * max(1, math.factorial(n)))
        assert qhermite_H(3, 1.0, 1) == -2

    def test_qhermite_rescaling(self):
        # h_n(x sqrt(1-q)/2 | q) = (1-q)^(n/2) H_n(x|q)
        q = 0.6
        x = RNG.uniform(-3, 3, 10)
        for n in range(10):
            lhs = qhermite_h(n, x * math.sqrt(1 - q) / 2, q)
            assert np.allclose(lhs, (1 - q) ** (n / 2) * qhermite_H(n, x, q), atol=1e-12)

    def test_asc_Q(self):
        x = RNG.uniform(-1, 1, 20)
        a, b = 0.5, -0.3
        assert np.allclose(asc_Q(1, x, a, b, 0.4), 2 * x - (a + b))
        for n in range(2, 10):
            u = chebyshev_u(n, x) - (a + b) * chebyshev_u(n - 1, x) + a * b * chebyshev_u(n - 2, x)
            assert np.allclose(asc_Q(n, x, a, b, 0), u, atol=1e-12)
        # two hand steps at (x, a, b, q) = (0.1, 0.2, 0.3, 0.5)
        q1 = 0.2 - 0.5
        expected = (0.2 - 0.5 * 0.5) * q1 - (1 - 0.5) * (1 - 0.06)
        assert asc_Q(2, 0.1, 0.2, 0.3, 0.5) == pytest.approx(expected)
        with pytest.raises(ValueError):
            asc_Q(2, 0.1, 1.0, 0.3, 0.5)

    def test_asc_P(self):
        assert asc_P(1, 0.7, 0.5, 0.4, 0.3) == pytest.approx(0.7 - 0.2)
        p1 = 1 - 0.2
        expected = (1 - 0.2 * 0.3) * p1 - (1 - 0.16) * 1
        assert asc_P(2, 1.0, 0.5, 0.4, 0.3) == pytest.approx(expected)
        x = RNG.uniform(-3, 3, 20)
        y, rho = 0.8, -0.6
        s = math.sqrt(1 - rho ** 2)
        for n in range(10):
            expected = s ** n * hermite_prob(n, (x - rho * y) / s)
            assert np.allclose(asc_P(n, x, y, rho, 1), expected, atol=1e-10)
        with pytest.raises(ValueError):
            asc_P(2, 0.1, 5.0, 0.3, 0.0)

    def test_leading_coefficients(self):
        big = 1e8
        for n in range(1, 8):
            assert qhermite_H(n, big, 0.4) / big ** n == pytest.approx(1, rel=1e-6)
            assert asc_P(n, big, 0.3, 0.5, 0.4) / big ** n == pytest.approx(1, rel=1e-6)
            assert qhermite_h(n, big, 0.4) / big ** n == pytest.approx(2 ** n, rel=1e-6)
            assert asc_Q(n, big, 0.3, 0.2, 0.4) / big ** n == pytest.approx(2 ** n, rel=1e-6)

    def test_exact_rational_evaluation(self):
        q, x = Fraction(1, 3), Fraction(2, 7)
        assert qhermite_H(2, x, q) == x * x - 1
        assert isinstance(qhermite_H(6, x, q), Fraction)

    def test_family_dispatch(self):
        fam = PolynomialFamily("H", q=0.5, scale=2.0)
        assert fam.evaluate(3, 0.25) == pytest.approx(qhermite_H(3, 0.5, 0.5))
        with pytest.raises(ValueError):
            PolynomialFamily("Z")
        with pytest.raises(ValueError):
            PolynomialFamily("h")


class TestCoefficients:
    def test_c_coefficient_examples(self):
        for q in (-0.5, 0.0, 0.3):
            for n in range(1, 10):
                assert c_coefficient(0, n, q) == pytest.approx(1)
            assert c_coefficient(1, 2, q) == pytest.approx(1 - q)
        for n in range(1, 12):
            for m in range(n // 2 + 1):
                ballot = math.comb(n, m) - (math.comb(n, m - 1) if m else 0)
                assert c_coefficient(m, n, 0) == ballot
        with pytest.raises(ValueError):
            c_coefficient(3, 4, 0.5)

    def test_polynomial_route_matches_sum_exactly(self):
        for q in (Fraction(1, 3), Fraction(-2, 5), Fraction(9, 10)):
            for n in range(1, 15):
                for m in range(n // 2 + 1):
                    direct = c_coefficient(m, n, q)
                    assert eval_int_poly(c_coefficient_poly(m, n), q) == direct
                    quotient = eval_int_poly(hermite_expansion_poly(m, n), q)
                    assert quotient * (1 - q) ** m == direct

    def test_touchard_riordan_quotients(self):
        assert hermite_expansion_poly(2, 4) == (2, 1)
        assert hermite_expansion_poly(3, 6) == (5, 6, 3, 1)
        for j in range(1, 9):
            poly = hermite_expansion_poly(j, 2 * j)
            assert all(c > 0 for c in poly)
            assert sum(poly) == math.prod(range(2 * j - 1, 0, -2))

    def test_q_one_is_classical(self):
        for n in range(1, 16):
            for m in range(n // 2 + 1):
                assert hermite_expansion_coefficient(m, n, 1) == classical_hermite_coefficient(m, n)
                assert eval_int_poly(hermite_expansion_poly(m, n), 1) == classical_hermite_coefficient(m, n)

    def test_classical_coefficient_via_hermite(self):
        # x^4 = He_4 + 6 He_2 + 3
        assert [classical_hermite_coefficient(m, 4) for m in range(3)] == [1, 6, 3]

    def test_ballot_remark(self):
        for n in range(31):
            for k in range(n // 2 + 1):
                lhs = (n - 2 * k + 1) * math.comb(n + 1, k)
                rhs = (n + 1) * (math.comb(n, k) - (math.comb(n, k - 1) if k else 0))
                assert lhs == rhs

    def test_table_cached_and_consistent(self):
        t1 = coefficient_table(8, 0.4)
        assert t1 is coefficient_table(8, 0.4)
        for m in range(5):
            assert t1.c[m] == pytest.approx(c_coefficient(m, 8, 0.4), rel=1e-12)


class TestExpansions:
    def test_x_in_U(self):
        assert expand_xn_in_U(0).as_dict() == {0: 1}
        e = expand_xn_in_U(2, "scaled")
        assert e.as_dict() == {2: 1, 0: 1}
        assert e.evaluate(0.7) == pytest.approx(4 * 0.49)
        x = RNG.uniform(-2, 2, 10)
        for n in range(15):
            assert np.allclose(expand_xn_in_U(n, "half").evaluate(x), x ** n, rtol=1e-12, atol=1e-12)

    def test_U_in_qhermite(self):
        x = RNG.uniform(-1, 1, 10)
        q = 0.35
        assert expand_U_in_qhermite(0, q).as_dict() == {0: 1}
        e = expand_U_in_qhermite(2, q, "h")
        assert np.allclose(e.evaluate(x), chebyshev_u(2, x), atol=1e-12)
        assert e.as_dict()[0] == pytest.approx(-q)
        assert expand_U_in_qhermite(5, 0.0, "h").as_dict() == {5: 1, 3: 0, 1: 0}
        z = RNG.uniform(-3, 3, 10)
        for n in range(12):
            eh = expand_U_in_qhermite(n, q, "h")
            eH = expand_U_in_qhermite(n, q, "H")
            assert np.allclose(eh.evaluate(x), chebyshev_u(n, x), atol=1e-11)
            assert np.allclose(eH.evaluate(z), chebyshev_u(n, z * math.sqrt(1 - q) / 2), atol=1e-11)

    def test_x2(self):
        x = RNG.uniform(-2, 2, 10)
        for q in (-0.5, 0.3, 0.9):
            assert expand_xn_in_qhermite(2, q, "H").as_dict() == pytest.approx({2: 1, 0: 1})
            assert np.allclose(expand_xn_in_qhermite(2, q, "h").evaluate(x / 2), x * x / 4)

    @pytest.mark.parametrize("q", [-0.5, 0.3, 0.9])
    def test_reconstruction_n5(self, q):
        half = 2 / math.sqrt(1 - q)
        x = RNG.uniform(-half, half, 10)
        u = RNG.uniform(-1, 1, 10)
        assert np.allclose(expand_xn_in_qhermite(5, q, "H").evaluate(x), x ** 5, rtol=1e-11, atol=1e-11)
        assert np.allclose(expand_xn_in_qhermite(5, q, "h").evaluate(u), u ** 5, rtol=1e-11, atol=1e-11)

    def test_composition_reproduces_c(self):
        # push 2^n x^n = sum_k ballot U_{n-2k} through U -> h and collect
        q = 0.45
        for n in range(1, 13):
            collected = {}
            for index, coeff in expand_xn_in_U(n, "scaled").coefficients:
                for sub, c2 in expand_U_in_qhermite(index, q, "h").coefficients:
                    collected[sub] = collected.get(sub, 0.0) + coeff * c2
            for m in range(n // 2 + 1):
                assert collected[n - 2 * m] == pytest.approx(c_coefficient(m, n, q), rel=1e-12, abs=1e-12)

    def test_q_one_uses_classical_basis(self):
        e = expand_xn_in_qhermite(6, 1, "H")
        assert e.basis.tag == "He"
        x = RNG.uniform(-3, 3, 10)
        assert np.allclose(e.evaluate(x), x ** 6, rtol=1e-12)

    def test_q_binomial_used_matches_definition(self):
        assert q_binomial(3, 1, 0.5) == pytest.approx(1.75)
