"""
Recurrence-defined polynomial families and the x^n expansion coefficients.

All evaluators run the three-term recurrence forward from p_{-1} = 0,
p_0 = 1 and accept scalars or numpy arrays for ``x``:

    h_{n+1} = 2x h_n - (1 - q^n) h_{n-1}                        continuous q-Hermite
    H_{n+1} = x H_n - [n]_q H_{n-1}                             rescaled q-Hermite
    Q_{n+1} = (2x - (a+b) q^n) Q_n - (1-q^n)(1-ab q^(n-1)) Q_{n-1}
    P_{n+1} = (x - rho y q^n) P_n - (1 - rho^2 q^(n-1)) [n]_q P_{n-1}
    U_{n+1} = 2x U_n - U_{n-1}                                  Chebyshev, 2nd kind
    He_{n+1} = x He_n - n He_{n-1}                              probabilists' Hermite

The coefficients c_{m,n}(q) expand monomials in the q-Hermite bases::

    x^n = sum_m (1-q)^(-m) c_{m,n}(q) H_{n-2m}(x|q)
        = 2^(-n) sum_m c_{m,n}(q) h_{n-2m}(x|q)

c_{m,n}(q) carries a factor (1-q)^m, so dividing it out numerically loses
everything as q -> 1.  :func:`hermite_expansion_coefficient` instead divides
the integer polynomial in q exactly and evaluates the quotient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

from .qseries import QLike, _check_index, _strict_value, _value, q_binomial, support_half_width

__all__ = [
    "PolynomialFamily",
    "ExpansionCoefficients",
    "CoefficientTable",
    "chebyshev_u",
    "hermite_prob",
    "qhermite_h",
    "qhermite_H",
    "asc_Q",
    "asc_P",
    "c_coefficient",
    "c_coefficient_poly",
    "hermite_expansion_poly",
    "hermite_expansion_coefficient",
    "classical_hermite_coefficient",
    "coefficient_table",
    "expand_xn_in_U",
    "expand_U_in_qhermite",
    "expand_xn_in_qhermite",
    "eval_int_poly",
]


def _check_unit(value: float, name: str) -> None:
    if not abs(value) < 1:
        raise ValueError(f"{name} must satisfy |{name}| < 1, got {value!r}")


def chebyshev_u(n: int, x):
    _check_index(n)
    prev, cur = 0 * x, 1 + 0 * x
    for _ in range(n):
        prev, cur = cur, 2 * x * cur - prev
    return cur


def hermite_prob(n: int, x):
    _check_index(n)
    prev, cur = 0 * x, 1 + 0 * x
    for k in range(n):
        prev, cur = cur, x * cur - k * prev
    return cur


def qhermite_h(n: int, x, q: QLike):
    _check_index(n)
    qv = _strict_value(q, "h_n(x|q)")
    prev, cur = 0 * x, 1 + 0 * x
    power = qv ** 0
    for _ in range(n):
        prev, cur = cur, 2 * x * cur - (1 - power) * prev
        power *= qv
    return cur


def qhermite_H(n: int, x, q: QLike):
    _check_index(n)
    qv = _value(q)
    prev, cur = 0 * x, 1 + 0 * x
    bracket, power = qv * 0, qv ** 0
    for _ in range(n):
        prev, cur = cur, x * cur - bracket * prev
        bracket += power
        power *= qv
    return cur


def asc_Q(n: int, x, a: float, b: float, q: QLike):
    _check_index(n)
    qv = _strict_value(q, "Q_n(x|a,b,q)")
    _check_unit(a, "a")
    _check_unit(b, "b")
    prev, cur = 0 * x, 1 + 0 * x
    for k in range(n):
        qk = qv ** k
        damp = (1 - qk) * (1 - a * b * qv ** (k - 1)) if k else 0
        prev, cur = cur, (2 * x - (a + b) * qk) * cur - damp * prev
    return cur


def asc_P(n: int, x, y: float, rho: float, q: QLike):
    _check_index(n)
    qv = _value(q)
    _check_unit(rho, "rho")
    half = support_half_width(qv)
    if not abs(y) <= half:
        raise ValueError(f"y must lie in J(q) = [-{half:g}, {half:g}], got {y!r}")
    prev, cur = 0 * x, 1 + 0 * x
    bracket, power = qv * 0, qv ** 0
    for k in range(n):
        damp = (1 - rho * rho * qv ** (k - 1)) * bracket if k else 0
        prev, cur = cur, (x - rho * y * power) * cur - damp * prev
        bracket += power
        power *= qv
    return cur


@dataclass(frozen=True)
class PolynomialFamily:
    """A tagged polynomial family, evaluated at ``scale * x``.

    Tags: ``"h"``, ``"H"``, ``"Q"`` (uses a, b), ``"P"`` (uses y, rho),
    ``"U"`` and ``"He"``.
    """

    tag: str
    q: Optional[float] = None
    a: float = 0.0
    b: float = 0.0
    y: float = 0.0
    rho: float = 0.0
    scale: float = 1.0

    _TAGS = ("h", "H", "Q", "P", "U", "He")

    def __post_init__(self) -> None:
        if self.tag not in self._TAGS:
            raise ValueError(f"unknown polynomial family {self.tag!r}; expected one of {self._TAGS}")
        if self.tag in ("h", "H", "Q", "P") and self.q is None:
            raise ValueError(f"family {self.tag!r} needs q")
        if self.tag == "Q":
            _check_unit(self.a, "a")
            _check_unit(self.b, "b")
        if self.tag == "P":
            _check_unit(self.rho, "rho")

    def evaluate(self, n: int, x):
        if self.scale != 1:
            # skipped at scale 1 so exact rational x stays exact
            x = self.scale * x
        if self.tag == "h":
            return qhermite_h(n, x, self.q)
        if self.tag == "H":
            return qhermite_H(n, x, self.q)
        if self.tag == "Q":
            return asc_Q(n, x, self.a, self.b, self.q)
        if self.tag == "P":
            return asc_P(n, x, self.y, self.rho, self.q)
        if self.tag == "U":
            return chebyshev_u(n, x)
        return hermite_prob(n, x)


@dataclass(frozen=True)
class ExpansionCoefficients:
    """sum_i coeff_i * basis_{index_i}(x) for indices n, n-2, n-4, ..."""

    n: int
    basis: PolynomialFamily
    coefficients: tuple

    def evaluate(self, x):
        total = 0 * x
        for index, coeff in self.coefficients:
            total = total + coeff * self.basis.evaluate(index, x)
        return total

    def as_dict(self) -> dict:
        return dict(self.coefficients)


def _ballot(n: int, k: int) -> int:
    # binom(n, k) - binom(n, k-1), with binom(n, -1) = 0
    return math.comb(n, k) - (math.comb(n, k - 1) if k >= 1 else 0)


def _check_mn(m: int, n: int) -> None:
    _check_index(n)
    if isinstance(m, bool) or not isinstance(m, int) or not 0 <= m <= n // 2:
        raise ValueError(f"m must satisfy 0 <= m <= floor(n/2) = {n // 2}, got m = {m!r}")


def c_coefficient(m: int, n: int, q: QLike):
    """c_{m,n}(q) by its defining alternating sum (exact for rational q)."""
    _check_mn(m, n)
    qv = _value(q)
    total = qv * 0
    for j in range(m + 1):
        sign = -1 if j % 2 else 1
        total += sign * qv ** (j * (j + 1) // 2) * _ballot(n, m - j) * q_binomial(n - 2 * m + j, j, qv)
    return total


# Integer polynomials in q, lowest degree first.

def _poly_add(p: Sequence[int], r: Sequence[int]) -> list[int]:
    out = [0] * max(len(p), len(r))
    for i, c in enumerate(p):
        out[i] += c
    for i, c in enumerate(r):
        out[i] += c
    return out


@lru_cache(maxsize=None)
def _gauss_poly(n: int, k: int) -> tuple[int, ...]:
    if k < 0 or k > n:
        return (0,)
    if k == 0 or k == n:
        return (1,)
    shifted = [0] * k + list(_gauss_poly(n - 1, k))
    return tuple(_poly_add(_gauss_poly(n - 1, k - 1), shifted))


def _trim(p: list[int]) -> tuple[int, ...]:
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return tuple(p)


@lru_cache(maxsize=None)
def c_coefficient_poly(m: int, n: int) -> tuple[int, ...]:
    """Integer coefficients (in powers of q) of c_{m,n}(q)."""
    _check_mn(m, n)
    out: list[int] = [0]
    for j in range(m + 1):
        sign = -1 if j % 2 else 1
        weight = sign * _ballot(n, m - j)
        shift = j * (j + 1) // 2
        term = [0] * shift + [weight * c for c in _gauss_poly(n - 2 * m + j, j)]
        out = _poly_add(out, term)
    return _trim(out)


def _divide_one_minus_q(p: Sequence[int]) -> list[int]:
    # p(q) = (1 - q) s(q)  =>  s_0 = p_0,  s_i = p_i + s_{i-1}
    s, acc = [], 0
    for c in p[:-1]:
        acc += c
        s.append(acc)
    if acc + p[-1] != 0:
        raise ArithmeticError("polynomial is not divisible by (1 - q)")
    return s or [0]


@lru_cache(maxsize=None)
def hermite_expansion_poly(m: int, n: int) -> tuple[int, ...]:
    """Integer coefficients of c_{m,n}(q) / (1 - q)^m."""
    p = list(c_coefficient_poly(m, n))
    for _ in range(m):
        p = _divide_one_minus_q(p)
    return _trim(p)


def eval_int_poly(coeffs: Sequence[int], q):
    acc = q * 0
    for c in reversed(coeffs):
        acc = acc * q + c
    return acc


def classical_hermite_coefficient(m: int, n: int) -> int:
    """n! / (2^m m! (n-2m)!): coefficient of He_{n-2m} in x^n."""
    _check_mn(m, n)
    return math.factorial(n) // (2 ** m * math.factorial(m) * math.factorial(n - 2 * m))


def hermite_expansion_coefficient(m: int, n: int, q: QLike):
    """(1-q)^(-m) c_{m,n}(q), stable up to and including q = 1."""
    _check_mn(m, n)
    qv = _value(q)
    if qv == 1:
        return classical_hermite_coefficient(m, n)
    return eval_int_poly(hermite_expansion_poly(m, n), qv)


@dataclass(frozen=True)
class CoefficientTable:
    """c_{m,n}(q) and (1-q)^(-m) c_{m,n}(q) for m = 0..floor(n/2)."""

    n: int
    q: float
    c: tuple = field(repr=False)
    hermite: tuple = field(repr=False)


@lru_cache(maxsize=1024, typed=True)
def _table(n: int, qv) -> CoefficientTable:
    c, hermite = [], []
    for m in range(n // 2 + 1):
        poly = hermite_expansion_poly(m, n)
        if qv == 1:
            c.append(0 if m else 1)
            hermite.append(classical_hermite_coefficient(m, n))
        else:
            scaled = eval_int_poly(poly, qv)
            hermite.append(scaled)
            c.append((1 - qv) ** m * scaled)
    return CoefficientTable(n, qv, tuple(c), tuple(hermite))


def coefficient_table(n: int, q: QLike) -> CoefficientTable:
    """Cached per (n, exact q).  ``c`` here is (1-q)^m times the stable quotient."""
    _check_index(n)
    return _table(n, _value(q))


def expand_xn_in_U(n: int, variant: str = "half") -> ExpansionCoefficients:
    """Chebyshev expansion of a monomial.

    ``"half"``:   x^n     = sum_k (binom(n,k) - binom(n,k-1)) U_{n-2k}(x/2)
    ``"scaled"``: 2^n x^n = sum_k (same)                      U_{n-2k}(x)
    """
    _check_index(n)
    if variant not in ("half", "scaled"):
        raise ValueError(f"variant must be 'half' or 'scaled', got {variant!r}")
    basis = PolynomialFamily("U", scale=0.5 if variant == "half" else 1.0)
    coeffs = tuple((n - 2 * k, _ballot(n, k)) for k in range(n // 2 + 1))
    return ExpansionCoefficients(n, basis, coeffs)


def expand_U_in_qhermite(n: int, q: QLike, variant: str = "h") -> ExpansionCoefficients:
    """Expansion of a Chebyshev polynomial in a q-Hermite basis.

    ``"h"``: U_n(x) = sum_j (-1)^j q^(j(j+1)/2) [n-j j]_q h_{n-2j}(x|q)
    ``"H"``: U_n(x sqrt(1-q)/2) = sum_j (same) (1-q)^(n/2-j) H_{n-2j}(x|q)
    """
    _check_index(n)
    qv = _strict_value(q, "the U -> q-Hermite expansion")
    if variant not in ("h", "H"):
        raise ValueError(f"variant must be 'h' or 'H', got {variant!r}")
    coeffs = []
    for j in range(n // 2 + 1):
        sign = -1 if j % 2 else 1
        value = sign * qv ** (j * (j + 1) // 2) * q_binomial(n - j, j, qv)
        if variant == "H":
            value *= (1 - qv) ** ((n - 2 * j) / 2)
        coeffs.append((n - 2 * j, value))
    return ExpansionCoefficients(n, PolynomialFamily(variant, q=qv), tuple(coeffs))


def expand_xn_in_qhermite(n: int, q: QLike, variant: str = "H") -> ExpansionCoefficients:
    """x^n in the H basis (coefficients (1-q)^(-m) c_{m,n}) or the h basis (2^(-n) c_{m,n})."""
    _check_index(n)
    if variant not in ("h", "H"):
        raise ValueError(f"variant must be 'h' or 'H', got {variant!r}")
    qv = _value(q) if variant == "H" else _strict_value(q, "the h-basis expansion")
    table = coefficient_table(n, qv)
    if variant == "H":
        coeffs = tuple((n - 2 * m, table.hermite[m]) for m in range(n // 2 + 1))
        basis = PolynomialFamily("He") if qv == 1 else PolynomialFamily("H", q=qv)
    else:
        coeffs = tuple((n - 2 * m, table.c[m] / 2 ** n) for m in range(n // 2 + 1))
        basis = PolynomialFamily("h", q=qv)
    return ExpansionCoefficients(n, basis, coeffs)
