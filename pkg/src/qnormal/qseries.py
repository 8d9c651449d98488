"""
q-arithmetic primitives.

Everything here is a pure function of its arguments.  The finite objects
(q-integers, q-factorials, Gaussian binomials, S_n(a, b|q)) only use ring
operations, so passing a :class:`fractions.Fraction` for ``q`` (and for
``a``, ``b``) gives exact rational results; floats give the usual floating
evaluation.

Conventions::

    [n]_q       = 1 + q + ... + q^(n-1)            [0]_q = 0
    [n]_q!      = [1]_q [2]_q ... [n]_q             [0]_q! = 1
    [n k]_q     = [n]_q! / ([k]_q! [n-k]_q!)        0 unless n >= k >= 0
    (a; q)_n    = (1 - a)(1 - a q)...(1 - a q^(n-1))
    S_n(a,b|q)  = sum_i [n i]_q a^i b^(n-i)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from numbers import Real
from typing import Iterable, Optional, Union

from .errors import ConvergenceError

__all__ = [
    "QParameter",
    "QPochhammerValue",
    "as_q",
    "q_integer",
    "q_factorial",
    "q_binomial",
    "q_binomial_row",
    "q_pochhammer",
    "q_pochhammer_product",
    "q_pochhammer_infinite",
    "log_q_pochhammer_infinite",
    "s_polynomial",
    "s_polynomials",
    "support_half_width",
]


@dataclass(frozen=True)
class QParameter:
    """Deformation parameter ``q`` in (-1, 1].

    ``q = 1`` is representable, but it only marks the classical limit:
    anything that needs an infinite q-product must dispatch to the
    Gaussian/Hermite closed form instead.
    """

    value: Real

    def __post_init__(self) -> None:
        if isinstance(self.value, bool) or not isinstance(self.value, Real):
            raise TypeError(f"q must be a real number, got {self.value!r}")
        if not -1 < self.value <= 1:
            raise ValueError(f"q must lie in (-1, 1], got {self.value!r}")

    @property
    def is_limit_case(self) -> bool:
        return self.value == 1

    def __float__(self) -> float:
        return float(self.value)


QLike = Union[QParameter, Real]


def as_q(q: QLike) -> QParameter:
    return q if isinstance(q, QParameter) else QParameter(q)


def _value(q: QLike):
    return as_q(q).value


def _strict_value(q: QLike, what: str):
    qv = _value(q)
    if qv == 1:
        raise ValueError(f"{what} is undefined at q = 1 (limit case); need |q| < 1")
    return qv


def _check_index(n: int, name: str = "n") -> None:
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise ValueError(f"{name} must be a nonnegative integer, got {n!r}")


def support_half_width(q: QLike) -> float:
    """Half-width 2/sqrt(1-q) of J(q); ``inf`` at q = 1."""
    qv = float(_value(q))
    if qv == 1.0:
        return math.inf
    return 2.0 / math.sqrt(1.0 - qv)


def q_integer(n: int, q: QLike):
    _check_index(n)
    qv = _value(q)
    total = qv * 0
    power = qv ** 0
    for _ in range(n):
        total += power
        power *= qv
    return total


def q_factorial(n: int, q: QLike):
    _check_index(n)
    qv = _value(q)
    result = qv ** 0
    bracket = qv * 0
    power = qv ** 0
    for _ in range(n):
        bracket += power
        power *= qv
        result *= bracket
    return result


@lru_cache(maxsize=512, typed=True)
def _binomial_row(n: int, qv) -> tuple:
    one = qv ** 0
    row = [one]
    for m in range(1, n + 1):
        # q-Pascal: [m k] = [m-1 k-1] + q^k [m-1 k]
        new = [one] * (m + 1)
        power = qv
        for k in range(1, m):
            new[k] = row[k - 1] + power * row[k]
            power *= qv
        row = new
    return tuple(row)


def q_binomial_row(n: int, q: QLike) -> tuple:
    """All Gaussian binomials [n k]_q for k = 0..n (cached per exact q)."""
    _check_index(n)
    return _binomial_row(n, _value(q))


def q_binomial(n: int, k: int, q: QLike):
    qv = _value(q)
    if not (isinstance(n, int) and isinstance(k, int)) or not n >= k >= 0:
        return qv * 0
    return _binomial_row(n, qv)[k]


@dataclass(frozen=True)
class QPochhammerValue:
    """Value of a (possibly infinite) q-Pochhammer product.

    For the infinite product ``n_terms`` is the number of factors actually
    multiplied and ``truncation_error_bound`` bounds the relative effect of
    the omitted tail.  Finite products carry ``None`` there.
    """

    value: Real
    n_terms: int
    infinite: bool = False
    truncation_error_bound: Optional[float] = None

    def __float__(self) -> float:
        return float(self.value)


def q_pochhammer(a, q: QLike, n: int) -> QPochhammerValue:
    """(a; q)_n as an exact finite product.

    q = 1 is accepted here, giving (1 - a)^n; only the infinite product
    rejects it.
    """
    _check_index(n)
    qv = _value(q)
    result = qv ** 0
    power = qv ** 0
    for _ in range(n):
        result *= 1 - a * power
        power *= qv
    return QPochhammerValue(result, n)


def q_pochhammer_product(params: Iterable, q: QLike, n: int) -> QPochhammerValue:
    """(a_1, ..., a_k; q)_n = prod_i (a_i; q)_n."""
    qv = _value(q)
    result = qv ** 0
    for a in params:
        result *= q_pochhammer(a, qv, n).value
    return QPochhammerValue(result, n)


def _tail_bound(abs_a: float, abs_q: float, k: int) -> float:
    # |log prod_{j>=k} (1 - a q^j)| <= sum_j -log(1 - |a||q|^j)
    #                               <= |a||q|^k / ((1 - |q|)(1 - |a||q|^k))
    lead = abs_a * abs_q ** k
    if lead >= 1.0:
        return math.inf
    return math.expm1(lead / ((1.0 - abs_q) * (1.0 - lead)))


def _infinite_cutoff(a: float, qv: float, tol: float) -> tuple[int, float]:
    abs_a, abs_q = abs(a), abs(qv)
    if abs_a == 0.0:
        return 0, 0.0
    if abs_q == 0.0:
        return 1, 0.0
    guess = math.log(tol * (1.0 - abs_q) / abs_a) / math.log(abs_q)
    k = max(math.ceil(guess), 1)
    bound = _tail_bound(abs_a, abs_q, k)
    while bound >= tol:
        k += 1
        bound = _tail_bound(abs_a, abs_q, k)
    return k, bound


def _infinite_q(q: QLike, tol: float) -> float:
    qv = _value(q)
    if abs(qv) >= 1:
        raise ConvergenceError(f"(a; q)_inf does not converge for |q| >= 1 (q = {qv!r})", q=qv)
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    return float(qv)


def q_pochhammer_infinite(a: float, q: QLike, tol: float = 1e-14) -> QPochhammerValue:
    """(a; q)_inf truncated where the geometric tail bound drops below ``tol``."""
    qv = _infinite_q(q, tol)
    a = float(a)
    k, bound = _infinite_cutoff(a, qv, tol)
    result = 1.0
    power = 1.0
    for _ in range(k):
        result *= 1.0 - a * power
        power *= qv
    return QPochhammerValue(result, k, infinite=True, truncation_error_bound=bound)


def log_q_pochhammer_infinite(a: float, q: QLike, tol: float = 1e-14) -> float:
    """log (a; q)_inf for products whose factors are all positive.

    Used by the densities, where (q; q)_inf underflows long before q
    reaches 1 (it is about exp(-pi^2 / (6 (1 - q)))).
    """
    qv = _infinite_q(q, tol)
    a = float(a)
    k, _ = _infinite_cutoff(a, qv, tol)
    terms = []
    power = 1.0
    for _ in range(k):
        if a * power >= 1.0:
            raise ValueError(f"(a; q)_inf has a nonpositive factor for a = {a!r}, q = {qv!r}")
        terms.append(math.log1p(-a * power))
        power *= qv
    return math.fsum(terms)


def s_polynomial(n: int, a, b, q: QLike):
    """S_n(a, b|q) = sum_i [n i]_q a^i b^(n-i).

    Terms i and n - i are added as a pair sharing the coefficient
    [n min(i, n-i)]_q, which makes the result bitwise symmetric in (a, b).
    """
    _check_index(n)
    qv = _value(q)
    row = _binomial_row(n, qv)
    total = qv * 0
    for i in range(n // 2 + 1):
        j = n - i
        if i == j:
            total += row[i] * (a ** i * b ** i)
        else:
            total += row[i] * (a ** i * b ** j + b ** i * a ** j)
    return total


def s_polynomials(n_max: int, a, b, q: QLike) -> list:
    """S_0..S_{n_max} via S_{k+1} = (a + b) S_k - (1 - q^k) a b S_{k-1}."""
    _check_index(n_max, "n_max")
    qv = _value(q)
    prev, cur = qv * 0, qv ** 0
    out = [cur]
    power = qv ** 0
    for _ in range(n_max):
        prev, cur = cur, (a + b) * cur - (1 - power) * a * b * prev
        power *= qv
        out.append(cur)
    return out
