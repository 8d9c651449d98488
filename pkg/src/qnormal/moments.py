"""
Closed-form moments and Bessel-series moment generating functions.

Moments come from expanding x^n in the orthogonal basis of each density:
only the constant term survives for fh and fN, while fQ and fCN pick up
S_k(a,b|q) and rho^k H_k(y|q) from the transfer identities.

All four MGFs share one double series in modified Bessel functions::

    prefactor * sum_k A_k sum_j (-1)^j [k+j j]_q (k+2j+1) q^(j(j+1)/2) I_{2j+k+1}(z)

    fN / fCN:  z = 2t/sqrt(1-q),  prefactor = sqrt(1-q)/t,  A_k = (1-q)^(k/2) rho^k H_k(y|q)
    fh / fQ :  z = t,             prefactor = 2/t,          A_k = S_k(a,b|q)

(fN and fh are the rho = 0 and a = b = 0 cases, where only k = 0 survives.)
The inner sum alternates over Bessel values as large as e^|z| while the
result is O(1); at q = 0.999, t = 1 the cancellation spans ~26 decimal
digits.  The series is therefore summed in :mod:`decimal` arithmetic with
the working precision widened until the observed cancellation leaves at
least ``GUARD_DIGITS`` correct digits beyond double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal, getcontext, localcontext
from typing import Optional, Sequence

import numpy as np

from .densities import DistributionSpec, Family
from .errors import ConvergenceError
from .orthopoly import classical_hermite_coefficient, coefficient_table, hermite_prob, qhermite_H
from .qseries import QLike, _check_index, _strict_value, _value, s_polynomial

__all__ = [
    "BesselSeriesConfig",
    "SeriesResult",
    "MomentTable",
    "LimitReport",
    "bessel_i",
    "double_factorial",
    "moment_fN",
    "moment_fh",
    "moment_fQ",
    "moment_fCN",
    "moment",
    "moment_table",
    "hankel_min_eigenvalue",
    "mgf_fN",
    "mgf_fh",
    "mgf_fQ",
    "mgf_fCN",
    "mgf",
    "mgf_series",
    "moment_sum_mgf",
    "gaussian_limit_check",
    "conditional_limit_check",
    "coefficient_limit_check",
]

BESSEL_ARG_CAP = 60.0
BESSEL_ORDER_CAP = 300
GUARD_DIGITS = 8
_TINY_T = 1e-8


@dataclass(frozen=True)
class BesselSeriesConfig:
    term_tol: float = 1e-15
    max_outer: int = 120
    max_inner: int = 80

    def __post_init__(self) -> None:
        if not (self.term_tol > 0 and self.max_outer > 0 and self.max_inner > 0):
            raise ValueError(f"BesselSeriesConfig fields must be positive: {self}")


def _bessel_sum(order: int, t, rel_tol):
    """Ascending series for I_order(t); generic over float and Decimal."""
    half = t / 2
    term = half ** 0
    for k in range(1, order + 1):
        term = term * half / k
    total = term
    sq = half * half
    m = 0
    while term != 0:
        m += 1
        term = term * sq / (m * (m + order))
        total += term
        if abs(term) <= rel_tol * abs(total):
            break
    return total


def bessel_i(order: int, t: float, tol: float = 1e-15) -> float:
    """Modified Bessel function of the first kind, integer order, by power series.

    Arguments are limited to |t| <= 60 and order <= 300.
    """
    _check_index(order, "order")
    if abs(t) > BESSEL_ARG_CAP or order > BESSEL_ORDER_CAP:
        raise OverflowError(
            f"bessel_i supports |t| <= {BESSEL_ARG_CAP:g} and order <= {BESSEL_ORDER_CAP}; "
            f"got order={order}, t={t!r}"
        )
    return float(_bessel_sum(order, float(t), tol))


def double_factorial(n: int) -> float:
    """n!! in floating point; (-1)!! = 1."""
    if n < -1:
        raise ValueError(f"double factorial needs n >= -1, got {n}")
    if n >= 300:
        raise OverflowError(f"{n}!! overflows double precision")
    return float(math.prod(range(n, 0, -2)))


# -- moments ---------------------------------------------------------------

def _check_order(n: int) -> None:
    _check_index(n, "n")
    if n >= 150:
        raise OverflowError(f"moment order {n} is beyond the supported range (n < 150)")


def moment_fN(n: int, q: QLike) -> float:
    """E X^n for the q-Normal; (n-1)!! for even n at q = 1."""
    _check_order(n)
    qv = _value(q)
    if n % 2:
        return 0.0
    if qv == 1:
        return double_factorial(n - 1)
    return float(coefficient_table(n, qv).hermite[n // 2])


def moment_fh(n: int, q: QLike) -> float:
    _check_order(n)
    qv = _strict_value(q, "fh")
    if n % 2:
        return 0.0
    return float(coefficient_table(n, qv).c[n // 2]) / 4 ** (n // 2)


def moment_fQ(n: int, a: float, b: float, q: QLike) -> float:
    _check_order(n)
    qv = _strict_value(q, "fQ")
    table = coefficient_table(n, qv)
    total = math.fsum(float(table.c[j]) * float(s_polynomial(n - 2 * j, a, b, qv))
                      for j in range(n // 2 + 1))
    return total / 2 ** n


def moment_fCN(n: int, y: float, rho: float, q: QLike) -> float:
    _check_order(n)
    qv = _value(q)
    terms = []
    for m in range(n // 2 + 1):
        k = n - 2 * m
        if qv == 1:
            terms.append(classical_hermite_coefficient(m, n) * rho ** k * hermite_prob(k, y))
        else:
            terms.append(float(coefficient_table(n, qv).hermite[m]) * rho ** k * qhermite_H(k, y, qv))
    return math.fsum(terms)


def moment(spec: DistributionSpec, n: int) -> float:
    if spec.family is Family.FH:
        return moment_fh(n, spec.q)
    if spec.family is Family.FN:
        return moment_fN(n, spec.q)
    if spec.family is Family.FQ:
        return moment_fQ(n, spec.a, spec.b, spec.q)
    return moment_fCN(n, spec.y, spec.rho, spec.q)


@dataclass(frozen=True)
class MomentTable:
    spec: DistributionSpec
    max_order: int
    values: tuple = field(repr=False)

    def hankel(self) -> np.ndarray:
        size = self.max_order // 2 + 1
        mu = np.asarray(self.values)
        return np.array([[mu[i + j] for j in range(size)] for i in range(size)])


def moment_table(spec: DistributionSpec, max_order: int) -> MomentTable:
    return MomentTable(spec, max_order, tuple(moment(spec, n) for n in range(max_order + 1)))


def hankel_min_eigenvalue(table: MomentTable) -> float:
    return float(np.linalg.eigvalsh(table.hankel()).min())


# -- Bessel series MGFs ------------------------------------------------------

@dataclass(frozen=True)
class SeriesResult:
    value: float
    outer_terms: int
    inner_terms: int
    digits: int


class _Stopper:
    """Stops once ``need`` consecutive terms are below tol relative to the partial sum."""

    def __init__(self, tol, need: int) -> None:
        self.tol, self.need, self.quiet = tol, need, 0
        self.last = None

    def done(self, term, partial) -> bool:
        # exact zeros (odd H_k(0|q), S_k(a,-a|q)) count as small but are not
        # used as the reference for "shrinking"
        small = abs(term) <= self.tol * abs(partial)
        shrinking = term == 0 or self.last is None or abs(term) <= abs(self.last)
        if term != 0:
            self.last = term
        self.quiet = self.quiet + 1 if small and shrinking else 0
        return self.quiet >= self.need


def _double_series(z, prefactor, outer: Sequence, q, cfg: BesselSeriesConfig):
    """Evaluate the shared double series at the current decimal precision.

    ``outer`` yields the Decimal coefficients A_0, A_1, ...  Returns the
    value, the largest intermediate magnitude seen, and the term counts.
    """
    eps = Decimal(10) ** (-getcontext().prec)
    term_tol = Decimal(cfg.term_tol)
    bessel: dict[int, Decimal] = {}

    def I(order: int) -> Decimal:
        if order not in bessel:
            if order > BESSEL_ORDER_CAP:
                raise ConvergenceError(f"Bessel order {order} exceeds {BESSEL_ORDER_CAP}", order=order)
            bessel[order] = _bessel_sum(order, z, eps)
        return bessel[order]

    brackets = [Decimal(0)]  # [n]_q, filled on demand
    qpow = Decimal(1)

    def bracket(n: int) -> Decimal:
        nonlocal qpow
        while len(brackets) <= n:
            brackets.append(brackets[-1] + qpow)
            qpow *= q
        return brackets[n]

    total = Decimal(0)
    largest = Decimal(0)
    outer_stop = _Stopper(term_tol, 3)
    max_j = 0
    for k, A in enumerate(outer):
        if k >= cfg.max_outer:
            raise ConvergenceError(
                f"MGF series: outer sum not converged after max_outer={cfg.max_outer} terms",
                k=k, j=max_j,
            )
        if A == 0:
            term = Decimal(0)
        else:
            inner = Decimal(0)
            gauss = Decimal(1)       # [k+j j]_q
            qtri = Decimal(1)        # q^(j(j+1)/2)
            inner_stop = _Stopper(term_tol, 2)
            for j in range(cfg.max_inner + 1):
                if j == cfg.max_inner:
                    raise ConvergenceError(
                        f"MGF series: inner sum not converged after max_inner={cfg.max_inner} terms",
                        k=k, j=j,
                    )
                if j:
                    gauss = gauss * bracket(k + j) / bracket(j)
                    qtri *= q ** j
                t_kj = gauss * (k + 2 * j + 1) * qtri * I(2 * j + k + 1)
                if j % 2:
                    t_kj = -t_kj
                inner += t_kj
                largest = max(largest, abs(A * t_kj))
                if qtri == 0 or inner_stop.done(t_kj, inner):
                    break
            max_j = max(max_j, j + 1)
            term = A * inner
        total += term
        largest = max(largest, abs(total))
        if outer_stop.done(term, total):
            return prefactor * total, abs(prefactor) * largest, k + 1, max_j
    raise ConvergenceError("MGF series: outer coefficients exhausted", k=k, j=max_j)


def _cn_outer(y, rho, q, scale):
    """(1-q)^(k/2) rho^k H_k(y|q) via the H recurrence, in Decimal."""
    prev, cur = Decimal(0), Decimal(1)
    bracket, qpow, coeff = Decimal(0), Decimal(1), Decimal(1)
    k = 0
    while True:
        yield coeff * cur
        prev, cur = cur, y * cur - bracket * prev
        bracket += qpow
        qpow *= q
        coeff *= rho * scale
        k += 1


def _q_outer(a, b, q):
    """S_k(a,b|q) via S_{k+1} = (a+b) S_k - (1-q^k) ab S_{k-1}, in Decimal."""
    prev, cur, qpow = Decimal(0), Decimal(1), Decimal(1)
    while True:
        yield cur
        prev, cur = cur, (a + b) * cur - (1 - qpow) * a * b * prev
        qpow *= q


def _evaluate_series(spec: DistributionSpec, t: float, cfg: BesselSeriesConfig) -> SeriesResult:
    q = spec.q
    # e^|z| bounds the Bessel magnitudes, so start with that many extra digits
    z_mag = abs(t) * (2.0 / math.sqrt(1.0 - q) if spec.family in (Family.FN, Family.FCN) else 1.0)
    digits = 17 + GUARD_DIGITS + int(z_mag / math.log(10)) + 4
    for _ in range(6):
        with localcontext() as ctx:
            ctx.prec = digits
            qd, td = Decimal(q), Decimal(t)
            if spec.family in (Family.FN, Family.FCN):
                root = (1 - qd).sqrt()
                z, prefactor = 2 * td / root, root / td
                rho = Decimal(spec.rho) if spec.family is Family.FCN else Decimal(0)
                outer = _cn_outer(Decimal(spec.y), rho, qd, root)
            else:
                z, prefactor = td, 2 / td
                a = Decimal(spec.a) if spec.family is Family.FQ else Decimal(0)
                b = Decimal(spec.b) if spec.family is Family.FQ else Decimal(0)
                outer = _q_outer(a, b, qd)
            value, largest, n_outer, n_inner = _double_series(z, prefactor, outer, qd, cfg)
        if value == 0:
            raise ConvergenceError("MGF series summed to zero; precision exhausted", digits=digits)
        lost = max(0, math.ceil(math.log10(float(largest / abs(value)))))
        if digits - lost >= 17 + GUARD_DIGITS:
            return SeriesResult(float(value), n_outer, n_inner, digits)
        digits = lost + 17 + GUARD_DIGITS + 4
    raise ConvergenceError("MGF series: cancellation not resolved by widening precision", digits=digits)


def _validate_mgf(spec: DistributionSpec, t: float) -> None:
    if spec.is_limit_case:
        raise ValueError("the Bessel-series MGF needs |q| < 1; q = 1 is the Gaussian limit")
    if not math.isfinite(t):
        raise ValueError(f"t must be finite, got {t!r}")


def mgf_series(spec: DistributionSpec, t: float,
               config: Optional[BesselSeriesConfig] = None) -> SeriesResult:
    """Bessel-series MGF with term counts and the decimal precision used.

    t = 0 returns exactly 1.  For 0 < |t| <= 1e-8 the 1/t prefactor is
    avoided with the moment expansion 1 + mu_1 t + mu_2 t^2/2 + mu_3 t^3/6.
    """
    _validate_mgf(spec, t)
    if t == 0:
        return SeriesResult(1.0, 0, 0, 0)
    if abs(t) <= _TINY_T:
        mu = [moment(spec, n) for n in range(4)]
        return SeriesResult(1.0 + mu[1] * t + mu[2] * t * t / 2 + mu[3] * t ** 3 / 6, 0, 0, 0)
    return _evaluate_series(spec, t, config or BesselSeriesConfig())


def mgf(spec: DistributionSpec, t: float, config: Optional[BesselSeriesConfig] = None) -> float:
    return mgf_series(spec, t, config).value


def mgf_fN(t: float, q: float, config: Optional[BesselSeriesConfig] = None) -> float:
    return mgf(DistributionSpec.q_normal(q), t, config)


def mgf_fh(t: float, q: float, config: Optional[BesselSeriesConfig] = None) -> float:
    return mgf(DistributionSpec.q_hermite(q), t, config)


def mgf_fQ(t: float, a: float, b: float, q: float,
           config: Optional[BesselSeriesConfig] = None) -> float:
    return mgf(DistributionSpec.al_salam_chihara(a, b, q), t, config)


def mgf_fCN(t: float, y: float, rho: float, q: float,
            config: Optional[BesselSeriesConfig] = None) -> float:
    return mgf(DistributionSpec.conditional_q_normal(y, rho, q), t, config)


def moment_sum_mgf(spec: DistributionSpec, t: float, order: int = 30) -> float:
    """Truncated Taylor series sum_{n<=order} t^n mu_n / n!."""
    return math.fsum(t ** n * moment(spec, n) / math.factorial(n) for n in range(order + 1))


# -- q -> 1 limits -------------------------------------------------------------

@dataclass(frozen=True)
class LimitReport:
    target: float
    qs: tuple
    values: tuple
    errors: tuple

    @property
    def decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.errors, self.errors[1:]))


def _check_sequence(q_sequence: Sequence[float]) -> tuple:
    qs = tuple(float(q) for q in q_sequence)
    if any(not q < 1 for q in qs) or any(b <= a for a, b in zip(qs, qs[1:])):
        raise ValueError(f"q_sequence must increase strictly and stay below 1, got {qs}")
    return qs


def gaussian_limit_check(t: float, q_sequence: Sequence[float] = (0.9, 0.99, 0.999)) -> LimitReport:
    """Distance of mgf_fN(t, q) from the standard Gaussian MGF exp(t^2/2)."""
    qs = _check_sequence(q_sequence)
    target = math.exp(t * t / 2)
    values = tuple(mgf_fN(t, q) for q in qs)
    return LimitReport(target, qs, values, tuple(abs(v - target) for v in values))


def conditional_limit_check(t: float, y: float, rho: float,
                            q_sequence: Sequence[float] = (0.9, 0.99, 0.999)) -> LimitReport:
    """Distance of mgf_fCN from exp(t rho y + (1 - rho^2) t^2 / 2)."""
    qs = _check_sequence(q_sequence)
    target = math.exp(t * rho * y + (1 - rho * rho) * t * t / 2)
    values = tuple(mgf_fCN(t, y, rho, q) for q in qs)
    return LimitReport(target, qs, values, tuple(abs(v - target) for v in values))


def coefficient_limit_check(m: int, n: int,
                            q_sequence: Sequence[float] = (0.9, 0.99, 0.999)) -> LimitReport:
    """c_{m,n}(q) / (1-q)^m against the classical n! / (2^m m! (n-2m)!).

    Evaluated from the defining sum in exact rational arithmetic at each q
    (the float value of q converted exactly), independent of the
    polynomial-quotient route used by the moments.
    """
    from fractions import Fraction

    from .orthopoly import c_coefficient

    qs = _check_sequence(q_sequence)
    target = float(classical_hermite_coefficient(m, n))
    values = []
    for q in qs:
        qf = Fraction(q)
        values.append(float(c_coefficient(m, n, qf) / (1 - qf) ** m))
    return LimitReport(target, qs, tuple(values), tuple(abs(v - target) for v in values))
