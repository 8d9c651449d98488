"""
Verification suites: closed forms against the quadrature oracle.

Each suite returns a list of :class:`Check` records.  Tolerances default to
the acceptance levels below; ``tol_scale`` multiplies every pass threshold
and every oracle tolerance by the same factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .densities import DistributionSpec, Family
from .moments import (
    coefficient_limit_check,
    conditional_limit_check,
    double_factorial,
    gaussian_limit_check,
    mgf_series,
    moment,
    moment_fN,
    moment_sum_mgf,
)
from .orthopoly import hermite_prob, qhermite_H
from .quadrature import (
    absolute_moment_oracles,
    gram_oracle,
    integrate_against,
    mgf_oracles,
    moment_oracles,
    transfer_oracles,
)
from .qseries import q_factorial, q_pochhammer, s_polynomial

__all__ = [
    "Check",
    "SUITES",
    "TOLERANCES",
    "GRID_Q",
    "GRID_AB",
    "GRID_Y_RHO",
    "grid_specs",
    "limit_specs",
    "norm_squared",
    "transfer_value",
    "run_suite",
    "run",
]

SUITES = ("normalization", "orthogonality", "transfer", "moments", "mgf", "limits")

TOLERANCES = {
    "normalization": 1e-9,
    "orthogonality": 1e-7,
    "transfer": 1e-8,
    "moments": 1e-8,
    "mgf": 1e-7,
    "mgf_moment_sum": 1e-9,
    "gaussian_moment": 0.02,
}

# oracle tolerance relative to the pass threshold it serves, floored where
# double precision stops being able to deliver it
_ORACLE_MARGIN = 1e-3
_ORACLE_FLOOR = 1e-14

GRID_Q = (-0.9, -0.5, 0.0, 0.3, 0.7, 0.95)
GRID_AB = ((0.0, 0.0), (0.5, 0.2), (-0.6, 0.6))
GRID_Y_RHO = ((0.0, 0.5), (1.0, 0.3), (-0.8, -0.7))
MGF_T = (-2.0, -0.5, 0.5, 1.0, 2.0)
MOMENT_SUM_T = (-1.0, -0.5, 0.5, 1.0)
MAX_DEGREE = 6
MAX_TRANSFER = 8
MAX_MOMENT = 10


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    observed: float
    expected: float
    error: float
    tolerance: float
    passed: bool


def grid_specs() -> list[DistributionSpec]:
    """All four families over every grid value of q (48 specs, all |q| < 1)."""
    specs = []
    for q in GRID_Q:
        specs.append(DistributionSpec.q_hermite(q))
        specs.append(DistributionSpec.q_normal(q))
        specs.extend(DistributionSpec.al_salam_chihara(a, b, q) for a, b in GRID_AB)
        specs.extend(DistributionSpec.conditional_q_normal(y, rho, q) for y, rho in GRID_Y_RHO)
    return specs


def limit_specs() -> list[DistributionSpec]:
    """The q = 1 (Gaussian) members of the grid."""
    return [DistributionSpec.q_normal(1.0)] + [
        DistributionSpec.conditional_q_normal(y, rho, 1.0) for y, rho in GRID_Y_RHO
    ]


def norm_squared(spec: DistributionSpec, n: int) -> float:
    """Integral of p_n^2 against the density, for the orthogonal family p."""
    q = spec.q
    if spec.family is Family.FH:
        return float(q_pochhammer(q, q, n).value)
    if spec.family is Family.FN:
        return float(math.factorial(n) if q == 1.0 else q_factorial(n, q))
    if spec.family is Family.FQ:
        return float(q_pochhammer(q, q, n).value * q_pochhammer(spec.a * spec.b, q, n).value)
    base = math.factorial(n) if q == 1.0 else q_factorial(n, q)
    return float(q_pochhammer(spec.rho ** 2, q, n).value * base)


def transfer_value(spec: DistributionSpec, n: int) -> float:
    """E h_n(X|q) = S_n(a,b|q) for fQ; E H_n(X|q) = rho^n H_n(y|q) for fCN."""
    if spec.family is Family.FQ:
        return float(s_polynomial(n, spec.a, spec.b, spec.q))
    if spec.family is Family.FCN:
        poly = hermite_prob(n, spec.y) if spec.q == 1.0 else qhermite_H(n, spec.y, spec.q)
        return float(spec.rho ** n * poly)
    raise ValueError(f"no transfer identity for family {spec.family.value}")


def _oracle_tol(threshold: float) -> float:
    return max(threshold * _ORACLE_MARGIN, _ORACLE_FLOOR)


def _check(suite: str, name: str, observed: float, expected: float, error: float,
           tolerance: float) -> Check:
    return Check(suite, name, float(observed), float(expected), float(error), tolerance,
                 bool(error <= tolerance))


def _normalization(scale: float) -> list[Check]:
    tol = TOLERANCES["normalization"] * scale
    out = []
    for spec in grid_specs() + limit_specs():
        report = integrate_against(None, spec, _oracle_tol(tol), 0.0)
        out.append(_check("normalization", spec.describe(), report.value, 1.0,
                          abs(report.value - 1.0), tol))
    return out


def _orthogonality(scale: float) -> list[Check]:
    tol = TOLERANCES["orthogonality"] * scale
    out = []
    for spec in grid_specs() + limit_specs():
        gram = gram_oracle(spec, MAX_DEGREE, tol=_oracle_tol(tol))
        for m in range(MAX_DEGREE + 1):
            for n in range(m, MAX_DEGREE + 1):
                value = gram[m][n - m].value
                name = f"{spec.describe()} m={m} n={n}"
                if m == n:
                    expected = norm_squared(spec, n)
                    error = abs(value - expected) / abs(expected)
                else:
                    expected, error = 0.0, abs(value)
                out.append(_check("orthogonality", name, value, expected, error, tol))
    return out


def _transfer(scale: float) -> list[Check]:
    tol = TOLERANCES["transfer"] * scale
    out = []
    specs = [s for s in grid_specs() + limit_specs() if s.family in (Family.FQ, Family.FCN)]
    for spec in specs:
        reports = transfer_oracles(spec, MAX_TRANSFER, tol=_oracle_tol(tol))
        for n, report in enumerate(reports):
            expected = transfer_value(spec, n)
            out.append(_check("transfer", f"{spec.describe()} n={n}", report.value, expected,
                              abs(report.value - expected), tol))
    return out


def _moments(scale: float) -> list[Check]:
    # odd moments may vanish, so errors are measured against E|X|^n
    tol = TOLERANCES["moments"] * scale
    out = []
    for spec in grid_specs() + limit_specs():
        raw = moment_oracles(spec, MAX_MOMENT, rel_tol=_oracle_tol(tol))
        absolute = absolute_moment_oracles(spec, MAX_MOMENT, rel_tol=_oracle_tol(tol))
        for n in range(MAX_MOMENT + 1):
            closed = moment(spec, n)
            oracle = raw[n].value
            out.append(_check("moments", f"{spec.describe()} n={n}", closed, oracle,
                              abs(closed - oracle) / absolute[n].value, tol))
    return out


def _mgf(scale: float) -> list[Check]:
    tol = TOLERANCES["mgf"] * scale
    tol_sum = TOLERANCES["mgf_moment_sum"] * scale
    out = []
    for spec in grid_specs():
        reports = mgf_oracles(spec, MGF_T, tol=1e-13, rel_tol=_oracle_tol(tol))
        for t, report in zip(MGF_T, reports):
            series = mgf_series(spec, t).value
            out.append(_check("mgf", f"{spec.describe()} t={t:g} oracle", series, report.value,
                              abs(series - report.value) / abs(report.value), tol))
        for t in MOMENT_SUM_T:
            series = mgf_series(spec, t).value
            partial = moment_sum_mgf(spec, t, order=40)
            out.append(_check("mgf", f"{spec.describe()} t={t:g} moment-sum", series, partial,
                              abs(series - partial) / abs(partial), tol_sum))
    return out


def _trend(name: str, report) -> Check:
    # pass/fail is the strict decrease; the recorded error is the last distance
    return Check("limits", name, report.values[-1], report.target, report.errors[-1], 0.0,
                 report.decreasing)


def _limits(scale: float) -> list[Check]:
    out = []
    for t in (0.5, 1.0):
        out.append(_trend(f"fN mgf t={t:g} -> exp(t^2/2)", gaussian_limit_check(t)))
        for y, rho in GRID_Y_RHO:
            out.append(_trend(f"fCN(y={y:g}, rho={rho:g}) mgf t={t:g}",
                              conditional_limit_check(t, y, rho)))
    for m, n in ((1, 3), (1, 4), (2, 4), (2, 6), (3, 6), (4, 10)):
        out.append(_trend(f"c_{{{m},{n}}}(q)/(1-q)^{m}", coefficient_limit_check(m, n)))
    tol = TOLERANCES["gaussian_moment"] * scale
    for j in range(1, 5):
        target = double_factorial(2 * j - 1)
        exact = moment_fN(2 * j, 1.0)
        out.append(_check("limits", f"fN(q=1) n={2 * j}", exact, target, abs(exact - target), 0.0))
        near = moment_fN(2 * j, 0.999)
        out.append(_check("limits", f"fN(q=0.999) n={2 * j}", near, target,
                          abs(near - target) / target, tol))
    return out


_RUNNERS: dict[str, Callable[[float], list[Check]]] = {
    "normalization": _normalization,
    "orthogonality": _orthogonality,
    "transfer": _transfer,
    "moments": _moments,
    "mgf": _mgf,
    "limits": _limits,
}


def run_suite(name: str, tol_scale: float = 1.0) -> list[Check]:
    if name not in _RUNNERS:
        raise ValueError(f"suite must be one of {list(SUITES)}, got {name!r}")
    if not tol_scale > 0:
        raise ValueError(f"tol_scale must be positive, got {tol_scale!r}")
    return _RUNNERS[name](tol_scale)


def run(suites: Iterable[str] = SUITES, tol_scale: float = 1.0) -> list[Check]:
    """Run suites in the canonical order, whatever order they were requested in."""
    wanted: Sequence[str] = list(suites)
    for name in wanted:
        if name not in _RUNNERS:
            raise ValueError(f"suite must be one of {list(SUITES)}, got {name!r}")
    out: list[Check] = []
    for name in SUITES:
        if name in wanted:
            out.extend(run_suite(name, tol_scale))
    return out
