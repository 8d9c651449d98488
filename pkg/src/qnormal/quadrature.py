"""
Adaptive quadrature oracle.

This module checks the closed forms and must never call them.  Integrals
are computed by globally adaptive bisection with the 15-point Kronrod rule;
the error of each panel is estimated as |K15 - G7|, the embedded 7-point
Gauss rule reusing every other Kronrod node.  The panel with the largest
estimate is bisected until the summed estimate meets the tolerance or
``MAX_PANELS`` is reached.

Density-weighted integrals over a bounded support [-c, c] are taken in the
variable theta with x = c sin(theta).  The Jacobian c cos(theta) turns the
square-root endpoint behaviour of every density into an analytic integrand.
At q = 1 (Gaussian cases) the real line is cut at mean +/- 40 sd.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .densities import DistributionSpec, Family, density, support
from .orthopoly import PolynomialFamily

__all__ = [
    "OracleReport",
    "MAX_PANELS",
    "integrate",
    "integrate_vector",
    "integrate_against",
    "integrate_many_against",
    "moment_oracle",
    "absolute_moment_oracle",
    "mgf_oracle",
    "orthogonality_oracle",
    "transfer_oracle",
    "moment_oracles",
    "absolute_moment_oracles",
    "mgf_oracles",
    "gram_oracle",
    "transfer_oracles",
    "orthogonal_family",
]

MAX_PANELS = 4000

_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# full 15-node layout on [-1, 1]
NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 3, 5]] = _WG[:3]
GAUSS_WEIGHTS[[13, 11, 9]] = _WG[:3]
GAUSS_WEIGHTS[7] = _WG[3]


@dataclass(frozen=True)
class OracleReport:
    value: float
    error_estimate: float
    panels: int
    converged: bool


def _panel(f: Callable, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        fx = np.atleast_2d(np.asarray(f(mid + half * NODES), dtype=float))
    if not np.all(np.isfinite(fx)):
        raise FloatingPointError(f"integrand is not finite on [{a!r}, {b!r}]")
    k15 = half * (fx @ KRONROD_WEIGHTS)
    g7 = half * (fx @ GAUSS_WEIGHTS)
    return k15, np.abs(k15 - g7)


def integrate_vector(f: Callable, lower: float, upper: float, tol: float = 1e-11,
                     rel_tol: float = 0.0) -> list[OracleReport]:
    """Integrate every row of a vector-valued ``f`` on one shared panel set.

    ``f`` maps an array of nodes of shape (15,) to an array of shape
    (m, 15).  Panels are bisected until every component meets
    ``max(tol, rel_tol * |value|)``; the worst component, relative to its own
    threshold, decides which panel is split next.
    """
    if not lower < upper:
        raise ValueError(f"need lower < upper, got [{lower!r}, {upper!r}]")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    value, err = _panel(f, lower, upper)
    scale = np.maximum(tol, rel_tol * np.abs(value))
    heap = [(-float(np.max(err / scale)), lower, upper)]
    panels = {(lower, upper): (value, err)}
    # running sums steer the loop; reported values are re-summed with fsum
    total, total_err = value.copy(), err.copy()

    def report(converged: bool) -> list[OracleReport]:
        vals = np.array([v for v, _ in panels.values()])
        errs = np.array([e for _, e in panels.values()])
        out = []
        for col in range(vals.shape[1]):
            v, e = math.fsum(vals[:, col]), math.fsum(errs[:, col])
            out.append(OracleReport(v, e, len(panels),
                                    converged and e <= max(tol, rel_tol * abs(v))))
        return out

    while True:
        if np.all(total_err <= np.maximum(tol, rel_tol * np.abs(total))):
            return report(True)
        if len(panels) >= MAX_PANELS:
            return report(False)
        _, a, b = heapq.heappop(heap)
        mid = 0.5 * (a + b)
        if not a < mid < b:
            return report(False)
        old_value, old_err = panels.pop((a, b))
        total -= old_value
        total_err -= old_err
        for lo, hi in ((a, mid), (mid, b)):
            v, e = _panel(f, lo, hi)
            panels[(lo, hi)] = (v, e)
            total += v
            total_err += e
            heapq.heappush(heap, (-float(np.max(e / scale)), lo, hi))


def integrate(f: Callable, lower: float, upper: float, tol: float = 1e-11,
              rel_tol: float = 0.0) -> OracleReport:
    """Integrate a vectorized scalar ``f`` over [lower, upper].

    Converged means the summed error estimate is at most
    ``max(tol, rel_tol * |value|)``.
    """
    return integrate_vector(f, lower, upper, tol, rel_tol)[0]


def _weighted(g: Optional[Callable], spec: DistributionSpec):
    """Integrand in the oracle's variable and the interval it lives on."""
    sup = support(spec)
    if not spec.is_limit_case:
        c = sup.upper

        def integrand(theta: np.ndarray) -> np.ndarray:
            x = c * np.sin(theta)
            val = density(spec, x) * (c * np.cos(theta))
            return val if g is None else val * g(x)

        return integrand, -0.5 * math.pi, 0.5 * math.pi

    if spec.family is Family.FN:
        mean, sd = 0.0, 1.0
    else:
        mean, sd = spec.rho * spec.y, math.sqrt(1.0 - spec.rho ** 2)

    def integrand(x: np.ndarray) -> np.ndarray:
        val = density(spec, x)
        return val if g is None else val * g(x)

    return integrand, mean - 40.0 * sd, mean + 40.0 * sd


def integrate_against(g: Optional[Callable], spec: DistributionSpec, tol: float = 1e-11,
                      rel_tol: float = 1e-12) -> OracleReport:
    """Integral of g(x) * density(spec, x) over the support (g = None means 1)."""
    return integrate(*_weighted(g, spec), tol, rel_tol)


def integrate_many_against(g: Callable, spec: DistributionSpec, tol: float = 1e-11,
                           rel_tol: float = 1e-12) -> list[OracleReport]:
    """Like :func:`integrate_against` for a ``g`` returning one row per integrand."""
    return integrate_vector(*_weighted(g, spec), tol, rel_tol)


def moment_oracle(spec: DistributionSpec, n: int, tol: float = 1e-11) -> OracleReport:
    if n == 0:
        return integrate_against(None, spec, tol)
    return integrate_against(lambda x: x ** n, spec, tol)


def absolute_moment_oracle(spec: DistributionSpec, n: int, tol: float = 1e-11) -> OracleReport:
    """E|X|^n; the natural scale for judging errors in (possibly vanishing) moments."""
    return integrate_against(lambda x: np.abs(x) ** n, spec, tol)


def mgf_oracle(spec: DistributionSpec, t: float, tol: float = 1e-13,
               rel_tol: float = 1e-12) -> OracleReport:
    return integrate_against(lambda x: np.exp(t * x), spec, tol, rel_tol)


def orthogonal_family(spec: DistributionSpec) -> PolynomialFamily:
    """The polynomial family a density orthogonalizes."""
    q = spec.q
    if spec.family is Family.FH:
        return PolynomialFamily("h", q=q)
    if spec.family is Family.FN:
        return PolynomialFamily("He") if q == 1.0 else PolynomialFamily("H", q=q)
    if spec.family is Family.FQ:
        return PolynomialFamily("Q", q=q, a=spec.a, b=spec.b)
    return PolynomialFamily("P", q=q, y=spec.y, rho=spec.rho)


def orthogonality_oracle(spec: DistributionSpec, m: int, n: int,
                         family: Optional[PolynomialFamily] = None,
                         tol: float = 1e-11) -> OracleReport:
    """Integral of p_m p_n against the density (default family: the orthogonal one)."""
    fam = family or orthogonal_family(spec)
    return integrate_against(lambda x: fam.evaluate(m, x) * fam.evaluate(n, x), spec, tol)


def transfer_oracle(spec: DistributionSpec, n: int,
                    family: Optional[PolynomialFamily] = None,
                    tol: float = 1e-11) -> OracleReport:
    """Integral of p_n against the density.

    Defaults: h_n(x|q) for fQ and H_n(x|q) for fCN, the two pairings with
    closed-form answers S_n(a,b|q) and rho^n H_n(y|q).
    """
    fam = family or _transfer_family(spec)
    return integrate_against(lambda x: fam.evaluate(n, x), spec, tol)


def _transfer_family(spec: DistributionSpec) -> PolynomialFamily:
    if spec.family is Family.FQ:
        return PolynomialFamily("h", q=spec.q)
    if spec.family is Family.FCN:
        return PolynomialFamily("He") if spec.q == 1.0 else PolynomialFamily("H", q=spec.q)
    return orthogonal_family(spec)


def _rows(fam: PolynomialFamily, max_degree: int, x: np.ndarray) -> np.ndarray:
    return np.array([fam.evaluate(n, x) for n in range(max_degree + 1)])


def absolute_moment_oracles(spec: DistributionSpec, max_order: int, tol: float = 1e-13,
                            rel_tol: float = 1e-12) -> list[OracleReport]:
    """E|X|^n for n = 0..max_order from a single adaptive pass."""
    orders = np.arange(max_order + 1)
    return integrate_many_against(lambda x: np.power.outer(np.abs(x), orders).T, spec,
                                  tol, rel_tol)


def moment_oracles(spec: DistributionSpec, max_order: int,
                   rel_tol: float = 1e-12) -> list[OracleReport]:
    """E X^n for n = 0..max_order, each accurate to ``rel_tol`` times E|X|^n.

    Odd moments can vanish, so a relative tolerance on E X^n itself is
    unattainable.  The absolute moments are computed first and x^n / E|X|^n
    is integrated with a single absolute tolerance; values and error
    estimates are scaled back.
    """
    absolute = absolute_moment_oracles(spec, max_order, rel_tol=rel_tol)
    scales = np.array([r.value for r in absolute])
    orders = np.arange(max_order + 1)
    scaled = integrate_many_against(lambda x: np.power.outer(x, orders).T / scales[:, None],
                                    spec, rel_tol, 0.0)
    return [OracleReport(r.value * c, r.error_estimate * c, r.panels,
                         r.converged and a.converged)
            for r, a, c in zip(scaled, absolute, scales)]


def mgf_oracles(spec: DistributionSpec, ts, tol: float = 1e-13,
                rel_tol: float = 1e-12) -> list[OracleReport]:
    ts = np.asarray(ts, dtype=float)
    return integrate_many_against(lambda x: np.exp(np.multiply.outer(ts, x)), spec, tol, rel_tol)


def gram_oracle(spec: DistributionSpec, max_degree: int,
                family: Optional[PolynomialFamily] = None,
                tol: float = 1e-11) -> list[list[OracleReport]]:
    """Reports for the integrals of p_m p_n, 0 <= m <= n <= max_degree.

    Entry [m][n - m] holds the pair (m, n).
    """
    fam = family or orthogonal_family(spec)
    pairs = [(m, n) for m in range(max_degree + 1) for n in range(m, max_degree + 1)]

    def g(x):
        rows = _rows(fam, max_degree, x)
        return np.array([rows[m] * rows[n] for m, n in pairs])

    flat = iter(integrate_many_against(g, spec, tol, 0.0))
    return [[next(flat) for _ in range(m, max_degree + 1)] for m in range(max_degree + 1)]


def transfer_oracles(spec: DistributionSpec, max_degree: int,
                     family: Optional[PolynomialFamily] = None,
                     tol: float = 1e-11) -> list[OracleReport]:
    fam = family or _transfer_family(spec)
    return integrate_many_against(lambda x: _rows(fam, max_degree, x), spec, tol, 0.0)
