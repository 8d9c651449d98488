"""
The four densities and their auxiliary polynomials.

    fh(x|q)        on [-1, 1]    orthogonalizes h_n(x|q)
    fN(x|q)        on J(q)       orthogonalizes H_n(x|q)   (q-Normal)
    fQ(x|a,b,q)    on [-1, 1]    orthogonalizes Q_n(x|a,b,q)
    fCN(x|y,rho,q) on J(q)       orthogonalizes P_n(x|y,rho,q)  (conditional q-Normal)

J(q) = [-2/sqrt(1-q), 2/sqrt(1-q)] for |q| < 1 and the real line at q = 1,
where fN and fCN become the standard and the conditional Gaussian.

The k = 0 factor of each infinite product vanishes at the support
endpoints.  It is folded into the square-root prefactor analytically, so
the products evaluated numerically start at k = 1 and every remaining
factor is 1 + O(q^k).  Those factors are accumulated as sums of
``log1p(factor - 1)`` with ``factor - 1`` formed directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .errors import ConvergenceError
from .qseries import QParameter, log_q_pochhammer_infinite, support_half_width

__all__ = [
    "Family",
    "TruncationPolicy",
    "DistributionSpec",
    "Support",
    "poly_w",
    "poly_W",
    "support",
    "density",
]


class Family(str, Enum):
    FH = "fh"
    FN = "fN"
    FQ = "fQ"
    FCN = "fCN"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class TruncationPolicy:
    """Tolerance and hard cap for the infinite products in the densities.

    A product stops once two consecutive factors are within ``product_tol``
    of 1.  The cap has to exceed roughly ``log(product_tol) / log|q|``;
    at q = 0.95 that is already about 650 factors.
    """

    product_tol: float = 1e-14
    max_factors: int = 2000

    def __post_init__(self) -> None:
        if not self.product_tol > 0:
            raise ValueError(f"product_tol must be positive, got {self.product_tol!r}")
        if not self.max_factors > 0:
            raise ValueError(f"max_factors must be positive, got {self.max_factors!r}")


@dataclass(frozen=True)
class DistributionSpec:
    family: Family
    q: float
    a: float = 0.0
    b: float = 0.0
    y: float = 0.0
    rho: float = 0.0
    truncation: TruncationPolicy = field(default_factory=TruncationPolicy, compare=False)

    def __post_init__(self) -> None:
        try:
            family = Family(self.family)
        except ValueError:
            raise ValueError(
                f"family must be one of {[f.value for f in Family]}, got {self.family!r}"
            ) from None
        object.__setattr__(self, "family", family)
        qp = QParameter(self.q)
        object.__setattr__(self, "q", float(self.q))
        if qp.is_limit_case and family in (Family.FH, Family.FQ):
            raise ValueError(f"q = 1 is only allowed for fN and fCN, not {family.value}")
        if family is Family.FQ:
            for name in ("a", "b"):
                if not abs(getattr(self, name)) < 1:
                    raise ValueError(f"{name} must satisfy |{name}| < 1, got {getattr(self, name)!r}")
        if family is Family.FCN:
            if not abs(self.rho) < 1:
                raise ValueError(f"rho must satisfy |rho| < 1, got {self.rho!r}")
            half = support_half_width(self.q)
            if not abs(self.y) <= half:
                raise ValueError(f"y must lie in J(q) = [-{half:g}, {half:g}], got {self.y!r}")

    @classmethod
    def q_hermite(cls, q: float, **kw) -> "DistributionSpec":
        return cls(Family.FH, q, **kw)

    @classmethod
    def q_normal(cls, q: float, **kw) -> "DistributionSpec":
        return cls(Family.FN, q, **kw)

    @classmethod
    def al_salam_chihara(cls, a: float, b: float, q: float, **kw) -> "DistributionSpec":
        return cls(Family.FQ, q, a=a, b=b, **kw)

    @classmethod
    def conditional_q_normal(cls, y: float, rho: float, q: float, **kw) -> "DistributionSpec":
        return cls(Family.FCN, q, y=y, rho=rho, **kw)

    @property
    def is_limit_case(self) -> bool:
        return self.q == 1.0

    def describe(self) -> str:
        extra = {
            Family.FH: "",
            Family.FN: "",
            Family.FQ: f", a={self.a:g}, b={self.b:g}",
            Family.FCN: f", y={self.y:g}, rho={self.rho:g}",
        }[self.family]
        return f"{self.family.value}(q={self.q:g}{extra})"


@dataclass(frozen=True)
class Support:
    lower: float
    upper: float

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.lower) and math.isfinite(self.upper)


def support(spec: DistributionSpec) -> Support:
    if spec.family in (Family.FH, Family.FQ):
        return Support(-1.0, 1.0)
    half = support_half_width(spec.q)
    return Support(-half, half)


def poly_w(k: int, x, a: float, b: float, q: float):
    """w_k(x|a,b,q); depends on (a, b, q, k) only through a q^k and b q^k."""
    ak = a * q ** k
    bk = b * q ** k
    return (1 + ak * ak) * (1 + bk * bk) - 2 * x * (ak + bk) * (1 + ak * bk) + 4 * x * x * ak * bk


def poly_W(k: int, x, y, rho: float, q: float):
    """W_k(x,y|rho,q); depends on (rho, k) only through rho q^k."""
    r = rho * q ** k
    return (1 - r * r) ** 2 - (1 - q) * r * (1 + r * r) * x * y + (1 - q) * r * r * (x * x + y * y)


def _log_product(deviation: Callable[[int, float], np.ndarray], q: float,
                 policy: TruncationPolicy, what: str) -> np.ndarray:
    """sum_{k>=1} log1p(deviation(k, q^k)) per point, stopped after two small deviations.

    Deviations are computed in blocks of k (rows) against all x (columns),
    so ``deviation`` must broadcast over a column vector of q^k.  Each
    column stops on its own, which keeps a value independent of the other
    points evaluated with it.
    """
    total = None
    k0, block = 1, 32
    while k0 <= policy.max_factors:
        ks = np.arange(k0, min(k0 + block, policy.max_factors + 1))
        dev = deviation(ks[:, None], (q ** ks)[:, None])
        if total is None:
            total = np.zeros(dev.shape[1])
            carried = np.zeros(dev.shape[1], dtype=bool)   # previous row was small
            active = np.ones(dev.shape[1], dtype=bool)
        small = np.abs(dev) < policy.product_tol
        hit = small & np.vstack([carried[None, :], small[:-1]])
        stops = hit.any(axis=0)
        last = np.where(stops, hit.argmax(axis=0), len(ks) - 1)
        keep = (np.arange(len(ks))[:, None] <= last) & active
        # cumsum adds row after row, so the order is the same for any batch size
        total += np.cumsum(np.where(keep, np.log1p(dev), 0.0), axis=0)[-1]
        active &= ~stops
        if not active.any():
            return total
        carried = small[-1]
        k0 += len(ks)
        block *= 2
    raise ConvergenceError(
        f"{what}: infinite product not within product_tol={policy.product_tol:g} "
        f"after max_factors={policy.max_factors} factors (q={q!r})",
        k=policy.max_factors,
    )


def _fh(x: np.ndarray, q: float, policy: TruncationPolicy) -> np.ndarray:
    x2 = x * x
    log_prod = _log_product(lambda k, qk: qk * (2.0 - 4.0 * x2) + qk * qk, q, policy, "fh")
    log_pref = log_q_pochhammer_infinite(q, q, policy.product_tol)
    return (2.0 / math.pi) * np.sqrt(1.0 - x2) * np.exp(log_prod + log_pref)


def _fN(x: np.ndarray, q: float, policy: TruncationPolicy) -> np.ndarray:
    s = (1.0 - q) * x * x
    log_prod = _log_product(lambda k, qk: qk * (2.0 - s) + qk * qk, q, policy, "fN")
    log_pref = log_q_pochhammer_infinite(q, q, policy.product_tol)
    root = np.sqrt(np.maximum(4.0 - s, 0.0))
    return math.sqrt(1.0 - q) / (2.0 * math.pi) * root * np.exp(log_prod + log_pref)


def _fQ(x: np.ndarray, a: float, b: float, q: float, policy: TruncationPolicy) -> np.ndarray:
    x2 = x * x

    def deviation(k: int, qk: float) -> np.ndarray:
        ak, bk = a * qk, b * qk
        num = qk * (2.0 - 4.0 * x2) + qk * qk
        # w_k - 1, expanded so no 1 + tiny - 1 cancellation occurs
        w_dev = ak * ak + bk * bk + ak * ak * bk * bk - 2.0 * x * (ak + bk) * (1.0 + ak * bk) + 4.0 * x2 * ak * bk
        return (num - w_dev) / (1.0 + w_dev)

    log_prod = _log_product(deviation, q, policy, "fQ")
    log_pref = (log_q_pochhammer_infinite(q, q, policy.product_tol)
                + log_q_pochhammer_infinite(a * b, q, policy.product_tol))
    w0 = poly_w(0, x, a, b, q)
    return (2.0 / math.pi) * np.sqrt(1.0 - x2) / w0 * np.exp(log_prod + log_pref)


def _fCN(x: np.ndarray, y: float, rho: float, q: float, policy: TruncationPolicy) -> np.ndarray:
    base = _fN(x, q, policy)
    if rho == 0.0:
        return base
    c = 1.0 - q

    def deviation(k: int, qk: float) -> np.ndarray:
        r = rho * qk
        r2 = r * r
        return -2.0 * r2 + r2 * r2 - c * r * (1.0 + r2) * x * y + c * r2 * (x * x + y * y)

    log_prod = _log_product(deviation, q, policy, "fCN")
    log_pref = log_q_pochhammer_infinite(rho * rho, q, policy.product_tol)
    W0 = poly_W(0, x, y, rho, q)
    return base / W0 * np.exp(log_pref - log_prod)


def _gaussian(x: np.ndarray, mean: float, var: float) -> np.ndarray:
    return np.exp(-((x - mean) ** 2) / (2.0 * var)) / math.sqrt(2.0 * math.pi * var)


def density(spec: DistributionSpec, x):
    """Density value(s) at ``x``; exactly 0 outside the support."""
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if spec.is_limit_case:
        if spec.family is Family.FN:
            out = _gaussian(arr, 0.0, 1.0)
        else:
            out = _gaussian(arr, spec.rho * spec.y, 1.0 - spec.rho ** 2)
        return float(out[0]) if scalar else out

    sup = support(spec)
    out = np.zeros_like(arr)
    inside = (arr >= sup.lower) & (arr <= sup.upper)
    xi = arr[inside]
    if xi.size:
        policy, q = spec.truncation, spec.q
        if spec.family is Family.FH:
            vals = _fh(xi, q, policy)
        elif spec.family is Family.FN:
            vals = _fN(xi, q, policy)
        elif spec.family is Family.FQ:
            vals = _fQ(xi, spec.a, spec.b, q, policy)
        else:
            vals = _fCN(xi, spec.y, spec.rho, q, policy)
        out[inside] = vals
    return float(out[0]) if scalar else out
