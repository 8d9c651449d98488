"""q-Normal, q-Hermite, Al-Salam-Chihara and conditional q-Normal distributions."""

from .densities import DistributionSpec, Family, Support, TruncationPolicy, density, support
from .errors import ConvergenceError
from .moments import (
    BesselSeriesConfig,
    MomentTable,
    SeriesResult,
    bessel_i,
    mgf,
    mgf_fCN,
    mgf_fh,
    mgf_fN,
    mgf_fQ,
    mgf_series,
    moment,
    moment_fCN,
    moment_fh,
    moment_fN,
    moment_fQ,
    moment_table,
)
from .orthopoly import CoefficientTable, PolynomialFamily, coefficient_table
from .quadrature import OracleReport, integrate, mgf_oracle, moment_oracle
from .qseries import QParameter, QPochhammerValue, q_binomial, q_factorial, q_integer, q_pochhammer

__version__ = "0.1.0"

__all__ = [
    "BesselSeriesConfig",
    "CoefficientTable",
    "ConvergenceError",
    "DistributionSpec",
    "Family",
    "MomentTable",
    "OracleReport",
    "PolynomialFamily",
    "QParameter",
    "QPochhammerValue",
    "SeriesResult",
    "Support",
    "TruncationPolicy",
    "bessel_i",
    "coefficient_table",
    "density",
    "integrate",
    "mgf",
    "mgf_fCN",
    "mgf_fh",
    "mgf_fN",
    "mgf_fQ",
    "mgf_oracle",
    "mgf_series",
    "moment",
    "moment_fCN",
    "moment_fh",
    "moment_fN",
    "moment_fQ",
    "moment_oracle",
    "moment_table",
    "q_binomial",
    "q_factorial",
    "q_integer",
    "q_pochhammer",
    "support",
]
