"""Exact, numeric and asymptotic Fourier coefficients of the eta-theta quotient

    f(z; tau) = theta(z; tau)^4 / (eta(tau)^9 theta(2z; tau)).

Modules
-------
qseries
    Exact truncated q-series with Laurent polynomial coefficients in zeta.
fourier_extract
    Exact coefficient tables ``b(m, n)`` under the average, below and above
    prescriptions at the pole ``z = 1/2``.
specfun
    Euler polynomials, sinh moments, modified Bessel functions, ``P_s`` integrals.
numeric
    Double and multiprecision evaluation of eta, theta and f.
asymptotics
    Main terms, dominant-pole approximations and bound functions.
circle_method
    Principal-value z-quadrature and Wright's circle method reconstruction.
checks
    Verification suites shared by the CLI and the tests.
cli
    Command-line interface (``etatheta``).
"""

from .errors import (
    BesselOverflowError,
    EtaThetaError,
    InsufficientSupportError,
    InsufficientTruncationError,
    NonUnitError,
    NotConvergedError,
    OffsetMismatchError,
    OutOfRangeError,
    PoleDetectionError,
)
from .fourier_extract import FORMAT_VERSION, PRESCRIPTIONS, CoeffTable, b_table
from .qseries import GaussianRational, QSeries, ZetaPoly

__version__ = "0.1.0"

__all__ = [
    "BesselOverflowError",
    "CoeffTable",
    "EtaThetaError",
    "FORMAT_VERSION",
    "GaussianRational",
    "InsufficientSupportError",
    "InsufficientTruncationError",
    "NonUnitError",
    "NotConvergedError",
    "OffsetMismatchError",
    "OutOfRangeError",
    "PRESCRIPTIONS",
    "PoleDetectionError",
    "QSeries",
    "ZetaPoly",
    "b_table",
]
