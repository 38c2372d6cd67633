"""Floating-point values of eta, theta and f.

Double-precision values use the product forms

    eta = q^(1/24) prod (1 - q^n),
    theta(z) = -2 sin(pi z) q^(1/8) prod (1 - q^n)(1 - zeta q^n)(1 - zeta^-1 q^n),

summed in logarithms.  Near ``q = 1`` the series for theta cancels heavily next
to its zeros, while the product keeps full relative accuracy.  The mpmath
versions render the truncated :mod:`etatheta.qseries` objects at a working
precision that absorbs the cancellation; ``eta_series_value`` and
``theta_series_value`` give the same series in double precision for
cross-checks.
"""

from __future__ import annotations

import math
from functools import lru_cache

import mpmath
import numpy as np

from .qseries import SeriesEvaluator, eta_series, theta_series

__all__ = [
    "truncation_order",
    "eta",
    "theta",
    "eta_series_value",
    "theta_series_value",
    "f_value",
    "fourier_integrand",
    "pole_limit",
    "residue_value",
    "residue_quotient",
    "partition_function_value",
    "eta_mp",
    "theta_mp",
    "f_mp",
]


def truncation_order(im_tau: float, im_z: float = 0.0, digits: float = 18.0) -> int:
    """Smallest ``N`` with ``|q|^k |zeta|^(sqrt(2k)+1)`` below ``10^-digits`` for ``k > N``."""
    if im_tau <= 0:
        raise ValueError("tau must lie in the upper half-plane")
    a = 2 * math.pi * im_tau
    b = 2 * math.pi * abs(im_z)
    target = digits * math.log(10)
    N = 1
    while a * N - b * (math.sqrt(2 * N) + 1) < target:
        N = int(N * 1.25) + 1
    return N


@lru_cache(maxsize=64)
def _theta_eval(N: int) -> SeriesEvaluator:
    return SeriesEvaluator(theta_series(N, 1))


@lru_cache(maxsize=64)
def _eta_eval(N: int) -> SeriesEvaluator:
    return SeriesEvaluator(eta_series(N))


def _bucket(N: int) -> int:
    # round orders up to a coarse grid so the evaluator cache gets hits
    return 1 << max(4, (N - 1).bit_length())


def _order(tau, z=0.0, digits=18.0) -> int:
    im_tau = float(np.min(np.imag(tau)))
    im_z = float(np.max(np.abs(np.imag(z)))) if np.size(z) else 0.0
    return _bucket(truncation_order(im_tau, im_z, digits))


def _product_order(tau, z=0.0) -> int:
    im_tau = float(np.min(np.imag(tau)))
    im_z = float(np.max(np.abs(np.imag(z)))) if np.size(z) else 0.0
    a = 2 * math.pi * im_tau
    # |zeta q^n| <= exp(-(a n - 2 pi |Im z|)); stop once below 1e-18
    return int(math.ceil((2 * math.pi * im_z + 18 * math.log(10)) / a)) + 1


_RENORM = 32  # factors multiplied between logarithms


def _log_product(q, N: int, zeta=None):
    """``sum_{n <= N} log`` of ``(1 - q^n)`` or ``(1 - zeta q^n)(1 - q^n/zeta)``.

    Factors are multiplied directly and folded into the logarithm every
    ``_RENORM`` steps, which keeps the partial products well inside range.
    """
    out = np.zeros(np.shape(q) if zeta is None else np.broadcast(q, zeta).shape, dtype=np.complex128)
    acc = np.ones_like(out)
    qn = np.ones_like(out)
    inv = None if zeta is None else 1 / zeta
    for n in range(1, N + 1):
        qn = qn * q
        if zeta is None:
            acc = acc * (1 - qn)
        else:
            acc = acc * ((1 - zeta * qn) * (1 - inv * qn))
        if n % _RENORM == 0 or n == N:
            out = out + np.log(acc)
            acc = np.ones_like(out)
    return out


def eta(tau):
    """Dedekind eta from the product (broadcasting)."""
    tau = np.asarray(tau, dtype=np.complex128)
    N = _product_order(tau)
    q = np.exp(2j * np.pi * tau)
    return np.exp(2j * np.pi * tau / 24 + _log_product(q, N))


def theta(z, tau):
    """``theta(z; tau)`` from the triple product (broadcasting)."""
    z = np.asarray(z, dtype=np.complex128)
    tau = np.asarray(tau, dtype=np.complex128)
    N = _product_order(tau, z)
    q = np.exp(2j * np.pi * tau)
    zeta = np.exp(2j * np.pi * z)
    log = 2j * np.pi * tau / 8 + _log_product(q, N) + _log_product(q, N, zeta)
    return -2 * np.sin(np.pi * z) * np.exp(log)


def eta_series_value(tau):
    """Eta from the pentagonal series (double precision)."""
    tau = np.asarray(tau, dtype=np.complex128)
    return _eta_eval(_order(tau))(0.0, tau)


def theta_series_value(z, tau):
    """Theta from the Jacobi triple product series (double precision)."""
    z = np.asarray(z, dtype=np.complex128)
    tau = np.asarray(tau, dtype=np.complex128)
    return _theta_eval(_order(tau, z))(z, tau)


def _theta_double(z, tau):
    """``theta(2z)``, computed through ``theta(1 - 2z)`` when ``Re z > 1/4``."""
    z = np.asarray(z, dtype=np.complex128)
    arg = np.where(z.real > 0.25, 1.0 - 2.0 * z, 2.0 * z)
    return theta(arg, tau)


def f_value(z, tau):
    """``f(z; tau) = theta(z)^4 / (eta^9 theta(2z))`` (broadcasting)."""
    z = np.asarray(z, dtype=np.complex128)
    tau = np.asarray(tau, dtype=np.complex128)
    return theta(z, tau) ** 4 / (eta(tau) ** 9 * _theta_double(z, tau))


def pole_limit(tau, m):
    """Value of ``f(z) sin(2 pi m z)`` at ``z = 1/2``: ``(-1)^m m theta(1/2)^4 / (2 eta^12)``."""
    tau = np.asarray(tau, dtype=np.complex128)
    m = np.asarray(m)
    sign = np.where(m % 2 == 0, 1.0, -1.0)
    return sign * m * theta(0.5, tau) ** 4 / (2 * eta(tau) ** 12)


def fourier_integrand(z, tau, m):
    """``f(z; tau) sin(2 pi m z)`` for real ``z`` in ``[0, 1/2]``, continuous at ``1/2``.

    Near ``1/2`` the sine and ``theta(2z)`` are both rewritten in ``w = 1/2 - z``
    so their ratio keeps full relative accuracy; ``z = 1/2`` itself gets the limit.
    """
    z = np.asarray(z, dtype=np.float64)
    tau = np.asarray(tau, dtype=np.complex128)
    m = np.asarray(m)
    near = z > 0.25
    w = 0.5 - z
    sign = np.where(m % 2 == 0, -1.0, 1.0)  # (-1)^(m+1)
    sine = np.where(near, sign * np.sin(2 * np.pi * m * w), np.sin(2 * np.pi * m * z))
    with np.errstate(divide="ignore", invalid="ignore"):
        # the z = 1/2 entries are replaced by the limit below
        out = f_value(z, tau) * sine
    at_pole = z == 0.5
    if np.any(at_pole):
        limit = np.broadcast_to(pole_limit(tau, m), out.shape)
        out = np.where(np.broadcast_to(at_pole, out.shape), limit, out)
    return out


def residue_quotient(tau):
    """``eta(2 tau)^8 / eta(tau)^16``."""
    tau = np.asarray(tau, dtype=np.complex128)
    return eta(2 * tau) ** 8 / eta(tau) ** 16


def residue_value(tau):
    """Residue of ``f`` at ``z = 1/2``: ``theta(1/2)^4 / (4 pi eta^12)``."""
    tau = np.asarray(tau, dtype=np.complex128)
    return theta(0.5, tau) ** 4 / (4 * np.pi * eta(tau) ** 12)


def partition_function_value(tau):
    """``P(q) = q^(1/24) / eta``."""
    tau = np.asarray(tau, dtype=np.complex128)
    return np.exp(2j * np.pi * tau / 24) / eta(tau)


# ---------------------------------------------------------------------------
# mpmath versions


def _mp_order(tau, z, dps: int) -> int:
    return _bucket(truncation_order(float(mpmath.im(tau)), float(mpmath.im(z)), dps + 10))


def eta_mp(tau, dps: int = 50):
    with mpmath.workdps(dps):
        tau = mpmath.mpmathify(tau)
        return _eta_eval(_mp_order(tau, 0, dps)).evaluate_mp(0, tau, dps)


def theta_mp(z, tau, dps: int = 50):
    with mpmath.workdps(dps):
        tau = mpmath.mpmathify(tau)
        z = mpmath.mpmathify(z)
        return _theta_eval(_mp_order(tau, z, dps)).evaluate_mp(z, tau, dps)


def f_mp(z, tau, dps: int = 50):
    """``f(z; tau)`` in mpmath; ``dps`` must cover the cancellation in the series."""
    with mpmath.workdps(dps):
        z = mpmath.mpmathify(z)
        tau = mpmath.mpmathify(tau)
        arg = 1 - 2 * z if mpmath.re(z) > 0.25 else 2 * z
        num = theta_mp(z, tau, dps) ** 4
        den = eta_mp(tau, dps) ** 9 * theta_mp(arg, tau, dps)
        return num / den
