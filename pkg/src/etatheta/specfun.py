"""Euler polynomials, I-Bessel functions, incomplete gamma and the P_s integral."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np
from scipy import integrate, special

from .errors import BesselOverflowError, NotConvergedError

__all__ = [
    "EulerPoly",
    "BesselEval",
    "euler_value_at_zero",
    "euler_polynomial",
    "script_E",
    "script_E_quadrature",
    "sech_expansion_check",
    "bessel_i",
    "bessel_i_integral",
    "bessel_i_main_term",
    "incomplete_gamma",
    "incomplete_gamma_quadrature",
    "p_s_integral",
]


# ---------------------------------------------------------------------------
# Euler polynomials


@lru_cache(maxsize=None)
def _euler_zero_values(r: int) -> tuple[Fraction, ...]:
    # (1 + e^t) * sum E_k(0) t^k / k! = 2
    vals: list[Fraction] = []
    for n in range(r + 1):
        acc = Fraction(2 if n == 0 else 0)
        for k in range(n):
            acc -= math.comb(n, k) * vals[k]
        vals.append(acc / 2)
    return tuple(vals)


def euler_value_at_zero(r: int) -> Fraction:
    """Exact ``E_r(0)``."""
    if r < 0:
        raise ValueError("r must be >= 0")
    return _euler_zero_values(r)[r]


@dataclass(frozen=True)
class EulerPoly:
    """``E_r(x) = sum_k coeffs[k] x^k`` with exact rational coefficients."""

    degree: int
    coeffs: tuple[Fraction, ...]

    def __call__(self, x):
        return sum(c * x**k for k, c in enumerate(self.coeffs))


def euler_polynomial(r: int) -> EulerPoly:
    # 2 e^{xt}/(1+e^t) = e^{xt} * sum E_k(0) t^k/k!
    zeros = _euler_zero_values(r)
    coeffs = [Fraction(0)] * (r + 1)
    for k in range(r + 1):
        coeffs[r - k] = math.comb(r, k) * zeros[k]
    return EulerPoly(r, tuple(coeffs))


def script_E(j: int) -> Fraction:
    """``int_0^inf w^(2j+1) / sinh(pi w) dw = (-1)^(j+1) E_(2j+1)(0) / 2``."""
    if j < 0:
        raise ValueError("j must be >= 0")
    sign = 1 if j % 2 else -1
    return sign * euler_value_at_zero(2 * j + 1) / 2


def script_E_quadrature(j: int, rtol: float = 1e-12) -> tuple[float, float]:
    """Quadrature of the same integral; returns ``(value, error estimate)``.

    The range is cut where the integrand drops below ``1e-20`` of its peak;
    the discarded tail is bounded by the exponential majorant ``2 w^p e^(-pi w)``.
    """
    p = 2 * j + 1

    def g(w):
        if w == 0.0:
            return 1.0 / math.pi if p == 1 else 0.0
        return w**p / math.sinh(math.pi * w)

    peak_w = max(p / math.pi, 1e-3)
    peak = g(peak_w)
    upper = peak_w
    while g(upper) > 1e-20 * peak:
        upper *= 1.5
    with warnings.catch_warnings():
        # roundoff warnings at the 1e-14 floor are expected and harmless here
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(g, 0.0, upper, epsabs=1e-14, epsrel=rtol, limit=200, points=[peak_w])
    # tail: int_U^inf 2 w^p e^{-pi w} dw = 2 Gamma(p+1, pi U) / pi^(p+1)
    tail = 2 * special.gammaincc(p + 1, math.pi * upper) * math.gamma(p + 1) / math.pi ** (p + 1)
    return val, err + tail


def sech_expansion_check(t: float, terms: int) -> float:
    """``| -sech^2(t/2)/2 - sum_{r<terms} E_(2r+1)(0) t^(2r) / (2r)! |``."""
    if abs(t) >= math.pi:
        raise ValueError("|t| must be below pi (radius of convergence)")
    zeros = _euler_zero_values(2 * terms + 1)
    partial = Fraction(0)
    tf = Fraction(t)
    for r in range(terms):
        partial += zeros[2 * r + 1] * tf ** (2 * r) / math.factorial(2 * r)
    with mpmath.workdps(40):
        exact = -mpmath.sech(mpmath.mpf(t) / 2) ** 2 / 2
        return float(abs(exact - mpmath.mpf(partial.numerator) / partial.denominator))


# ---------------------------------------------------------------------------
# I-Bessel


@dataclass(frozen=True)
class BesselEval:
    """Value of ``I_order(x)``; ``scaled`` values carry the factor ``e^-x``."""

    order: int
    x: float
    value: float
    method: str
    error: float
    scaled: bool

    @property
    def log_value(self) -> float:
        return math.log(self.value) + (self.x if self.scaled else 0.0)


SERIES_LIMIT = 1.0e4


def _bessel_series_scaled(l: int, x: float) -> tuple[float, float]:
    """``e^-x I_l(x)`` by the ascending series.

    Terms are positive, so there is no cancellation; they are built by
    multiplying ratios outward from the largest term, whose logarithm is taken
    in mpmath (a double ``lgamma`` loses ~11 digits at ``x = 10^4``).
    """
    h2 = (x / 2) ** 2
    # peak index: ratio h2/((k+1)(k+l+1)) crosses 1
    kp = max(0, int((-(l + 2) + math.sqrt(l * l + 4 * h2)) / 2))
    with mpmath.workdps(30):
        xm = mpmath.mpf(x)
        log_peak = float(
            (2 * kp + l) * mpmath.log(xm / 2) - mpmath.loggamma(kp + 1) - mpmath.loggamma(kp + l + 1) - xm
        )
    kmax = int(x + 12 * math.sqrt(x) + 40)
    up = np.arange(kp, kmax, dtype=np.float64)
    r_up = h2 / ((up + 1) * (up + l + 1))
    right = np.cumprod(r_up)
    down = np.arange(kp - 1, -1, -1, dtype=np.float64)
    r_down = ((down + 1) * (down + l + 1)) / h2
    left = np.cumprod(r_down)
    total = math.fsum([1.0, *right.tolist(), *left.tolist()])
    value = total * math.exp(log_peak)
    last_ratio = float(r_up[-1]) if r_up.size else 0.0
    tail = float(right[-1]) * last_ratio / (1 - last_ratio) * math.exp(log_peak) if r_up.size else 0.0
    err = value * (2 * np.finfo(float).eps * math.sqrt(kmax) + 1e-15) + tail
    return value, err


def _bessel_hankel_scaled(l: int, x: float) -> tuple[float, float]:
    """Large-argument expansion ``e^-x I_l(x) ~ (2 pi x)^(-1/2) sum_k (-1)^k a_k / x^k``."""
    mu = 4 * l * l
    term = 1.0
    total = 1.0
    smallest = 1.0
    for k in range(1, 60):
        term *= -(mu - (2 * k - 1) ** 2) / (8 * k * x)
        if abs(term) > smallest:
            break
        total += term
        smallest = abs(term)
        if smallest < 1e-17:
            break
    pref = 1 / math.sqrt(2 * math.pi * x)
    return pref * total, pref * smallest


def bessel_i(l: int, x: float, scaled: bool = False, precision: str = "double") -> BesselEval:
    """``I_l(x)`` for integer ``l`` and ``x > 0``.

    ``precision="extended"`` evaluates with mpmath at 40 digits (value still
    returned as a float, so ``scaled=True`` is needed once ``x`` passes ~700).
    """
    if x <= 0:
        raise ValueError("x must be positive")
    l = abs(int(l))  # I_{-l} = I_l for integer order
    if precision == "extended":
        with mpmath.workdps(40):
            v = mpmath.besseli(l, mpmath.mpf(x))
            if scaled:
                v *= mpmath.exp(-mpmath.mpf(x))
            fv = float(v)
            if math.isinf(fv):
                raise BesselOverflowError(f"I_{l}({x}) overflows a double; request scaled=True")
            return BesselEval(l, x, fv, "mpmath", abs(fv) * 1e-30, scaled)
    if x <= SERIES_LIMIT:
        v, err = _bessel_series_scaled(l, x)
        method = "series"
    else:
        v, err = _bessel_hankel_scaled(l, x)
        method = "asymptotic"
    if not scaled:
        if x > 700:
            raise BesselOverflowError(f"I_{l}({x}) overflows a double; request scaled=True")
        v *= math.exp(x)
        err *= math.exp(x)
    return BesselEval(l, x, v, method, err, scaled)


def bessel_i_integral(l: int, x: float, scaled: bool = True) -> float:
    """``(1/pi) int_0^pi e^(x cos t) cos(l t) dt`` (times ``e^-x`` if scaled)."""
    shift = x if scaled else 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(
            lambda t: math.exp(x * math.cos(t) - shift) * math.cos(l * t),
            0.0,
            math.pi,
            epsabs=0.0,
            epsrel=1e-13,
            limit=400,
        )
    return val / math.pi


def bessel_i_main_term(l: int, x: float, scaled: bool = False) -> float:
    """``e^x / sqrt(2 pi x)`` (``1/sqrt(2 pi x)`` when scaled); independent of ``l``."""
    if x <= 0:
        raise ValueError("x must be positive")
    base = 1 / math.sqrt(2 * math.pi * x)
    return base if scaled else base * math.exp(x)


# ---------------------------------------------------------------------------
# incomplete gamma


def incomplete_gamma(alpha: float, x: float) -> float:
    """Upper incomplete gamma ``int_x^inf e^-w w^(alpha-1) dw``."""
    if alpha <= 0 or x <= 0:
        raise ValueError("alpha and x must be positive")
    q = special.gammaincc(alpha, x)
    g = special.gamma(alpha)
    val = q * g
    if not np.isfinite(val) or (val == 0.0 and x < 700):
        with mpmath.workdps(30):
            val = float(mpmath.gammainc(alpha, x))
    if not np.isfinite(val):
        raise NotConvergedError(f"incomplete gamma at ({alpha}, {x}) not representable")
    return float(val)


def incomplete_gamma_quadrature(alpha: float, x: float) -> float:
    """Quadrature oracle for :func:`incomplete_gamma`, scaled internally by ``e^-x x^(alpha-1)``."""
    # substitute w = x + s; integrand e^-s (1 + s/x)^(alpha-1)
    val, _ = integrate.quad(
        lambda s: math.exp(-s) * (1 + s / x) ** (alpha - 1), 0.0, np.inf, epsabs=0.0, epsrel=1e-13
    )
    return val * math.exp(-x) * x ** (alpha - 1)


# ---------------------------------------------------------------------------
# P_s


def p_s_integral(s: int, n: int, m: int, scaled: bool = True, dps: int | None = None, nodes: int = 200) -> float:
    """``P_s = (1/2 pi i) int_{1-i m^(-1/3)}^{1+i m^(-1/3)} v^s e^(A(v+1/v)) dv``, ``A = pi sqrt(2n)``.

    With ``v = 1 + i t`` the integrand is conjugate-symmetric in ``t``, so
    ``P_s = (1/pi) int_0^delta Re[(1+it)^s e^(A(v+1/v))] dt`` is real.
    ``scaled`` multiplies by ``e^(-2A)``.  Gauss-Legendre with ``nodes`` points is
    compared with ``2*nodes``; relative disagreement above 1e-9 raises.
    """
    if n < 1 or m < 1:
        raise ValueError("n and m must be >= 1")
    A = math.pi * math.sqrt(2 * n)
    delta = m ** (-1.0 / 3.0)
    if dps:
        with mpmath.workdps(dps):
            Am = mpmath.pi * mpmath.sqrt(2 * n)
            d = mpmath.mpf(m) ** (-mpmath.mpf(1) / 3)
            shift = 2 * Am if scaled else 0

            def g(t):
                v = 1 + 1j * t
                return mpmath.re(v**s * mpmath.exp(Am * (v + 1 / v) - shift))

            return mpmath.quad(g, [0, d / 2, d]) / mpmath.pi

    def gl(k: int) -> float:
        t, w = np.polynomial.legendre.leggauss(k)
        t = 0.5 * delta * (t + 1)
        v = 1 + 1j * t
        vals = np.real(v**s * np.exp(A * (v + 1 / v) - (2 * A if scaled else 0.0)))
        return 0.5 * delta * float(np.dot(w, vals)) / math.pi

    a, b = gl(nodes), gl(2 * nodes)
    if abs(a - b) > 1e-9 * abs(b):
        raise NotConvergedError(f"P_{s} quadrature unstable: {a!r} vs {b!r}")
    return b
