"""Closed-form main terms and bounds near ``q = 1``, plus evaluators for checking them.

All large quantities are carried as ``log|.|`` plus a phase
(:class:`AsymptoticEstimate`) or as mpmath numbers, so nothing overflows for
``n <= 10^4``.  Sign convention: ``(-1)^(1/2) = +i``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import mpmath
import numpy as np

from . import numeric
from .errors import NotConvergedError

__all__ = [
    "MajorArcPoint",
    "AsymptoticEstimate",
    "theorem1_main",
    "fixed_z_asymptotic",
    "fixed_z_asymptotic_corrected",
    "f_dominant_approx",
    "dominant_correction",
    "dominant_error_scale",
    "dominant_pole_deviation",
    "residue_asymptotic",
    "residue_exact",
    "fm_major_approx",
    "g_integrals",
    "p_q_bound",
    "f_away_bound",
    "e_arc_bound",
]


@dataclass(frozen=True)
class MajorArcPoint:
    """``beta = pi sqrt(2/n)``, ``eps = beta (1 + i x |m|^(-1/3))``, ``tau = i eps / 2 pi``."""

    n: int
    m: int
    x: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.m == 0:
            raise ValueError("m must be nonzero")
        if abs(self.x) > self.x_max * (1 + 1e-12):
            raise ValueError(f"|x| = {abs(self.x)} beyond the circle, max {self.x_max}")

    @property
    def beta(self) -> float:
        return math.pi * math.sqrt(2.0 / self.n)

    @property
    def x_max(self) -> float:
        return math.pi * abs(self.m) ** (1 / 3) / self.beta

    @property
    def eps(self) -> complex:
        return self.beta * complex(1.0, self.x * abs(self.m) ** (-1 / 3))

    @property
    def tau(self) -> complex:
        return 1j * self.eps / (2 * math.pi)

    @property
    def on_major_arc(self) -> bool:
        return abs(self.x) <= 1.0


@dataclass(frozen=True)
class AsymptoticEstimate:
    """Main term ``exp(log_abs + i phase)`` with error scale ``exp(error_log)``."""

    log_abs: float
    phase: float
    error_log: float
    valid: bool = True
    note: str = ""

    @property
    def value(self):
        """Main term as an mpmath ``mpc`` (no overflow)."""
        return mpmath.exp(mpmath.mpf(self.log_abs)) * mpmath.expj(self.phase)

    def __complex__(self):
        return complex(self.value)

    @property
    def error(self):
        return mpmath.exp(mpmath.mpf(self.error_log))

    def ratio(self, exact) -> complex:
        """``exact / main`` computed in mpmath."""
        return complex(mpmath.mpmathify(exact) / self.value)


def _half_sign(m: int) -> float:
    """Phase of ``(-1)^(m + delta + 1/2)`` with ``delta = 1`` for ``m < 0``."""
    k = m + (1 if m < 0 else 0)
    return math.pi / 2 if k % 2 == 0 else -math.pi / 2


# ---------------------------------------------------------------------------
# main theorem and the fixed-z profile


def theorem1_main(m: int, n: int) -> AsymptoticEstimate:
    """``(-1)^(m+delta+1/2) beta^5 / (2^7 pi^5 (2n)^(1/4)) e^(2 pi sqrt(2n))``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    beta = math.pi * math.sqrt(2.0 / n)
    growth = 2 * math.pi * math.sqrt(2 * n)
    log_abs = 5 * math.log(beta) - 7 * math.log(2) - 5 * math.log(math.pi) - 0.25 * math.log(2 * n) + growth
    error_log = -3.25 * math.log(n) + growth
    if m == 0:
        return AsymptoticEstimate(log_abs, _half_sign(0), error_log, False, "m = 0: b(0, n) vanishes identically")
    in_range = abs(m) <= math.log(n) / (6 * beta)
    note = "" if in_range else "|m| beyond log(n)/(6 beta)"
    return AsymptoticEstimate(log_abs, _half_sign(m), error_log, in_range, note)


def _check_hk(h: int, k: int) -> None:
    if math.gcd(h, k) != 1 or not 0 < h or 2 * h >= k:
        raise ValueError("need gcd(h, k) = 1 and 0 < h < k/2")


def fixed_z_asymptotic(h: int, k: int, n: int) -> float:
    """``(h/k)^(7/4) / (2 sqrt(2) pi) n^(-9/4) e^(4 pi sqrt(hn/k))``, as displayed."""
    _check_hk(h, k)
    r = h / k
    return r**1.75 / (2 * math.sqrt(2) * math.pi) * n**-2.25 * math.exp(4 * math.pi * math.sqrt(r * n))


def fixed_z_asymptotic_corrected(h: int, k: int, n: int) -> float:
    """``-(h/k)^(7/4) / sqrt(2) n^(-9/4) e^(4 pi sqrt(hn/k))``.

    This is the displayed profile times ``-2 pi``.  It follows from
    ``f(h/k; tau) ~ -(eps^3/pi^3) e^(4 pi^2 h/(k eps)) / 8`` and the saddle point.
    """
    return -2 * math.pi * fixed_z_asymptotic(h, k, n)


# ---------------------------------------------------------------------------
# f near the dominant pole


def _mirror(z: float) -> tuple[float, float]:
    """Map ``z`` in ``(1/2, 1)`` to ``1 - z`` with sign ``-1``."""
    if 0 < z < 0.5:
        return z, 1.0
    if 0.5 < z < 1:
        return 1 - z, -1.0
    raise ValueError("z must lie in (0, 1) and differ from 1/2")


def f_dominant_approx(z: float, eps: complex, dps: int = 30):
    """``-(eps^3/pi^3) sinh(2 pi^2 z/eps)^4 / sinh(4 pi^2 z/eps)`` as an mpmath ``mpc``.

    For ``1/2 < z < 1`` the mirrored form ``-f(1-z)`` is used.
    """
    zz, sign = _mirror(z)
    with mpmath.workdps(dps):
        e = mpmath.mpc(eps)
        a = 2 * mpmath.pi**2 * mpmath.mpf(zz) / e
        val = -(e**3) / mpmath.pi**3 * mpmath.sinh(a) ** 4 / mpmath.sinh(2 * a)
        return sign * val


def _dominant_np(z, eps):
    """Vectorized ``f_dominant_approx`` for ``0 <= z < 1/2`` in overflow-safe form."""
    z = np.asarray(z, dtype=np.float64)
    a = 2 * np.pi**2 * z / eps
    with np.errstate(invalid="ignore", divide="ignore"):
        # sinh(a)^4/sinh(2a) = e^{2a} (1-e^{-2a})^4 / (8 (1-e^{-4a}))
        num = (-np.expm1(-2 * a)) ** 4
        den = 8 * (-np.expm1(-4 * a))
        out = -(eps**3) / np.pi**3 * np.exp(2 * a) * num / den
    return np.where(z == 0, 0.0, out)


def _correction(zz, e, form):
    gap = 4 * mpmath.pi**2 * (1 - 2 * mpmath.mpf(zz))
    if form == "displayed":
        return 1 + mpmath.exp(-gap * mpmath.re(1 / e))
    if form == "complex":
        return 1 + mpmath.exp(-gap / e)
    if form == "geometric":
        return 1 / (1 - mpmath.exp(-gap / e))
    raise ValueError("form must be 'displayed', 'complex' or 'geometric'")


def dominant_correction(z: float, eps: complex, form: str = "displayed", dps: int = 30):
    """Multiplicative correction next to the dominant term.

    ``form="displayed"``: ``1 + e^(-4 pi^2 Re(1/eps) (1-2z))`` as displayed.
    ``form="complex"``: ``1 + e^(-4 pi^2 (1-2z)/eps)``, the first term of the
    geometric factor ``1/(1 - e^(-4 pi^2 (1-2z)/eps))`` (``form="geometric"``)
    produced by the pole at ``z = 1/2`` after the modular transformation.
    """
    zz, _ = _mirror(z)
    with mpmath.workdps(dps):
        return _correction(zz, mpmath.mpc(eps), form)


def dominant_error_scale(z: float, eps: complex) -> float:
    """``log`` of the displayed error scale ``e^(-4 pi^2 Re(1/eps) (1-z))``."""
    zz, _ = _mirror(z)
    return -4 * math.pi**2 * (1 / eps).real * (1 - zz)


def _f_exact_mp(z: float, eps: complex, rel_digits: float):
    """Exact ``f(z; i eps/2pi)`` to about ``rel_digits`` significant digits."""
    extra = 30
    while True:
        dps = int(rel_digits) + extra
        with mpmath.workdps(dps):
            tau = 1j * mpmath.mpc(eps) / (2 * mpmath.pi)
            t1 = numeric.theta_mp(z, tau, dps)
            arg = 1 - 2 * mpmath.mpf(z) if z > 0.25 else 2 * mpmath.mpf(z)
            t2 = numeric.theta_mp(arg, tau, dps)
            et = numeric.eta_mp(tau, dps)
            lost = max(-mpmath.log10(abs(v)) for v in (t1, t2, et))
            if lost + 15 < extra:
                return +(t1**4 / (et**9 * t2))
        extra = int(lost) + 30


def dominant_pole_deviation(z: float, eps: complex, form: str = "displayed") -> tuple[float, float]:
    """``log|f/f_dom - correction|`` and the displayed ``log`` error scale.

    ``f`` is evaluated from the exact series in mpmath with enough digits to
    resolve the deviation.
    """
    z = _mirror(z)[0]  # the ratio is invariant under z -> 1 - z
    scale = dominant_error_scale(z, eps)
    digits = max((-scale + 10) / math.log(10) + 10, 20)
    f = _f_exact_mp(z, eps, digits)
    prec = int(digits) + 10
    with mpmath.workdps(prec):
        dom = f_dominant_approx(z, eps, dps=prec)
        dev = abs(f / dom - _correction(z, mpmath.mpc(eps), form))
        return (float(mpmath.log(dev)) if dev > 0 else -math.inf), scale


# ---------------------------------------------------------------------------
# residue and f_m


def residue_asymptotic(eps: complex):
    """``eps^4 e^(2 pi^2/eps) / (2^6 pi^4)`` (mpmath ``mpc``)."""
    if complex(eps).real <= 0:
        raise ValueError("Re eps must be positive")
    with mpmath.workdps(30):
        e = mpmath.mpc(eps)
        return e**4 * mpmath.exp(2 * mpmath.pi**2 / e) / (2**6 * mpmath.pi**4)


def residue_exact(eps: complex, dps: int = 30):
    """``4 eta(i eps/pi)^8 / eta(i eps/2pi)^16`` from the eta series."""
    tau = 1j * complex(eps) / (2 * math.pi)
    with mpmath.workdps(dps):
        return 4 * numeric.eta_mp(2 * tau, dps) ** 8 / numeric.eta_mp(tau, dps) ** 16


def fm_major_approx(p: MajorArcPoint) -> AsymptoticEstimate:
    """``(-1)^(m+delta+1/2) eps^4 e^(2 pi^2/eps) / (2^6 pi^4)`` with error scale ``beta^3``."""
    eps = p.eps
    log_main = 4 * math.log(abs(eps)) + (2 * math.pi**2 / eps).real - 6 * math.log(2) - 4 * math.log(math.pi)
    phase = 4 * cmath.phase(eps) + (2 * math.pi**2 / eps).imag + _half_sign(p.m)
    return AsymptoticEstimate(log_main, phase, 3 * math.log(p.beta), p.on_major_arc)


def _z_panels(eps: complex) -> np.ndarray:
    """Panel edges on ``[0, 1/2]`` resolving growth on the scale ``Re(eps)/(2 pi^2)``."""
    width = min(abs(eps) / (2 * math.pi**2), 0.02)
    count = max(32, int(math.ceil(0.5 / width)))
    edges = np.linspace(0.0, 0.5, count + 1)
    # the correction factor varies on half that scale next to z = 1/2
    fine = 0.5 - width * 0.5 ** np.arange(1, 8)
    return np.unique(np.concatenate([edges, fine]))


def _panel_quad(fn, edges: np.ndarray, nodes: int) -> complex:
    x, w = np.polynomial.legendre.leggauss(nodes)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = (hi - lo) / 2
    pts = lo + half * (x + 1)
    vals = np.asarray(fn(pts.ravel())).reshape(pts.shape)
    return complex(np.sum(vals * w * half))


def g_integrals(p: MajorArcPoint, which: int, nodes: int = 24) -> complex:
    """``g_{m,1}``, ``g_{m,2}`` or ``g_{m,3}`` at ``a -> 0`` by panel Gauss-Legendre.

    ``g_{m,3}`` uses the exact ``f`` from the series (continuous at ``z = 1/2``)
    minus the dominant term times the displayed correction.  The rule is applied
    at ``nodes`` and ``2 nodes`` and the two must agree to ``1e-8`` relative to
    the size of the integrand, else :class:`NotConvergedError`.
    """
    eps = p.eps
    m = abs(p.m)
    inv_re = (1 / eps).real

    def dom_sin(z):
        return _dominant_np(z, eps) * np.sin(2 * np.pi * m * z)

    def corr(z):
        return np.exp(-4 * np.pi**2 * inv_re * (1 - 2 * np.asarray(z)))

    if which == 1:
        fn = dom_sin
    elif which == 2:
        def fn(z):
            return dom_sin(z) * corr(z)
    elif which == 3:
        tau = p.tau

        def fn(z):
            return numeric.fourier_integrand(z, tau, m) - dom_sin(z) * (1 + corr(z))
    else:
        raise ValueError("which must be 1, 2 or 3")

    edges = _z_panels(eps)
    coarse = _panel_quad(fn, edges, nodes)
    fine = _panel_quad(fn, edges, 2 * nodes)
    size = abs(_panel_quad(lambda z: np.abs(dom_sin(z)), edges, nodes))
    if abs(fine - coarse) > 1e-8 * max(size, abs(fine)):
        raise NotConvergedError(f"g_{which}: panel rules differ by {abs(fine - coarse):.3e}")
    return fine


# ---------------------------------------------------------------------------
# bounds away from q = 1


def _shrink(m: int) -> float:
    return 1 - 1 / math.sqrt(1 + abs(m) ** (-2 / 3))


def p_q_bound(n: int, m: int, x: float) -> float:
    """``log`` of ``n^(-1/4) exp[(2 pi/beta)(pi/12 - (1/2pi)(1 - 1/sqrt(1+m^(-2/3))))]``.

    Valid for ``1 <= x <= pi m^(1/3)/beta``; the value does not depend on ``x``.
    """
    beta = math.pi * math.sqrt(2.0 / n)
    if not 1 <= abs(x) <= math.pi * abs(m) ** (1 / 3) / beta + 1e-12:
        raise ValueError("x outside the error arc")
    return -0.25 * math.log(n) + (2 * math.pi / beta) * (math.pi / 12 - _shrink(m) / (2 * math.pi))


def f_away_bound(n: int, m: int) -> float:
    """``log`` of ``n^(-2) exp[pi sqrt(2n) - (8 sqrt(2n)/pi)(1 - 1/sqrt(1+m^(-2/3)))]``."""
    r = math.sqrt(2 * n)
    return -2 * math.log(n) + math.pi * r - 8 * r / math.pi * _shrink(m)


def e_arc_bound(n: int, m: int) -> float:
    """``log`` of ``n^(-2) exp[2 pi sqrt(2n) - (8 sqrt(2n)/pi)(1 - 1/sqrt(1+m^(-2/3)))]``."""
    r = math.sqrt(2 * n)
    return -2 * math.log(n) + 2 * math.pi * r - 8 * r / math.pi * _shrink(m)
