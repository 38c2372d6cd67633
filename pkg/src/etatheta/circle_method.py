"""Numerical reconstruction of ``b(m, n)`` by Wright's circle method.

The Fourier coefficient ``f_m(tau)`` is an integral over ``z`` in ``[0, 1/2]`` of
the continuously extended integrand ``f(z) sin(2 pi m z)`` plus the two
semicircle terms around the pole at ``z = 1/2``; ``b(m, n)`` is then the
Cauchy integral of ``f_m`` over ``|q| = e^(-beta)``, split at ``|x| = 1`` into
the major arc ``M`` and the error arc ``E``.

Prescriptions: ``"average"`` is the principal value ``(G_below + G_above)/2``,
``"below"`` and ``"above"`` take one semicircle.  They match the exact tables
of :func:`etatheta.fourier_extract.b_table` with the same name.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import asymptotics, numeric
from .errors import InsufficientTruncationError, NotConvergedError, PoleDetectionError
from .fourier_extract import PRESCRIPTIONS, CoeffTable, b_table

__all__ = [
    "QuadratureSpec",
    "ArcDecomposition",
    "regularized_integral",
    "semicircle_terms",
    "residue_term",
    "fm_numeric",
    "fm_numeric_many",
    "wright_coefficient",
    "convergence_report",
]


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and rule sizes for the nested quadrature.

    ``rtol`` applies to the outer ``x`` integral; the inner ``z`` integral runs
    ``inner_factor`` times tighter.  ``floor`` is an absolute floor relative to
    the integral of ``|integrand|``.  The ``z`` integrand is regularized at
    ``z = 1/2`` by its L'Hopital limit, so no margin around the pole is needed.
    """

    rtol: float = 1e-10
    floor: float = 1e-14
    max_depth: int = 8
    x_chunk: int = 32
    semicircle_nodes: int = 64
    inner_factor: float = 10.0
    max_order: int = 200_000

    def __post_init__(self):
        if not self.rtol > 0 or not self.floor >= 0:
            raise ValueError("tolerances must be positive")
        if not 0 <= self.max_depth <= 30:
            raise ValueError("max_depth must lie in [0, 30]")


@dataclass
class ArcDecomposition:
    """``total = M + E`` scaled by ``exp(-log_scale)``."""

    M: complex
    E: complex
    log_scale: float
    metadata: dict = field(default_factory=dict)

    @property
    def total(self) -> complex:
        return self.M + self.E

    def unscaled(self):
        """``(M, E, total)`` as mpmath numbers without the scale."""
        import mpmath

        s = mpmath.exp(mpmath.mpf(self.log_scale))
        return mpmath.mpc(self.M) * s, mpmath.mpc(self.E) * s, mpmath.mpc(self.total) * s


# ---------------------------------------------------------------------------
# panel quadrature


def _gl(nodes: int):
    return np.polynomial.legendre.leggauss(nodes)


# Gauss-Kronrod 7/15 nodes and weights (the standard QUADPACK table)
_GK_X = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_GK_X = np.concatenate([-_GK_X[:-1], _GK_X[::-1]])
_GK_WK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_GK_WK = np.concatenate([_GK_WK[:-1], _GK_WK[::-1]])
_GK_WG = np.zeros(15)
_GK_WG[1::2] = [0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
                0.381830050505118944950369775488975, 0.279705391489276667901467771423780,
                0.129484966168869693270611432679082]


def _evaluate(fn, points, chunk):
    out = [fn(points[i:i + chunk]) for i in range(0, len(points), chunk)]
    return np.concatenate(out, axis=0)


def _adaptive(fn, edges, rtol, floor, max_depth, chunk=4096):
    """Adaptive composite Gauss-Kronrod 7/15 for vector-valued ``fn``.

    ``fn`` maps a 1-D array of points to an array of shape ``(points, k)``.
    A panel is accepted when ``|K15 - G7|`` is below its share (by width) of
    ``rtol |I|`` or below ``floor`` times its own ``int|fn|`` (the rounding
    floor), in every column; other panels are bisected.
    Returns ``(integral, error, abs_integral)``, each of shape ``(k,)``.
    """
    lo, hi = np.asarray(edges[:-1], float), np.asarray(edges[1:], float)
    span = edges[-1] - edges[0]
    total = err_total = scale = abs_scale = None
    for depth in range(max_depth + 1):
        half = (hi - lo)[:, None] / 2
        pts = (lo[:, None] + half * (_GK_X + 1)).ravel()
        vals = _evaluate(fn, pts, chunk).reshape(len(lo), 15, -1)
        kron = np.einsum("pnk,n->pk", vals, _GK_WK) * half
        gauss = np.einsum("pnk,n->pk", vals, _GK_WG) * half
        absint = np.einsum("pnk,n->pk", np.abs(vals), _GK_WK) * half
        err = np.abs(kron - gauss)
        if total is None:
            total = np.zeros(kron.shape[1], dtype=np.complex128)
            err_total = np.zeros(kron.shape[1])
            scale = np.abs(kron.sum(axis=0))
            abs_scale = absint.sum(axis=0)
        width = (hi - lo)[:, None] / span
        tol = np.maximum(rtol * scale[None, :] * width, floor * absint)
        ok = np.all(err <= tol, axis=1)
        total += kron[ok].sum(axis=0)
        err_total += err[ok].sum(axis=0)
        if np.all(ok):
            return total, err_total, abs_scale
        bad = ~ok
        mid = (lo[bad] + hi[bad]) / 2
        lo, hi = np.concatenate([lo[bad], mid]), np.concatenate([mid, hi[bad]])
        order = np.argsort(lo, kind="stable")
        lo, hi = lo[order], hi[order]
    raise NotConvergedError(f"{len(lo)} panels unresolved after depth {max_depth}")


# ---------------------------------------------------------------------------
# the z integral


def _z_edges(im_tau: float) -> np.ndarray:
    # f grows like exp(2 pi^2 z / eps) with |eps| >= 2 pi Im(tau)
    width = min(0.025, 2 * im_tau / math.pi)
    count = max(20, int(math.ceil(0.5 / width)))
    edges = np.linspace(0.0, 0.5, count + 1)
    fine = 0.5 - (0.5 / count) * 0.5 ** np.arange(1, 6)
    return np.unique(np.concatenate([edges, fine]))


def _check_order(taus, spec: QuadratureSpec) -> None:
    N = numeric._product_order(np.asarray(taus))
    if N > spec.max_order:
        raise InsufficientTruncationError(f"product order {N} exceeds max_order {spec.max_order}")


def _pole_check(tau, m: int) -> None:
    """The extended integrand must be continuous at ``z = 1/2``."""
    limit = complex(numeric.pole_limit(tau, m))
    near = numeric.fourier_integrand(np.array([0.5 - 1e-9, 0.5 - 1e-7]), tau, m)
    scale = max(abs(limit), np.max(np.abs(near)))
    if scale == 0:
        return
    if abs(near[0] - limit) > 1e-5 * scale:
        raise PoleDetectionError(f"extension at z = 1/2 is {limit}, neighbour gives {near[0]}")


def regularized_integral(taus, m: int, spec: QuadratureSpec | None = None):
    """``-2i int_0^(1/2) f(z) sin(2 pi m z) dz`` for each ``tau`` (continuous extension at 1/2)."""
    spec = spec or QuadratureSpec()
    taus = np.atleast_1d(np.asarray(taus, dtype=np.complex128))
    _check_order(taus, spec)
    edges = _z_edges(float(np.min(taus.imag)))

    def fn(z):
        return numeric.fourier_integrand(z[:, None], taus[None, :], m)

    rtol = spec.rtol / spec.inner_factor
    chunk = max(64, 2**16 // len(taus))
    val, err, _ = _adaptive(fn, edges, rtol, spec.floor, spec.max_depth, chunk)
    return -2j * val, 2 * err


def _radius(tau: complex) -> float:
    # the nearest other poles sit at 1/2 +- tau/2
    return min(0.05, abs(tau) / 4)


def _semicircle(tau: complex, m: int, a: float, side: str, nodes: int) -> complex:
    x, w = _gl(nodes)
    if side == "below":
        theta = 1.5 * np.pi + 0.5 * np.pi * x  # pi -> 2 pi
        sign = 1.0
    else:
        theta = 0.5 * np.pi - 0.5 * np.pi * x  # pi -> 0
        sign = -1.0
    z = 0.5 + a * np.exp(1j * theta)
    dz = 1j * a * np.exp(1j * theta)
    vals = numeric.f_value(z, tau) * np.exp(-2j * np.pi * m * z) * dz
    return sign * 0.5 * np.pi * np.sum(w * vals)


def _straight_piece(tau: complex, m: int, a: float, nodes: int) -> complex:
    """``-2i int_(1/2 - a)^(1/2)`` of the extended integrand."""
    x, w = _gl(nodes)
    z = 0.5 - a / 2 + a / 2 * x
    return -2j * (a / 2) * np.sum(w * numeric.fourier_integrand(z, tau, m))


def semicircle_terms(tau: complex, m: int, spec: QuadratureSpec | None = None) -> tuple[complex, complex]:
    """``(G_below, G_above)`` in the limit ``a -> 0``.

    ``G = semicircle(a) - (-2i) int_(1/2-a)^(1/2) f sin``, which does not depend
    on ``a``; two radii are computed and must agree, else :class:`PoleDetectionError`.
    """
    spec = spec or QuadratureSpec()
    tau = complex(tau)
    _pole_check(tau, m)
    nodes = spec.semicircle_nodes
    out = []
    for side in ("below", "above"):
        vals = []
        for a in (_radius(tau), _radius(tau) / 2):
            vals.append(_semicircle(tau, m, a, side, nodes) - _straight_piece(tau, m, a, nodes))
        if abs(vals[0] - vals[1]) > 1e-9 * max(abs(vals[0]), 1e-300):
            raise PoleDetectionError(f"semicircle {side} depends on the radius: {vals[0]} vs {vals[1]}")
        out.append(vals[1])
    return out[0], out[1]


def residue_term(tau, m: int, route: str = "product"):
    """``4 (-1)^(m+1/2) eta(2 tau)^8 / eta(tau)^16`` with ``(-1)^(1/2) = i``.

    ``route="product"`` uses the eta product, ``route="series"`` the
    pentagonal series.
    """
    tau = np.asarray(tau, dtype=np.complex128)
    if route == "product":
        quotient = numeric.eta(2 * tau) ** 8 / numeric.eta(tau) ** 16
    elif route == "series":
        quotient = numeric.eta_series_value(2 * tau) ** 8 / numeric.eta_series_value(tau) ** 16
    else:
        raise ValueError("route must be 'product' or 'series'")
    return 4j * (-1) ** (m % 2) * quotient


def fm_numeric(tau: complex, m: int, spec: QuadratureSpec | None = None, prescription: str = "average") -> complex:
    """``f_m(tau)`` from the ``z`` quadrature plus semicircle terms."""
    if prescription not in PRESCRIPTIONS:
        raise ValueError(f"prescription must be one of {PRESCRIPTIONS}")
    tau = complex(tau)
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half-plane")
    if m == 0:
        return 0j
    if m < 0:
        mirror = {"average": "average", "below": "above", "above": "below"}[prescription]
        return -fm_numeric(tau, -m, spec, mirror)
    spec = spec or QuadratureSpec()
    base, _ = regularized_integral([tau], m, spec)
    below, above = semicircle_terms(tau, m, spec)
    extra = {"average": (below + above) / 2, "below": below, "above": above}[prescription]
    return complex(base[0] + extra)


def fm_numeric_many(taus, m: int, spec: QuadratureSpec | None = None, prescription: str = "average") -> np.ndarray:
    """Vectorized :func:`fm_numeric` for ``m > 0``.

    The semicircle terms are replaced by their closed forms ``+-i pi (-1)^m Res``,
    which :func:`semicircle_terms` reproduces numerically.
    """
    if m <= 0:
        raise ValueError("m must be positive")
    spec = spec or QuadratureSpec()
    taus = np.atleast_1d(np.asarray(taus, dtype=np.complex128))
    base, _ = regularized_integral(taus, m, spec)
    if prescription == "average":
        return base
    g = residue_term(taus, m)
    if prescription == "below":
        return base + g
    if prescription == "above":
        return base - g
    raise ValueError(f"prescription must be one of {PRESCRIPTIONS}")


# ---------------------------------------------------------------------------
# the circle


def _x_edges(lo: float, hi: float, omega: float) -> np.ndarray:
    # about two oscillations of the integrand per panel
    width = min(0.25, 4 * math.pi / max(omega, 1e-9))
    count = max(2, int(math.ceil((hi - lo) / width)))
    return np.linspace(lo, hi, count + 1)


def wright_coefficient(
    m: int,
    n: int,
    spec: QuadratureSpec | None = None,
    radius_scale: float = 1.0,
    prescription: str = "average",
) -> ArcDecomposition:
    """``b(m, n)`` as ``M + E`` from the Cauchy integral over ``|q| = e^(-beta')``.

    ``beta' = radius_scale * pi sqrt(2/n)`` and ``eps = beta'(1 + i x |m|^(-1/3))``.
    The integrand satisfies ``F(-x) = -conj F(x)`` because every ``b(m, n)`` is
    purely imaginary, so only ``x >= 0`` is integrated.  ``M`` covers
    ``|x| <= 1`` (boundary included), ``E`` the rest.  Values are scaled by
    ``exp(-log_scale)`` with ``log_scale = beta' n + 2 pi^2 / beta'``.
    """
    if m == 0:
        raise ValueError("m must be nonzero")
    if n < 1:
        raise ValueError("n must be >= 1")
    if m < 0:
        mirror = {"average": "average", "below": "above", "above": "below"}[prescription]
        d = wright_coefficient(-m, n, spec, radius_scale, mirror)
        return ArcDecomposition(-d.M, -d.E, d.log_scale, dict(d.metadata, m=m))
    spec = spec or QuadratureSpec()
    beta = radius_scale * math.pi * math.sqrt(2.0 / n)
    c = m ** (-1 / 3)
    x_max = math.pi / (beta * c)
    log_scale = beta * n + 2 * math.pi**2 / beta
    pref = beta * c / (2 * math.pi)
    omega = (beta * n + 2 * math.pi**2 / beta) * c

    def F(x):
        eps = beta * (1 + 1j * x * c)
        vals = fm_numeric_many(1j * eps / (2 * math.pi), m, spec, prescription)
        return (vals * np.exp(eps * n - log_scale)).imag[:, None]

    parts = []
    report = {}
    for name, lo, hi in (("M", 0.0, min(1.0, x_max)), ("E", 1.0, x_max)):
        if hi <= lo:
            parts.append(0j)
            report[name] = {"panels": 0, "error": 0.0}
            continue
        edges = _x_edges(lo, hi, omega)
        val, err, _ = _adaptive(F, edges, spec.rtol, spec.floor, spec.max_depth, spec.x_chunk)
        parts.append(2j * pref * complex(val[0]))
        report[name] = {"panels": len(edges) - 1, "error": 2 * pref * float(err[0])}
    meta = {
        "n": n,
        "m": m,
        "beta": beta,
        "radius_scale": radius_scale,
        "prescription": prescription,
        "x_max": x_max,
        "boundary": "x = 1 included in M",
        "quadrature": report,
    }
    return ArcDecomposition(parts[0], parts[1], log_scale, meta)


def convergence_report(
    m: int,
    n_list,
    spec: QuadratureSpec | None = None,
    table: CoeffTable | None = None,
    prescription: str = "average",
    wright_max_n: int = 50,
) -> list[dict]:
    """Rows ``(n, exact, theorem1, ratio, wright, wright_over_exact)`` (imaginary parts).

    Wright columns are filled for ``n <= wright_max_n`` and left ``None`` above.
    """
    import mpmath

    n_list = sorted(int(n) for n in n_list)
    if table is None or table.N_max < n_list[-1] or table.M_max < abs(m):
        table = b_table(n_list[-1], max(abs(m), 1), prescription=prescription)
    rows = []
    for n in n_list:
        exact = table[m, n]
        exact_im = exact.imag
        main = asymptotics.theorem1_main(m, n)
        main_im = mpmath.im(main.value)
        ratio = float(mpmath.mpf(exact_im.numerator) / exact_im.denominator / main_im) if main_im != 0 else None
        row = {
            "n": n,
            "m": m,
            "exact": exact_im,
            "theorem1": float(main_im),
            "ratio": ratio,
            "wright": None,
            "wright_over_exact": None,
        }
        if m != 0 and n <= wright_max_n:
            d = wright_coefficient(m, n, spec, prescription=prescription)
            w = mpmath.im(d.unscaled()[2])
            row["wright"] = float(w)
            row["wright_over_exact"] = float(w / (mpmath.mpf(exact_im.numerator) / exact_im.denominator)) if exact_im else None
        rows.append(row)
    return rows
