"""Verification suites shared by the ``verify`` command and the acceptance tests.

Each suite returns a list of :class:`CheckResult`.  Bounds that only come with
an implied constant are checked as ``measured <= SLACK * constant``, where the
constant was fitted on a calibration grid (see ``scripts/calibrate_constants.py``)
that is disjoint from the assertion grid used here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from . import asymptotics, calibration, circle_method, fourier_extract, numeric, qseries, specfun
from ._intpoly import partitions

__all__ = ["CheckResult", "SUITES", "run_suites", "em_decay_companion"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: float
    threshold: float
    detail: str = ""
    extra: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: measured={self.measured:.6g} threshold={self.threshold:.6g} {self.detail}".rstrip()


def _frac_to_mp(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


# ---------------------------------------------------------------------------
# exact engine


def exact_oracles() -> list[CheckResult]:
    """``p_series`` vs the pentagonal recurrence, ``residue_series`` vs a direct product."""
    p = qseries.p_series(500).integer_coefficients()
    ref = partitions(500)
    bad_p = sum(int(a != b) for a, b in zip(p, ref))
    N = 200
    # prod ((1 + q^n) / (1 - q^n))^8 by repeated multiplication with plain integer lists
    ser = [1] + [0] * N
    for n in range(1, N + 1):
        for _ in range(8):
            for k in range(N, n - 1, -1):  # times (1 + q^n)
                ser[k] += ser[k - n]
            for k in range(n, N + 1):  # divided by (1 - q^n)
                ser[k] += ser[k - n]
    r = qseries.residue_series(N).integer_coefficients()
    bad_r = sum(int(a != b) for a, b in zip(r, ser))
    return [
        CheckResult("p_series vs pentagonal recurrence (n <= 500)", bad_p == 0, bad_p, 0, "mismatches"),
        CheckResult("residue_series vs product oracle (n <= 200)", bad_r == 0, bad_r, 0, "mismatches"),
    ]


def table_invariants(N: int = 200, M: int = 60) -> list[CheckResult]:
    h = fourier_extract.h_series(N)
    table = fourier_extract.b_table(N, M, h=h)
    failures = table.check_invariants(h)
    return [CheckResult(f"CoeffTable invariants (N={N}, M={M})", not failures, len(failures), 0, "; ".join(failures[:3]))]


# ---------------------------------------------------------------------------
# principal value and residue


def principal_value(prescription: str = "average", N: int = 400) -> list[CheckResult]:
    table = fourier_extract.b_table(N, 6, prescription=prescription)
    worst = 0.0
    for q in (0.05, 0.1, 0.2, 0.3, 0.4):
        tau = 1j * (-math.log(q)) / (2 * math.pi)
        for m in range(1, 7):
            exact = fourier_extract.generating_value(table, m, q)
            num = circle_method.fm_numeric(tau, m, prescription=prescription)
            worst = max(worst, abs(num / exact - 1))
    return [CheckResult(f"sum b(m,n) q^n vs fm_numeric [{prescription}]", worst <= 1e-8, worst, 1e-8)]


def residue_identity() -> list[CheckResult]:
    """``(G_below + G_above)/2`` against ``4 (-1)^(m+1/2) eta(2tau)^8/eta^16``; companions use ``G_below``."""
    worst_avg = worst_below = worst_routes = 0.0
    for tau in (0.1j, 0.3j, 0.2 + 0.3j):
        for m in range(1, 5):
            below, above = circle_method.semicircle_terms(tau, m)
            target = complex(circle_method.residue_term(tau, m))
            series = complex(circle_method.residue_term(tau, m, route="series"))
            worst_avg = max(worst_avg, abs((below + above) / 2 - target) / abs(target))
            worst_below = max(worst_below, abs(below - target) / abs(target))
            worst_routes = max(worst_routes, abs(series - target) / abs(target))
    return [
        CheckResult("(G+ + G-)/2 vs residue term", worst_avg <= 1e-8, worst_avg, 1e-8),
        CheckResult("companion: G_below vs residue term", worst_below <= 1e-8, worst_below, 1e-8),
        CheckResult("companion: eta product vs eta series in residue term", worst_routes <= 1e-12, worst_routes, 1e-12),
    ]


# ---------------------------------------------------------------------------
# special functions


def euler_integrals() -> list[CheckResult]:
    worst = 0.0
    for j in range(6):
        val, _ = specfun.script_E_quadrature(j)
        exact = float(specfun.script_E(j))
        worst = max(worst, abs(val - exact) / abs(exact))
    first = specfun.script_E(0) == Fraction(1, 4)
    return [CheckResult("sinh-moment integrals vs Euler values, j = 0..5", worst <= 1e-10 and first, worst, 1e-10)]


def sech_expansion() -> list[CheckResult]:
    r = specfun.sech_expansion_check(0.9, 20)
    return [CheckResult("sech partial sum residual at t = 0.9, 20 terms", r <= 1e-10, r, 1e-10)]


def bessel_series() -> list[CheckResult]:
    sym = all(specfun.bessel_i(-5, x).value == specfun.bessel_i(5, x).value for x in (1.0, 10.0, 100.0))
    worst = 0.0
    for x in (1.0, 10.0, 100.0):
        a = specfun.bessel_i(5, x, scaled=True).value
        b = specfun.bessel_i_integral(5, x, scaled=True)
        worst = max(worst, abs(a - b) / abs(b))
    return [
        CheckResult("I_-5 = I_5", sym, 0.0 if sym else 1.0, 0.0),
        CheckResult("Bessel series vs integral, x in {1, 10, 100}", worst <= 1e-9, worst, 1e-9),
    ]


def bessel_main_term() -> list[CheckResult]:
    out = []
    for x, tol in ((100.0, 0.15), (1000.0, 0.015)):
        ratio = specfun.bessel_i(5, x, scaled=True).value / specfun.bessel_i_main_term(5, x, scaled=True)
        out.append(CheckResult(f"I_5 / main term at x = {x:g}", abs(ratio - 1) <= tol, abs(ratio - 1), tol))
    return out


def _ps_scaled_error(n: int, m: int) -> float:
    """``|P_4 - I_5(2A)| e^(-2A)`` over the scale ``exp(-A d^2/(1+d^2))``, ``d = m^(-1/3)``."""
    with mpmath.workdps(40):
        A = mpmath.pi * mpmath.sqrt(2 * n)
        p4 = specfun.p_s_integral(4, n, m, scaled=True, dps=40)
        i5 = mpmath.besseli(5, 2 * A) * mpmath.exp(-2 * A)
        d2 = mpmath.mpf(m) ** (-mpmath.mpf(2) / 3)
        return float(abs(p4 - i5) / mpmath.exp(-A * d2 / (1 + d2)))


PS_CALIBRATION_GRID = ((200, 2), (600, 4), (1600, 4))


def ps_scaling(grid=((100, 2), (400, 3), (900, 5))) -> list[CheckResult]:
    bound = calibration.SLACK * calibration.PS_SCALING
    worst = max(_ps_scaled_error(n, m) for n, m in grid)
    return [CheckResult("P_4 - I_5 within frozen constant x error scale", worst <= bound, worst, bound, f"grid={list(grid)}")]


# ---------------------------------------------------------------------------
# near the pole


DOMINANT_GRID = tuple(
    (z, complex(1 / complex(r, -t * r)))
    for r in (20.0, 50.0, 100.0)
    for t in (0.0, 0.4)
    for z in (0.1, 0.2, 0.3, 0.4)
)


def dominant_pole(form: str = "displayed", grid=DOMINANT_GRID, constant: float = 10.0) -> list[CheckResult]:
    """``|f/f_dom - correction| <= constant * e^(-4 pi^2 Re(1/eps)(1-z))`` over ``grid``."""
    worst = -math.inf
    where = None
    for z, eps in grid:
        dev, scale = asymptotics.dominant_pole_deviation(z, eps, form)
        excess = dev - scale
        if excess > worst:
            worst, where = excess, (z, eps)
    measured = math.exp(min(worst, 700.0))
    detail = f"worst at z={where[0]}, 1/eps={complex(1 / where[1]):.4g}; log ratio {worst:.4g}"
    return [CheckResult(f"dominant-pole deviation / error scale [{form}]", measured <= constant, measured, constant, detail)]


def _g_ratios(grid):
    g1s, g2s, g3s = [], [], []
    for n, m, x in grid:
        p = asymptotics.MajorArcPoint(n, m, x)
        g1 = asymptotics.g_integrals(p, 1)
        g2 = asymptotics.g_integrals(p, 2)
        g3 = asymptotics.g_integrals(p, 3)
        g1s.append(abs(g1) / p.beta**4)
        g2s.append(abs(g2) / abs(g1))
        g3s.append(abs(g3) * math.pi**3 / abs(p.eps) ** 3)
    return max(g1s), max(g2s), max(g3s)


def _log_range_grid(ns, xs, ms=(1, 2, 3)):
    out = []
    for n in ns:
        beta = math.pi * math.sqrt(2 / n)
        for m in ms:
            if m == 1 or m <= math.log(n) / (6 * beta):
                out.extend((n, m, x) for x in xs)
    return tuple(out)


G_CALIBRATION_GRID = _log_range_grid((100, 200, 400), (0.0, 0.5, 1.0))
G_ASSERT_GRID = _log_range_grid((300, 800, 1600), (0.25, 0.75))


def g_bounds(grid=G_ASSERT_GRID) -> list[CheckResult]:
    r1, r2, r3 = _g_ratios(grid)
    s = calibration.SLACK
    return [
        CheckResult("|g_m1| / beta^4 bounded", r1 <= s * calibration.G1, r1, s * calibration.G1),
        CheckResult("|g_m2| / |g_m1| bounded", r2 <= s * calibration.G2, r2, s * calibration.G2),
        CheckResult("|g_m3| pi^3 / |eps|^3 bounded", r3 <= s * calibration.G3, r3, s * calibration.G3),
    ]


def residue_asymptotic_check() -> list[CheckResult]:
    worst = 0.0
    for eps in (0.2, 0.1, 0.15 * (1 + 0.4j), 0.05 * (1 - 0.3j)):
        exact = asymptotics.residue_exact(eps)
        approx = asymptotics.residue_asymptotic(eps)
        worst = max(worst, float(abs(exact / approx - 1)))
    return [CheckResult("eta quotient vs residue asymptotic (Re 1/eps >= 5)", worst <= 1e-6, worst, 1e-6)]


def fm_major(n: int = 400, m: int = 2, prescription: str = "average") -> list[CheckResult]:
    p = asymptotics.MajorArcPoint(n, m, 0.0)
    approx = asymptotics.fm_major_approx(p)
    num = circle_method.fm_numeric(p.tau, m, prescription=prescription)
    rel = abs(complex(mpmath.mpc(num) / approx.value) - 1)
    return [CheckResult(f"fm_numeric vs major-arc form at n={n}, m={m} [{prescription}]", rel <= 1e-2, rel, 1e-2)]


# ---------------------------------------------------------------------------
# away from q = 1


PQ_CALIBRATION_GRID = tuple((n, m) for n in (100, 400, 1600) for m in (1, 2, 5))
PQ_ASSERT_GRID = tuple((n, m) for n in (300, 900, 2500) for m in (1, 3, 7))


def pq_bound(grid=PQ_ASSERT_GRID, samples: int = 200) -> list[CheckResult]:
    worst = -math.inf
    for n, m in grid:
        beta = math.pi * math.sqrt(2 / n)
        xs = np.linspace(1.0, math.pi * m ** (1 / 3) / beta, samples)
        tau = beta * m ** (-1 / 3) * xs / (2 * math.pi) + 1j * beta / (2 * math.pi)
        logp = float(np.max(np.log(np.abs(numeric.partition_function_value(tau)))))
        worst = max(worst, logp - asymptotics.p_q_bound(n, m, 1.0))
    bound = calibration.PQ_LOG + math.log(calibration.SLACK)
    return [CheckResult("log|P(q)| - log bound on the error arc", worst <= bound, worst, bound)]


AWAY_CALIBRATION_GRID = tuple((n, m) for n in (100, 200) for m in (1, 2, 3))
AWAY_ASSERT_GRID = tuple((n, m) for n in (300, 400) for m in (1, 2, 3))


def away_bound(grid=AWAY_ASSERT_GRID, samples: int = 40, prescription: str = "average") -> list[CheckResult]:
    spec = circle_method.QuadratureSpec(rtol=1e-8)
    worst = -math.inf
    for n, m in grid:
        beta = math.pi * math.sqrt(2 / n)
        c = m ** (-1 / 3)
        xs = np.linspace(1.0, math.pi / (beta * c), samples)
        taus = 1j * beta * (1 + 1j * xs * c) / (2 * math.pi)
        fm = circle_method.fm_numeric_many(taus, m, spec, prescription)
        worst = max(worst, float(np.max(np.log(np.abs(fm)))) - asymptotics.f_away_bound(n, m))
    bound = calibration.AWAY_LOG + math.log(calibration.SLACK)
    return [CheckResult(f"log|f_m| - log bound on the error arc [{prescription}]", worst <= bound, worst, bound)]


# ---------------------------------------------------------------------------
# asymptotics against the exact table


def theorem1(prescription: str = "average", table=None) -> list[CheckResult]:
    if table is None:
        table = fourier_extract.b_table(2000, 40, prescription=prescription)
    out = []
    for m in (1, 2, 3):
        ratios = {}
        for n in (500, 2000):
            exact = _frac_to_mp(table[m, n].imag)
            main = mpmath.im(asymptotics.theorem1_main(m, n).value)
            ratios[n] = float(exact / main)
        ok = 0.8 <= ratios[500] <= 1.2 and abs(ratios[2000] - 1) < abs(ratios[500] - 1)
        out.append(
            CheckResult(
                f"Im b({m},n) / theorem main term [{prescription}]",
                ok,
                ratios[500],
                1.0,
                f"ratio(500)={ratios[500]:.4f} ratio(2000)={ratios[2000]:.4f}, band [0.8, 1.2]",
            )
        )
    return out


def major_arc_deviation(d: circle_method.ArcDecomposition) -> float:
    """``|M / main - 1| sqrt(n)`` for an arc decomposition with ``m = 1``."""
    n = d.metadata["n"]
    main = asymptotics.theorem1_main(d.metadata["m"], n).value
    return abs(complex(mpmath.mpc(d.M) * mpmath.exp(d.log_scale) / main) - 1) * math.sqrt(n)


def wright(prescription: str = "average") -> list[CheckResult]:
    table = fourier_extract.b_table(50, 4, prescription=prescription)
    spec = circle_method.QuadratureSpec(rtol=1e-9)
    worst = 0.0
    for m in range(1, 5):
        for n in (5, 20, 35, 50):
            d = circle_method.wright_coefficient(m, n, spec, prescription=prescription)
            exact = _frac_to_mp(table[m, n].imag)
            worst = max(worst, float(abs(mpmath.im(d.unscaled()[2]) / exact - 1)))
    out = [CheckResult(f"Wright total vs exact b(m,n), n <= 50, m = 1..4 [{prescription}]", worst <= 1e-4, worst, 1e-4)]

    spec = circle_method.QuadratureSpec(rtol=1e-7)
    arcs = {n: circle_method.wright_coefficient(1, n, spec, prescription=prescription) for n in (100, 200, 400, 800)}
    ratio = {n: abs(d.E) / abs(d.M) for n, d in arcs.items() if n <= 400}
    c = -math.log(ratio[100]) / 10.0
    ok = all(ratio[n] <= math.exp(-c * math.sqrt(n)) for n in (200, 400))
    worst_em = max(math.log(ratio[n]) + c * math.sqrt(n) for n in (200, 400))
    out.append(
        CheckResult(
            f"|E|/|M| <= exp(-c sqrt n), c fitted at n = 100 [{prescription}]",
            ok,
            worst_em,
            0.0,
            f"c={c:.4f}; " + ", ".join(f"n={n}: {r:.3e}" for n, r in ratio.items()),
            {"ratio": ratio, "c": c},
        )
    )

    dev = {n: major_arc_deviation(d) for n, d in arcs.items()}
    bound = calibration.SLACK * calibration.M_CLOSED_FORM
    worst_m = max(dev[n] for n in (200, 400, 800))
    out.append(
        CheckResult(
            f"|M / major-arc form - 1| sqrt(n) bounded, n in {{200, 400, 800}} [{prescription}]",
            worst_m <= bound,
            worst_m,
            bound,
            ", ".join(f"n={n}: {v:.4g}" for n, v in dev.items()),
        )
    )
    return out


def em_decay_companion(em: CheckResult) -> CheckResult:
    """Exponential decay of ``|E|/|M|`` with the fitted rate relaxed by ``SLACK``.

    Takes the ``|E|/|M|`` result of :func:`wright`; no new quadrature is run.
    """
    ratio, c = em.extra["ratio"], em.extra["c"]
    rate = c / calibration.SLACK
    worst = max(math.log(ratio[n]) + rate * math.sqrt(n) for n in (200, 400))
    return CheckResult(
        "companion: |E|/|M| <= exp(-(c / SLACK) sqrt n)" + em.name[em.name.rfind(" [") :],
        worst <= 0,
        worst,
        0.0,
        ", ".join(f"n={n}: log ratio / sqrt n = {math.log(r) / math.sqrt(n):.4f}" for n, r in ratio.items()),
    )


def fixed_z(corrected: bool = False) -> list[CheckResult]:
    coeffs = fourier_extract.fixed_z_one_third_product(2000)
    ratios = {}
    with mpmath.workdps(30):
        for n in (1000, 2000):
            a = -3 * mpmath.sqrt(3) * coeffs[n]
            form = asymptotics.fixed_z_asymptotic_corrected if corrected else asymptotics.fixed_z_asymptotic
            ratios[n] = float(a / mpmath.mpf(form(1, 3, n)))
    ok = abs(ratios[1000] - 1) <= 0.25 and abs(ratios[2000] - 1) < abs(ratios[1000] - 1)
    label = "corrected constant" if corrected else "displayed constant"
    return [
        CheckResult(
            f"a_(1,3)(n) / fixed-z profile [{label}]",
            ok,
            ratios[1000],
            1.0,
            f"ratio(1000)={ratios[1000]:.4f} ratio(2000)={ratios[2000]:.4f}, band 25%",
        )
    ]


SUITES = {
    "exact-oracles": exact_oracles,
    "table-invariants": table_invariants,
    "principal-value": principal_value,
    "residue-identity": residue_identity,
    "euler": euler_integrals,
    "sech": sech_expansion,
    "bessel-series": bessel_series,
    "bessel-main": bessel_main_term,
    "ps-scaling": ps_scaling,
    "dominant-pole": dominant_pole,
    "residue-asymptotic": residue_asymptotic_check,
    "g-bounds": g_bounds,
    "pq-bound": pq_bound,
    "away-bound": away_bound,
    "fm-major": fm_major,
}


def run_suites(names=None, progress=None) -> list[CheckResult]:
    results = []
    for name in names or SUITES:
        if progress:
            progress(name)
        results.extend(SUITES[name]())
    return results
