import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from etatheta import asymptotics, numeric
from etatheta.asymptotics import (
    MajorArcPoint,
    dominant_correction,
    dominant_error_scale,
    dominant_pole_deviation,
    f_away_bound,
    f_dominant_approx,
    fixed_z_asymptotic,
    fixed_z_asymptotic_corrected,
    fm_major_approx,
    g_integrals,
    p_q_bound,
    residue_asymptotic,
    residue_exact,
    theorem1_main,
)


# ---------------------------------------------------------------------------
# parameterization


def test_major_arc_point():
    p = MajorArcPoint(n=200, m=8, x=0.5)
    assert p.beta == pytest.approx(math.pi / 10)
    assert p.eps == pytest.approx(p.beta * (1 + 0.25j))
    assert p.tau == pytest.approx(1j * p.eps / (2 * math.pi))
    assert p.on_major_arc
    assert MajorArcPoint(200, -8, 0.5).eps == p.eps
    assert not MajorArcPoint(200, 1, 2.0).on_major_arc


@pytest.mark.parametrize("kw", [dict(n=0, m=1), dict(n=10, m=0), dict(n=100, m=1, x=100.0)])
def test_major_arc_point_rejects(kw):
    with pytest.raises(ValueError):
        MajorArcPoint(**kw)


# ---------------------------------------------------------------------------
# main terms


@pytest.mark.parametrize("m, phase", [(2, math.pi / 2), (4, math.pi / 2), (1, -math.pi / 2), (3, -math.pi / 2)])
def test_theorem1_phase(m, phase):
    assert theorem1_main(m, 500).phase == phase


@given(st.integers(1, 40), st.integers(1, 10_000))
def test_theorem1_odd_in_m(m, n):
    a, b = theorem1_main(m, n), theorem1_main(-m, n)
    assert a.log_abs == b.log_abs
    assert complex(mpmath.mpc(a.value) + b.value) == pytest.approx(0, abs=1e-12 * float(abs(a.value)))


def test_theorem1_magnitude():
    n = 1000
    beta = math.pi * math.sqrt(2 / n)
    expected = beta**5 / (2**7 * math.pi**5 * (2 * n) ** 0.25) * math.exp(2 * math.pi * math.sqrt(2 * n))
    assert float(abs(theorem1_main(1, n).value)) == pytest.approx(expected, rel=1e-12)


def test_theorem1_log_space():
    est = theorem1_main(3, 10_000)
    assert math.isfinite(est.log_abs) and est.log_abs > 700
    assert mpmath.isfinite(abs(est.value))


def test_theorem1_flags():
    assert not theorem1_main(0, 500).valid
    assert theorem1_main(1, 500).valid
    assert not theorem1_main(30, 500).valid
    with pytest.raises(ValueError):
        theorem1_main(1, 0)


def test_fixed_z_forms():
    assert fixed_z_asymptotic_corrected(1, 3, 700) == pytest.approx(-2 * math.pi * fixed_z_asymptotic(1, 3, 700))
    for h, k in ((0, 3), (1, 2), (2, 4)):
        with pytest.raises(ValueError):
            fixed_z_asymptotic(h, k, 100)


# ---------------------------------------------------------------------------
# dominant pole


def test_dominant_example():
    eps = 0.15 * (1 + 0.4j)
    z = 0.2
    dps = 120
    with mpmath.workdps(dps):
        tau = 1j * mpmath.mpc(eps) / (2 * mpmath.pi)
        f = numeric.f_mp(z, tau, dps)
        dev = abs(f / f_dominant_approx(z, eps, dps=dps) - 1)
        bound = 2 * mpmath.exp(-4 * mpmath.pi**2 * mpmath.re(1 / mpmath.mpc(eps)) * 0.6)
        assert dev <= bound


def test_dominant_small_z():
    eps = 0.1 + 0.05j
    a = complex(f_dominant_approx(1e-6, eps))
    b = complex(f_dominant_approx(2e-6, eps))
    assert b / a == pytest.approx(8, rel=1e-5)


@given(st.floats(0.01, 0.49), st.floats(0.02, 0.3), st.floats(-1, 1))
def test_dominant_mirror_and_vectorized(z, re, t):
    eps = complex(re, re * t)
    w = 1 - z
    ref = f_dominant_approx(1 - w, eps)
    assert abs(f_dominant_approx(w, eps) / ref + 1) < 1e-12
    if abs(ref) < 1e300:
        assert complex(asymptotics._dominant_np(1 - w, eps)) == pytest.approx(complex(ref), rel=1e-10)


@pytest.mark.parametrize("z", [0.1, 0.25])
@pytest.mark.parametrize("r", [20, 50])
def test_dominant_deviation_real_eps(z, r):
    log_dev, log_scale = dominant_pole_deviation(z, 1 / r, "displayed")
    assert log_dev - log_scale <= math.log(10)


@pytest.mark.parametrize("z, inv_eps", [(0.2, 20 - 8j), (0.4, 20 + 0j), (0.4, 50 - 20j)])
def test_dominant_deviation_geometric(z, inv_eps):
    log_dev, log_scale = dominant_pole_deviation(z, 1 / inv_eps, "geometric")
    assert log_dev - log_scale <= math.log(10)


def test_dominant_deviation_second_order_term():
    # for z > 1/3 the next term exp(-8 pi^2 Re(1/eps)(1 - 2z)) exceeds the displayed scale
    z, r = 0.4, 20
    log_dev, log_scale = dominant_pole_deviation(z, 1 / r, "displayed")
    assert log_dev == pytest.approx(-8 * math.pi**2 * r * (1 - 2 * z), abs=0.01)
    assert log_dev > log_scale


def test_dominant_deviation_complex_eps_phase():
    # the real-part form misses the phase of exp(-4 pi^2 (1-2z)/eps)
    z, inv_eps = 0.2, 20 - 8j
    log_displayed, log_scale = dominant_pole_deviation(z, 1 / inv_eps, "displayed")
    log_complex, _ = dominant_pole_deviation(z, 1 / inv_eps, "complex")
    assert log_displayed > log_scale + 10
    assert log_complex <= log_scale + math.log(10)


def test_corrections():
    eps = 1 / (20 - 8j)
    gap = 4 * math.pi**2 * 0.6
    assert complex(dominant_correction(0.2, eps, "displayed")) == pytest.approx(1 + math.exp(-gap * 20), rel=1e-14)
    assert complex(dominant_correction(0.2, eps, "complex")) == pytest.approx(1 + cmath.exp(-gap / eps), rel=1e-14)
    assert dominant_error_scale(0.8, eps) == dominant_error_scale(0.2, eps)
    with pytest.raises(ValueError):
        dominant_correction(0.2, eps, "other")


# ---------------------------------------------------------------------------
# residue and f_m near the pole


@pytest.mark.parametrize("eps", [0.2, 0.1, 0.15 + 0.05j, 1 / (5 - 3j)])
def test_residue_asymptotic(eps):
    exact = residue_exact(eps)
    approx = residue_asymptotic(eps)
    assert float(abs(exact / approx - 1)) <= 1e-6


def test_residue_exact_vs_double():
    eps = 0.3
    tau = 1j * eps / (2 * math.pi)
    assert complex(residue_exact(eps)) == pytest.approx(4 * complex(numeric.residue_quotient(tau)), rel=1e-12)


def test_fm_major_approx_is_residue_form():
    p = MajorArcPoint(300, 2, 0.4)
    est = fm_major_approx(p)
    assert complex(est.value) == pytest.approx(1j * complex(residue_asymptotic(p.eps)), rel=1e-10)
    assert est.error_log == pytest.approx(3 * math.log(p.beta))
    q = MajorArcPoint(300, -2, 0.4)
    assert complex(fm_major_approx(q).value) == pytest.approx(-complex(est.value), rel=1e-12)


@pytest.mark.parametrize("which", [1, 2, 3])
def test_g_integrals_node_stable(which):
    p = MajorArcPoint(200, 2, 0.5)
    a = g_integrals(p, which, nodes=24)
    b = g_integrals(p, which, nodes=40)
    assert abs(a - b) <= 1e-7 * abs(a)


def test_g_ratio_bounded():
    for n in (150, 500):
        for x in (0.0, 1.0):
            p = MajorArcPoint(n, 2, x)
            assert abs(g_integrals(p, 2)) <= 0.5 * abs(g_integrals(p, 1))


def test_g_rejects_unknown_index():
    with pytest.raises(ValueError):
        g_integrals(MajorArcPoint(100, 1), 4)


# ---------------------------------------------------------------------------
# error arc bounds


def test_pq_bound_shape():
    n, m = 400, 2
    beta = math.pi * math.sqrt(2 / n)
    assert p_q_bound(n, m, 1.0) == p_q_bound(n, m, 3.0)
    limit = -0.25 * math.log(n) + (2 * math.pi / beta) * (math.pi / 12)
    assert p_q_bound(n, 10**12, 1.0) == pytest.approx(limit, rel=1e-6)
    with pytest.raises(ValueError):
        p_q_bound(n, m, 0.5)


@pytest.mark.parametrize("n, m", [(300, 1), (900, 3)])
def test_pq_bound_holds(n, m):
    beta = math.pi * math.sqrt(2 / n)
    x_max = math.pi * m ** (1 / 3) / beta
    xs = np.linspace(1.0, x_max, 200)
    eps = beta * (1 + 1j * xs * m ** (-1 / 3))
    tau = 1j * eps / (2 * math.pi)
    log_p = np.log(np.abs(numeric.partition_function_value(tau)))
    assert np.max(log_p) <= p_q_bound(n, m, 1.0)


def test_away_bound_monotone_in_m():
    assert f_away_bound(400, 1) < f_away_bound(400, 5) < f_away_bound(400, 10**9)
