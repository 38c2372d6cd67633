import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from etatheta import numeric
from etatheta.qseries import evaluate_numeric, residue_series

TAUS = [0.5j, 0.1j, 0.02j, 0.25 + 0.3j, -0.4 + 0.05j]


def theta_oracle(z, tau):
    return -complex(mpmath.jtheta(1, mpmath.pi * z, mpmath.expjpi(tau)))


def eta_oracle(tau):
    q = mpmath.expjpi(2 * mpmath.mpmathify(tau))
    return complex(mpmath.expjpi(mpmath.mpmathify(tau) / 12) * mpmath.qp(q))


taus = st.builds(complex, st.floats(-0.5, 0.5), st.floats(0.03, 1.5))
reals = st.floats(0.01, 0.99).filter(lambda z: abs(z - 0.5) > 1e-3)


@pytest.mark.parametrize("tau", TAUS)
@pytest.mark.parametrize("z", [0.1, 0.37, 0.49, 0.2 + 0.03j])
def test_theta_vs_mpmath(z, tau):
    assert numeric.theta(z, tau) == pytest.approx(theta_oracle(z, tau), rel=1e-12)


@pytest.mark.parametrize("tau", TAUS)
def test_eta_vs_mpmath(tau):
    assert numeric.eta(tau) == pytest.approx(eta_oracle(tau), rel=1e-12)


@pytest.mark.parametrize("tau", [0.5j, 0.2j, 0.1 + 0.3j])
@pytest.mark.parametrize("z", [0.1, 0.3])
def test_series_route_matches_product_route(z, tau):
    assert numeric.theta_series_value(z, tau) == pytest.approx(complex(numeric.theta(z, tau)), rel=1e-11)
    assert numeric.eta_series_value(tau) == pytest.approx(complex(numeric.eta(tau)), rel=1e-11)


@pytest.mark.parametrize("tau", [0.3j, 0.15 + 0.2j])
def test_mp_routes(tau):
    z = 0.23
    assert complex(numeric.theta_mp(z, tau)) == pytest.approx(theta_oracle(z, tau), rel=1e-14)
    assert complex(numeric.eta_mp(tau)) == pytest.approx(eta_oracle(tau), rel=1e-14)
    assert complex(numeric.f_mp(z, tau)) == pytest.approx(complex(numeric.f_value(z, tau)), rel=1e-12)


@given(taus)
def test_eta_modular(tau):
    lhs = numeric.eta(-1 / tau)
    rhs = cmath.sqrt(-1j * tau) * numeric.eta(tau)
    assert abs(lhs - rhs) <= 1e-10 * abs(rhs)


@given(reals, taus)
def test_f_symmetries(z, tau):
    f = complex(numeric.f_value(z, tau))
    assume(abs(f) > 1e-200)
    assert complex(numeric.f_value(-z, tau)) == pytest.approx(-f, rel=1e-9)
    assert complex(numeric.f_value(z + 1, tau)) == pytest.approx(f, rel=1e-9)
    assert complex(numeric.f_value(1 - z, tau)) == pytest.approx(-f, rel=1e-9)


@given(reals, taus)
def test_theta_odd_and_antiperiodic(z, tau):
    t = complex(numeric.theta(z, tau))
    assert complex(numeric.theta(-z, tau)) == pytest.approx(-t, rel=1e-10, abs=1e-300)
    assert complex(numeric.theta(z + 1, tau)) == pytest.approx(-t, rel=1e-10, abs=1e-300)


@pytest.mark.parametrize("tau", [0.3j, 0.05j, 0.2 + 0.1j])
@pytest.mark.parametrize("m", [1, 2, 5])
def test_integrand_continuous_at_pole(tau, m):
    limit = complex(numeric.pole_limit(tau, m))
    for w in (1e-3, 1e-5, 1e-8):
        v = complex(numeric.fourier_integrand(0.5 - w, tau, m))
        assert abs(v - limit) <= 50 * w * abs(limit) + 1e-12 * abs(limit)
    assert complex(numeric.fourier_integrand(0.5, tau, m)) == limit


def test_residue_and_pole_limit():
    # f ~ Res / (z - 1/2), sin(2 pi m z) ~ (-1)^m 2 pi m (z - 1/2)
    tau, m = 0.3j, 3
    res = complex(numeric.residue_value(tau))
    assert complex(numeric.pole_limit(tau, m)) == pytest.approx((-1) ** m * 2 * math.pi * m * res, rel=1e-13)
    z = 0.5 - 1e-6
    assert complex(numeric.f_value(z, tau)) * (z - 0.5) == pytest.approx(res, rel=1e-5)


def test_residue_quotient_vs_series():
    tau = 0.25j
    series = evaluate_numeric(residue_series(200), 0, tau).value
    assert complex(numeric.residue_quotient(tau)) == pytest.approx(series, rel=1e-12)


def test_partition_function():
    tau = 0.2j
    q = cmath.exp(2j * math.pi * tau)
    assert complex(numeric.partition_function_value(tau)) == pytest.approx(complex(1 / mpmath.qp(q)), rel=1e-12)


def test_broadcasting():
    z = np.linspace(0.05, 0.45, 7)
    tau = np.array([0.2j, 0.4j])[:, None]
    out = numeric.f_value(z, tau)
    assert out.shape == (2, 7)
    assert out[1, 3] == pytest.approx(complex(numeric.f_value(z[3], 0.4j)), rel=1e-14)


def test_near_cusp_accuracy():
    # product route keeps full accuracy where the series loses digits
    tau = 0.01j
    for z in (0.2, 0.45, 0.499):
        assert numeric.theta(z, tau) == pytest.approx(theta_oracle(z, tau), rel=1e-11)
