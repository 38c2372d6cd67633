import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from etatheta.errors import NonUnitError, NotConvergedError, OffsetMismatchError
from etatheta.qseries import (
    I,
    GaussianRational,
    QSeries,
    ZetaPoly,
    eta_product,
    eta_series,
    evaluate_numeric,
    p_series,
    pentagonal_exponents,
    residue_series,
    series_add,
    series_from_json,
    series_invert,
    series_mul,
    series_to_json,
    theta_series,
)

N_RING = 6


def tau_for_q(q: float) -> complex:
    return 1j * -math.log(q) / (2 * math.pi)


def partitions_oracle(N: int) -> list[int]:
    """Euler's pentagonal recurrence, written independently of the package."""
    p = [1] + [0] * N
    for n in range(1, N + 1):
        total, k = 0, 1
        while True:
            g1 = k * (3 * k - 1) // 2
            if g1 > n:
                break
            sign = 1 if k % 2 else -1
            total += sign * p[n - g1]
            g2 = k * (3 * k + 1) // 2
            if g2 <= n:
                total += sign * p[n - g2]
            k += 1
        p[n] = total
    return p


def overpartition8_oracle(N: int) -> list[int]:
    """prod ((1 + q^n) / (1 - q^n))^8 by repeated multiplication of integer lists."""
    c = [1] + [0] * N
    for n in range(1, N + 1):
        for _ in range(8):
            # times (1 + q^n)
            for k in range(N, n - 1, -1):
                c[k] += c[k - n]
            # divided by (1 - q^n)
            for k in range(n, N + 1):
                c[k] += c[k - n]
    return c


# ---------------------------------------------------------------------------
# strategies

small_ints = st.integers(-5, 5)
gaussians = st.builds(
    GaussianRational,
    st.fractions(min_value=-4, max_value=4, max_denominator=3),
    st.fractions(min_value=-4, max_value=4, max_denominator=3),
)
zeta_polys = st.dictionaries(st.integers(-4, 4), st.builds(GaussianRational, small_ints, small_ints), max_size=3).map(
    ZetaPoly
)


@st.composite
def qseries(draw, N=N_RING, offset=0):
    coeffs = draw(st.lists(zeta_polys, min_size=N + 1, max_size=N + 1))
    return QSeries(coeffs, offset, N)


@st.composite
def scalar_units(draw, N=N_RING):
    c0 = draw(st.integers(1, 4)) * draw(st.sampled_from([1, -1]))
    rest = draw(st.lists(small_ints, min_size=N, max_size=N))
    return QSeries([c0] + rest, 0, N)


# ---------------------------------------------------------------------------
# Gaussian rationals


@given(gaussians, gaussians, gaussians)
def test_gaussian_field_laws(a, b, c):
    assert a + b == b + a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    if not b.is_zero():
        assert (a / b) * b == a


def test_gaussian_unit():
    assert I * I == GaussianRational(-1)
    assert complex(GaussianRational(Fraction(1, 2), 3)) == 0.5 + 3j


# ---------------------------------------------------------------------------
# examples


def test_add_examples():
    a = QSeries([1, 1], 0, 1)
    b = QSeries([0, 1], 0, 1)
    assert series_add(a, b) == QSeries([1, 2], 0, 1)
    assert series_add(a, QSeries.zero(1)) == a
    eta = eta_series(50)
    assert series_add(eta, eta).integer_coefficients() == [2 * c for c in eta.integer_coefficients()]


def test_mul_examples():
    N = 25
    geometric = QSeries([1] * (N + 1), 0, N)
    assert series_mul(QSeries([1, -1], 0, N), geometric) == QSeries.one(N)
    eta = eta_series(N)
    prod = series_mul(eta, series_invert(eta))
    assert prod == QSeries.one(N)


def test_theta_times_reflected_theta():
    th = theta_series(20)
    lhs = series_mul(th, th.reflect_zeta())
    rhs = -series_mul(th, th)
    assert lhs == rhs


def test_invert_examples():
    N = 12
    inv = series_invert(QSeries([1, -1], 0, N))
    assert inv.integer_coefficients() == [1] * (N + 1)
    assert series_invert(eta_product(10)).integer_coefficients()[10] == 42


def test_invert_non_unit():
    a = QSeries([ZetaPoly({2: 1}), 1], 0, 1)
    with pytest.raises(NonUnitError):
        series_invert(a)
    with pytest.raises(NonUnitError):
        series_invert(QSeries([0, 1], 0, 1))


def test_offset_mismatch():
    with pytest.raises(OffsetMismatchError):
        series_add(eta_series(3), theta_series(3))


@pytest.mark.parametrize("step, expected", [(0, 1), (1, -1), (2, -1), (3, 0), (4, 0), (5, 1), (7, 1), (12, -1)])
def test_eta_coefficients(step, expected):
    eta = eta_series(15)
    assert eta.offset == Fraction(1, 24)
    assert eta.integer_coefficients()[step] == expected


def test_eta_matches_brute_force_product():
    N = 30
    c = [1] + [0] * N
    for n in range(1, N + 1):
        for k in range(N, n - 1, -1):
            c[k] -= c[k - n]
    assert eta_product(N).integer_coefficients() == c
    assert [e for e, _ in pentagonal_exponents(N)] == [k for k in range(N + 1) if c[k]]


@pytest.mark.parametrize(
    "s, expected",
    [
        (1, ZetaPoly({1: I, -1: -I})),
        (2, ZetaPoly({2: I, -2: -I})),
    ],
)
def test_theta_leading_coefficient(s, expected):
    th = theta_series(10, s)
    assert th.offset == Fraction(1, 8)
    assert th.coeffs[0] == expected


@pytest.mark.parametrize("n, expected", [(0, 1), (4, 5), (10, 42), (20, 627)])
def test_p_series_examples(n, expected):
    assert p_series(25).integer_coefficients()[n] == expected


def test_p_series_matches_recurrence_oracle():
    N = 300
    assert p_series(N).integer_coefficients() == partitions_oracle(N)


@pytest.mark.parametrize("n, expected", [(0, 1), (1, 16)])
def test_residue_series_examples(n, expected):
    assert residue_series(5).integer_coefficients()[n] == expected


@pytest.mark.parametrize("N", [0, 1, 7, 40])
def test_residue_series_matches_product_oracle(N):
    assert residue_series(N).integer_coefficients() == overpartition8_oracle(N)


# ---------------------------------------------------------------------------
# properties


@given(qseries(), qseries(), qseries())
def test_ring_laws(a, b, c):
    assert series_add(a, b) == series_add(b, a)
    assert series_mul(a, b) == series_mul(b, a)
    assert series_mul(series_mul(a, b), c) == series_mul(a, series_mul(b, c))
    assert series_mul(a, series_add(b, c)) == series_add(series_mul(a, b), series_mul(a, c))


@given(scalar_units())
def test_unit_times_inverse_is_one(a):
    assert series_mul(a, series_invert(a)) == QSeries.one(a.N)


@given(st.integers(0, 40), st.integers(1, 3))
def test_theta_odd_in_zeta(N, s):
    th = theta_series(N, s)
    assert th.reflect_zeta() == -th


@given(qseries())
def test_json_round_trip(a):
    assert series_from_json(series_to_json(a)) == a


def test_json_offset_in_24ths():
    doc = series_to_json(theta_series(3))
    assert doc["offset_den"] == 24 and doc["offset_num"] == 3


# ---------------------------------------------------------------------------
# numeric rendering


def test_evaluate_one_minus_q():
    ev = evaluate_numeric(QSeries([1, -1], 0, 1), 0.17, tau_for_q(0.5), tol=None)
    assert ev.value == pytest.approx(0.5, abs=1e-14)


def test_residue_series_vs_separate_etas():
    tau = 0.1j
    N = 320
    whole = evaluate_numeric(residue_series(N), 0, tau).value
    eta = eta_series(N)
    num = evaluate_numeric(eta, 0, 2 * tau).value ** 8
    den = evaluate_numeric(eta, 0, tau).value ** 16
    assert abs(whole / (num / den) - 1) < 1e-10


@pytest.mark.parametrize("z, tau", [(0.13, 0.4j), (0.31, 0.25 + 0.5j), (0.05 + 0.02j, 0.3j)])
def test_evaluate_product_is_product_of_evaluations(z, tau):
    N = 80
    a, b = theta_series(N), eta_series(N) ** 3
    ea, eb = evaluate_numeric(a, z, tau), evaluate_numeric(b, z, tau)
    eab = evaluate_numeric(series_mul(a, b), z, tau)
    bound = ea.tail * abs(eb.value) + eb.tail * abs(ea.value) + eab.tail + 1e-13 * abs(eab.value)
    assert abs(eab.value - ea.value * eb.value) <= bound


def test_evaluate_raises_on_short_truncation():
    with pytest.raises(NotConvergedError):
        evaluate_numeric(p_series(5), 0, 0.01j, tol=1e-12)


def test_evaluate_multiprecision_matches_double():
    a = theta_series(60)
    d = evaluate_numeric(a, 0.21, 0.3j).value
    m = evaluate_numeric(a, 0.21, 0.3j, dps=40).value
    assert abs(complex(m) - d) < 1e-13 * abs(d)
