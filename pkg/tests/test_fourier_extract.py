import json
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from etatheta import circle_method, fourier_extract
from etatheta.errors import InsufficientSupportError, OutOfRangeError
from etatheta.fourier_extract import (
    FORMAT_VERSION,
    PRESCRIPTIONS,
    CoeffTable,
    b_table,
    coefficient_query,
    fixed_z_coefficients,
    fixed_z_one_third_product,
    generating_value,
    h_series,
    h_series_ring,
)
from etatheta.qseries import I, GaussianRational, ZetaPoly, residue_series


def brute_force_b(N: int, M: int, prescription: str) -> dict:
    """Expand ``1 / (1 - zeta^-2)`` by hand around ``h`` from the generic ring route."""
    h = h_series_ring(N)
    out = {}
    for n in range(N + 1):
        poly = h.coeffs[n]
        coeff = {e // 2: c for e, c in poly.items()}
        for m in range(-M, M + 1):
            below = sum((coeff.get(m + 2 * k, GaussianRational(0)) for k in range(0, 2 * N + 8)), GaussianRational(0))
            above = -sum((coeff.get(m - 2 * k, GaussianRational(0)) for k in range(1, 2 * N + 8)), GaussianRational(0))
            val = {"below": below, "above": above, "average": (below + above) * GaussianRational(Fraction(1, 2))}
            out[m, n] = val[prescription]
    return out


@pytest.mark.parametrize("prescription", PRESCRIPTIONS)
def test_table_matches_brute_force(prescription):
    N, M = 6, 8
    oracle = brute_force_b(N, M, prescription)
    table = b_table(N, M, prescription)
    assert all(table[m, n] == oracle[m, n] for m in range(-M, M + 1) for n in range(N + 1))


@pytest.mark.parametrize("prescription", PRESCRIPTIONS)
def test_two_exact_routes_agree(prescription):
    a = b_table(30, 20, prescription, method="appell")
    b = b_table(30, 20, prescription, method="product")
    assert (a.values == b.values).all()


@pytest.mark.parametrize(
    "prescription, m, expected",
    [
        ("average", 1, [3, 35, 273, 1625, 8170, 36150]),
        ("average", 2, [-4, -56, -456, -2808, -14408, -64760]),
        ("below", 1, [-1, -29, -303, -2215, -12886, -64074]),
        ("above", 1, [7, 99, 849, 5465, 29226, 136374]),
    ],
)
def test_frozen_low_order_values(prescription, m, expected):
    # frozen from the brute-force expansion above
    table = b_table(5, 4, prescription)
    assert table.imag_row(m) == [Fraction(v) for v in expected]
    assert all(v.real == 0 for v in table.row(m))


def test_h_leading_coefficient():
    # -i (zeta^(1/2) - zeta^(-1/2))^4 / zeta
    h = h_series(3)
    assert [h.coefficient(m, 0) for m in range(-4, 3)] == [GaussianRational(0, c) for c in (0, -1, 4, -6, 4, -1, 0)]
    ring = h_series_ring(3)
    assert ring.coeffs[0] == ZetaPoly({-6: -I, -4: 4 * I, -2: -6 * I, 0: 4 * I, 2: -I})


def test_h_routes_agree():
    N = 8
    h, ring = h_series(N), h_series_ring(N)
    for n in range(N + 1):
        lo, hi = h.support(n) or (0, -1)
        ref = {e // 2: c for e, c in ring.coeffs[n].items()}
        for m in range(lo - 2, hi + 3):
            assert h.coefficient(m, n) == ref.get(m, GaussianRational(0))


def test_h_purely_imaginary(small_tables):
    h = h_series(30)
    for n in range(31):
        lo, hi = h.support(n)
        assert all(h.coefficient(m, n).real == 0 for m in range(lo, hi + 1))


def test_h_support_bound_refuses():
    with pytest.raises(InsufficientSupportError):
        h_series(20, M=5)


def test_query_examples(small_tables):
    t = small_tables["average"]
    for n in range(41):
        assert coefficient_query(t, -3, n) == -coefficient_query(t, 3, n)
    assert coefficient_query(t, 0, 5).is_zero()
    assert coefficient_query(t, 1, 0) == GaussianRational(0, 3)
    with pytest.raises(OutOfRangeError):
        coefficient_query(t, 13, 0)
    with pytest.raises(OutOfRangeError):
        coefficient_query(t, 1, 41)


@pytest.mark.parametrize("prescription", PRESCRIPTIONS)
def test_invariants(prescription, small_tables):
    table = small_tables[prescription]
    mirror = {"below": "above", "above": "below", "average": "average"}[prescription]
    assert table.check_invariants(h_series(40), small_tables[mirror]) == []


@pytest.mark.parametrize("side, other", [("below", "above"), ("above", "below")])
def test_one_sided_tables_are_mirrors(side, other, small_tables):
    a, b = small_tables[side], small_tables[other]
    assert all(a[-m, n] == -b[m, n] for m in range(13) for n in range(41))
    assert not a[0, 0].is_zero()
    assert a.check_invariants() == []
    assert a.check_invariants(mirror=a) != []


def test_prescriptions_differ_by_residue_series(small_tables):
    r = residue_series(40).integer_coefficients()
    below, above, avg = (small_tables[p] for p in ("below", "above", "average"))
    for m in range(1, 13):
        for n in range(41):
            diff = below[m, n] - above[m, n]
            assert diff == GaussianRational(0, 8 * (-1) ** m * r[n])
            assert avg[m, n] + avg[m, n] == below[m, n] + above[m, n]


@given(st.integers(0, 40), st.integers(-10, 10))
def test_telescoping_property(n, m):
    table = fourier_extract.b_table(40, 12)
    h = h_series(40)
    assert table[m, n] - table[m + 2, n] == h.coefficient(m, n)


def test_stabilization_beyond_support():
    N = 20
    h = h_series(N)
    table = b_table(N, h.max_support() + 6)
    top = h.max_support()
    for n in range(N + 1):
        for m in range(top + 1, table.M_max - 1):
            assert table[m, n] == table[m + 2, n]


def test_default_m_max_covers_support():
    h = h_series(50)
    table = b_table(50)
    assert table.M_max >= h.max_support() + 16


def test_threads_do_not_change_output():
    a = b_table(60, 15, threads=1)
    b = b_table(60, 15, threads=3)
    assert a.dumps() == b.dumps()


def test_serialization_round_trip(small_tables):
    t = small_tables["below"]
    doc = json.loads(t.dumps())
    assert doc["format_version"] == FORMAT_VERSION
    assert doc["rows"][0]["offset_den"] == 24
    back = CoeffTable.from_json(doc)
    assert (back.values == t.values).all() and back.metadata == t.metadata
    csv_text = t.to_csv()
    head, first = csv_text.splitlines()[:2]
    assert head == "m,n,im_numerator,im_denominator"
    assert first.startswith("-12,0,")


@pytest.mark.parametrize("q", [0.05, 0.25])
def test_generating_function_vs_quadrature(q):
    table = b_table(60, 2)
    tau = 1j * -math.log(q) / (2 * math.pi)
    for m in (1, 2):
        exact = generating_value(table, m, q)
        numeric = circle_method.fm_numeric(tau, m)
        assert abs(exact - numeric) <= 1e-8 * abs(exact)


# ---------------------------------------------------------------------------
# fixed z = h/k


def test_fixed_z_one_third_routes_agree():
    N = 40
    c = fixed_z_one_third_product(N)
    a = fixed_z_coefficients(1, 3, N)
    with mpmath.workdps(40):
        scale = -3 * mpmath.sqrt(3)
        for n in range(N + 1):
            assert abs(a[n] - scale * c[n]) <= 1e-25 * max(1, abs(a[n]))


def test_fixed_z_one_third_product_values():
    # prod (1 - q^(3n))^3 / (1 - q^n)^9, expanded by hand to q^3
    assert fixed_z_one_third_product(3) == [1, 9, 54, 252]


@pytest.mark.parametrize("h, k", [(1, 5), (2, 5), (1, 7)])
def test_fixed_z_matches_double_evaluation(h, k):
    from etatheta import numeric

    a = fixed_z_coefficients(h, k, 120)
    q = 0.2
    tau = 1j * -math.log(q) / (2 * math.pi)
    series = sum(complex(c) * q**n for n, c in enumerate(a))
    direct = complex(numeric.f_value(h / k, tau))
    assert abs(series - direct) <= 1e-11 * abs(direct)


def test_fixed_z_rejects_pole():
    with pytest.raises(ValueError):
        fixed_z_coefficients(1, 2, 5)
