"""Exact Fourier coefficients ``b(m, n)`` of ``f = theta(z)^4 / (eta^9 theta(2z))``.

Two independent exact routes are provided.

``method="product"``
    Build ``h = (1 - zeta^-2) f`` as a (q, zeta) grid from product factors,
    then sum ``h`` along zeta with stride 2 (the two geometric expansions of
    ``1 / (1 - zeta^-2)``).

``method="appell"``
    Write ``eta^3 / theta(2z)`` as an Appell-Lerch sum, so that
    ``f = i zeta^3 S^4 E (A + 1/(1 - zeta^2))`` with
    ``S = sum_k (-1)^k zeta^k q^(k(k+1)/2)``, ``E = prod (1-q^n)^-12`` and
    ``A`` the sparse ``n != 0`` part.  Only the constant pole term depends on
    the expansion side, and each ``b(m, .)`` is one big-integer product.

The expansion side is chosen by ``prescription``: ``"below"`` expands in
``|zeta| > 1`` (contour passing below ``z = 1/2``), ``"above"`` in ``|zeta| < 1``,
and ``"average"`` is their mean, the principal-value coefficient.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Literal

import mpmath
import numpy as np

from . import _intpoly
from .errors import InsufficientSupportError, OutOfRangeError
from .qseries import (
    GaussianRational,
    I,
    QSeries,
    ZetaPoly,
    eta_series,
    series_invert,
    series_mul,
    theta_series,
)

__all__ = [
    "FORMAT_VERSION",
    "HSeries",
    "CoeffTable",
    "h_series",
    "h_series_ring",
    "b_table",
    "coefficient_query",
    "generating_value",
    "fixed_z_coefficients",
    "fixed_z_one_third_product",
]

FORMAT_VERSION = 1

Prescription = Literal["average", "below", "above"]
PRESCRIPTIONS = ("average", "below", "above")


# ---------------------------------------------------------------------------
# h = (1 - zeta^-2) f


@dataclass(frozen=True)
class HSeries:
    """``h = -i * H`` with ``H[n, j]`` the integer coefficient of ``q^n zeta^(j - center)``."""

    N: int
    H: np.ndarray
    center: int

    def coefficient(self, m: int, n: int) -> GaussianRational:
        return GaussianRational._make(0, -self.raw(m, n), 1)

    def raw(self, m: int, n: int) -> int:
        j = m + self.center
        if not 0 <= n <= self.N:
            raise OutOfRangeError(f"order {n} outside 0..{self.N}")
        if 0 <= j < self.H.shape[1]:
            return int(self.H[n, j])
        return 0

    def support(self, n: int) -> tuple[int, int] | None:
        nz = np.nonzero(self.H[n])[0]
        if nz.size == 0:
            return None
        return int(nz[0]) - self.center, int(nz[-1]) - self.center

    def max_support(self) -> int:
        """Largest ``|m|`` with ``h(m, n) != 0`` for some stored ``n``."""
        nz = np.nonzero(np.any(self.H != 0, axis=0))[0]
        if nz.size == 0:
            return 0
        return int(max(abs(nz[0] - self.center), abs(nz[-1] - self.center)))

    @property
    def series(self) -> QSeries:
        coeffs = []
        for n in range(self.N + 1):
            row = self.H[n]
            nz = np.nonzero(row)[0]
            coeffs.append(
                ZetaPoly._wrap(
                    {2 * (int(j) - self.center): GaussianRational._make(0, -int(row[j]), 1) for j in nz}
                )
            )
        return QSeries(coeffs, 0, self.N)


def _support_bound(N: int) -> int:
    k = 0
    while (k + 1) * (k + 2) // 2 <= N:
        k += 1
    return 2 * N + 4 * (k + 1) + 1


def h_series(N: int, M: int | None = None) -> HSeries:
    """``h`` to ``q^N`` via ``H = zeta S^4 prod(1-q^n)^-10 / prod (1-zeta^2 q^n)(1-zeta^-2 q^n)``.

    ``M`` bounds the zeta-support; the construction refuses (rather than
    truncating) if the true support would exceed it.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    need = _support_bound(N)
    if M is not None and M < need:
        s4 = _intpoly.jtp_fourth_power(N)
        actual = 2 * N + max(s4.center, s4.width - 1 - s4.center) + 1
        if actual > M:
            raise InsufficientSupportError(
                f"zeta-support of h up to order {N} reaches {actual} > bound {M}"
            )
    s4 = _intpoly.jtp_fourth_power(N)
    half = max(s4.center, s4.width - 1 - s4.center) + 2 * N + 2
    width = 2 * half + 1
    A = np.zeros((N + 1, width), dtype=object)
    A[:, :] = 0
    # zeta * S^4
    lo = half - s4.center + 1
    A[:, lo : lo + s4.width] = s4.data.astype(object)
    # divide by (1 - zeta^2 q^k)(1 - zeta^-2 q^k)
    for k in range(1, N + 1):
        for n in range(k, N + 1):
            A[n, 2:] += A[n - k, :-2]
        for n in range(k, N + 1):
            A[n, :-2] += A[n - k, 2:]
    # multiply by prod (1 - q^n)^-10, column by column
    e10 = _intpoly.inverse_eta_power(10, N)
    cols = np.nonzero(np.any(A != 0, axis=0))[0]
    for j in cols:
        A[:, j] = _intpoly.mul(e10, list(A[:, j]), N)
    return HSeries(N, A, half)


def h_series_ring(N: int) -> QSeries:
    """``h`` computed with generic :class:`QSeries` arithmetic (slow; small N only).

    ``theta(2z) / (1 - zeta^-2) = i zeta q^(1/8) U`` with
    ``U = prod_{n>=1} (1-q^n)(1-zeta^2 q^n)(1-zeta^-2 q^n)``, a unit with ``U[0] = 1``.
    """
    U = QSeries.one(N)
    for n in range(1, N + 1):
        for poly in (ZetaPoly.scalar(-1), ZetaPoly.monomial(4, -1), ZetaPoly.monomial(-4, -1)):
            U = series_mul(U, QSeries.from_sparse({0: 1, n: poly}, N))
    num = theta_series(N, 1) ** 4
    den = series_mul(eta_series(N) ** 9, U)
    out = series_mul(num, series_invert(den))
    # divide by i zeta q^(1/8)
    return out.scale(-I).shift_zeta(-2).with_offset(out.offset - Fraction(1, 8))


# ---------------------------------------------------------------------------
# coefficient table


@dataclass
class CoeffTable:
    """Exact ``b(m, n)`` for ``|m| <= M_max``, ``0 <= n <= N_max``."""

    N_max: int
    M_max: int
    values: np.ndarray  # object array of GaussianRational, row index m + M_max
    metadata: dict = field(default_factory=dict)

    def __getitem__(self, key) -> GaussianRational:
        m, n = key
        return coefficient_query(self, m, n)

    @property
    def m_values(self) -> range:
        return range(-self.M_max, self.M_max + 1)

    def row(self, m: int) -> list[GaussianRational]:
        if abs(m) > self.M_max:
            raise OutOfRangeError(f"m = {m} outside |m| <= {self.M_max}")
        return list(self.values[m + self.M_max])

    def imag_row(self, m: int) -> list[Fraction]:
        return [v.imag for v in self.row(m)]

    def check_invariants(self, h: HSeries | None = None, mirror: "CoeffTable | None" = None) -> list[str]:
        """Return a list of violated invariants (empty when all hold).

        Oddness in ``z`` swaps the expansion side, so antisymmetry
        ``b(-m, n) = -b(m, n)`` is checked within an ``"average"`` table, and
        across tables (``b(-m, n) = -b'(m, n)`` with ``b'`` from ``mirror``,
        the opposite side) for one-sided tables.
        """
        bad = []
        M, N = self.M_max, self.N_max
        side = self.metadata.get("prescription", "average")
        other = self if side == "average" else mirror
        for m in range(0, M + 1):
            for n in range(N + 1):
                v = self.values[m + M, n]
                if other is not None and self.values[-m + M, n] != -other[m, n]:
                    bad.append(f"antisymmetry fails at ({m},{n})")
                a, b, d = v.parts
                if a != 0:
                    bad.append(f"nonzero real part at ({m},{n})")
                if 2 % d != 0:
                    bad.append(f"denominator {d} does not divide 2 at ({m},{n})")
        if h is not None:
            for m in range(-M, M - 1):
                for n in range(min(N, h.N) + 1):
                    lhs = self.values[m + M, n] - self.values[m + 2 + M, n]
                    if lhs != h.coefficient(m, n):
                        bad.append(f"telescoping fails at ({m},{n})")
        return bad

    # -- output
    def to_csv(self, stream=None) -> str:
        buf = io.StringIO() if stream is None else stream
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["m", "n", "im_numerator", "im_denominator"])
        for m in self.m_values:
            for n, v in enumerate(self.values[m + self.M_max]):
                im = v.imag
                writer.writerow([m, n, im.numerator, im.denominator])
        return buf.getvalue() if stream is None else ""

    def to_json(self) -> dict:
        rows = []
        for m in self.m_values:
            coeffs = []
            for v in self.values[m + self.M_max]:
                if v.is_zero():
                    coeffs.append([])
                else:
                    re, im = v.real, v.imag
                    coeffs.append([[0, re.numerator, re.denominator, im.numerator, im.denominator]])
            rows.append({"m": m, "offset_num": 0, "offset_den": 24, "N": self.N_max, "coeffs": coeffs})
        return {
            "format_version": FORMAT_VERSION,
            "N_max": self.N_max,
            "M_max": self.M_max,
            "metadata": self.metadata,
            "rows": rows,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "CoeffTable":
        N, M = doc["N_max"], doc["M_max"]
        values = np.empty((2 * M + 1, N + 1), dtype=object)
        for row in doc["rows"]:
            m = row["m"]
            for n, entry in enumerate(row["coeffs"]):
                if entry:
                    _, rn, rd, im_n, im_d = entry[0]
                    values[m + M, n] = GaussianRational(Fraction(rn, rd), Fraction(im_n, im_d))
                else:
                    values[m + M, n] = GaussianRational._make(0, 0, 1)
        return cls(N, M, values, dict(doc.get("metadata", {})))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"), sort_keys=True)


def coefficient_query(table: CoeffTable, m: int, n: int) -> GaussianRational:
    if abs(m) > table.M_max or not 0 <= n <= table.N_max:
        raise OutOfRangeError(
            f"(m, n) = ({m}, {n}) outside |m| <= {table.M_max}, 0 <= n <= {table.N_max}"
        )
    return table.values[m + table.M_max, n]


def _stride2_sums(H: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per row: ``up[j] = sum_{k>=0} H[j+2k]`` and ``down[j] = sum_{k>=1} H[j-2k]``."""
    W = H.shape[1]
    up = np.zeros_like(H)
    down = np.zeros_like(H)
    up[:, :] = 0
    down[:, :] = 0
    for j in range(W - 1, -1, -1):
        up[:, j] = H[:, j] + (up[:, j + 2] if j + 2 < W else 0)
    for j in range(W):
        down[:, j] = (H[:, j - 2] + down[:, j - 2]) if j >= 2 else 0
    return up, down


def _table_from_h(h: HSeries, M_max: int, prescription: str) -> np.ndarray:
    N, W = h.N, h.H.shape[1]
    pad = M_max + 2
    Hp = np.zeros((N + 1, W + 2 * pad), dtype=object)
    Hp[:, :] = 0
    Hp[:, pad : pad + W] = h.H
    center = h.center + pad
    up, down = _stride2_sums(Hp)
    out = np.empty((2 * M_max + 1, N + 1), dtype=object)
    for m in range(-M_max, M_max + 1):
        j = m + center
        # b = -i * (sum), numerators of Im b are -(sum)
        if prescription == "below":
            col, den = [-int(x) for x in up[:, j]], 1
        elif prescription == "above":
            col, den = [int(x) for x in down[:, j]], 1
        else:
            col, den = [-int(a) + int(b) for a, b in zip(up[:, j], down[:, j])], 2
        out[m + M_max] = [GaussianRational._make(0, c, den) for c in col]
    return out


def _appell_terms(N: int, zmin: int, zmax: int) -> list[tuple[int, int, int]]:
    """Terms ``(q-exponent, zeta-exponent, sign)`` of the ``n != 0`` Appell-Lerch part."""
    terms = []
    n = 1
    while n * (n + 1) // 2 <= N:
        base, sign = n * (n + 1) // 2, (-1 if n % 2 else 1)
        k = 0
        while base + n * k <= N and 2 * k <= zmax:
            if 2 * k >= zmin:
                terms.append((base + n * k, 2 * k, sign))
            k += 1
        n += 1
    j = 1
    while j * (j - 1) // 2 + j <= N:
        base, sign = j * (j - 1) // 2, (1 if j % 2 else -1)
        k = 1
        while base + j * k <= N and -2 * k >= zmin:
            if -2 * k <= zmax:
                terms.append((base + j * k, -2 * k, sign))
            k += 1
        j += 1
    return terms


def _kernel_multipliers(N: int, ms: Iterable[int], prescription: str) -> tuple[np.ndarray, int]:
    """``D[n, i]`` with ``b(ms[i], n) = i * [q^n](E * D[:, i]) / den``."""
    ms = list(ms)
    s4 = _intpoly.jtp_fourth_power(N)
    S = s4.data
    hw = s4.width
    D = np.zeros((N + 1, len(ms)), dtype=np.int64)
    targets = np.array([m - 3 for m in ms], dtype=np.int64)
    # Appell-Lerch part: zeta^(m-3) of S^4 * zeta^ze q^qa
    lo_e = -s4.center
    hi_e = hw - 1 - s4.center
    zmin = int(targets.min()) - hi_e
    zmax = int(targets.max()) - lo_e
    for qa, ze, sign in _appell_terms(N, zmin, zmax):
        idx = targets - ze + s4.center
        ok = (idx >= 0) & (idx < hw)
        if not ok.any():
            continue
        cols = np.nonzero(ok)[0]
        D[qa:, cols] += sign * S[: N + 1 - qa, idx[cols]]
    # pole term 1/(1 - zeta^2); pad so every needed column index is in range
    padw = int(np.abs(targets).max()) + 4
    Sp = np.zeros((N + 1, hw + 2 * padw), dtype=np.int64)
    Sp[:, padw : padw + hw] = S
    up, down = _stride2_sums(Sp)
    cols = targets + s4.center + padw
    # below: -sum_{k>=1} S4[t + 2k]; above: sum_{k>=0} S4[t - 2k]
    below = -up[:, cols + 2]
    above = Sp[:, cols] + down[:, cols]
    if prescription == "below":
        return D + below, 1
    if prescription == "above":
        return D + above, 1
    return 2 * D + below + above, 2


def _kernel_row(E: list[int], col: np.ndarray, N: int, den: int) -> list[GaussianRational]:
    X = _intpoly.mul(E, [int(x) for x in col], N)
    return [GaussianRational._make(0, x, den) for x in X]


def b_table(
    N_max: int,
    M_max: int | None = None,
    prescription: Prescription = "average",
    method: Literal["appell", "product"] = "appell",
    h: HSeries | None = None,
    threads: int = 1,
) -> CoeffTable:
    """Exact coefficient table.

    ``M_max`` defaults to the zeta-support of ``h`` up to ``N_max`` plus 16.
    ``threads`` parallelizes over rows of ``m``; output does not depend on it.
    """
    if prescription not in PRESCRIPTIONS:
        raise ValueError(f"prescription must be one of {PRESCRIPTIONS}")
    if N_max < 0:
        raise ValueError("N_max must be >= 0")
    if M_max is None:
        M_max = _support_bound(N_max) + 16
    if method == "product":
        if h is None:
            h = h_series(N_max)
        if h.N < N_max:
            raise InsufficientSupportError(f"h computed to order {h.N} < N_max = {N_max}")
        hh = HSeries(N_max, h.H[: N_max + 1], h.center) if h.N > N_max else h
        values = _table_from_h(hh, M_max, prescription)
    elif method == "appell":
        ms = list(range(-M_max, M_max + 1))
        D, den = _kernel_multipliers(N_max, ms, prescription)
        E = _intpoly.inverse_eta_power(12, N_max)
        values = np.empty((len(ms), N_max + 1), dtype=object)
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                rows = list(pool.map(lambda i: _kernel_row(E, D[:, i], N_max, den), range(len(ms))))
        else:
            rows = [_kernel_row(E, D[:, i], N_max, den) for i in range(len(ms))]
        for i, row in enumerate(rows):
            values[i] = row
        # multiply by the i prefactor honestly: rows hold X/den, b = i * X/den
        # (already encoded as imaginary parts above)
    else:
        raise ValueError(f"unknown method {method!r}")
    meta = {
        "prescription": prescription,
        "method": method,
        "N_max": N_max,
        "M_max": M_max,
        "format_version": FORMAT_VERSION,
    }
    return CoeffTable(N_max, M_max, values, meta)


def generating_value(table: CoeffTable, m: int, q: complex) -> complex:
    """``sum_n b(m, n) q^n`` from the stored rows."""
    row = table.row(m)
    total = 0j
    qn = 1 + 0j
    for v in row:
        if not v.is_zero():
            total += complex(v) * qn
        qn *= q
    return total


# ---------------------------------------------------------------------------
# fixed z = h/k


def _cyclic_mul(a: list[list[int]], b: list[list[int]], N: int) -> list[list[int]]:
    k = len(a)
    out = [[0] * (N + 1) for _ in range(k)]
    for r in range(k):
        if not any(a[r]):
            continue
        for s in range(k):
            if not any(b[s]):
                continue
            prod = _intpoly.mul(a[r], b[s], N)
            t = (r + s) % k
            out[t] = [x + y for x, y in zip(out[t], prod)]
    return out


def fixed_z_coefficients(h: int, k: int, N: int, dps: int | None = None) -> list:
    """Coefficients ``a(n)`` of ``f(h/k; tau) = sum a(n) q^n`` for ``n <= N``.

    Exact integer components in ``Z[x]/(x^k - 1)`` with ``zeta = x^h``; only the
    last step (evaluating at ``x = e^(2 pi i/k)``) is done in mpmath.
    Returns mpmath ``mpc`` values.
    """
    if math.gcd(h, k) != 1 or not 0 < h or 2 * h % k == 0:
        raise ValueError("need gcd(h, k) = 1 and zeta^2 != 1")
    # S(zeta) components
    S = [[0] * (N + 1) for _ in range(k)]
    j = 0
    while True:
        added = False
        for jj in (j, -j - 1):
            e = jj * (jj + 1) // 2
            if e <= N:
                S[(h * jj) % k][e] += -1 if jj % 2 else 1
                added = True
        if not added:
            break
        j += 1
    S2 = _cyclic_mul(S, S, N)
    S4 = _cyclic_mul(S2, S2, N)
    A = [[0] * (N + 1) for _ in range(k)]
    for qa, ze, sign in _appell_terms(N, -2 * N - 2, 2 * N + 2):
        A[(h * ze) % k][qa] += sign
    T = _cyclic_mul(S4, A, N)
    E = _intpoly.inverse_eta_power(12, N)
    T = [_intpoly.mul(E, t, N) for t in T]
    U = [_intpoly.mul(E, u, N) for u in S4]
    biggest = max(max((abs(x) for x in row), default=0) for row in T + U)
    prec = dps or max(30, int(biggest.bit_length() * 0.302) + 30)
    with mpmath.workdps(prec):
        x = mpmath.expjpi(mpmath.mpf(2) / k)
        zeta = x**h
        c0 = 1 / (1 - zeta**2)
        pref = mpmath.mpc(0, 1) * zeta**3
        powers = [x**r for r in range(k)]
        out = []
        for n in range(N + 1):
            acc = mpmath.mpc(0)
            for r in range(k):
                if T[r][n] or U[r][n]:
                    acc += powers[r] * (T[r][n] + c0 * U[r][n])
            out.append(+(pref * acc))
    return out


def fixed_z_one_third_product(N: int) -> list[int]:
    """Integer ``c(n)`` with ``f(1/3; tau) = -3 sqrt(3) sum c(n) q^n``.

    ``c`` is the expansion of ``prod (1 - q^(3n))^3 / (1 - q^n)^9``.
    """
    num = [0] * (N + 1)
    for e, s in _pentagonal(N // 3):
        num[3 * e] = s
    num = _intpoly.power(num, 3, N)
    return _intpoly.mul(num, _intpoly.inverse_eta_power(9, N), N)


def _pentagonal(N: int):
    from .qseries import pentagonal_exponents

    return pentagonal_exponents(N)
