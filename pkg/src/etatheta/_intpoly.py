"""Exact integer polynomial kernels used by the coefficient engines.

Products go through Kronecker substitution: pack coefficients into one big
integer with fixed-width slots, multiply once, unpack.  gmpy2 is used for the
big multiplication when importable, plain ``int`` otherwise.  All results are
exact; nothing here touches floating point.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

try:  # optional accelerator
    import gmpy2

    def _big(x: int):
        return gmpy2.mpz(x)

except ImportError:  # pragma: no cover - exercised only without gmpy2
    gmpy2 = None

    def _big(x: int):
        return x


# ---------------------------------------------------------------------------
# packing helpers


def _pack_uint_array(arr: np.ndarray, slot_bytes: int) -> int:
    """Pack a nonnegative int64 array into an int, ``slot_bytes`` per entry."""
    arr = np.ascontiguousarray(arr, dtype="<u8")
    if slot_bytes == 8:
        raw = arr.tobytes()
    else:
        wide = np.zeros((arr.size, slot_bytes), dtype=np.uint8)
        b = arr.view(np.uint8).reshape(arr.size, 8)
        k = min(8, slot_bytes)
        wide[:, :k] = b[:, :k]
        raw = wide.tobytes()
    return int.from_bytes(raw, "little")


def _unpack_uint_array(value: int, count: int, slot_bytes: int) -> np.ndarray:
    """Inverse of :func:`_pack_uint_array` for slots that fit in 63 bits."""
    raw = int(value).to_bytes(count * slot_bytes, "little")
    wide = np.frombuffer(raw, dtype=np.uint8).reshape(count, slot_bytes)
    out = np.zeros((count, 8), dtype=np.uint8)
    k = min(8, slot_bytes)
    out[:, :k] = wide[:, :k]
    return out.view("<u8").reshape(count).astype(np.int64)


def _pack_ints(coeffs: Sequence[int], slot_bits: int) -> int:
    """Pack nonnegative Python ints (arbitrary size)."""
    slot_bytes = (slot_bits + 7) // 8
    return int.from_bytes(
        b"".join(int(c).to_bytes(slot_bytes, "little") for c in coeffs), "little"
    ), slot_bytes


def _unpack_ints(value: int, count: int, slot_bytes: int) -> list[int]:
    raw = int(value).to_bytes(count * slot_bytes + 1, "little")
    return [
        int.from_bytes(raw[i * slot_bytes : (i + 1) * slot_bytes], "little")
        for i in range(count)
    ]


def _split_sign(coeffs: Sequence[int]) -> tuple[list[int], list[int]]:
    pos = [c if c > 0 else 0 for c in coeffs]
    neg = [-c if c < 0 else 0 for c in coeffs]
    return pos, neg


# ---------------------------------------------------------------------------
# univariate products with big coefficients


def _mul_nonneg(a: Sequence[int], b: Sequence[int], N: int) -> list[int]:
    """Product of nonnegative integer sequences truncated to length ``N+1``."""
    a = list(a[: N + 1])
    b = list(b[: N + 1])
    if not any(a) or not any(b):
        return [0] * (N + 1)
    ma = max(a)
    mb = max(b)
    terms = min(len(a), len(b))
    slot_bits = ma.bit_length() + mb.bit_length() + terms.bit_length() + 1
    pa, sb = _pack_ints(a, slot_bits)
    pb, _ = _pack_ints(b, slot_bits)
    prod = _big(pa) * _big(pb)
    out = _unpack_ints(prod, len(a) + len(b) - 1, sb)[: N + 1]
    out.extend([0] * (N + 1 - len(out)))
    return out


def mul(a: Sequence[int], b: Sequence[int], N: int) -> list[int]:
    """Exact truncated product of two signed integer power series."""
    a = [int(x) for x in a[: N + 1]]
    b = [int(x) for x in b[: N + 1]]
    a_neg_free = all(x >= 0 for x in a)
    b_neg_free = all(x >= 0 for x in b)
    if a_neg_free and b_neg_free:
        return _mul_nonneg(a, b, N)
    ap, an = _split_sign(a)
    bp, bn = _split_sign(b)
    pos = _mul_nonneg(ap, bp, N)
    cross = _mul_nonneg(ap, bn, N)
    if any(an):
        pos = [x + y for x, y in zip(pos, _mul_nonneg(an, bn, N))]
        cross = [x + y for x, y in zip(cross, _mul_nonneg(an, bp, N))]
    return [x - y for x, y in zip(pos, cross)]


def power(a: Sequence[int], e: int, N: int) -> list[int]:
    """``a**e`` truncated at ``q^N`` (``e >= 0``)."""
    result = [1] + [0] * N
    base = list(a[: N + 1]) + [0] * max(0, N + 1 - len(a))
    while e:
        if e & 1:
            result = mul(result, base, N)
        e >>= 1
        if e:
            base = mul(base, base, N)
    return result


def partitions(N: int) -> list[int]:
    """p(0..N) from Euler's pentagonal recurrence."""
    p = [0] * (N + 1)
    p[0] = 1
    for n in range(1, N + 1):
        total = 0
        j = 1
        while True:
            g1 = j * (3 * j - 1) // 2
            if g1 > n:
                break
            sign = 1 if j % 2 else -1
            total += sign * p[n - g1]
            g2 = j * (3 * j + 1) // 2
            if g2 <= n:
                total += sign * p[n - g2]
            j += 1
        p[n] = total
    return p


def inverse_eta_power(e: int, N: int) -> list[int]:
    """Coefficients of ``prod (1 - q^n)^(-e)`` for ``e >= 0``."""
    return power(partitions(N), e, N)


# ---------------------------------------------------------------------------
# bivariate (q, zeta) products with small coefficients


class Grid:
    """Dense integer array ``c[n, j]`` for ``q^n zeta^(j - center)``."""

    __slots__ = ("data", "center")

    def __init__(self, data: np.ndarray, center: int):
        self.data = data
        self.center = center

    @property
    def N(self) -> int:
        return self.data.shape[0] - 1

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def column(self, exponent: int) -> np.ndarray:
        j = exponent + self.center
        if 0 <= j < self.width:
            return self.data[:, j]
        return np.zeros(self.data.shape[0], dtype=self.data.dtype)

    def trimmed(self) -> "Grid":
        nz = np.nonzero(np.any(self.data != 0, axis=0))[0]
        if nz.size == 0:
            return Grid(self.data[:, :1].copy(), 0)
        lo, hi = nz[0], nz[-1]
        return Grid(self.data[:, lo : hi + 1].copy(), self.center - lo)


def _grid_mul_nonneg(a: np.ndarray, b: np.ndarray, N: int) -> np.ndarray:
    """Bivariate product of nonnegative int64 arrays (q rows, zeta columns)."""
    wa, wb = a.shape[1], b.shape[1]
    stride = wa + wb - 1
    amax = int(a.max(initial=0))
    bmax = int(b.max(initial=0))
    if amax == 0 or bmax == 0:
        return np.zeros((N + 1, stride), dtype=np.int64)
    terms = min(np.count_nonzero(a), np.count_nonzero(b))
    bits = amax.bit_length() + bmax.bit_length() + int(terms).bit_length() + 1
    if bits > 63:
        raise OverflowError("grid product does not fit in int64 slots")
    slot_bytes = (bits + 7) // 8
    pa = np.zeros((N + 1, stride), dtype=np.int64)
    pa[: a.shape[0], :wa] = a[: N + 1]
    pb = np.zeros((N + 1, stride), dtype=np.int64)
    pb[: b.shape[0], :wb] = b[: N + 1]
    ia = _pack_uint_array(pa.ravel(), slot_bytes)
    ib = _pack_uint_array(pb.ravel(), slot_bytes)
    prod = _big(ia) * _big(ib)
    count = (N + 1) * stride
    # slots beyond row N belong to the discarded part of the product
    prod = int(prod) & ((1 << (8 * slot_bytes * count)) - 1)
    return _unpack_uint_array(prod, count, slot_bytes).reshape(N + 1, stride)


def grid_mul(a: Grid, b: Grid) -> Grid:
    """Exact product of two (q, zeta) grids truncated at the smaller N."""
    N = min(a.N, b.N)
    ad, bd = a.data[: N + 1], b.data[: N + 1]
    ap, an = np.where(ad > 0, ad, 0), np.where(ad < 0, -ad, 0)
    bp, bn = np.where(bd > 0, bd, 0), np.where(bd < 0, -bd, 0)
    out = _grid_mul_nonneg(ap, bp, N)
    if an.any() or bn.any():
        out = out + _grid_mul_nonneg(an, bn, N)
        out = out - _grid_mul_nonneg(ap, bn, N) - _grid_mul_nonneg(an, bp, N)
    return Grid(out, a.center + b.center).trimmed()


def jtp_grid(N: int) -> Grid:
    """``S = sum_k (-1)^k zeta^k q^(k(k+1)/2)`` to ``q^N``."""
    K = 0
    while (K + 1) * (K + 2) // 2 <= N:
        K += 1
    data = np.zeros((N + 1, 2 * K + 3), dtype=np.int64)
    center = K + 1
    for k in range(-K - 1, K + 1):
        e = k * (k + 1) // 2
        if e <= N:
            data[e, k + center] += -1 if k % 2 else 1
    return Grid(data, center).trimmed()


def jtp_fourth_power(N: int) -> Grid:
    s = jtp_grid(N)
    s2 = grid_mul(s, s)
    return grid_mul(s2, s2)
