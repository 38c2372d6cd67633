"""Exact truncated two-variable series and the eta/theta building blocks.

A :class:`QSeries` is ``sum_k c[k] q^(offset + k)`` for ``0 <= k <= N`` where each
``c[k]`` is a :class:`ZetaPoly`, a Laurent polynomial in ``zeta^(1/2)`` with
Gaussian-rational coefficients.  ZetaPoly exponents are stored doubled, so the
key ``e`` stands for ``zeta^(e/2)``.

Everything here is exact.  The only floating point entry is
:func:`evaluate_numeric` (and :class:`SeriesEvaluator`), which renders a finished
series at concrete ``(z, tau)``.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

import mpmath
import numpy as np

from .errors import NonUnitError, NotConvergedError, OffsetMismatchError

__all__ = [
    "GaussianRational",
    "ZetaPoly",
    "QSeries",
    "SeriesEvaluator",
    "Evaluation",
    "I",
    "series_add",
    "series_mul",
    "series_invert",
    "eta_series",
    "eta_product",
    "theta_series",
    "p_series",
    "residue_series",
    "evaluate_numeric",
    "series_to_json",
    "series_from_json",
    "pentagonal_exponents",
]

OFFSET_DEN = 24


# ---------------------------------------------------------------------------
# Gaussian rationals


class GaussianRational:
    """Exact ``(a + b i) / d`` with ``d > 0`` and ``gcd(a, b, d) = 1``."""

    __slots__ = ("_a", "_b", "_d")

    def __init__(self, re=0, im=0):
        re = Fraction(re)
        im = Fraction(im)
        d = re.denominator * im.denominator // math.gcd(re.denominator, im.denominator)
        a = re.numerator * (d // re.denominator)
        b = im.numerator * (d // im.denominator)
        self._a, self._b, self._d = a, b, d

    @classmethod
    def _make(cls, a: int, b: int, d: int) -> "GaussianRational":
        if d != 1:
            if d < 0:
                a, b, d = -a, -b, -d
            g = math.gcd(math.gcd(a, b), d)
            if g != 1:
                a //= g
                b //= g
                d //= g
        obj = object.__new__(cls)
        obj._a, obj._b, obj._d = a, b, d
        return obj

    @classmethod
    def coerce(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, int):
            return cls._make(value, 0, 1)
        if isinstance(value, Fraction):
            return cls._make(value.numerator, 0, value.denominator)
        if isinstance(value, complex):
            raise TypeError("floating complex values cannot be coerced exactly")
        return cls(value)

    @property
    def real(self) -> Fraction:
        return Fraction(self._a, self._d)

    @property
    def imag(self) -> Fraction:
        return Fraction(self._b, self._d)

    @property
    def parts(self) -> tuple[int, int, int]:
        """Raw ``(a, b, d)`` with value ``(a + b i) / d``."""
        return self._a, self._b, self._d

    def is_zero(self) -> bool:
        return self._a == 0 and self._b == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __add__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        a1, b1, d1 = self._a, self._b, self._d
        a2, b2, d2 = other._a, other._b, other._d
        if d1 == d2:
            return GaussianRational._make(a1 + a2, b1 + b2, d1)
        return GaussianRational._make(a1 * d2 + a2 * d1, b1 * d2 + b2 * d1, d1 * d2)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational._make(-self._a, -self._b, self._d)

    def __sub__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        a1, b1, d1 = self._a, self._b, self._d
        a2, b2, d2 = other._a, other._b, other._d
        return GaussianRational._make(a1 * a2 - b1 * b2, a1 * b2 + a2 * b1, d1 * d2)

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        a, b, d = self._a, self._b, self._d
        norm = a * a + b * b
        if norm == 0:
            raise ZeroDivisionError("inverse of zero")
        return GaussianRational._make(d * a, -d * b, norm)

    def __truediv__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._make(self._a, -self._b, self._d)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self._a == other._a and self._b == other._b and self._d == other._d
        if isinstance(other, (int, Fraction)):
            return self._b == 0 and Fraction(self._a, self._d) == other
        return NotImplemented

    def __hash__(self):
        if self._b == 0:
            return hash(Fraction(self._a, self._d))
        return hash((self._a, self._b, self._d))

    def __complex__(self):
        return complex(Fraction(self._a, self._d), Fraction(self._b, self._d))

    def to_mp(self):
        return mpmath.mpc(mpmath.mpf(self._a) / self._d, mpmath.mpf(self._b) / self._d)

    def __repr__(self):
        return f"GaussianRational({self.real}, {self.imag})"

    def __str__(self):
        re, im = self.real, self.imag
        if im == 0:
            return str(re)
        im_str = "i" if im == 1 else "-i" if im == -1 else f"{im}i"
        if re == 0:
            return im_str
        sign = "+" if im > 0 else "-"
        mag = "i" if abs(im) == 1 else f"{abs(im)}i"
        return f"({re} {sign} {mag})"


ZERO = GaussianRational._make(0, 0, 1)
ONE = GaussianRational._make(1, 0, 1)
I = GaussianRational._make(0, 1, 1)


def _scalar(value) -> GaussianRational:
    return GaussianRational.coerce(value)


# ---------------------------------------------------------------------------
# Laurent polynomials in zeta^(1/2)


class ZetaPoly:
    """Laurent polynomial in ``zeta^(1/2)``; keys are doubled exponents."""

    __slots__ = ("_terms", "_lo", "_hi")

    def __init__(self, terms: Mapping[int, object] | Iterable[tuple[int, object]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[int, GaussianRational] = {}
        for e, c in items:
            c = _scalar(c)
            e = int(e)
            if e in clean:
                c = clean[e] + c
            if c.is_zero():
                clean.pop(e, None)
            else:
                clean[e] = c
        self._set(clean)

    def _set(self, clean: dict[int, GaussianRational]) -> None:
        self._terms = clean
        if clean:
            self._lo = min(clean)
            self._hi = max(clean)
        else:
            self._lo = self._hi = None

    @classmethod
    def _wrap(cls, clean: dict[int, GaussianRational]) -> "ZetaPoly":
        obj = object.__new__(cls)
        obj._set(clean)
        return obj

    @classmethod
    def scalar(cls, value) -> "ZetaPoly":
        c = _scalar(value)
        return cls._wrap({} if c.is_zero() else {0: c})

    @classmethod
    def monomial(cls, doubled_exp: int, coeff=1) -> "ZetaPoly":
        c = _scalar(coeff)
        return cls._wrap({} if c.is_zero() else {int(doubled_exp): c})

    # -- inspection
    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self._terms))

    def items(self) -> list[tuple[int, GaussianRational]]:
        return sorted(self._terms.items())

    def __getitem__(self, doubled_exp: int) -> GaussianRational:
        return self._terms.get(doubled_exp, ZERO)

    def coefficient(self, doubled_exp: int) -> GaussianRational:
        return self._terms.get(doubled_exp, ZERO)

    @property
    def min_exp(self) -> int | None:
        return self._lo

    @property
    def max_exp(self) -> int | None:
        return self._hi

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_scalar(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and 0 in self._terms)

    def scalar_value(self) -> GaussianRational:
        if not self.is_scalar():
            raise ValueError("ZetaPoly has nontrivial zeta content")
        return self._terms.get(0, ZERO)

    def is_purely_imaginary(self) -> bool:
        return all(c.parts[0] == 0 for c in self._terms.values())

    # -- arithmetic
    def __add__(self, other):
        if not isinstance(other, ZetaPoly):
            other = ZetaPoly.scalar(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            prev = out.get(e)
            if prev is None:
                out[e] = c
            else:
                s = prev + c
                if s.is_zero():
                    del out[e]
                else:
                    out[e] = s
        return ZetaPoly._wrap(out)

    __radd__ = __add__

    def __neg__(self):
        return ZetaPoly._wrap({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, ZetaPoly):
            other = ZetaPoly.scalar(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, ZetaPoly):
            c = _scalar(other)
            if c.is_zero():
                return ZERO_POLY
            return ZetaPoly._wrap({e: v * c for e, v in self._terms.items()})
        out: dict[int, GaussianRational] = {}
        _accumulate(out, self._terms, other._terms)
        return ZetaPoly._wrap({e: c for e, c in out.items() if not c.is_zero()})

    __rmul__ = __mul__

    def shift(self, doubled: int) -> "ZetaPoly":
        """Multiply by ``zeta^(doubled/2)``."""
        return ZetaPoly._wrap({e + doubled: c for e, c in self._terms.items()})

    def reflect(self) -> "ZetaPoly":
        """Substitute ``zeta -> zeta^-1``."""
        return ZetaPoly._wrap({-e: c for e, c in self._terms.items()})

    def dilate(self, s: int) -> "ZetaPoly":
        """Substitute ``zeta -> zeta^s``."""
        if s == 0:
            raise ValueError("dilation factor must be nonzero")
        return ZetaPoly._wrap({s * e: c for e, c in self._terms.items()})

    def evaluate(self, z: complex) -> complex:
        return sum(complex(c) * cmath.exp(1j * math.pi * e * z) for e, c in self._terms.items())

    def norm1(self, zeta_abs: float = 1.0) -> float:
        """``sum |c_e| |zeta|^(e/2)``; a bound for the value anywhere on that circle."""
        lz = math.log(zeta_abs) if zeta_abs != 1.0 else 0.0
        return sum(abs(complex(c)) * math.exp(0.5 * e * lz) for e, c in self._terms.items())

    def __eq__(self, other):
        if isinstance(other, ZetaPoly):
            return self._terms == other._terms
        try:
            return self == ZetaPoly.scalar(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        if not self._terms:
            return "ZetaPoly(0)"
        parts = []
        for e, c in self.items():
            if e == 0:
                parts.append(str(c))
            else:
                ex = f"{e // 2}" if e % 2 == 0 else f"{e}/2"
                parts.append(f"{c}*z^{ex}")
        return "ZetaPoly(" + " + ".join(parts) + ")"


def _accumulate(out: dict, p: dict, q: dict) -> None:
    """``out += p * q`` on raw term dicts (zeros may be left behind)."""
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = e1 + e2
            prev = out.get(e)
            prod = c1 * c2
            out[e] = prod if prev is None else prev + prod


ZERO_POLY = ZetaPoly._wrap({})
ONE_POLY = ZetaPoly._wrap({0: ONE})


# ---------------------------------------------------------------------------
# Truncated q-series


def _check_offset(offset) -> Fraction:
    offset = Fraction(offset)
    if (offset * OFFSET_DEN).denominator != 1:
        raise OffsetMismatchError(f"offset {offset} is not a multiple of 1/{OFFSET_DEN}")
    return offset


def _as_poly(c) -> ZetaPoly:
    return c if isinstance(c, ZetaPoly) else ZetaPoly.scalar(c)


class QSeries:
    """``sum_{k=0}^{N} c[k] q^(offset + k)`` with ZetaPoly coefficients.

    Values are immutable.  ``N`` is the last reliable integer step: the true
    series agrees with this one for every exponent ``<= offset + N``.
    """

    __slots__ = ("_offset", "_N", "_coeffs", "_nz")

    def __init__(self, coeffs: Sequence, offset=0, N: int | None = None):
        polys = [_as_poly(c) for c in coeffs]
        if N is None:
            N = len(polys) - 1
        if N < 0:
            raise ValueError("truncation order must be >= 0")
        if len(polys) > N + 1:
            polys = polys[: N + 1]
        elif len(polys) < N + 1:
            polys.extend([ZERO_POLY] * (N + 1 - len(polys)))
        self._init(tuple(polys), _check_offset(offset), N)

    def _init(self, coeffs: tuple, offset: Fraction, N: int) -> None:
        self._coeffs = coeffs
        self._offset = offset
        self._N = N
        self._nz = tuple(k for k, c in enumerate(coeffs) if c)

    @classmethod
    def _wrap(cls, coeffs: tuple, offset: Fraction, N: int) -> "QSeries":
        obj = object.__new__(cls)
        obj._init(coeffs, offset, N)
        return obj

    @classmethod
    def from_sparse(cls, terms: Mapping[int, object], N: int, offset=0) -> "QSeries":
        """Build from ``{step: coefficient}``; steps beyond ``N`` are dropped."""
        coeffs = [ZERO_POLY] * (N + 1)
        for k, c in terms.items():
            if 0 <= k <= N:
                coeffs[k] = _as_poly(c)
        return cls._wrap(tuple(coeffs), _check_offset(offset), N)

    @classmethod
    def one(cls, N: int) -> "QSeries":
        return cls.from_sparse({0: 1}, N)

    @classmethod
    def zero(cls, N: int, offset=0) -> "QSeries":
        return cls.from_sparse({}, N, offset)

    # -- inspection
    @property
    def offset(self) -> Fraction:
        return self._offset

    @property
    def N(self) -> int:
        return self._N

    @property
    def coeffs(self) -> tuple[ZetaPoly, ...]:
        return self._coeffs

    @property
    def nonzero_steps(self) -> tuple[int, ...]:
        return self._nz

    def __getitem__(self, k: int) -> ZetaPoly:
        return self._coeffs[k]

    def __len__(self) -> int:
        return self._N + 1

    def coefficient(self, exponent) -> ZetaPoly:
        """Coefficient of ``q^exponent`` (absolute, rational exponent)."""
        k = Fraction(exponent) - self._offset
        if k.denominator != 1:
            return ZERO_POLY
        k = int(k)
        if k < 0:
            return ZERO_POLY
        if k > self._N:
            raise IndexError(f"exponent {exponent} beyond truncation offset+{self._N}")
        return self._coeffs[k]

    def zeta_support(self) -> tuple[int, int] | None:
        """Doubled-exponent range over all stored orders."""
        los = [c.min_exp for c in self._coeffs if c]
        if not los:
            return None
        return min(los), max(c.max_exp for c in self._coeffs if c)

    def is_scalar(self) -> bool:
        return all(c.is_scalar() for c in self._coeffs)

    def scalar_coefficients(self) -> list[GaussianRational]:
        return [c.scalar_value() for c in self._coeffs]

    def integer_coefficients(self) -> list[int]:
        out = []
        for c in self._coeffs:
            a, b, d = c.scalar_value().parts
            if b != 0 or d != 1:
                raise ValueError("series has non-integer coefficients")
            out.append(a)
        return out

    # -- structural operations
    def truncate(self, N: int) -> "QSeries":
        if N > self._N:
            raise ValueError(f"cannot extend truncation from {self._N} to {N}")
        return QSeries._wrap(self._coeffs[: N + 1], self._offset, N)

    def map_coeffs(self, fn) -> "QSeries":
        return QSeries._wrap(tuple(fn(c) for c in self._coeffs), self._offset, self._N)

    def scale(self, c) -> "QSeries":
        c = _scalar(c)
        return self.map_coeffs(lambda p: p * c)

    def shift_zeta(self, doubled: int) -> "QSeries":
        return self.map_coeffs(lambda p: p.shift(doubled))

    def reflect_zeta(self) -> "QSeries":
        return self.map_coeffs(ZetaPoly.reflect)

    def dilate_zeta(self, s: int) -> "QSeries":
        return self.map_coeffs(lambda p: p.dilate(s))

    def dilate_q(self, k: int) -> "QSeries":
        """Substitute ``q -> q^k`` (offset scales too)."""
        if k < 1:
            raise ValueError("q-dilation must be a positive integer")
        N = k * (self._N + 1) - 1
        coeffs = [ZERO_POLY] * (N + 1)
        for j in self._nz:
            coeffs[k * j] = self._coeffs[j]
        return QSeries._wrap(tuple(coeffs), _check_offset(self._offset * k), N)

    def with_offset(self, offset) -> "QSeries":
        return QSeries._wrap(self._coeffs, _check_offset(offset), self._N)

    # -- arithmetic
    def __add__(self, other):
        if not isinstance(other, QSeries):
            other = QSeries.from_sparse({0: other}, self._N)
        return series_add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return self.map_coeffs(ZetaPoly.__neg__)

    def __sub__(self, other):
        if not isinstance(other, QSeries):
            other = QSeries.from_sparse({0: other}, self._N)
        return series_add(self, -other)

    def __mul__(self, other):
        if isinstance(other, QSeries):
            return series_mul(self, other)
        if isinstance(other, ZetaPoly):
            return self.map_coeffs(lambda p: p * other)
        return self.scale(other)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return series_invert(self) ** (-k)
        result = QSeries.one(self._N)
        base = self
        while True:
            if k & 1:
                result = series_mul(result, base)
            k >>= 1
            if not k:
                return result
            base = series_mul(base, base)

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return (
            self._offset == other._offset
            and self._N == other._N
            and self._coeffs == other._coeffs
        )

    def __hash__(self):
        return hash((self._offset, self._N, self._coeffs))

    def __repr__(self):
        shown = ", ".join(f"q^{self._offset + k}: {self._coeffs[k]}" for k in self._nz[:4])
        more = ", ..." if len(self._nz) > 4 else ""
        return f"QSeries(N={self._N}, offset={self._offset}, {{{shown}{more}}})"

    def evaluator(self) -> "SeriesEvaluator":
        return SeriesEvaluator(self)


def series_add(a: QSeries, b: QSeries) -> QSeries:
    """Coefficientwise sum; offsets must differ by an integer."""
    delta = a.offset - b.offset
    if delta.denominator != 1:
        raise OffsetMismatchError(f"offsets {a.offset} and {b.offset} differ by a non-integer")
    offset = min(a.offset, b.offset)
    top = min(a.offset + a.N, b.offset + b.N)
    N = int(top - offset)
    if N < 0:
        raise OffsetMismatchError("series have no common reliable range")
    sa, sb = int(a.offset - offset), int(b.offset - offset)
    coeffs = []
    for k in range(N + 1):
        ka, kb = k - sa, k - sb
        ca = a.coeffs[ka] if 0 <= ka <= a.N else ZERO_POLY
        cb = b.coeffs[kb] if 0 <= kb <= b.N else ZERO_POLY
        if not ca:
            coeffs.append(cb)
        elif not cb:
            coeffs.append(ca)
        else:
            coeffs.append(ca + cb)
    return QSeries._wrap(tuple(coeffs), offset, N)


def series_mul(a: QSeries, b: QSeries) -> QSeries:
    """Cauchy product truncated at ``min(a.N, b.N)``; skips zero orders."""
    N = min(a.N, b.N)
    acc: list[dict | None] = [None] * (N + 1)
    nzb = [j for j in b.nonzero_steps if j <= N]
    for i in a.nonzero_steps:
        if i > N:
            break
        pa = a.coeffs[i]._terms
        for j in nzb:
            k = i + j
            if k > N:
                break
            slot = acc[k]
            if slot is None:
                slot = acc[k] = {}
            _accumulate(slot, pa, b.coeffs[j]._terms)
    coeffs = tuple(
        ZERO_POLY if d is None else ZetaPoly._wrap({e: c for e, c in d.items() if not c.is_zero()})
        for d in acc
    )
    return QSeries._wrap(coeffs, a.offset + b.offset, N)


def series_invert(a: QSeries) -> QSeries:
    """Multiplicative inverse to order ``a.N``; ``c[0]`` must be a nonzero scalar."""
    c0 = a.coeffs[0]
    if not c0 or not c0.is_scalar():
        raise NonUnitError("leading coefficient must be a nonzero scalar (no zeta content)")
    inv0 = c0.scalar_value().inverse()
    neg_inv0 = -inv0
    N = a.N
    nza = [j for j in a.nonzero_steps if j > 0]
    out: list[ZetaPoly] = [ZetaPoly._wrap({0: inv0})]
    for k in range(1, N + 1):
        acc: dict = {}
        for j in nza:
            if j > k:
                break
            prev = out[k - j]
            if prev:
                _accumulate(acc, a.coeffs[j]._terms, prev._terms)
        out.append(
            ZetaPoly._wrap({e: c * neg_inv0 for e, c in acc.items() if not c.is_zero()})
        )
    return QSeries._wrap(tuple(out), -a.offset, N)


# ---------------------------------------------------------------------------
# Building blocks


def pentagonal_exponents(N: int) -> list[tuple[int, int]]:
    """``(exponent, sign)`` pairs of ``prod (1 - q^n)`` up to ``q^N``."""
    out = [(0, 1)]
    j = 1
    while True:
        e1 = j * (3 * j - 1) // 2
        if e1 > N:
            break
        sign = -1 if j % 2 else 1
        out.append((e1, sign))
        e2 = j * (3 * j + 1) // 2
        if e2 <= N:
            out.append((e2, sign))
        j += 1
    return sorted(out)


def eta_product(N: int) -> QSeries:
    """``prod_{n>=1} (1 - q^n)`` to order ``N`` (no ``q^(1/24)`` prefactor)."""
    if N < 0:
        raise ValueError("N must be >= 0")
    return QSeries.from_sparse(dict(pentagonal_exponents(N)), N)


def eta_series(N: int) -> QSeries:
    """Dedekind eta ``q^(1/24) prod (1 - q^n)`` to step ``N``."""
    return eta_product(N).with_offset(Fraction(1, 24))


def theta_series(N: int, s: int = 1) -> QSeries:
    """Jacobi theta ``theta(s z; tau)`` to step ``N`` (offset 1/8).

    Built from the triple-product sum
    ``prod (1-q^n)(1-w q^n)(1-w^-1 q^(n-1)) = sum_k (-1)^k w^k q^(k(k+1)/2)``
    with ``w = zeta^s``, times the prefactor ``i w^(1/2)``.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    if s < 1:
        raise ValueError("zeta multiplier must be a positive integer")
    terms: dict[int, dict[int, GaussianRational]] = {}
    k = 0
    while k * (k + 1) // 2 <= N:
        e = k * (k + 1) // 2
        sign = -1 if k % 2 else 1
        # k and -k-1 share the q-exponent and have opposite signs
        terms[e] = {
            s * (2 * k + 1): GaussianRational._make(0, sign, 1),
            s * (-2 * k - 1): GaussianRational._make(0, -sign, 1),
        }
        k += 1
    return QSeries.from_sparse({e: ZetaPoly._wrap(t) for e, t in terms.items()}, N, Fraction(1, 8))


def p_series(N: int) -> QSeries:
    """``q^(1/24) / eta = sum p(n) q^n`` (partition numbers)."""
    return series_invert(eta_product(N))


def residue_series(N: int) -> QSeries:
    """``eta(2 tau)^8 / eta(tau)^16`` to step ``N`` (offset 0)."""
    eta = eta_series(N)
    num = eta.dilate_q(2).truncate(N) ** 8
    den = eta ** 16
    return series_mul(num, series_invert(den))


# ---------------------------------------------------------------------------
# Numeric bridge


class Evaluation(tuple):
    """``(value, tail_bound)`` returned by :func:`evaluate_numeric`."""

    __slots__ = ()

    def __new__(cls, value, tail):
        return super().__new__(cls, (value, tail))

    @property
    def value(self):
        return self[0]

    @property
    def tail(self) -> float:
        return self[1]


class SeriesEvaluator:
    """Compiled floating-point renderer of a finished :class:`QSeries`.

    ``__call__`` broadcasts over numpy arrays of ``z`` and ``tau``.
    """

    def __init__(self, series: QSeries):
        self.series = series
        # odd in zeta: pair e with -e and sum c_e (zeta^(e/2) - zeta^(-e/2)) = 2i c_e sin(pi e z),
        # which stays accurate near the zeros of the series
        self.odd = bool(series.nonzero_steps) and all(
            series.coeffs[k].coefficient(-e) == -v for k in series.nonzero_steps for e, v in series.coeffs[k].items()
        )
        steps, exps, coeffs, exact = [], [], [], []
        for k in series.nonzero_steps:
            for e, c in series.coeffs[k].items():
                if self.odd and e <= 0:
                    continue
                steps.append(k)
                exps.append(e)
                coeffs.append(complex(c))
                exact.append(c)
        self.offset = float(series.offset)
        self.steps = np.asarray(steps, dtype=np.int64)
        self.exps = np.asarray(exps, dtype=np.int64)
        self.coeffs = np.asarray(coeffs, dtype=np.complex128)
        self._exact = exact
        # growth profile for the tail estimate: (step, l1 norm at |zeta| = 1)
        self._norms = [(k, series.coeffs[k].norm1()) for k in series.nonzero_steps]

    def __call__(self, z, tau):
        z = np.asarray(z, dtype=np.complex128)
        tau = np.asarray(tau, dtype=np.complex128)
        shape = np.broadcast_shapes(z.shape, tau.shape)
        out = np.zeros(shape, dtype=np.complex128)
        if self.steps.size == 0:
            return out
        if not self.odd:
            zeta_half = np.exp(1j * np.pi * z)
        cur_step = None
        qpow = None
        for k, e, c in zip(self.steps.tolist(), self.exps.tolist(), self.coeffs):
            if k != cur_step:
                qpow = np.exp(2j * np.pi * tau * (self.offset + k))
                cur_step = k
            if self.odd:
                out = out + (2j * c) * qpow * np.sin(np.pi * e * z)
            else:
                out = out + c * qpow * zeta_half**e
        return out

    def evaluate_mp(self, z, tau, dps: int = 50):
        """Same sum in mpmath at ``dps`` digits."""
        with mpmath.workdps(dps):
            z = mpmath.mpmathify(z)
            tau = mpmath.mpmathify(tau)
            zh = mpmath.expjpi(z)
            q = mpmath.expjpi(2 * tau)
            total = mpmath.mpc(0)
            cur_step, qpow = None, None
            for k, e, c in zip(self.steps.tolist(), self.exps.tolist(), self._exact):
                if k != cur_step:
                    qpow = q**k if cur_step is None else qpow * q ** (k - cur_step)
                    cur_step = k
                if self.odd:
                    total += 2j * c.to_mp() * qpow * mpmath.sinpi(e * z)
                else:
                    total += c.to_mp() * qpow * zh**e
            return total * mpmath.expjpi(2 * tau * (mpmath.mpf(self.series.offset.numerator) / self.series.offset.denominator))

    def tail_bound(self, z, tau) -> float:
        """Estimate of the omitted tail ``sum_{k>N}``.

        Uses the largest ``|c_k| |q|^k`` over the last quarter of the stored
        range as a proxy for the next term, times a geometric factor.
        """
        z = complex(z)
        r = abs(cmath.exp(2j * math.pi * complex(tau)))
        if r >= 1:
            return math.inf
        N = self.series.N
        zeta_abs = math.exp(-2 * math.pi * z.imag)
        window_start = N - max(N // 4, 1)
        worst = 0.0
        for k, _ in self._norms:
            if k < window_start:
                continue
            poly = self.series.coeffs[k]
            worst = max(worst, poly.norm1(zeta_abs) * r ** (k - N))
        if worst == 0.0:
            # nothing stored near the end: fall back to the global maximum
            worst = max((self.series.coeffs[k].norm1(zeta_abs) for k, _ in self._norms), default=0.0)
        return worst * r ** (N + 1 + self.offset) / (1 - r)


def evaluate_numeric(a: QSeries, z: complex, tau: complex, tol: float | None = 1e-12, dps: int | None = None) -> Evaluation:
    """Render ``a`` at ``(z, tau)``; raise if the tail estimate exceeds ``tol``.

    ``tol`` is relative to the computed value's magnitude (absolute if the value is 0).
    With ``dps`` the sum is formed in mpmath and the value is an ``mpc``.
    """
    if complex(tau).imag <= 0:
        raise ValueError("tau must lie in the upper half-plane")
    ev = SeriesEvaluator(a)
    tail = ev.tail_bound(z, tau)
    value = ev.evaluate_mp(z, tau, dps) if dps else complex(ev(z, tau))
    if tol is not None:
        scale = abs(complex(value)) or 1.0
        if tail > tol * scale:
            raise NotConvergedError(
                f"tail estimate {tail:.3e} exceeds tolerance {tol:.1e} (relative to {scale:.3e}); raise N"
            )
    return Evaluation(value, tail)


# ---------------------------------------------------------------------------
# Serialization


def series_to_json(a: QSeries) -> dict:
    """Cache document ``{"offset_num", "offset_den": 24, "N", "coeffs"}``."""
    coeffs = []
    for c in a.coeffs:
        row = []
        for e, v in c.items():
            re, im = v.real, v.imag
            row.append([e, re.numerator, re.denominator, im.numerator, im.denominator])
        coeffs.append(row)
    return {
        "offset_num": int(a.offset * OFFSET_DEN),
        "offset_den": OFFSET_DEN,
        "N": a.N,
        "coeffs": coeffs,
    }


def series_from_json(doc: Mapping) -> QSeries:
    offset = Fraction(doc["offset_num"], doc["offset_den"])
    coeffs = []
    for row in doc["coeffs"]:
        coeffs.append(
            ZetaPoly({e: GaussianRational(Fraction(rn, rd), Fraction(im_n, im_d)) for e, rn, rd, im_n, im_d in row})
        )
    return QSeries(coeffs, offset, doc["N"])
