"""Truncated q-expansions with exact rational coefficients.

A :class:`QSeries` stores coefficients 0..trunc as integer numerators over a
single shared positive denominator, kept reduced (gcd of all numerators and
the denominator is 1).  Individual coefficients surface as
:class:`fractions.Fraction` values, which is the package's BigRat type:
always reduced, denominator positive.

Coefficients beyond ``trunc`` are undefined; reading one raises.  Arithmetic
between series of different lengths returns the shorter truncation and never
zero-pads, so Sturm-bound linear algebra downstream cannot be corrupted by
phantom zeros.

Multiplication packs the integer coefficient arrays into single big integers
(Kronecker substitution) so the Cauchy product runs on GMP's subquadratic
integer multiply; at the truncations used here (up to ~10^6 terms) this is
several orders of magnitude faster than a Python-level double loop while
remaining exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import TruncationError

try:
    from gmpy2 import mpz as _mpz
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    _mpz = int

BigRat = Fraction


def _content(nums: Sequence[int]) -> int:
    g = 0
    for v in nums:
        g = math.gcd(g, v)
        if g == 1:
            return 1
    return g


def _pack(nums: Sequence[int], width: int) -> int:
    """Pack signed ints into one big integer with `width`-byte slots."""
    pos = b"".join((v if v > 0 else 0).to_bytes(width, "little") for v in nums)
    neg = b"".join((-v if v < 0 else 0).to_bytes(width, "little") for v in nums)
    return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")


def _conv(a: Sequence[int], b: Sequence[int], n_out: int) -> list[int]:
    """First n_out coefficients of the Cauchy product of integer sequences."""
    max_a = max(map(abs, a), default=0)
    max_b = max(map(abs, b), default=0)
    if max_a == 0 or max_b == 0:
        return [0] * n_out
    bits = (max_a.bit_length() + max_b.bit_length()
            + min(len(a), len(b)).bit_length() + 2)
    width = (bits + 7) // 8
    slot = 8 * width
    prod = int(_mpz(_pack(a, width)) * _mpz(_pack(b, width)))
    # Bias every slot by 2^(slot-1) so negative slot values unpack cleanly;
    # slot sizing guarantees |value| < 2^(slot-1), hence no carries.
    half = 1 << (slot - 1)
    n_slots = len(a) + len(b)
    bias = int.from_bytes(
        bytes([0] * (width - 1) + [0x80]) * n_slots, "little")
    raw = (prod + bias).to_bytes(n_slots * width + width, "little")
    out = []
    for i in range(min(n_out, n_slots)):
        out.append(int.from_bytes(raw[i * width:(i + 1) * width], "little") - half)
    out.extend([0] * (n_out - len(out)))
    return out


class QSeries:
    """Immutable truncated power series with exact rational coefficients."""

    __slots__ = ("_nums", "_den", "trunc")

    def __init__(self, coeffs: Iterable, trunc: int | None = None):
        vals = [Fraction(c) for c in coeffs]
        den = math.lcm(*(v.denominator for v in vals)) if vals else 1
        nums = [int(v * den) for v in vals]
        if trunc is not None:
            if trunc + 1 > len(nums):
                raise TruncationError(
                    f"need {trunc + 1} coefficients, got {len(nums)}")
            nums = nums[:trunc + 1]
        if not nums:
            nums = [0]
        self._init_raw(nums, den)

    def _init_raw(self, nums: list[int], den: int) -> None:
        if den < 0:
            den, nums = -den, [-v for v in nums]
        if den == 0:
            raise ValueError("denominator must be nonzero")
        g = math.gcd(_content(nums), den)
        if g > 1:
            den //= g
            nums = [v // g for v in nums]
        self._nums = nums
        self._den = den
        self.trunc = len(nums) - 1

    # -- constructors -------------------------------------------------

    @classmethod
    def _raw(cls, nums: list[int], den: int = 1) -> "QSeries":
        obj = cls.__new__(cls)
        obj._init_raw(nums, den)
        return obj

    @classmethod
    def from_ints(cls, nums: Sequence[int]) -> "QSeries":
        return cls._raw([int(v) for v in nums], 1)

    @classmethod
    def zero(cls, trunc: int) -> "QSeries":
        return cls._raw([0] * (trunc + 1), 1)

    @classmethod
    def one(cls, trunc: int) -> "QSeries":
        return cls._raw([1] + [0] * trunc, 1)

    # -- coefficient access -------------------------------------------

    def __getitem__(self, n: int) -> Fraction:
        if not 0 <= n <= self.trunc:
            raise TruncationError(
                f"coefficient {n} undefined beyond trunc {self.trunc}")
        return Fraction(self._nums[n], self._den)

    def numerators(self) -> list[int]:
        """Integer numerators over the common denominator (copy)."""
        return list(self._nums)

    @property
    def denominator(self) -> int:
        return self._den

    def coefficients(self) -> list[Fraction]:
        return [Fraction(v, self._den) for v in self._nums]

    def is_integral(self) -> bool:
        return self._den == 1

    def leading_index(self) -> int | None:
        for i, v in enumerate(self._nums):
            if v:
                return i
        return None

    def is_zero(self) -> bool:
        return all(v == 0 for v in self._nums)

    def max_abs_numerator(self) -> int:
        return max(map(abs, self._nums), default=0)

    # -- arithmetic ----------------------------------------------------

    def _aligned(self, other: "QSeries") -> tuple[list[int], list[int], int]:
        t = min(self.trunc, other.trunc)
        den = math.lcm(self._den, other._den)
        fa = den // self._den
        fb = den // other._den
        a = self._nums[:t + 1] if fa == 1 else [v * fa for v in self._nums[:t + 1]]
        b = other._nums[:t + 1] if fb == 1 else [v * fb for v in other._nums[:t + 1]]
        return a, b, den

    def __add__(self, other: "QSeries") -> "QSeries":
        a, b, den = self._aligned(other)
        return QSeries._raw([x + y for x, y in zip(a, b)], den)

    def __sub__(self, other: "QSeries") -> "QSeries":
        a, b, den = self._aligned(other)
        return QSeries._raw([x - y for x, y in zip(a, b)], den)

    def __neg__(self) -> "QSeries":
        return QSeries._raw([-v for v in self._nums], self._den)

    def __mul__(self, other: "QSeries") -> "QSeries":
        t = min(self.trunc, other.trunc)
        nums = _conv(self._nums[:t + 1], other._nums[:t + 1], t + 1)
        return QSeries._raw(nums, self._den * other._den)

    def scale(self, r) -> "QSeries":
        r = Fraction(r)
        return QSeries._raw([v * r.numerator for v in self._nums],
                            self._den * r.denominator)

    def pow(self, e: int) -> "QSeries":
        if e < 0:
            raise ValueError("exponent must be >= 0")
        result = QSeries.one(self.trunc)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def truncate(self, new_trunc: int) -> "QSeries":
        if new_trunc > self.trunc:
            raise TruncationError("cannot extend a series by truncation")
        return QSeries._raw(self._nums[:new_trunc + 1], self._den)

    # -- comparison / io ------------------------------------------------

    def __eq__(self, other) -> bool:
        return (isinstance(other, QSeries) and self.trunc == other.trunc
                and self._den == other._den and self._nums == other._nums)

    def __hash__(self):
        return hash((self.trunc, self._den, tuple(self._nums[:32])))

    def __repr__(self) -> str:
        head = ", ".join(str(self[n]) for n in range(min(5, self.trunc + 1)))
        return f"QSeries(trunc={self.trunc}, coeffs=[{head}, ...])"

    def to_json(self) -> dict:
        return {
            "trunc": self.trunc,
            "coeffs": [[int(Fraction(v, self._den).numerator),
                        int(Fraction(v, self._den).denominator)]
                       for v in self._nums],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "QSeries":
        coeffs = [Fraction(num, den) for num, den in obj["coeffs"]]
        return cls(coeffs, trunc=obj["trunc"])


# Spec-level operation aliases.

def qs_add(a: QSeries, b: QSeries) -> QSeries:
    return a + b


def qs_mul(a: QSeries, b: QSeries) -> QSeries:
    return a * b


def qs_pow(a: QSeries, e: int) -> QSeries:
    return a.pow(e)
