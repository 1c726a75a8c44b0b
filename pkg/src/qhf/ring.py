"""Exact amplitudes in Z[omega] / sqrt(2)^k with omega = exp(i*pi/4)."""
from __future__ import annotations

import cmath
import math

_OMEGA = cmath.exp(1j * math.pi / 4)


def _reduce(a0: int, a1: int, a2: int, a3: int, k: int) -> tuple[int, int, int, int, int]:
    if a0 == a1 == a2 == a3 == 0:
        return 0, 0, 0, 0, 0
    while k > 0 and not (a0 + a2) & 1 and not (a1 + a3) & 1:
        # x / sqrt2 = x * (omega - omega^3) / 2
        a0, a1, a2, a3 = (a1 - a3) >> 1, (a0 + a2) >> 1, (a1 + a3) >> 1, (a2 - a0) >> 1
        k -= 1
    return a0, a1, a2, a3, k


def _times_sqrt2(a0: int, a1: int, a2: int, a3: int) -> tuple[int, int, int, int]:
    return a1 - a3, a0 + a2, a1 + a3, a2 - a0


class RingAmplitude:
    """Canonical element ``(a0 + a1 w + a2 w^2 + a3 w^3) / sqrt2^k``.

    The canonical form is unique, so ``==`` is exact ring equality.
    """

    __slots__ = ("a0", "a1", "a2", "a3", "k")

    def __init__(self, a0: int = 0, a1: int = 0, a2: int = 0, a3: int = 0, k: int = 0):
        if k < 0:
            raise ValueError("k must be nonnegative")
        self.a0, self.a1, self.a2, self.a3, self.k = _reduce(a0, a1, a2, a3, k)

    @classmethod
    def _raw(cls, a0, a1, a2, a3, k) -> RingAmplitude:
        # caller guarantees canonical form
        obj = object.__new__(cls)
        obj.a0, obj.a1, obj.a2, obj.a3, obj.k = a0, a1, a2, a3, k
        return obj

    @classmethod
    def omega_power(cls, j: int) -> RingAmplitude:
        j %= 8
        coeffs = [0, 0, 0, 0]
        coeffs[j % 4] = -1 if j >= 4 else 1
        return cls._raw(*coeffs, 0)

    @property
    def coeffs(self) -> tuple[int, int, int, int]:
        return self.a0, self.a1, self.a2, self.a3

    def as_tuple(self) -> tuple[int, int, int, int, int]:
        return self.a0, self.a1, self.a2, self.a3, self.k

    def is_zero(self) -> bool:
        return not (self.a0 or self.a1 or self.a2 or self.a3)

    def is_real(self) -> bool:
        return self.a2 == 0 and self.a3 == -self.a1

    def unit_power(self) -> int | None:
        """Return j if this equals omega**j, else None."""
        if self.k:
            return None
        nonzero = [(i, c) for i, c in enumerate(self.coeffs) if c]
        if len(nonzero) != 1 or abs(nonzero[0][1]) != 1:
            return None
        i, c = nonzero[0]
        return i if c == 1 else i + 4

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = RingAmplitude(other)
        if not isinstance(other, RingAmplitude):
            return NotImplemented
        return self.as_tuple() == other.as_tuple()

    def __hash__(self) -> int:
        return hash(self.as_tuple())

    def __add__(self, other: RingAmplitude) -> RingAmplitude:
        if isinstance(other, int):
            other = RingAmplitude(other)
        x, y = self, other
        if x.k < y.k:
            x, y = y, x
        b = y.coeffs
        for _ in range(x.k - y.k):
            b = _times_sqrt2(*b)
        return RingAmplitude(x.a0 + b[0], x.a1 + b[1], x.a2 + b[2], x.a3 + b[3], x.k)

    __radd__ = __add__

    def __neg__(self) -> RingAmplitude:
        return RingAmplitude._raw(-self.a0, -self.a1, -self.a2, -self.a3, self.k)

    def __sub__(self, other: RingAmplitude) -> RingAmplitude:
        return self + (-other)

    def __mul__(self, other: RingAmplitude) -> RingAmplitude:
        if isinstance(other, int):
            other = RingAmplitude(other)
        a0, a1, a2, a3 = self.coeffs
        b0, b1, b2, b3 = other.coeffs
        # omega^4 = -1
        c0 = a0 * b0 - a1 * b3 - a2 * b2 - a3 * b1
        c1 = a0 * b1 + a1 * b0 - a2 * b3 - a3 * b2
        c2 = a0 * b2 + a1 * b1 + a2 * b0 - a3 * b3
        c3 = a0 * b3 + a1 * b2 + a2 * b1 + a3 * b0
        return RingAmplitude(c0, c1, c2, c3, self.k + other.k)

    __rmul__ = __mul__

    def times_omega(self, j: int) -> RingAmplitude:
        j %= 8
        c = list(self.coeffs)
        for _ in range(j % 4):
            c = [-c[3], c[0], c[1], c[2]]
        if j >= 4:
            c = [-v for v in c]
        return RingAmplitude._raw(*c, self.k)

    def div_sqrt2(self) -> RingAmplitude:
        return RingAmplitude(self.a0, self.a1, self.a2, self.a3, self.k + 1)

    def conjugate(self) -> RingAmplitude:
        return RingAmplitude._raw(self.a0, -self.a3, -self.a2, -self.a1, self.k)

    def norm_sqr(self) -> RingAmplitude:
        return self * self.conjugate()

    def __complex__(self) -> complex:
        val = sum(c * _OMEGA ** i for i, c in enumerate(self.coeffs))
        return val / math.sqrt(2) ** self.k

    def __repr__(self) -> str:
        return f"RingAmplitude{self.as_tuple()}"

    def render(self) -> str:
        """``(a0,a1,a2,a3)/sqrt2^k`` followed by a decimal approximation."""
        z = complex(self)
        if abs(z.imag) < 1e-12:
            dec = f"{z.real:.10g}"
        else:
            dec = f"{z.real:.10g}{z.imag:+.10g}i"
        return f"({self.a0},{self.a1},{self.a2},{self.a3})/sqrt2^{self.k} ~ {dec}"


ZERO = RingAmplitude()
ONE = RingAmplitude(1)


def ring_normalize(a0: int, a1: int, a2: int, a3: int, k: int) -> RingAmplitude:
    return RingAmplitude(a0, a1, a2, a3, k)


def dyadic(num: int, log2_den: int) -> RingAmplitude:
    """The rational ``num / 2**log2_den``."""
    return RingAmplitude(num, 0, 0, 0, 2 * log2_den)
