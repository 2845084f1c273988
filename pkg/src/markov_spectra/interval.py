"""Outward-rounded interval arithmetic on binary64 floats.

Basic operations are correctly rounded in IEEE arithmetic, so nudging each
result one ulp outward gives a sound enclosure. ``log`` and ``exp`` come from
the platform libm, which is accurate to within one ulp on every supported
platform; those results are widened by ``_TRANSCENDENTAL_ULPS`` ulps per side.

The vectorized helpers at the bottom apply the same rules elementwise to
numpy arrays of lower and upper bounds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

_INF = math.inf
_TRANSCENDENTAL_ULPS = 3


def _down(x: float, ulps: int = 1) -> float:
    for _ in range(ulps):
        x = math.nextafter(x, -_INF)
    return x


def _up(x: float, ulps: int = 1) -> float:
    for _ in range(ulps):
        x = math.nextafter(x, _INF)
    return x


def fraction_bounds(x: Fraction | int) -> tuple[float, float]:
    """Tightest pair of floats ``lo <= x <= hi``."""
    x = Fraction(x)
    f = float(x)
    lo = f if Fraction(f) <= x else _down(f)
    hi = f if Fraction(f) >= x else _up(f)
    return lo, hi


def log_int_bounds(n: int) -> tuple[float, float]:
    """Enclosure of ``ln(n)`` for a positive (possibly huge) integer."""
    v = math.log(n)
    return _down(v, _TRANSCENDENTAL_ULPS), _up(v, _TRANSCENDENTAL_ULPS)


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x: float) -> "Interval":
        return cls(x, x)

    @classmethod
    def from_fraction(cls, x: Fraction | int) -> "Interval":
        return cls(*fraction_bounds(x))

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __contains__(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, Fraction):
            return Fraction(self.lo) <= x <= Fraction(self.hi)
        return self.lo <= x <= self.hi

    @staticmethod
    def _coerce(other) -> "Interval":
        if isinstance(other, Interval):
            return other
        if isinstance(other, (int, Fraction)):
            return Interval.from_fraction(other)
        return Interval(float(other), float(other))

    def __add__(self, other):
        o = self._coerce(other)
        return Interval(_down(self.lo + o.lo), _up(self.hi + o.hi))

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        prods = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi]
        return Interval(_down(min(prods)), _up(max(prods)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.lo <= 0.0 <= o.hi:
            raise ZeroDivisionError("interval division by an interval containing 0")
        qs = [self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi]
        return Interval(_down(min(qs)), _up(max(qs)))

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def log(self) -> "Interval":
        if self.lo <= 0:
            raise ValueError("log of non-positive interval")
        return Interval(_down(math.log(self.lo), _TRANSCENDENTAL_ULPS),
                        _up(math.log(self.hi), _TRANSCENDENTAL_ULPS))

    def exp(self) -> "Interval":
        return Interval(_down(math.exp(self.lo), _TRANSCENDENTAL_ULPS),
                        _up(math.exp(self.hi), _TRANSCENDENTAL_ULPS))

    def __pow__(self, s):
        """Real power ``self**s`` for a positive base."""
        return (self.log() * s).exp()

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def __repr__(self):
        return f"[{self.lo!r}, {self.hi!r}]"


# ---- vectorized helpers (arrays of lower / upper bounds) --------------------

def vdown(x: np.ndarray, ulps: int = 1) -> np.ndarray:
    for _ in range(ulps):
        x = np.nextafter(x, -np.inf)
    return x


def vup(x: np.ndarray, ulps: int = 1) -> np.ndarray:
    for _ in range(ulps):
        x = np.nextafter(x, np.inf)
    return x


def vpow_positive(lo: np.ndarray, hi: np.ndarray, s: float) -> tuple[np.ndarray, np.ndarray]:
    """Enclosure of ``x**s`` for ``0 < lo <= x <= hi`` and an exact float ``s >= 0``."""
    llo = vdown(np.log(lo), _TRANSCENDENTAL_ULPS)
    lhi = vup(np.log(hi), _TRANSCENDENTAL_ULPS)
    plo = vdown(llo * s)
    phi = vup(lhi * s)
    return vdown(np.exp(plo), _TRANSCENDENTAL_ULPS), vup(np.exp(phi), _TRANSCENDENTAL_ULPS)
