"""Exact arithmetic in multi-quadratic fields.

A :class:`Surd` is a finite sum ``sum_d c_d * sqrt(d)`` with rational ``c_d``
and positive integer radicands ``d`` (``d = 1`` carries the rational part).
Radicands are stored so that no two of them have a rational-square ratio; the
square roots of such integers are linearly independent over Q, so a Surd is
zero iff its coefficient map is empty. That makes equality exact.

Signs of elements with one irrational radicand are decided exactly by
squaring. Mixed elements fall back to interval evaluation with doubling
precision, which always terminates for a nonzero element.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import mpmath

from .config import get_precision
from .interval import _down, _up

_TRIAL_LIMIT = 100_000
_MAX_SIGN_PREC = 1 << 16


@lru_cache(maxsize=4096)
def squarefree_split(n: int) -> tuple[int, int]:
    """Return ``(k, m)`` with ``n = k*k*m``.

    ``m`` is square-free whenever all its prime factors above the trial
    bound appear at most once or as an exact square, which covers every
    discriminant met in practice. Uniqueness of representation does not rely
    on it (see :func:`_same_class`).
    """
    if n <= 0:
        raise ValueError("radicand must be positive")
    k, m = 1, n
    p = 2
    while p * p <= m and p <= _TRIAL_LIMIT:
        pp = p * p
        while m % pp == 0:
            m //= pp
            k *= p
        p += 1 if p == 2 else 2
    r = math.isqrt(m)
    if r * r == m:
        k *= r
        m = 1
    return k, m


def _same_class(d1: int, d2: int) -> int | None:
    """If ``sqrt(d2) = c * sqrt(d1)`` for rational c, return ``isqrt(d1*d2)``."""
    prod = d1 * d2
    r = math.isqrt(prod)
    return r if r * r == prod else None


class Surd:
    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        self._terms: dict[int, Fraction] = {}
        if terms:
            for d, c in dict(terms).items():
                self._add_term(int(d), Fraction(c))

    # -- construction ---------------------------------------------------------
    @classmethod
    def rational(cls, x) -> "Surd":
        return cls({1: Fraction(x)})

    @classmethod
    def sqrt(cls, x) -> "Surd":
        """Exact square root of a non-negative rational."""
        x = Fraction(x)
        if x < 0:
            raise ValueError("sqrt of negative rational")
        if x == 0:
            return cls()
        # sqrt(a/b) = sqrt(a*b)/b
        k, m = squarefree_split(x.numerator * x.denominator)
        return cls({m: Fraction(k, x.denominator)})

    @classmethod
    def quadratic(cls, x, y, d, z=1) -> "Surd":
        """The value ``(x + y*sqrt(d)) / z``."""
        z = Fraction(z)
        return cls.rational(Fraction(x) / z) + cls.sqrt(d) * (Fraction(y) / z)

    def _add_term(self, d: int, c: Fraction) -> None:
        if c == 0:
            return
        k, m = squarefree_split(d)
        c = c * k
        for e in self._terms:
            r = _same_class(e, m)
            if r is not None:
                # sqrt(m) = r/e * sqrt(e)
                c = c * Fraction(r, e)
                m = e
                break
        v = self._terms.get(m, Fraction(0)) + c
        if v == 0:
            self._terms.pop(m, None)
        else:
            self._terms[m] = v

    # -- structure ------------------------------------------------------------
    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def is_rational(self) -> bool:
        return all(d == 1 for d in self._terms)

    def radicands(self) -> list[int]:
        return sorted(d for d in self._terms if d != 1)

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("value is irrational")
        return self._terms.get(1, Fraction(0))

    def quadratic_form(self) -> tuple[int, int, int, int]:
        """Canonical ``(x, y, d, z)`` with value ``(x + y*sqrt(d))/z``.

        ``z > 0`` and ``gcd(x, y, z) = 1``. Rationals use ``y = 0, d = 1``.
        Only defined for at most one irrational radicand.
        """
        rad = self.radicands()
        if len(rad) > 1:
            raise ValueError("more than one irrational radicand")
        d = rad[0] if rad else 1
        a = self._terms.get(1, Fraction(0))
        b = self._terms.get(d, Fraction(0)) if rad else Fraction(0)
        z = a.denominator * b.denominator // math.gcd(a.denominator, b.denominator)
        x, y = int(a * z), int(b * z)
        g = math.gcd(math.gcd(x, y), z)
        return x // g, y // g, d, z // g

    # -- arithmetic -----------------------------------------------------------
    @staticmethod
    def _lift(o) -> "Surd":
        if isinstance(o, Surd):
            return o
        if isinstance(o, (int, Fraction)):
            return Surd.rational(o)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        out = Surd()
        out._terms = dict(self._terms)
        for d, c in o._terms.items():
            out._add_term(d, c)
        return out

    __radd__ = __add__

    def __neg__(self):
        out = Surd()
        out._terms = {d: -c for d, c in self._terms.items()}
        return out

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        out = Surd()
        for d1, c1 in self._terms.items():
            for d2, c2 in o._terms.items():
                out._add_term(d1 * d2, c1 * c2)
        return out

    __rmul__ = __mul__

    def conjugate(self) -> "Surd":
        rad = self.radicands()
        if len(rad) > 1:
            raise ValueError("conjugate needs a single radicand")
        out = Surd()
        out._terms = {d: (c if d == 1 else -c) for d, c in self._terms.items()}
        return out

    def inverse(self) -> "Surd":
        if not self._terms:
            raise ZeroDivisionError("division by zero surd")
        if self.is_rational():
            return Surd.rational(1 / self.as_fraction())
        conj = self.conjugate()
        norm = (self * conj).as_fraction()
        return conj * (1 / norm)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    # -- order ----------------------------------------------------------------
    def sign(self) -> int:
        if not self._terms:
            return 0
        rad = self.radicands()
        if len(rad) <= 1:
            a = self._terms.get(1, Fraction(0))
            b = self._terms.get(rad[0], Fraction(0)) if rad else Fraction(0)
            if a >= 0 and b >= 0:
                return 1
            if a <= 0 and b <= 0:
                return -1
            # opposite signs: compare a^2 with b^2 d
            diff = a * a - b * b * rad[0]
            return (1 if a > 0 else -1) * (1 if diff > 0 else -1)
        prec = max(get_precision(), 64)
        while prec <= _MAX_SIGN_PREC:
            iv = self.enclose(prec)
            if iv.a > 0:
                return 1
            if iv.b < 0:
                return -1
            prec *= 2
        raise ArithmeticError("sign undecided at maximum precision")

    def _cmp(self, other) -> int:
        return (self - self._lift(other)).sign()

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return not (self - o)._terms

    def __hash__(self):
        if self.is_rational():
            return hash(self.as_fraction())
        return hash(tuple(sorted(self._terms.items())))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- numerics -------------------------------------------------------------
    def enclose(self, prec: int | None = None):
        """mpmath interval containing the value."""
        prec = prec or get_precision()
        ctx = mpmath.iv
        old = ctx.prec
        ctx.prec = prec
        try:
            acc = ctx.mpf(0)
            for d, c in self._terms.items():
                term = ctx.mpf(c.numerator) / c.denominator
                if d != 1:
                    term = term * ctx.sqrt(d)
                acc = acc + term
            return acc
        finally:
            ctx.prec = old

    def mpf_bounds(self, prec: int | None = None):
        """Endpoints of :meth:`enclose` as plain mpmath ``mpf`` numbers."""
        lo, hi = self.enclose(prec)._mpi_
        return mpmath.mp.make_mpf(lo), mpmath.mp.make_mpf(hi)

    def float_bounds(self) -> tuple[float, float]:
        iv = self.enclose(max(get_precision(), 64))
        lo, hi = float(iv.a), float(iv.b)
        return _down(lo), _up(hi)

    def __float__(self):
        lo, hi = self.float_bounds()
        return 0.5 * (lo + hi)

    def to_mpf(self, prec: int | None = None):
        prec = prec or get_precision()
        with mpmath.workprec(prec + 20):
            iv = self.enclose(prec + 20)
            return (mpmath.mpf(iv.a) + mpmath.mpf(iv.b)) / 2

    def __repr__(self):
        if not self._terms:
            return "Surd(0)"
        parts = []
        for d in sorted(self._terms):
            c = self._terms[d]
            parts.append(str(c) if d == 1 else f"{c}*sqrt({d})")
        return "Surd(" + " + ".join(parts) + ")"

    def __str__(self):
        rad = self.radicands()
        if len(rad) <= 1:
            x, y, d, z = self.quadratic_form()
            if y == 0:
                return str(Fraction(x, z))
            rad = f"sqrt({d})" if y == 1 else f"-sqrt({d})" if y == -1 else f"{y}*sqrt({d})"
            num = (f"{x} - {rad[1:]}" if rad[0] == "-" else f"{x} + {rad}") if x else rad
            if z == 1:
                return num
            return f"{num}/{z}" if not x else f"({num})/{z}"
        out = ""
        for d in sorted(self._terms):
            c = self._terms[d]
            mag = abs(c)
            if d == 1:
                term = str(mag)
            else:
                term = f"sqrt({d})" if mag.numerator == 1 else f"{mag.numerator}*sqrt({d})"
                term += f"/{mag.denominator}" if mag.denominator != 1 else ""
            out += (" - " if c < 0 else " + ") + term if out else ("-" if c < 0 else "") + term
        return out
