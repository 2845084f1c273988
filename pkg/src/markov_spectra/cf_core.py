"""Continued fractions with exact values.

Finite expansions evaluate to :class:`fractions.Fraction`, eventually periodic
ones to :class:`~markov_spectra.surd.Surd`. Everything here is exact; floats
only appear in the enclosures carried by :class:`CFValue`.

Conventions: a word ``(a_1, ..., a_n)`` stands for ``[0; a_1, ..., a_n]``.
The Mobius map of a word sends a tail ``t`` in [0, 1] to
``[0; a_1, ..., a_n + t] = (p_n + p_{n-1} t) / (q_n + q_{n-1} t)``.
"""
from __future__ import annotations

import bisect
import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .config import get_precision
from .errors import InputError
from .surd import Surd

Word = tuple  # tuple[int, ...]


def check_word(word: Sequence[int], N: int | None = None) -> tuple[int, ...]:
    w = tuple(int(d) for d in word)
    for d in w:
        if d < 1 or (N is not None and d > N):
            bound = f"[1, {N}]" if N is not None else ">= 1"
            raise InputError(f"digit {d} outside {bound}")
    return w


# ---- text forms -------------------------------------------------------------

def parse_word(text: str) -> tuple[int, ...]:
    """``"2,1,1"`` -> ``(2, 1, 1)``; an empty string is the empty word."""
    text = text.strip().strip("()[]")
    if not text:
        return ()
    out, pos = [], 0
    for tok in text.split(","):
        try:
            out.append(int(tok))
        except ValueError:
            raise InputError(f"bad digit {tok.strip()!r} at position {pos} of {text!r}") from None
        pos += len(tok) + 1
    return check_word(out)


def format_word(word: Sequence[int]) -> str:
    return ",".join(str(d) for d in word)


@dataclass(frozen=True)
class Expansion:
    """``[a0; pre, overline{period}]``; an empty period means a finite expansion."""
    a0: int = 0
    pre: tuple[int, ...] = ()
    period: tuple[int, ...] = ()

    @property
    def finite(self) -> bool:
        return not self.period

    def digits(self) -> Iterator[int]:
        """a_1, a_2, ... (stops for finite expansions)."""
        yield from self.pre
        if self.period:
            yield from itertools.cycle(self.period)

    def value(self) -> "CFValue":
        if self.finite:
            return CFValue.of(eval_finite(self.pre, self.a0))
        return eval_periodic(self.pre, self.period, self.a0)

    def __str__(self):
        body = format_word(self.pre)
        if self.period:
            body = (body + ":" if body else "") + f"({format_word(self.period)})"
        return f"{self.a0};{body}"


_PERIOD_RE = re.compile(r"^\s*\(([^()]*)\)\*?\s*$")


def parse_expansion(text: str) -> Expansion:
    """Parse ``a0;pre:(period)``, ``a0;(period)``, ``a0;w`` or a bare word ``w``."""
    s = text.strip().strip("[]")
    if ";" in s:
        head, body = s.split(";", 1)
        try:
            a0 = int(head)
        except ValueError as exc:
            raise InputError(f"bad leading digit in {text!r}") from exc
    else:
        a0, body = 0, s
    body = body.strip()
    period: tuple[int, ...] = ()
    if "(" in body:
        if ":" in body:
            pre_txt, per_txt = body.split(":", 1)
        else:
            pre_txt, per_txt = "", body
        m = _PERIOD_RE.match(per_txt)
        if not m:
            raise InputError(f"bad period in {text!r}")
        period = parse_word(m.group(1))
        if not period:
            raise InputError("period must be nonempty")
        pre = parse_word(pre_txt)
    else:
        pre = parse_word(body)
    if a0 < 0:
        raise InputError("leading digit must be >= 0")
    return Expansion(a0, pre, period)


# ---- convergents ------------------------------------------------------------

@dataclass(frozen=True)
class Convergents:
    """Table of ``(p_k, q_k)`` for ``k = -2 .. n``."""
    a0: int
    word: tuple[int, ...]
    p: tuple[int, ...]
    q: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.word)

    def __getitem__(self, k: int) -> tuple[int, int]:
        if k < -2 or k + 2 >= len(self.p):
            raise IndexError(k)
        return self.p[k + 2], self.q[k + 2]

    def rows(self) -> list[tuple[int, int, int]]:
        return [(k - 2, p, q) for k, (p, q) in enumerate(zip(self.p, self.q))]

    def final(self) -> Fraction:
        p, q = self[self.n]
        return Fraction(p, q)


def convergents(word: Sequence[int], a0: int = 0) -> Convergents:
    """Convergent table of ``[a0; word]``.

    Row ``k >= 0`` uses digit ``a_k`` with ``a_0 = a0``. The empty word gives
    the two seed rows only.
    """
    w = check_word(word)
    digits = (int(a0),) + w
    p, q = [0, 1], [1, 0]
    for a in digits if w else ():
        p.append(a * p[-1] + p[-2])
        q.append(a * q[-1] + q[-2])
    return Convergents(int(a0), w, tuple(p), tuple(q))


def _pq(word: Sequence[int]) -> tuple[int, int, int, int]:
    """``(p_n, q_n, p_{n-1}, q_{n-1})`` for ``[0; word]`` (word may be empty)."""
    p1, q1, p0, q0 = 0, 1, 1, 0  # k = 0 (a0 = 0) and k = -1
    for a in word:
        p1, p0 = a * p1 + p0, p1
        q1, q0 = a * q1 + q0, q1
    return p1, q1, p0, q0


def mobius(word: Sequence[int]) -> tuple[int, int, int, int]:
    """Integer matrix ``(a, b, c, d)`` with ``[0; word + t] = (a + b t)/(c + d t)``."""
    p, q, pp, qq = _pq(word)
    return p, pp, q, qq


def apply_mobius(word: Sequence[int], t):
    a, b, c, d = mobius(word)
    return (a + b * t) / (c + d * t)


def eval_finite(word: Sequence[int], a0: int = 0) -> Fraction:
    p, q, _, _ = _pq(word)
    return a0 + Fraction(p, q)


# ---- values -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CFValue:
    """Exact value (rational or surd) plus an interval enclosure."""
    exact: Surd
    prec: int = field(default_factory=get_precision)

    @classmethod
    def of(cls, x) -> "CFValue":
        if not isinstance(x, Surd):
            x = Surd.rational(x)
        return cls(x)

    @property
    def enclosure(self):
        return self.exact.enclose(self.prec)

    @property
    def lo(self) -> float:
        return self.exact.float_bounds()[0]

    @property
    def hi(self) -> float:
        return self.exact.float_bounds()[1]

    def __float__(self):
        return float(self.exact)

    def __eq__(self, other):
        o = other.exact if isinstance(other, CFValue) else other
        return self.exact == o

    def __lt__(self, other):
        o = other.exact if isinstance(other, CFValue) else other
        return self.exact < o

    def __gt__(self, other):
        o = other.exact if isinstance(other, CFValue) else other
        return self.exact > o

    __hash__ = None

    def digits(self, n: int = 20) -> str:
        import mpmath
        with mpmath.workprec(self.prec):
            return mpmath.nstr(self.exact.to_mpf(self.prec), n)

    def __repr__(self):
        return f"CFValue({self.exact}, ~{self.digits(16)})"


def periodic_root(period: Sequence[int]) -> Surd:
    """``[0; overline{period}]`` as the positive fixed point of its Mobius map."""
    a, b, c, d = mobius(period)
    # x = (a + b x)/(c + d x)  <=>  d x^2 + (c - b) x - a = 0
    disc = (c - b) ** 2 + 4 * a * d
    return (Surd.sqrt(disc) - (c - b)) / (2 * d)


def eval_periodic(pre: Sequence[int], period: Sequence[int], a0: int = 0,
                  N: int | None = None) -> CFValue:
    """Exact value of ``[a0; pre, overline{period}]``."""
    pre = check_word(pre, N)
    period = check_word(period, N)
    if not period:
        raise InputError("period must be nonempty")
    x = periodic_root(period)
    a, b, c, d = mobius(pre)
    return CFValue(a0 + (x * b + a) / (x * d + c))


def tail_value(digits: Sequence[int], period: Sequence[int] = ()) -> Surd:
    """``[0; digits, overline{period}]`` as a Surd (finite if no period)."""
    if period:
        return eval_periodic(digits, period).exact
    return Surd.rational(eval_finite(digits))


# ---- cylinders --------------------------------------------------------------

@dataclass(frozen=True)
class CylinderInterval:
    word: tuple[int, ...]
    left: Fraction
    right: Fraction
    length: Fraction


def cylinder(word: Sequence[int]) -> CylinderInterval:
    """Closure of ``{[0; word, ...]}``; endpoints ``p_n/q_n`` and ``(p_n+p_{n-1})/(q_n+q_{n-1})``."""
    w = check_word(word)
    if not w:
        raise InputError("cylinder needs a nonempty word")
    p, q, pp, qq = _pq(w)
    e1 = Fraction(p, q)
    e2 = Fraction(p + pp, q + qq)
    # p_n/q_n is the left endpoint exactly when n is even
    left, right = (e1, e2) if len(w) % 2 == 0 else (e2, e1)
    return CylinderInterval(w, left, right, Fraction(1, q * (q + qq)))


def cylinder_length(word: Sequence[int]) -> Fraction:
    _, q, _, qq = _pq(word)
    return Fraction(1, q * (q + qq))


# ---- ordering ---------------------------------------------------------------

def canonical(exp: Expansion) -> Expansion:
    """Finite expansions ending in 1 are rewritten ``[..., a, 1] -> [..., a+1]``."""
    if exp.period or not exp.pre or exp.pre[-1] != 1:
        return exp
    pre = exp.pre[:-1]
    if pre:
        return Expansion(exp.a0, pre[:-1] + (pre[-1] + 1,), ())
    return Expansion(exp.a0 + 1, (), ())


@dataclass(frozen=True)
class Comparison:
    order: str                    # "<", "=" or ">"
    agree: int                    # number of equal digits a_1..a_n (a0 must agree)
    bound: Fraction | None        # 1/2^(n-1) when agree = n >= 1 and order != "="


def _horizon(x: Expansion, y: Expansion) -> int:
    if x.finite or y.finite:
        return max(len(x.pre), len(y.pre)) + 1
    return max(len(x.pre), len(y.pre)) + math.lcm(len(x.period), len(y.period))


def compare(x: Expansion, y: Expansion) -> Comparison:
    """Exact order of two expansions from their first differing digit.

    With ``a_k`` at index ``k`` (``a_0`` the integer part) and a finished
    expansion read as digit infinity, ``x > y`` iff ``(-1)^k (a_k - b_k) > 0``.
    """
    x, y = canonical(x), canonical(y)
    if x.a0 != y.a0:
        return Comparison(">" if x.a0 > y.a0 else "<", 0, None)
    gx, gy = x.digits(), y.digits()
    for k in range(1, _horizon(x, y) + 1):
        a, b = next(gx, None), next(gy, None)
        if a == b:
            if a is None:
                break
            continue
        if a is None:
            sign = 1
        elif b is None:
            sign = -1
        else:
            sign = 1 if a > b else -1
        if k % 2:
            sign = -sign
        n = k - 1
        bound = Fraction(1, 2 ** (n - 1)) if n >= 1 else None
        return Comparison(">" if sign > 0 else "<", n, bound)
    return Comparison("=", -1, None)


# ---- separation -------------------------------------------------------------

def A(N: int) -> Surd:
    """``[0; overline{N, 1}] = (-N + sqrt(N^2 + 4N)) / (2N)``, the left end of the Cantor set."""
    return (Surd.sqrt(N * N + 4 * N) - N) / (2 * N)


def B(N: int) -> Surd:
    """``[0; overline{1, N}] = (-N + sqrt(N^2 + 4N)) / 2``, the right end."""
    return (Surd.sqrt(N * N + 4 * N) - N) / 2


def A_bounds(N: int) -> tuple[Fraction, Fraction]:
    """Rational lower / upper bounds on ``A(N)`` (convergents of the periodic expansion)."""
    return _periodic_bounds((N, 1))


def B_bounds(N: int) -> tuple[Fraction, Fraction]:
    return _periodic_bounds((1, N))


def _periodic_bounds(period, reps: int = 12) -> tuple[Fraction, Fraction]:
    w = tuple(period) * reps
    # consecutive convergents bracket the value
    e1, e2 = eval_finite(w), eval_finite(w[:-1])
    return min(e1, e2), max(e1, e2)


def _normalized_gap(y1, y2, r):
    return (y2 - y1) * (1 + r) / ((y1 + r) * (y2 + r))


@dataclass(frozen=True)
class Separation:
    prefix: tuple[int, ...]
    N: int
    degenerate: bool
    gap: Surd | None             # exact min distance between the N-bounded pieces
    c_N: Surd | None             # min normalized gap over every prefix
    bound: Surd | None           # certified lower bound, equal to the gap
    rational_lower: Fraction | None


_C_CACHE: dict[int, Surd] = {}


def separation_constant(N: int) -> Surd:
    """``c(N)``: the least gap between adjacent pieces, relative to the parent cylinder.

    For a parent with ``r = q_{n-1}/q_n`` and pieces ``d``, ``d+1`` the
    relative gap is ``(y2 - y1)(1 + r)/((y1 + r)(y2 + r))`` with
    ``y1 = d + B_N`` and ``y2 = d + 1 + A_N``. Its logarithm is concave in r
    on [0, 1] because ``y1, y2 > 1.5``, so the minimum sits at r = 0 or 1.
    """
    if N < 2:
        raise InputError("separation constant needs N >= 2")
    if N not in _C_CACHE:
        a, b = A(N), B(N)
        cands = [_normalized_gap(d + b, d + 1 + a, Surd.rational(r))
                 for d in range(1, N) for r in (0, 1)]
        _C_CACHE[N] = min(cands)
    return _C_CACHE[N]


def separation_lower_bound(prefix: Sequence[int], N: int) -> Separation:
    if N < 1:
        raise InputError("N must be >= 1")
    w = check_word(prefix, N)
    if N == 1:
        return Separation(w, N, True, None, None, None, None)
    p, q, pp, qq = _pq(w)
    r = Fraction(qq, q)
    a, b = A(N), B(N)
    rel = min(_normalized_gap(d + b, d + 1 + a, Surd.rational(r)) for d in range(1, N))
    gap = rel * cylinder_length(w)
    lo, _ = gap.float_bounds()
    rat = Fraction(lo)
    if rat > 0 and Surd.rational(rat) > gap:
        rat = Fraction(0)
    return Separation(w, N, False, gap, separation_constant(N), gap, rat)


# ---- distortion -------------------------------------------------------------

def words_upto(N: int, depth: int, min_len: int = 0) -> Iterator[tuple[int, ...]]:
    for n in range(min_len, depth + 1):
        yield from itertools.product(range(1, N + 1), repeat=n)


def distortion_ratio(alpha: Sequence[int], beta: Sequence[int]) -> Fraction:
    """``|I(alpha beta)| / (|I(alpha)| |I(beta)|)``."""
    return cylinder_length(tuple(alpha) + tuple(beta)) / (
        cylinder_length(alpha) * cylinder_length(beta))


def _ratio_r(beta, r: Fraction) -> Fraction:
    p, q, pp, qq = _pq(beta)
    return (1 + r) * q * (q + qq) / ((q + r * p) * (q + qq + r * (p + pp)))


def distortion_constant(N: int, depth: int) -> Fraction:
    """Least ``C`` with ``C^-1 <= |I(ab)|/(|I(a)||I(b)|) <= C`` over ``|a|, |b| <= depth``.

    Only ``r = q_{n-1}/q_n`` of ``a`` matters, and the ratio as a function of
    r is unimodal with its peak where ``(r + 1)^2 = (1 - t1)(1 - t2)/(t1 t2)``
    (t1, t2 the endpoints of I(b)). The maximum over the finite r-set is
    therefore at the neighbours of the peak, the minimum at the extremes.
    """
    if N < 2 or depth < 1:
        raise InputError("need N >= 2 and depth >= 1")
    rs = sorted({Fraction(qq, q) for w in words_upto(N, depth, 1)
                 for _, q, _, qq in [_pq(w)]})
    sq = [(r + 1) ** 2 for r in rs]
    hi = lo = Fraction(1)
    for beta in words_upto(N, depth, 1):
        p, q, pp, qq = _pq(beta)
        t1, t2 = Fraction(p, q), Fraction(p + pp, q + qq)
        cands = {0, len(rs) - 1}
        if t1 > 0 and t2 > 0:
            k = bisect.bisect_left(sq, (1 - t1) * (1 - t2) / (t1 * t2))
            cands.update(i for i in (k - 1, k) if 0 <= i < len(rs))
        for i in cands:
            v = _ratio_r(beta, rs[i])
            hi = max(hi, v)
            lo = min(lo, v)
    return max(hi, 1 / lo)


def hull_length(word: Sequence[int], N: int) -> Surd:
    """Length of the convex hull of the N-bounded Cantor set inside ``I(word)``.

    Its endpoints are ``[0; word, overline{1, N}]`` and ``[0; word, overline{N, 1}]``.
    """
    w = check_word(word, N)
    a, b = A(N), B(N)
    return abs(apply_mobius(w, b) - apply_mobius(w, a))


@dataclass(frozen=True)
class GeometricRates:
    lam1: Surd
    lam2: Surd
    C: Surd


def geometric_rates(N: int) -> GeometricRates:
    """One-digit contraction range of the Gauss inverse branches on the Cantor hull.

    ``lam1 = 1/(N + B_N)^2`` and ``lam2 = 1/(1 + A_N)^2``. By the mean value
    theorem ``|I_N(w)| / (B_N - A_N)`` lies in ``[lam1^n, lam2^n]``, so
    ``C = 1/(B_N - A_N)`` makes ``C^-1 lam1^n <= |I_N(w)| <= C lam2^n``.
    """
    if N < 2:
        raise InputError("need N >= 2")
    a, b = A(N), B(N)
    lam1 = 1 / ((N + b) * (N + b))
    lam2 = 1 / ((1 + a) * (1 + a))
    return GeometricRates(lam1, lam2, 1 / (b - a))


# ---- constants --------------------------------------------------------------

LITERATURE_T1 = 3.334384  # first threshold of the Markov spectrum, not recomputed


def named_constants(Ns: Sequence[int] = (2,)) -> dict[str, CFValue]:
    phi = eval_periodic((), (1,)).exact
    out = {
        "c_F": CFValue(Surd.quadratic(2221564096, 283748, 462, 491993569)),
        "threshold_3.0406": CFValue(2 + phi + eval_periodic((2,), (2, 1)).exact),
        "threshold_3.4109": CFValue(2 + phi + eval_periodic((1, 3), (1, 4)).exact),
    }
    for N in Ns:
        root = Surd.sqrt(N * N + 4 * N)
        out[f"max_f_{N}"] = CFValue(root)
        out[f"min_f_{N}"] = CFValue(root / N)
        out[f"A_{N}"] = CFValue(A(N))
        out[f"B_{N}"] = CFValue(B(N))
    return out


# ---- closed-form child ratios -----------------------------------------------

def ratio_two_step(a, b, r):
    """``|I(w, a, b)| / |I(w)|`` in terms of ``r = q_{n-1}/q_n`` of w."""
    return (1 + r) / ((a * b + 1 + b * r) * (a * b + a + 1 + (b + 1) * r))


def ratio_three_step(a, b, c, r):
    """``|I(w, a, b, c)| / |I(w)|`` in terms of ``r = q_{n-1}/q_n`` of w."""
    s = a * b * c + c + a
    return (1 + r) / ((s + (b * c + 1) * r) * (s + a * b + 1 + (b * c + b + 1) * r))


def reverse_ratio(word: Sequence[int]) -> Fraction:
    """``q_{n-1}/q_n`` of a word, which equals ``[0; a_n, ..., a_1]``."""
    _, q, _, qq = _pq(word)
    return Fraction(qq, q)
