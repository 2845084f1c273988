"""Eventually periodic bi-infinite sequences and the functionals lambda_i, m, l.

A :class:`BiSeq` is ``... P P P TL ; TR Q Q Q ...`` with every block written
in natural left-to-right order. Position 0 is the first digit after ``;``.

    lambda_i = a_i + [0; a_{i+1}, a_{i+2}, ...] + [0; a_{i-1}, a_{i-2}, ...]

Both tails are eventually periodic, so every lambda_i is an exact Surd.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .cf_core import (
    CFValue, Expansion, _pq, check_word, compare, eval_periodic, format_word,
    parse_word,
)
from .errors import InputError
from .interval import fraction_bounds
from .surd import Surd


def _primitive(w: tuple[int, ...]) -> tuple[int, ...]:
    n = len(w)
    for k in range(1, n + 1):
        if n % k == 0 and w[:k] * (n // k) == w:
            return w[:k]
    return w


def _rotate(w: tuple[int, ...], k: int) -> tuple[int, ...]:
    k %= len(w)
    return w[k:] + w[:k]


@dataclass(frozen=True)
class BiSeq:
    left_period: tuple[int, ...]
    left_transient: tuple[int, ...]
    right_transient: tuple[int, ...]
    right_period: tuple[int, ...]
    N: int | None = None

    def __post_init__(self):
        if not self.left_period or not self.right_period:
            raise InputError("both periods must be nonempty")
        for part in (self.left_period, self.left_transient,
                     self.right_transient, self.right_period):
            check_word(part, self.N)

    # -- construction -----------------------------------------------------------
    @classmethod
    def periodic(cls, w: Sequence[int], N: int | None = None) -> "BiSeq":
        w = tuple(w)
        return cls(w, (), (), w, N)

    @classmethod
    def make(cls, P, TL, TR, Q, N=None) -> "BiSeq":
        return cls(tuple(P), tuple(TL), tuple(TR), tuple(Q), N).normalized()

    def normalized(self) -> "BiSeq":
        """Primitive periods with transients absorbed; the origin is kept."""
        P, TL = _primitive(self.left_period), self.left_transient
        while TL and TL[0] == P[0]:
            TL, P = TL[1:], _rotate(P, 1)
        Q, TR = _primitive(self.right_period), self.right_transient
        while TR and TR[-1] == Q[-1]:
            TR, Q = TR[:-1], _rotate(Q, -1)
        return BiSeq(P, TL, TR, Q, self.N)

    @property
    def alphabet(self) -> int:
        return self.N or max(self.left_period + self.left_transient
                             + self.right_transient + self.right_period)

    # -- digits -----------------------------------------------------------------
    def __getitem__(self, i: int) -> int:
        TR, Q = self.right_transient, self.right_period
        if i >= 0:
            return TR[i] if i < len(TR) else Q[(i - len(TR)) % len(Q)]
        j = -i - 1
        TL, P = self.left_transient, self.left_period
        if j < len(TL):
            return TL[len(TL) - 1 - j]
        return P[len(P) - 1 - (j - len(TL)) % len(P)]

    def window(self, lo: int, hi: int) -> tuple[int, ...]:
        """Digits at positions ``lo .. hi - 1``."""
        return tuple(self[i] for i in range(lo, hi))

    def reflect(self) -> "BiSeq":
        """Mirror image; position i maps to ``-1 - i``."""
        return BiSeq(self.right_period[::-1], self.right_transient[::-1],
                     self.left_transient[::-1], self.left_period[::-1], self.N)

    def right_tail(self, i: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """``(pre, period)`` of ``a_{i+1}, a_{i+2}, ...``."""
        start = i + 1
        TR, Q = self.right_transient, self.right_period
        if start >= len(TR):
            return (), _rotate(Q, start - len(TR))
        return self.window(start, len(TR)), Q

    def left_tail(self, i: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """``(pre, period)`` of ``a_{i-1}, a_{i-2}, ...``."""
        return self.reflect().right_tail(-1 - i)

    def shift(self, k: int) -> "BiSeq":
        """The shifted sequence whose position 0 is position k of this one."""
        if k < 0:
            return self.reflect().shift(-k).reflect()
        TR, Q = self.right_transient, self.right_period
        if k <= len(TR):
            out = BiSeq(self.left_period, self.left_transient + TR[:k], TR[k:], Q, self.N)
        else:
            out = BiSeq(self.left_period, self.left_transient + self.window(0, k), (),
                        _rotate(Q, k - len(TR)), self.N)
        return out.normalized()

    # -- text -------------------------------------------------------------------
    def __str__(self):
        if (not self.left_transient and not self.right_transient
                and self.left_period == self.right_period):
            return f"({format_word(self.right_period)})*"
        return (f"({format_word(self.left_period)})*:{format_word(self.left_transient)};"
                f"{format_word(self.right_transient)}:({format_word(self.right_period)})*")


_BISEQ_RE = re.compile(r"^\(([^()]*)\)\*:([^;]*);([^:]*):\(([^()]*)\)\*$")
_PURE_RE = re.compile(r"^\(([^()]*)\)\*$")


def parse_biseq(text: str, N: int | None = None) -> BiSeq:
    s = text.replace(" ", "")
    m = _PURE_RE.match(s)
    if m:
        return BiSeq.periodic(parse_word(m.group(1)), N).normalized()
    m = _BISEQ_RE.match(s)
    if not m:
        raise InputError(f"bad sequence literal {text!r}; expected (P)*:TL;TR:(Q)*")
    P, TL, TR, Q = (parse_word(g) for g in m.groups())
    return BiSeq.make(P, TL, TR, Q, N)


# ---- lambda -----------------------------------------------------------------

def _tail_surd(pre, period) -> Surd:
    return eval_periodic(pre, period).exact


def lambda_exact(seq: BiSeq, i: int) -> Surd:
    return seq[i] + _tail_surd(*seq.right_tail(i)) + _tail_surd(*seq.left_tail(i))


def lambda_at(seq: BiSeq, i: int) -> CFValue:
    return CFValue(lambda_exact(seq, i))


_FLOAT_DEPTH = 30


def _tail_float_bounds(pre, period, depth: int = _FLOAT_DEPTH) -> tuple[float, float]:
    """Rigorous float bounds on ``[0; pre, overline{period}]`` by truncation."""
    digits = list(pre)
    while len(digits) < depth:
        digits.extend(period)
    p, q, pp, qq = _pq(digits)
    e1, e2 = Fraction(p, q), Fraction(p + pp, q + qq)
    lo, _ = fraction_bounds(min(e1, e2))
    _, hi = fraction_bounds(max(e1, e2))
    return lo, hi


def lambda_float_bounds(seq: BiSeq, i: int) -> tuple[float, float]:
    rl, rh = _tail_float_bounds(*seq.right_tail(i))
    ll, lh = _tail_float_bounds(*seq.left_tail(i))
    a = seq[i]
    lo, hi = a + rl + ll, a + rh + lh
    # two float additions, each off by at most half an ulp
    return math.nextafter(math.nextafter(lo, -math.inf), -math.inf), \
        math.nextafter(math.nextafter(hi, math.inf), math.inf)


# ---- Markov and Lagrange values ---------------------------------------------

LIMSUP_ONLY = "limsup-only"


@dataclass(frozen=True)
class ValueReport:
    value: CFValue
    attaining_index: Union[int, str]
    certified: bool = True


def _exact_max(cands):
    """Exact maximum of ``(key, thunk, (lo, hi))`` candidates.

    Float bounds discard most candidates; ``thunk()`` yields the exact Surd
    and is only called for the survivors. Returns the max and its keys.
    """
    best_lo = max(c[2][0] for c in cands)
    live = [c for c in cands if c[2][1] >= best_lo]
    vals = [(key, thunk()) for key, thunk, _ in live]
    top = vals[0][1]
    for _, v in vals[1:]:
        if v > top:
            top = v
    return top, [key for key, v in vals if v == top]


def markov_candidates(seq: BiSeq) -> list[int]:
    """Indices that, together with the periodic limits, decide ``sup lambda_i``.

    Past the transients, each step of one period applies a contracting Mobius
    map to the far tail, so along a residue class the deviation from the
    periodic limit shrinks strictly and flips sign by ``(-1)^period``. Two
    periods on each side are therefore enough.
    """
    s = seq.normalized()
    lo = -len(s.left_transient) - 2 * len(s.left_period)
    hi = len(s.right_transient) + 2 * len(s.right_period)
    return list(range(lo, hi + 1))


def _periodic_phase_values(period: tuple[int, ...]):
    pure = BiSeq.periodic(period)
    return [(k, (lambda k=k: lambda_exact(pure, k)), lambda_float_bounds(pure, k))
            for k in range(len(period))]


def markov_value(seq: BiSeq) -> ValueReport:
    s = seq.normalized()
    cands = [(i, (lambda i=i: lambda_exact(s, i)), lambda_float_bounds(s, i))
             for i in markov_candidates(s)]
    cands += [(("R", k), f, b) for k, f, b in _periodic_phase_values(s.right_period)]
    cands += [(("L", k), f, b) for k, f, b in _periodic_phase_values(s.left_period)]
    top, keys = _exact_max(cands)
    idx = [k for k in keys if isinstance(k, int)]
    if idx:
        attaining: Union[int, str] = min(idx, key=lambda i: (abs(i), i))
    else:
        attaining = LIMSUP_ONLY
    return ValueReport(CFValue(top), attaining)


def lagrange_value(seq: BiSeq) -> ValueReport:
    """limsup of lambda_i as i -> +infinity: the max over one period of overline{Q}."""
    s = seq.normalized()
    top, _ = _exact_max(_periodic_phase_values(s.right_period))
    start = len(s.right_transient)
    attaining: Union[int, str] = LIMSUP_ONLY
    for i in range(start, start + 2 * len(s.right_period)):
        lo, hi = lambda_float_bounds(s, i)
        tl, th = top.float_bounds()
        if hi >= tl and lo <= th and lambda_exact(s, i) == top:
            attaining = i
            break
    return ValueReport(CFValue(top), attaining)


def brute_force_markov(seq: BiSeq, radius: int) -> Surd:
    """Max of lambda_i over ``|i| <= radius`` (a test oracle)."""
    best = None
    for i in range(-radius, radius + 1):
        v = lambda_exact(seq, i)
        if best is None or v > best:
            best = v
    return best


# ---- max-comparison inequality ----------------------------------------------

@dataclass(frozen=True)
class ComparisonRecord:
    R: int
    rhs: Surd
    margins: dict          # j -> rhs - lhs (exact)
    min_margin: Surd
    violations: list
    degenerate: bool


def _splice_right(alpha: BiSeq, head: tuple[int, ...], beta: Expansion) -> BiSeq:
    if beta.finite:
        raise InputError("beta words must be infinite (eventually periodic)")
    return BiSeq.make(alpha.left_period, alpha.left_transient,
                      head + beta.pre, beta.period, alpha.N)


def max_comparison_check(alpha: BiSeq, alpha_t: BiSeq, b1: Expansion, b2: Expansion,
                  b3: Expansion, R: int) -> ComparisonRecord:
    """Check ``lambda_j(alpha; head, b2) < max(m(alpha; head, b1), m(alpha~; head, b3)) + 2^(1-R)``.

    ``head`` is the common block at positions ``0 .. 2R+1``. The left-hand
    side is evaluated for every j in a window reaching two left periods past
    the left transient, and at the left periodic limit (key ``"-inf"``).
    """
    if R < 1:
        raise InputError("R must be >= 1")
    head = alpha.window(0, 2 * R + 2)
    if alpha_t.window(0, 2 * R + 2) != head:
        raise InputError("alpha and alpha~ must agree on positions 0..2R+1")
    o12 = compare(Expansion(0, b1.pre, b1.period), Expansion(0, b2.pre, b2.period)).order
    o23 = compare(Expansion(0, b2.pre, b2.period), Expansion(0, b3.pre, b3.period)).order
    if o12 == ">" or o23 == ">" or (o12 == "=" and o23 == "="):
        raise InputError("need [0;b1] <= [0;b2] <= [0;b3] with at least one strict")
    degenerate = o12 == "=" or o23 == "="
    s2 = _splice_right(alpha, head, b2)
    m1 = markov_value(_splice_right(alpha, head, b1)).value.exact
    m3 = markov_value(_splice_right(alpha_t, head, b3)).value.exact
    rhs = (m1 if m1 > m3 else m3) + Fraction(1, 2 ** (R - 1))
    lo = -len(s2.left_transient) - 2 * len(s2.left_period)
    margins = {j: rhs - lambda_exact(s2, j) for j in range(lo, 2 * R + 2)}
    left_limit, _ = _exact_max(_periodic_phase_values(s2.left_period))
    margins["-inf"] = rhs - left_limit
    min_margin = min(margins.values())
    bad = [j for j, m in margins.items() if (m.sign() < 0 if degenerate else m.sign() <= 0)]
    return ComparisonRecord(R, rhs, margins, min_margin, bad, degenerate)


# ---- sup of lambda_0 over a subshift ----------------------------------------

@dataclass(frozen=True)
class MaxLambdaResult:
    lo: Surd                 # Markov value of the witness
    hi: Fraction             # certified upper bound on the supremum
    witness: BiSeq
    nodes: int

    @property
    def width(self) -> float:
        return float(self.hi) - self.lo.float_bounds()[0]


def _tail_sup(digits: Sequence[int], ylo: Fraction, yhi: Fraction) -> Fraction:
    """sup of ``[0; digits, y]`` over ``y`` in ``[ylo, yhi]``."""
    p, q, pp, qq = _pq(digits)
    # the next partial quotient enters as (p y + pp)/(q y + qq), monotone in y
    return max(Fraction(p * y + pp, 1) / (q * y + qq) for y in (ylo, yhi))


def _greedy_completion(start, step, first_index: int):
    """Follow ``step`` from a vertex, picking digits that push the tail value up.

    Odd tail positions prefer small digits, even ones large digits. Returns
    ``(transient, period)`` of appended digits in reading order.
    """
    seen: dict = {}
    out: list[int] = []
    v, j = start, first_index
    while (v, j % 2) not in seen:
        seen[(v, j % 2)] = len(out)
        options = step(v)
        nxt = min(options, key=lambda u: u[1]) if j % 2 else max(options, key=lambda u: u[1])
        v = nxt[0]
        out.append(nxt[1])
        j += 1
    k = seen[(v, j % 2)]
    return tuple(out[:k]), tuple(out[k:])


def max_lambda0_on_subshift(graph, target_precision=Fraction(1, 10 ** 6),
                            max_nodes: int = 200_000) -> MaxLambdaResult:
    """Enclose ``sup lambda_0`` over the bi-infinite paths of ``graph``.

    Best-first branch and bound over central blocks. A block's bound adds
    the largest possible tails: the first unseen partial quotient lies in
    ``[1 + A_N, N + B_N]``. Incumbents are Markov values of periodic
    completions of popped blocks, which are themselves points of the subshift.
    """
    import heapq
    from .cf_core import A_bounds, B_bounds
    from .errors import EmptyResultError

    target_precision = Fraction(target_precision)
    if target_precision <= 0:
        raise InputError("target precision must be positive")
    core = graph.core()
    if not core.vertices:
        raise EmptyResultError("graph has no bi-infinite admissible sequence")
    N = core.N
    ylo = 1 + A_bounds(N)[0]
    yhi = N + B_bounds(N)[1]
    L = core.L
    pred = core.pred()
    fwd = lambda v: [(w, w[-1]) for w in core.succ[v]]
    bwd = lambda v: [(u, u[0]) for u in pred[v]]

    def ub(w, p):
        return w[p] + _tail_sup(w[p + 1:], ylo, yhi) + _tail_sup(w[:p][::-1], ylo, yhi)

    def witness(w, p):
        rt, rp = _greedy_completion(w[-L:], fwd, len(w) - p)
        lt, lp = _greedy_completion(w[:L], bwd, p + 1)
        return BiSeq.make(lp[::-1], lt[::-1] + w[:p], w[p:] + rt, rp, N)

    best: Surd | None = None
    best_w: BiSeq | None = None
    best_lo = -math.inf

    def offer(w, p):
        nonlocal best, best_w, best_lo
        s = witness(w, p)
        cands = [(i, (lambda i=i: lambda_exact(s, i)), lambda_float_bounds(s, i))
                 for i in markov_candidates(s)]
        hi_f = max(c[2][1] for c in cands)
        if hi_f < best_lo:
            return
        val = markov_value(s).value.exact
        if best is None or val > best or (val == best and str(s) < str(best_w)):
            best, best_w = val, s
            best_lo = val.float_bounds()[0]

    heap = []
    counter = 0
    for v in core.vertices:
        w = tuple(v)
        u = ub(w, 0)
        heap.append((-float(u), counter, u, w, 0))
        counter += 1
    heapq.heapify(heap)
    nodes = 0
    while heap:
        _, _, u, w, p = heap[0]
        if best is not None and u - Fraction(best_lo) <= target_precision / 2 \
                and Surd.rational(u) - best <= target_precision:
            break
        heapq.heappop(heap)
        nodes += 1
        if nodes > max_nodes:
            raise ArithmeticError("branch and bound exceeded its node budget")
        offer(w, p)
        if best is not None and Surd.rational(u) <= best:
            continue
        right, left = len(w) - p - 1, p
        if right <= left:
            kids = [(w + (d,), p) for _, d in fwd(w[-L:])]
        else:
            kids = [((d,) + w, p + 1) for _, d in bwd(w[:L])]
        for kw, kp in kids:
            ku = ub(kw, kp)
            if best is not None and float(ku) < best_lo:
                continue
            heapq.heappush(heap, (-float(ku), counter, ku, kw, kp))
            counter += 1
    hi = heap[0][2] if heap else None
    if hi is None or Surd.rational(hi) < best:
        hi = _upper_rational(best)
    return MaxLambdaResult(best, hi, best_w, nodes)


def _upper_rational(x: Surd) -> Fraction:
    _, hi = x.float_bounds()
    r = Fraction(hi)
    while Surd.rational(r) < x:
        r = Fraction(math.nextafter(float(r), math.inf))
    return r


lemma24_check = max_comparison_check    # name used in the interface description
