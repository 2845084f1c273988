"""Certified Hausdorff-dimension bounds for Gauss-Cantor sets of subshifts.

The unstable Cantor set of a graph is ``{[0; a_1, a_2, ...]}`` over the
right-infinite paths of its core. Bounds come from a weighted one-step ratio
test on contexts (the last ``k`` digits of a word): with ``r = q_{n-1}/q_n``,
the child ratio ``|I(w c)| / |I(w)|`` equals ``(1+r)/((c+r)(c+1+r))`` and ``r``
lies in the cylinder of the reversed context. Positive weights ``x`` on
contexts turn the test into

    sum_c ratio_c(r)^s * x[child] <= x[ctx]   (for every r in the cylinder)

which makes the weighted s-sums of depth-n covers non-increasing, so the
dimension is at most ``s``. The reversed inequality yields a mass
distribution with ``mu(I) <= C |I|^s`` and hence a lower bound. Weights
are the Perron vector of the midpoint ratio matrix; the tests themselves
run in outward-rounded float arithmetic, so the weights only affect
sharpness.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .cf_core import _pq, cylinder, cylinder_length
from .errors import EmptyResultError, InputError
from .subshift_graph import (
    TRIVIAL, Decomposition, TransientSet, TransitionGraph, classify_components,
    scc_decompose,
)
from .interval import Interval, fraction_bounds, log_int_bounds, vdown, vpow_positive, vup

GRID_BITS = 14                  # s is bisected on k / 2**14 (step < 1e-4)
_EPS = 2.0 ** -52

COVER_BISECTION = "cover-bisection"
SUBMULTIPLICATIVE = "submultiplicative"
SUPERMULTIPLICATIVE = "supermultiplicative"


@dataclass(frozen=True)
class CoverSum:
    s: Fraction
    depth: int
    value: Interval
    cover_size: int


@dataclass(frozen=True)
class DimBound:
    lo: Fraction
    hi: Fraction
    depth: int
    method: str = COVER_BISECTION
    distortion: float = 1.0
    parts: tuple = ()

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"inverted dimension bound [{self.lo}, {self.hi}]")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, x) -> bool:
        return self.lo <= Fraction(x) <= self.hi

    def scaled(self, k: int) -> "DimBound":
        return DimBound(k * self.lo, k * self.hi, self.depth, self.method, self.distortion)

    def to_json(self) -> str:
        return json.dumps({"lo": str(self.lo), "hi": str(self.hi), "depth": self.depth,
                           "method": self.method, "distortion": self.distortion})

    def __str__(self):
        return f"[{float(self.lo):.6f}, {float(self.hi):.6f}]"


ZERO = DimBound(Fraction(0), Fraction(0), 0)


def _check_s(s) -> Fraction:
    s = Fraction(s)
    if not 0 < s <= 1:
        raise InputError(f"exponent s must lie in (0, 1], got {s}")
    return s


def _nonempty_core(g: TransitionGraph) -> TransitionGraph:
    core = g.core()
    if not core.vertices:
        raise EmptyResultError("graph has an empty core (no bi-infinite paths)")
    return core


# ---- cover sums --------------------------------------------------------------

def cover_value(cover: Iterable[Sequence[int]], s) -> Interval:
    """Enclosure of ``sum |I(w)|^s`` using exact lengths and log-domain powers."""
    s_lo, s_hi = fraction_bounds(Fraction(s))
    lows, highs = [], []
    for w in cover:
        _, q, _, qq = _pq(w)
        llo, lhi = log_int_bounds(q * (q + qq))      # log(1/|I|) in [llo, lhi]
        lows.append(-lhi)
        highs.append(-llo)
    if not lows:
        return Interval(0.0, 0.0)
    lo_log, hi_log = np.array(lows), np.array(highs)
    # log |I| < 0, so s * log |I| is smallest with the largest s
    plo = vdown(lo_log * s_hi)
    phi = vup(hi_log * s_lo)
    elo, ehi = vdown(np.exp(plo), 3), vup(np.exp(phi), 3)
    n = len(lows)
    tot_lo = float(np.sum(elo)) * (1 - 2 * n * _EPS)
    tot_hi = float(np.sum(ehi)) * (1 + 2 * n * _EPS)
    return Interval(float(vdown(np.float64(tot_lo))), float(vup(np.float64(tot_hi))))


def cover_sum(g: TransitionGraph, depth: int, s) -> CoverSum:
    """``H_s`` of the cover by all admissible depth-``depth`` cylinders of ``g``."""
    s = _check_s(s)
    if depth < 1:
        raise InputError("depth must be at least 1")
    words = sorted(_nonempty_core(g).language(depth))
    return CoverSum(s, depth, cover_value(words, s), len(words))


def cover_csv(cover: Iterable[Sequence[int]]) -> str:
    out = io.StringIO()
    wr = csv.writer(out, lineterminator="\n")
    wr.writerow(["word", "length_num", "length_den"])
    for w in cover:
        ln = cylinder_length(w)
        wr.writerow([",".join(map(str, w)), ln.numerator, ln.denominator])
    return out.getvalue()


# ---- cover refinement ---------------------------------------------------------

def forced_rule(letter: int) -> Callable:
    return lambda w: [tuple(w) + (letter,)]


def branching_rule(m: int, i: int) -> Callable:
    """Six children ``w,i,1,j`` and ``w,i+1,j`` for ``j`` in ``m+1..m+3``."""
    if not 1 <= i <= m + 2:
        raise InputError(f"i must lie in [1, {m + 2}]")
    js = range(m + 1, m + 4)
    return lambda w: [tuple(w) + (i, 1, j) for j in js] + [tuple(w) + (i + 1, j) for j in js]


def two_child_rule() -> Callable:
    """Children ``w,1,1`` and ``w,2,2`` (the alphabet-{1,2} branch)."""
    return lambda w: [tuple(w) + (1, 1), tuple(w) + (2, 2)]


def refine_cover(cover: Iterable[Sequence[int]], rule: Callable,
                 g: TransitionGraph | None = None) -> list[tuple[int, ...]]:
    """Replace every cylinder by the children the oracle names.

    Children must extend their parent; with a graph they must also be words
    of its language.
    """
    out = []
    langs: dict[int, set] = {}
    for w in cover:
        w = tuple(w)
        kids = [tuple(c) for c in rule(w)]
        if not kids:
            raise InputError(f"oracle returned no children for {w}")
        for c in kids:
            if len(c) <= len(w) or c[:len(w)] != w or min(c) < 1:
                raise InputError(f"oracle child {c} does not extend {w}")
            if g is not None:
                if len(c) not in langs:
                    langs[len(c)] = g.language(len(c))
                if c not in langs[len(c)]:
                    raise InputError(f"oracle child {c} is not admissible")
        out.extend(kids)
    return out


# ---- the per-branch inequalities ------------------------------------------------

def derivative_numerator(x, y, z, w, r):
    """Numerator of ``d/dr (1+r)/((x+yr)(z+wr))``."""
    return (x - y) * (z - w) - y * w * (r + 1) ** 2


def decreasing_on_nonnegative(x, y, z, w) -> bool:
    """The derivative numerator is below ``(x-y)(z-w)-yw`` for ``r >= 0``."""
    return (x - y) * (z - w) - y * w <= 0


def _term(x, y, z, w, r):
    return (1 + r) / ((x + y * r) * (z + w * r))


def _sup_over_r(terms, s, pieces: int) -> Interval:
    """Enclosure of an upper bound for ``sup_{r in [0,1]} sum term(r)^s``.

    Terms that are decreasing peak at the left end of each piece; the rest
    are bounded by numerator-high over denominator-low on the piece.
    """
    grid = [Fraction(k, pieces) for k in range(pieces + 1)]
    best = None
    for a, b in zip(grid, grid[1:]):
        tot = Interval(0.0, 0.0)
        for x, y, z, w in terms:
            if decreasing_on_nonnegative(x, y, z, w):
                v = _term(x, y, z, w, a)
            else:
                v = (1 + b) / ((x + y * a) * (z + w * a))
            tot = tot + Interval.from_fraction(v) ** Interval.from_fraction(s)
        best = tot if best is None or tot.hi > best.hi else best
        if all(decreasing_on_nonnegative(*t) for t in terms):
            break                               # the first piece dominates
    return best


def first_branch_terms(m: int, i: int):
    """Coefficients of ``|I(w,i,1,j)|/|I(w)|`` for ``j`` in ``m+1..m+3``."""
    out = []
    for j in range(m + 1, m + 4):
        s0 = i * j + j + i
        out.append((s0, j + 1, s0 + i + 1, j + 2))
    return out


def second_branch_terms(m: int, i: int):
    """Coefficients of ``|I(w,i+1,j)|/|I(w)|`` for ``j`` in ``m+1..m+3``."""
    return [((i + 1) * j + 1, j, (i + 1) * j + i + 2, j + 1) for j in range(m + 1, m + 4)]


TWO_LETTER_TERMS = [(2, 1, 3, 2), (5, 2, 7, 3)]   # children (1,1) and (2,2)
FIRST_LIMIT = Fraction(412, 1000)
SECOND_LIMIT = Fraction(579, 1000)
TWO_LETTER_LIMIT = Fraction(9, 10)


@dataclass
class BranchRecord:
    m: int
    s: Fraction
    first_sup: float            # certified upper bounds over i and r in [0,1]
    second_sup: float
    two_letter_sup: float
    first_closed: float         # the closed-form bounds at r = 0 and i = 1
    second_closed: float
    two_letter_closed: float
    first_ok: bool
    second_ok: bool
    two_letter_ok: bool
    total_ok: bool
    min_passing_s: Fraction | None
    per_i: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.first_ok and self.second_ok and self.two_letter_ok and self.total_ok


def _closed(vals, s) -> float:
    tot = Interval(0.0, 0.0)
    for v in vals:
        tot = tot + Interval.from_fraction(v) ** Interval.from_fraction(s)
    return tot.hi


def _branch_sups(m: int, s, pieces: int):
    per_i = []
    for i in range(1, m + 3):
        a = _sup_over_r(first_branch_terms(m, i), s, pieces).hi
        b = _sup_over_r(second_branch_terms(m, i), s, pieces).hi
        per_i.append((i, a, b))
    return per_i


def branch_sums_verify(m: int, s=Fraction(49, 100), pieces: int = 64) -> BranchRecord:
    """Check the two branch sums of the six-child refinement and the two-letter branch."""
    if m < 1:
        raise InputError("m must be at least 1")
    s = _check_s(s)
    per_i = _branch_sups(m, s, pieces)
    first = max(a for _, a, _ in per_i)
    second = max(b for _, _, b in per_i)
    two = _sup_over_r(TWO_LETTER_TERMS, s, pieces).hi
    js = range(m + 1, m + 4)
    first_c = _closed([Fraction(1, (2 * j + 1) * (2 * j + 3)) for j in js], s)
    second_c = _closed([Fraction(2, (2 * j + 1) * (2 * j + 3)) for j in js], s)
    two_c = _closed([Fraction(2, 6), Fraction(2, 35)], s)
    total_ok = all((Interval(a, a) + Interval(b, b)).hi < 1 for _, a, b in per_i)
    return BranchRecord(
        m, s, first, second, two, first_c, second_c, two_c,
        Fraction(first) < FIRST_LIMIT, Fraction(second) < SECOND_LIMIT,
        Fraction(two) < TWO_LETTER_LIMIT, total_ok, _min_passing_s(m, pieces), per_i)


def _passes(m: int, s, pieces: int) -> bool:
    ok = all((Interval(a, a) + Interval(b, b)).hi < 1 for _, a, b in _branch_sups(m, s, pieces))
    return ok and _sup_over_r(TWO_LETTER_TERMS, s, pieces).hi < 1


def _min_passing_s(m: int, pieces: int) -> Fraction | None:
    """Smallest s in {0.40, 0.41, ..., 0.50} for which every refinement contracts."""
    for k in range(40, 51):
        if _passes(m, Fraction(k, 100), pieces):
            return Fraction(k, 100)
    return None


# ---- the weighted ratio test ----------------------------------------------------

@dataclass
class _Contexts:
    k: int
    size: int
    parent: np.ndarray
    child: np.ndarray
    f_lo: np.ndarray
    f_hi: np.ndarray
    f_mid: np.ndarray
    degree: np.ndarray


def _contexts(h: TransitionGraph, k: int) -> _Contexts:
    ctx = sorted(h.language(k))
    index = {v: i for i, v in enumerate(ctx)}
    r_lo, r_hi, r_mid = [], [], []
    for v in ctx:
        cyl = cylinder(v[::-1])
        r_lo.append(fraction_bounds(cyl.left)[0])
        r_hi.append(fraction_bounds(cyl.right)[1])
        r_mid.append(float((cyl.left + cyl.right) / 2))
    parent, child, digit = [], [], []
    for u in h.language(k + 1):
        parent.append(index[u[:-1]])
        child.append(index[u[1:]])
        digit.append(u[-1])
    parent, child = np.array(parent), np.array(child)
    c = np.array(digit, dtype=float)
    lo, hi, mid = np.array(r_lo)[parent], np.array(r_hi)[parent], np.array(r_mid)[parent]
    den_lo = vdown(vdown(c + lo) * vdown(c + 1 + lo))
    den_hi = vup(vup(c + hi) * vup(c + 1 + hi))
    f_lo = vdown(vdown(1 + lo) / den_hi)
    f_hi = vup(vup(1 + hi) / den_lo)
    f_mid = (1 + mid) / ((c + mid) * (c + 1 + mid))
    degree = np.bincount(parent, minlength=len(ctx))
    return _Contexts(k, len(ctx), parent, child, f_lo, f_hi, f_mid, degree)


def _perron(cx: _Contexts, s: float, x0=None, iters: int = 4000) -> np.ndarray:
    w = cx.f_mid ** s
    x = np.ones(cx.size) if x0 is None else x0.copy()
    for _ in range(iters):
        y = x + np.bincount(cx.parent, weights=w * x[cx.child], minlength=cx.size)
        y /= y.max()
        if np.max(np.abs(y - x)) < 1e-15:
            return y
        x = y
    return x


def _sums(cx: _Contexts, s: float, x: np.ndarray):
    plo, phi = vpow_positive(cx.f_lo, cx.f_hi, s)
    slack = 2 * (cx.degree + 1) * _EPS
    lo = np.bincount(cx.parent, weights=vdown(plo * x[cx.child]), minlength=cx.size)
    hi = np.bincount(cx.parent, weights=vup(phi * x[cx.child]), minlength=cx.size)
    return vdown(lo * (1 - slack)), vup(hi * (1 + slack))


def _bisect(test: Callable[[float], bool], passing_high: bool) -> int:
    """Grid index of the sound bound; ``test`` is monotone in the grid sense."""
    top = 1 << GRID_BITS
    lo, hi = 0, top
    while hi - lo > 1:
        mid = (lo + hi) // 2
        ok = test(mid / top)
        if ok == passing_high:
            hi = mid
        else:
            lo = mid
    return hi if passing_high else lo


def _component_raw(h: TransitionGraph, k: int) -> tuple[Fraction, Fraction, float]:
    cx = _contexts(h, k)
    state = {"x": None}

    def upper_ok(s):
        x = _perron(cx, s, state["x"])
        state["x"] = x
        return bool(np.all(_sums(cx, s, x)[1] <= x))

    def lower_ok(s):
        x = _perron(cx, s, state["x"])
        state["x"] = x
        return bool(np.all(_sums(cx, s, x)[0] >= x))

    top = 1 << GRID_BITS
    hi_k = _bisect(upper_ok, True)
    if hi_k < top and not upper_ok(hi_k / top):
        hi_k = top
    x = _perron(cx, hi_k / top)
    spread = float(x.max() / x.min())
    lo_k = _bisect(lower_ok, False)
    if lo_k > 0 and not lower_ok(lo_k / top):
        lo_k = 0
    return Fraction(lo_k, top), Fraction(hi_k, top), spread


_RAW_CACHE: dict = {}


def _key(h: TransitionGraph):
    return (tuple(h.vertices), tuple(h.edges))


def _component_bounds(h: TransitionGraph, depth: int) -> tuple[Fraction, Fraction, float]:
    """Intersection of the raw bounds over all context lengths up to ``depth``."""
    lo, hi, spread = Fraction(0), Fraction(1), 1.0
    for k in range(h.L, max(depth, h.L) + 1):
        key = (_key(h), k)
        if key not in _RAW_CACHE:
            _RAW_CACHE[key] = _component_raw(h, k)
        a, b, sp = _RAW_CACHE[key]
        if b < hi:
            spread = sp
        lo, hi = max(lo, a), min(hi, b)
    if lo > hi:
        raise ArithmeticError("inconsistent certified bounds")
    return lo, hi, spread


def hd_bounds(g: TransitionGraph, depth: int) -> DimBound:
    """Enclosure of the dimension of the unstable Cantor set of ``g``."""
    if depth < 1:
        raise InputError("depth must be at least 1")
    d = scc_decompose(_nonempty_core(g))
    lo, hi, spread = Fraction(0), Fraction(0), 1.0
    for i, kind in enumerate(d.kinds):
        if kind == TRIVIAL:
            continue
        a, b, sp = _component_bounds(d.component_graph(i), depth)
        lo, hi, spread = max(lo, a), max(hi, b), max(spread, sp)
    return DimBound(lo, hi, depth, COVER_BISECTION, spread)


def hd_bounds_stable(g: TransitionGraph, depth: int) -> DimBound:
    """The stable Cantor set reads the past backwards: the reversed graph."""
    return hd_bounds(g.reversed(), depth)


# ---- finite-type sets -------------------------------------------------------------

def _add(a: DimBound, b: DimBound) -> tuple[Fraction, Fraction]:
    return a.lo + b.lo, a.hi + b.hi


def component_dimension(d: Decomposition, unstable: Sequence[DimBound] | None = None,
                        transients: Sequence[TransientSet] | None = None,
                        stable: Sequence[DimBound] | None = None,
                        depth: int = 8) -> DimBound:
    """Dimension of the whole finite-type set: max over pieces.

    A component contributes ``HD(K^s) + HD(K^u)``; a transient set from
    ``source`` to ``sink`` contributes ``HD(K^s(source)) + HD(K^u(sink))``.
    Missing bounds are computed at ``depth``; trivial components count as 0.
    Where the stable and unstable bounds of a component are disjoint the
    discrepancy is recorded in ``parts`` rather than averaged away.
    """
    n = len(d.components)
    if unstable is None:
        unstable = [ZERO if d.kinds[i] == TRIVIAL else hd_bounds(d.component_graph(i), depth)
                    for i in range(n)]
    if stable is None:
        stable = list(unstable)
    if transients is None:
        transients = classify_components(d)[1]
    if len(unstable) != n or len(stable) != n:
        raise InputError("need one bound per component")
    unstable = [ZERO if d.kinds[i] == TRIVIAL else b for i, b in enumerate(unstable)]
    stable = [ZERO if d.kinds[i] == TRIVIAL else b for i, b in enumerate(stable)]
    parts = []
    for i in range(n):
        lo, hi = _add(stable[i], unstable[i])
        parts.append((f"component {i}", lo, hi))
        if stable[i].hi < unstable[i].lo or unstable[i].hi < stable[i].lo:
            parts.append((f"stable/unstable mismatch {i}", stable[i].lo, unstable[i].hi))
    for t in transients:
        lo, hi = _add(stable[t.source], unstable[t.sink])
        parts.append((f"transient {t.source}->{t.sink}", lo, hi))
    pieces = [p for p in parts if not p[0].startswith("stable/")]
    lo = max((p[1] for p in pieces), default=Fraction(0))
    hi = max((p[2] for p in pieces), default=Fraction(0))
    depth_used = max((b.depth for b in unstable), default=0)
    return DimBound(lo, hi, depth_used, COVER_BISECTION,
                    max((b.distortion for b in unstable), default=1.0), tuple(parts))


@dataclass(frozen=True)
class DropRecord:
    certified: bool
    sub: DimBound
    full: DimBound
    depth: int

    @property
    def status(self) -> str:
        return "certified" if self.certified else "inconclusive at this depth"


def strict_drop_check(sub: TransitionGraph, full: TransitionGraph, depth: int) -> DropRecord:
    """Certify ``HD(sub) < HD(full)`` for a strictly smaller subshift."""
    n = max(sub.L, full.L) + 1
    a, b = sub.language(n), full.language(n)
    if not a <= b:
        raise InputError("sub is not a sublanguage of full")
    if a == b:
        raise InputError("sub is not strictly contained in full")
    hs, hf = hd_bounds(sub, depth), hd_bounds(full, depth)
    return DropRecord(hs.hi < hf.lo, hs, hf, depth)


eq32_verify = branch_sums_verify        # name used in the interface description
