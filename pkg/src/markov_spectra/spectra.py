"""Sublevel sets of the horseshoe over digits ``1..N`` and their dimensions.

A window is a word ``a_{-l} .. a_l`` of length ``2l + 1``. Over its
cylinder every tail beyond the window ranges through the Cantor set
``[A_N, B_N]``, so each ``lambda_i`` with ``|i| <= l`` is enclosed by
evaluating the finite Mobius maps at the two ends. A window is

* pruned when some ``lambda_i`` is certainly above ``t + eps/4``;
* certified when the centre value is certainly at most ``t`` and the
  window lies on a cycle of such windows: the cycle is a periodic point
  whose Markov value is at most ``t``;
* possibly nonempty otherwise.

The graph of kept windows carries every sequence of ``Lambda_{t+eps/4}``
and the graph of certified windows sits inside ``Lambda_t``, which gives
two-sided bounds for ``D(t)``.
"""
from __future__ import annotations

import csv
import io
import json
import math
import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from itertools import product
from typing import Sequence

import numpy as np

from .cf_core import A, B, CFValue, apply_mobius, named_constants
from .dimension import COVER_BISECTION, DimBound, hd_bounds
from .errors import EmptyResultError, InputError
from .subshift_graph import Decomposition, TransitionGraph, scc_decompose
from .surd import Surd
from .symbolic_dynamics import BiSeq, markov_value

CERTIFIED = "certified-nonempty"
POSSIBLE = "possibly-nonempty"
PRUNED = "pruned"

_MARGIN = 1e-9            # float screening margin; closer calls are decided exactly


def as_surd(x) -> Surd:
    """Accept a Surd, a rational, a decimal string or ``sqrt(n)``."""
    if isinstance(x, Surd):
        return x
    if isinstance(x, (int, Fraction)):
        return Surd.rational(x)
    if isinstance(x, float):
        return Surd.rational(Fraction(repr(x)))
    text = str(x).strip().replace(" ", "")
    m = re.fullmatch(r"sqrt\(?(\d+)\)?", text)
    if m:
        return Surd.sqrt(int(m.group(1)))
    try:
        return Surd.rational(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise InputError(f"cannot read {x!r} as a number") from None


def max_f(N: int) -> Surd:
    """``max f`` over the horseshoe on digits ``1..N``: ``sqrt(N^2 + 4N)``."""
    return Surd.sqrt(N * N + 4 * N)


def ell_for(eps) -> int:
    """Least window radius with oscillation bound ``2 / 2^(l-1) < eps / 4``."""
    eps = Fraction(eps)
    if eps <= 0:
        raise InputError("eps must be positive")
    ell = 1
    while Fraction(2, 2 ** (ell - 1)) >= eps / 4:
        ell += 1
    return ell


# ---- enclosures of lambda_i over a cylinder --------------------------------------

def _tail_exact(digits: Sequence[int], N: int) -> tuple[Surd, Surd]:
    a, b = A(N), B(N)
    if not digits:
        return a, b
    u, v = apply_mobius(digits, a), apply_mobius(digits, b)
    return (u, v) if u <= v else (v, u)


def lambda_bounds_exact(word: Sequence[int], i: int, N: int) -> tuple[Surd, Surd]:
    """Exact min and max of ``lambda_i`` over sequences extending ``word``."""
    rlo, rhi = _tail_exact(word[i + 1:], N)
    llo, lhi = _tail_exact(word[:i][::-1], N)
    return word[i] + rlo + llo, word[i] + rhi + lhi


def _tail_float(D: np.ndarray, a: float, b: float):
    ya = np.full(len(D), a)
    yb = np.full(len(D), b)
    for col in range(D.shape[1] - 1, -1, -1):
        ya = 1.0 / (D[:, col] + ya)
        yb = 1.0 / (D[:, col] + yb)
    return np.minimum(ya, yb), np.maximum(ya, yb)


def _lambda_float(W: np.ndarray, i: int, a: float, b: float):
    rlo, rhi = _tail_float(W[:, i + 1:], a, b)
    llo, lhi = _tail_float(W[:, :i][:, ::-1], a, b)
    return W[:, i] + rlo + llo, W[:, i] + rhi + lhi


@dataclass(frozen=True)
class PruneCertificate:
    """A factor whose ``lambda`` at ``index`` exceeds the threshold on its whole cylinder."""
    word: tuple[int, ...]
    index: int
    bound: Surd

    def verify(self, N: int, threshold: Surd) -> bool:
        lo, _ = lambda_bounds_exact(self.word, self.index, N)
        return lo == self.bound and lo > threshold


@dataclass
class PruneResult:
    N: int
    t: Surd
    eps: Fraction
    ell: int
    status: dict                            # kept window -> CERTIFIED | POSSIBLE
    forbidden: list                         # PruneCertificate for minimal pruned factors
    diagnostic: str | None = None
    _certified_graph: TransitionGraph | None = field(default=None, repr=False)

    @property
    def threshold(self) -> Surd:
        return self.t + Surd.rational(self.eps / 4)

    @property
    def kept(self) -> list[tuple[int, ...]]:
        return sorted(self.status)

    def words(self, status: str) -> list[tuple[int, ...]]:
        return sorted(w for w, s in self.status.items() if s == status)

    def classify(self, word: Sequence[int]) -> str:
        """Status of any window; pruned ones contain a certified factor."""
        return self.status.get(tuple(word), PRUNED)

    def pruning_certificate(self, word: Sequence[int]) -> PruneCertificate | None:
        word = tuple(word)
        for c in self.forbidden:
            k = len(c.word)
            for j in range(len(word) - k + 1):
                if word[j:j + k] == c.word:
                    return PruneCertificate(c.word, c.index, c.bound)
        return None

    def witness(self, word: Sequence[int]) -> BiSeq:
        """Periodic point through a certified window, centred on it."""
        word = tuple(word)
        if self.status.get(word) != CERTIFIED:
            raise InputError(f"{word} is not certified")
        g = self._certified_graph
        prev = {word: None}
        queue = deque([word])
        while queue:
            v = queue.popleft()
            for w in g.succ[v]:
                if w == word:
                    path = [w]
                    while v is not None:
                        path.append(v)
                        v = prev[v]
                    path.reverse()          # word -> ... -> word
                    period = tuple(x[-1] for x in path[1:])
                    return BiSeq.periodic(period).shift(-self.ell - 1)
                if w not in prev:
                    prev[w] = v
                    queue.append(w)
        raise ArithmeticError("certified window lies on no cycle")

    def to_json(self, full: bool = False) -> str:
        out = {"schema": 1, "N": self.N, "t": str(self.t), "eps": str(self.eps), "ell": self.ell,
               "counts": {CERTIFIED: len(self.words(CERTIFIED)),
                          POSSIBLE: len(self.words(POSSIBLE)),
                          "forbidden_factors": len(self.forbidden)},
               "diagnostic": self.diagnostic}
        if full:
            fmt = lambda ws: [",".join(map(str, w)) for w in ws]
            out["words"] = {CERTIFIED: fmt(self.words(CERTIFIED)),
                            POSSIBLE: fmt(self.words(POSSIBLE))}
            out["forbidden"] = [{"word": ",".join(map(str, c.word)), "index": c.index,
                                 "bound": str(c.bound)} for c in self.forbidden]
        return json.dumps(out, indent=2)


def _check_t(N: int, t: Surd):
    if N < 1:
        raise InputError("N must be at least 1")
    if t > max_f(N):
        raise InputError(f"t = {t} exceeds max f = sqrt({N * N + 4 * N}) on this horseshoe")


def _exceeds(words: np.ndarray, thr: Surd, N: int):
    """Per word: an index whose lambda certainly exceeds ``thr``, or -1."""
    a, b = float(A(N)), float(B(N))
    thr_f = float(thr)
    n = words.shape[1]
    lbs = np.stack([_lambda_float(words, i, a, b)[0] for i in range(n)], axis=1)
    best = lbs.max(axis=1)
    arg = lbs.argmax(axis=1)
    out = np.where(best > thr_f + _MARGIN, arg, -1)
    for k in np.nonzero(np.abs(best - thr_f) <= _MARGIN)[0]:
        w = tuple(int(d) for d in words[k])
        for i in range(n):
            if lambda_bounds_exact(w, i, N)[0] > thr:
                out[k] = i
                break
    return out


def _safe(words: np.ndarray, t: Surd, N: int, centre: int) -> np.ndarray:
    """Windows whose centre value is at most ``t`` on the whole cylinder."""
    a, b = float(A(N)), float(B(N))
    ub = _lambda_float(words, centre, a, b)[1]
    t_f = float(t)
    ok = ub < t_f - _MARGIN
    for k in np.nonzero(np.abs(ub - t_f) <= _MARGIN)[0]:
        w = tuple(int(d) for d in words[k])
        ok[k] = lambda_bounds_exact(w, centre, N)[1] <= t
    return ok


def prune_words(N: int, t, eps, ell: int | None = None) -> PruneResult:
    """Classify the windows of radius ``ell`` against ``Lambda_{t + eps/4}``.

    Words are grown one digit at a time; a word survives only when both of
    its maximal proper factors survived, so every pruned window contains one
    of the recorded minimal factors.
    """
    t, eps = as_surd(t), Fraction(eps)
    _check_t(N, t)
    if eps <= 0:
        raise InputError("eps must be positive")
    ell = ell_for(eps) if ell is None else ell
    if ell < 1:
        raise InputError("window radius must be at least 1")
    thr = t + Surd.rational(eps / 4)
    L = 2 * ell + 1
    forbidden: list[PruneCertificate] = []
    level = np.arange(1, N + 1).reshape(-1, 1)
    for n in range(1, L + 1):
        if n > 1:
            alive = {tuple(r) for r in level.tolist()}
            cands = [w + (d,) for w in sorted(alive) for d in range(1, N + 1)
                     if w[1:] + (d,) in alive]
            level = np.array(cands, dtype=np.int64).reshape(-1, n)
        if len(level) == 0:
            break
        hit = _exceeds(level, thr, N)
        for k in np.nonzero(hit >= 0)[0]:
            w = tuple(int(d) for d in level[k])
            lo = lambda_bounds_exact(w, int(hit[k]), N)[0]
            if not lo > thr:
                raise ArithmeticError(f"float screening disagreed with exact bound on {w}")
            forbidden.append(PruneCertificate(w, int(hit[k]), lo))
        level = level[hit < 0]
    status: dict = {}
    cert_graph = None
    diagnostic = None
    if len(level) and level.shape[1] == L:
        safe = level[_safe(level, t, N, ell)]
        cert_graph = TransitionGraph([tuple(r) for r in safe.tolist()], N=N).core()
        certified = set(cert_graph.vertices)
        status = {tuple(r): (CERTIFIED if tuple(r) in certified else POSSIBLE)
                  for r in level.tolist()}
    if not status:
        diagnostic = (f"every window of radius {ell} is pruned: t + eps/4 = {float(thr):.6g} is below "
                      f"every Markov value reachable with digits 1..{N} (the smallest is sqrt(5))")
    return PruneResult(N, t, eps, ell, status, forbidden, diagnostic, cert_graph)


def build_Pt(result: PruneResult) -> tuple[TransitionGraph, Decomposition]:
    """Graph of kept windows, core-pruned and decomposed."""
    if not result.status:
        raise EmptyResultError(result.diagnostic or "no kept windows")
    g = TransitionGraph(result.kept, N=result.N).core()
    if not g.vertices:
        raise EmptyResultError("kept windows carry no bi-infinite sequence")
    return g, scc_decompose(g)


def certified_graph(result: PruneResult) -> TransitionGraph:
    return result._certified_graph if result._certified_graph is not None \
        else TransitionGraph([], N=result.N)


# ---- D(t) and d(t) ---------------------------------------------------------------

def d_enclosure(b: DimBound) -> tuple[Fraction, Fraction]:
    """``d = min{1, 2 D}`` applied to both ends."""
    return min(Fraction(1), 2 * b.lo), min(Fraction(1), 2 * b.hi)


def D_estimate(N: int, t, eps, ell: int | None = None, depth: int = 10) -> DimBound:
    """Enclosure of ``D(t)``: the kept graph bounds it above, the certified graph below."""
    res = prune_words(N, t, eps, ell)
    g, _ = build_Pt(res)
    hi = hd_bounds(g, depth)
    cg = certified_graph(res)
    lo = hd_bounds(cg, depth).lo if cg.vertices else Fraction(0)
    lo = min(lo, hi.hi)
    return DimBound(lo, hi.hi, depth, COVER_BISECTION, hi.distortion,
                    (("kept", len(res.status)), ("certified", len(cg.vertices))))


@dataclass
class SpectrumScan:
    N: int
    ts: list
    bounds: list                     # DimBound for D(t), tightened by monotonicity
    hypothesis: list                 # "interior (Hall ray)" or "assumed"
    increases: list = field(default_factory=list)
    inconclusive: list = field(default_factory=list)

    @property
    def d(self) -> list[tuple[Fraction, Fraction]]:
        return [d_enclosure(b) for b in self.bounds]

    def bracket(self) -> tuple | None:
        """Grid points just below and at the certified onset of ``d = 1``."""
        below = [t for t, (lo, hi) in zip(self.ts, self.d) if hi < 1]
        above = [t for t, (lo, hi) in zip(self.ts, self.d) if lo == 1]
        if not below or not above:
            return None
        return below[-1], above[0]

    def to_csv(self) -> str:
        out = io.StringIO()
        wr = csv.writer(out, lineterminator="\n")
        wr.writerow(["t", "D_lo", "D_hi", "d_lo", "d_hi", "hypothesis"])
        for t, b, (dl, dh), h in zip(self.ts, self.bounds, self.d, self.hypothesis):
            wr.writerow([f"{float(t):.10g}", f"{float(b.lo):.6f}", f"{float(b.hi):.6f}",
                         f"{float(dl):.6f}", f"{float(dh):.6f}", h])
        return out.getvalue()


def scan(N: int, t_grid: Sequence, eps, ell: int | None = None, depth: int = 10) -> SpectrumScan:
    """``D`` enclosures along a grid; ``D`` is non-decreasing, which tightens both ends."""
    ts = [as_surd(t) for t in t_grid]
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise InputError("grid must be strictly increasing")
    raw = [D_estimate(N, t, eps, ell, depth) for t in ts]
    los = [b.lo for b in raw]
    his = [b.hi for b in raw]
    for i in range(1, len(ts)):
        los[i] = max(los[i], los[i - 1])
    for i in range(len(ts) - 2, -1, -1):
        his[i] = min(his[i], his[i + 1])
    bounds = [DimBound(lo, hi, b.depth, b.method, b.distortion, b.parts)
              for lo, hi, b in zip(los, his, raw)]
    cF = named_constants()["c_F"].exact
    hyp = ["interior (Hall ray)" if t >= cF else "assumed" for t in ts]
    out = SpectrumScan(N, ts, bounds, hyp)
    for i in range(len(ts) - 1):
        (out.increases if bounds[i].hi < bounds[i + 1].lo else out.inconclusive).append((i, i + 1))
    return out


# ---- the discrete part below 3 -------------------------------------------------------

def _necklaces(alphabet: Sequence[int], max_period: int):
    """Primitive words up to rotation, each as its least rotation."""
    for n in range(1, max_period + 1):
        for w in product(alphabet, repeat=n):
            rots = [w[k:] + w[:k] for k in range(n)]
            if w == min(rots) and len(set(rots)) == n:
                yield w


def _surd_cmp(a: Surd, b: Surd) -> int:
    return (a - b).sign()


def discrete_below_3(max_period: int) -> list[CFValue]:
    """Exact Markov values below 3 of periodic words over {1, 2}."""
    if max_period < 1:
        raise InputError("max_period must be at least 1")
    seen = set()
    for w in _necklaces((1, 2), max_period):
        v = markov_value(BiSeq.periodic(w)).value.exact
        if v < 3:
            seen.add(v)
    return [CFValue(v) for v in sorted(seen, key=cmp_to_key(_surd_cmp))]
