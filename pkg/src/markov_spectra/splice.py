"""The block-insertion map ``theta`` and an empirical Holder-exponent probe.

A base stream from a small subshift is cut at increasing positions; after
cut ``n`` the block ``h_n = (connector, central block, connector)`` is
inserted. The central block is the radius-``r(n)`` window of a point that
attains ``max f`` on the ``n``-th subshift of the chain, and the connectors
are exact-length paths inside that subshift, so every inserted stretch stays
admissible. ``r(n) = n + r0``; ``c(n)`` is the mixing constant; the cut
after insertion ``n`` sits at base position ``P(s(n))`` with
``s(n) = sum_{k<=n} (2 r(k) + 2 c(k) + 1)`` and ``P`` either the factorial
or, for desk-scale demonstrations, the square.
"""
from __future__ import annotations

import itertools
import math
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .cf_core import A, B, eval_finite
from .errors import InputError, NotMixingError
from .subshift_graph import MIXING, TRIVIAL, TransitionGraph, connector, mixing_constant, scc_decompose
from .spectra import _lambda_float
from .surd import Surd
from .symbolic_dynamics import LIMSUP_ONLY, max_lambda0_on_subshift, markov_value

RULES = ("factorial", "power")


@dataclass
class ChainLink:
    graph: TransitionGraph
    decomposition: object
    mixing: int
    witness: object              # BiSeq attaining max f on the subshift
    centre: int
    max_lo: Surd
    max_hi: Fraction


def prepare_chain(graphs: Sequence[TransitionGraph],
                  target_precision=Fraction(1, 10 ** 8)) -> list[ChainLink]:
    """Witness blocks and connector data for each subshift of a chain."""
    out = []
    for g in graphs:
        core = g.core()
        d = scc_decompose(core)
        if len(d.components) != 1 or d.transient_states:
            raise InputError("each chain subshift must be a single transitive component")
        if d.kinds[0] != MIXING and not (d.kinds[0] == TRIVIAL and len(core) == 1):
            raise NotMixingError("chain subshifts must be mixing")
        mx = max_lambda0_on_subshift(core, target_precision)
        at = markov_value(mx.witness).attaining_index
        out.append(ChainLink(core, d, mixing_constant(d, 0), mx.witness,
                             0 if at == LIMSUP_ONLY else at, mx.lo, mx.hi))
    return out


def default_r0(chain: Sequence[ChainLink]) -> int:
    """Smallest offset with ``1/2^(r(1)-1)`` below the first gap between chain maxima."""
    gaps = [float(a.max_lo) - float(b.max_lo) for a, b in zip(chain, chain[1:])]
    gap = min((g for g in gaps if g > 0), default=1.0)
    r = 2
    while 2.0 ** -(r - 1) >= gap and r < 30:
        r += 1
    return r - 1


def cut_position(s: int, rule: str) -> int:
    if rule == "factorial":
        return math.factorial(s)
    if rule == "power":
        return s * s
    raise InputError(f"unknown position rule {rule!r}; use one of {RULES}")


@dataclass
class SpliceSchedule:
    rule: str
    r0: int
    radii: list = field(default_factory=list)
    connector_lengths: list = field(default_factory=list)
    s: list = field(default_factory=list)
    positions: list = field(default_factory=list)   # base digits emitted before h_n
    starts: list = field(default_factory=list)      # output index where h_n begins
    blocks: list = field(default_factory=list)      # h_n
    links: list = field(default_factory=list)       # chain index used by h_n

    def planned(self, chain: Sequence[ChainLink], n: int) -> tuple[int, int, int, int]:
        """``(r(n), c(n), s(n), P(s(n)))`` for insertion ``n`` (1-based)."""
        tot = 0
        for k in range(1, n + 1):
            link = chain[min(k, len(chain)) - 1]
            r, c = k + self.r0, link.mixing
            tot += 2 * r + 2 * c + 1
        return r, c, tot, cut_position(tot, self.rule)


def _central_block(link: ChainLink, r: int) -> tuple[int, ...]:
    return link.witness.window(link.centre - r, link.centre + r + 1)


def _connect(link: ChainLink, a: tuple, b: tuple) -> tuple[int, ...]:
    """``c`` digits that join vertex ``a`` to vertex ``b`` (which follows them)."""
    L, c = link.graph.L, link.mixing
    members = set(link.decomposition.components[0])
    if a not in members or b not in members:
        raise InputError(f"cannot connect {a} to {b} inside the chain subshift")
    path = connector(link.decomposition, 0, a, b, length=c + L)
    return path.digits[:c]


def splice_theta(base: Iterable[int], chain: Sequence[ChainLink], prefix_length: int | None = None,
                 r0: int | None = None, rule: str = "factorial") -> tuple[tuple[int, ...], SpliceSchedule]:
    """Emit the digits ``a_1, a_2, ...`` of ``theta(a)``.

    ``prefix_length=None`` runs until a finite base is exhausted. An empty
    chain gives the identity.
    """
    if rule not in RULES:
        raise InputError(f"unknown position rule {rule!r}; use one of {RULES}")
    if prefix_length is None and not isinstance(base, (tuple, list)):
        raise InputError("an infinite base needs a prefix length")
    r0 = (default_r0(chain) if chain else 1) if r0 is None else r0
    sched = SpliceSchedule(rule, r0)
    it = iter(base)
    look: deque = deque()

    def peek(k):
        while len(look) < k:
            try:
                look.append(next(it))
            except StopIteration:
                return None
        return tuple(itertools.islice(look, 0, k))

    out: list[int] = []
    used = 0                     # base digits emitted so far
    n = 1
    nxt = sched.planned(chain, 1) if chain else None
    limit = math.inf if prefix_length is None else prefix_length
    while len(out) < limit:
        if nxt is not None and used == nxt[3]:
            link = chain[min(n, len(chain)) - 1]
            r, c, s_n, pos = nxt
            L = link.graph.L
            block = _central_block(link, r)
            after = peek(L)
            if after is None or len(out) < L:
                break
            if len(block) < L:
                raise InputError("central block shorter than the vertex length")
            h = _connect(link, tuple(out[-L:]), block[:L]) + block
            h += _connect(link, block[-L:], after)
            sched.radii.append(r)
            sched.connector_lengths.append(c)
            sched.s.append(s_n)
            sched.positions.append(pos)
            sched.starts.append(len(out))
            sched.blocks.append(h)
            sched.links.append(min(n, len(chain)) - 1)
            out.extend(h)
            n += 1
            nxt = sched.planned(chain, n)
            continue
        d = peek(1)
        if d is None:
            break
        look.popleft()
        out.append(d[0])
        used += 1
    if prefix_length is not None:
        out = out[:prefix_length]
    return tuple(out), sched


# ---- audit of an emitted prefix ------------------------------------------------------

def window_lambda_bounds(digits: Sequence[int], N: int, radius: int = 24) -> tuple[np.ndarray, np.ndarray]:
    """Enclosures of ``lambda_i`` for every interior position of a finite stream.

    Position ``i`` uses digits ``i - radius .. i + radius``; tails beyond lie
    in ``[A_N, B_N]``. Returned arrays are indexed by ``i - radius``. Values
    are float evaluations widened by ``1e-12``.
    """
    W = np.lib.stride_tricks.sliding_window_view(np.asarray(digits, dtype=np.int64), 2 * radius + 1)
    lo, hi = _lambda_float(W, radius, float(A(N)), float(B(N)))
    return lo - 1e-12, hi + 1e-12


@dataclass
class SpliceAudit:
    per_insertion: list          # (n, max lambda upper bound, allowed bound, ok)
    final_estimate: float        # max lambda over the last insertion's window
    final_target: float          # max f of the subshift used by the last insertion
    admissible: bool

    @property
    def ok(self) -> bool:
        return self.admissible and all(row[3] for row in self.per_insertion)


def audit_splice(digits: Sequence[int], sched: SpliceSchedule, chain: Sequence[ChainLink],
                 N: int, radius: int = 24) -> SpliceAudit:
    """Check each inserted stretch against the chain's maxima and its admissibility."""
    lo, hi = window_lambda_bounds(digits, N, radius)
    cap = max(float(link.max_hi) for link in chain)
    rows, admissible = [], True
    final_est = math.nan
    for n, (start, h, r, li) in enumerate(zip(sched.starts, sched.blocks, sched.radii, sched.links), 1):
        a, b = max(start - r, radius), min(start + len(h) + r, len(digits) - radius)
        if a >= b:
            continue
        seg_hi = float(hi[a - radius:b - radius].max())
        allowed = cap + 2.0 ** -(r - 1)
        rows.append((n, seg_hi, allowed, seg_hi <= allowed))
        L = chain[li].graph.L
        lang = set(chain[li].graph.vertices)
        span = digits[max(start - L, 0):start + len(h) + L]
        admissible &= all(tuple(span[j:j + L]) in lang for j in range(len(span) - L + 1))
        mid = (lo[a - radius:b - radius] + hi[a - radius:b - radius]) / 2
        final_est = float(mid.max())
    target = float(chain[sched.links[-1]].max_lo) if sched.links else math.nan
    return SpliceAudit(rows, final_est, target, admissible)


# ---- Holder probe ----------------------------------------------------------------------

def _log_abs(x: Fraction) -> float:
    x = abs(x)
    return math.log(x.numerator) - math.log(x.denominator)


def sample_pairs(g: TransitionGraph, depths: Sequence[int], tail: int = 40,
                 seed: int = 0) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Pairs of admissible words that agree on exactly ``k`` digits, one per depth."""
    rng = random.Random(seed)
    core = g.core()
    L = core.L
    out = []
    for k in depths:
        if k < L:
            raise InputError(f"agreement depth {k} is below the vertex length {L}")
        while True:
            v = rng.choice(core.vertices)
            word = list(v)
            while len(word) < k:
                v = rng.choice(core.succ[v])
                word.append(v[-1])
            if len({w[-1] for w in core.succ[v]}) >= 2:
                break
        kids = rng.sample(core.succ[v], 2)
        pair = []
        for w in kids:
            seq, u = word + [w[-1]], w
            while len(seq) < k + 1 + tail:
                u = rng.choice(core.succ[u])
                seq.append(u[-1])
            pair.append(tuple(seq))
        out.append(tuple(pair))
    return out


@dataclass
class HolderFit:
    exponent: float
    intercept: float
    residuals: list
    depths: list
    n_pairs: int


def holder_exponent_probe(pairs: Sequence[tuple[Sequence[int], Sequence[int]]],
                          chain: Sequence[ChainLink], r0: int | None = None,
                          rule: str = "power") -> HolderFit:
    """Least-squares slope of ``log|a1 - a2|`` against ``log|theta(a1) - theta(a2)|``.

    An illustration of the Holder behaviour of ``theta``, not a proof.
    """
    if len(pairs) < 30:
        raise InputError("the probe needs at least 30 pairs")
    xs, ys, depths = [], [], []
    for u, v in pairs:
        u, v = tuple(u), tuple(v)
        k = next((j for j, (x, y) in enumerate(zip(u, v)) if x != y), None)
        if k is None:
            continue
        tu, _ = splice_theta(u, chain, None, r0, rule)
        tv, _ = splice_theta(v, chain, None, r0, rule)
        xs.append(_log_abs(eval_finite(tu) - eval_finite(tv)))
        ys.append(_log_abs(eval_finite(u) - eval_finite(v)))
        depths.append(k)
    if not depths:
        raise InputError("degenerate sample: every pair is equal")
    if max(depths) < 100 * min(depths):
        raise InputError("agreement depths must span at least two decades")
    x, y = np.array(xs), np.array(ys)
    xm, ym = x.mean(), y.mean()
    slope = float(np.sum((x - xm) * (y - ym)) / np.sum((x - xm) ** 2))
    icpt = float(ym - slope * xm)
    return HolderFit(slope, icpt, list(y - (slope * x + icpt)), depths, len(depths))
