import itertools
from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from markov_spectra.cf_core import (
    A, B, Expansion, canonical, check_word, compare, convergents, cylinder,
    cylinder_length, distortion_constant, distortion_ratio, eval_finite,
    eval_periodic, geometric_rates, hull_length, mobius, named_constants,
    parse_expansion, ratio_three_step, ratio_two_step, reverse_ratio,
    separation_constant, separation_lower_bound, words_upto,
)
from markov_spectra.errors import InputError
from markov_spectra.surd import Surd

words = st.lists(st.integers(1, 5), max_size=12).map(tuple)


def mp_cf(a0, digits):
    """Independent evaluation of a finite expansion with mpmath, back to front."""
    with mpmath.workdps(60):
        x = mpmath.mpf(0)
        for d in reversed(digits):
            x = 1 / (d + x)
        return a0 + x


def exact(x):
    man, exp = x.man_exp
    return sympy.Rational(int(man)) * sympy.Rational(2) ** int(exp)


def sym(s: Surd):
    return sum(sympy.Rational(c.numerator, c.denominator) * sympy.sqrt(d)
               for d, c in s.terms.items())


# ---- convergents ------------------------------------------------------------

def test_convergents_fibonacci():
    assert convergents((1, 1, 1, 1)).final() == Fraction(3, 5)


def test_convergents_2_2():
    c = convergents((2, 2))
    assert c[1][1] == 2 and c[2][1] == 5


def test_convergents_empty_seed_only():
    assert convergents(()).rows() == [(-2, 0, 1), (-1, 1, 0)]


@given(words, st.integers(0, 4))
def test_convergent_recurrence_and_determinant(w, a0):
    c = convergents(w, a0)
    if not w:
        return
    digits = (a0,) + w
    for k in range(0, len(w) + 1):
        p, q = c[k]
        p1, q1 = c[k - 1]
        p2, q2 = c[k - 2]
        assert p == digits[k] * p1 + p2 and q == digits[k] * q1 + q2
        assert p * q1 - p1 * q == (-1) ** (k - 1)
    N = max(w)
    for k in range(1, len(w) + 1):
        q, q1 = c[k][1], c[k - 1][1]
        assert Fraction(q, N + 1) <= q1 <= q
        if k >= 2:
            assert q > q1
    assert mpmath.almosteq(mp_cf(a0, w), mpmath.mpf(c.final().numerator) / c.final().denominator)


# ---- periodic values --------------------------------------------------------

def test_golden_ratio():
    v = eval_periodic((), (1,))
    assert v.exact == (Surd.sqrt(5) - 1) / 2
    assert abs(float(v) - 0.6180339887) < 1e-10


def test_B2_and_A2():
    assert eval_periodic((), (1, 2), N=2).exact == (Surd.sqrt(12) - 2) / 2
    assert eval_periodic((), (2, 1), N=2).exact == (Surd.sqrt(12) - 2) / 4
    assert abs(float(B(2)) - 0.7320508) < 1e-7
    assert abs(float(A(2)) - 0.3660254) < 1e-7


def test_eval_periodic_rejects_out_of_range():
    with pytest.raises(InputError):
        eval_periodic((), (1, 3), N=2)
    with pytest.raises(InputError):
        eval_periodic((1,), ())


@settings(max_examples=60)
@given(st.lists(st.integers(1, 4), max_size=4).map(tuple),
       st.lists(st.integers(1, 4), min_size=1, max_size=4).map(tuple),
       st.integers(0, 3))
def test_eval_periodic_fixed_point_and_enclosure(pre, period, a0):
    v = eval_periodic(pre, period, a0)
    x = eval_periodic((), period).exact
    a, b, c, d = mobius(period)
    assert (a + b * x) / (c + d * x) == x
    # deep truncation oracle
    deep = mp_cf(a0, pre + period * 40)
    assert abs(float(v) - float(deep)) < 1e-12
    # enclosure holds the sympy value
    lo, hi = v.exact.mpf_bounds()
    s = sym(v.exact)
    assert exact(lo) <= s <= exact(hi)


def test_quadratic_form_canonical():
    x, y, d, z = eval_periodic((), (2, 1)).exact.quadratic_form()
    assert (x, y, d, z) == (-1, 1, 3, 2)


# ---- cylinders --------------------------------------------------------------

def test_cylinder_examples():
    c = cylinder((1,))
    assert {c.left, c.right} == {Fraction(1, 2), Fraction(1)} and c.length == Fraction(1, 2)
    assert cylinder((2, 2)).length == Fraction(1, 35)
    assert cylinder((1, 1)).length == Fraction(1, 6)


def test_cylinder_length_exhaustive():
    for N in range(1, 5):
        for w in words_upto(N, 6 if N <= 3 else 5, 1):
            c = cylinder(w)
            assert c.length == c.right - c.left
            assert c.length == cylinder_length(w)


@given(st.lists(st.integers(1, 6), min_size=1, max_size=8).map(tuple))
def test_cylinder_orientation(w):
    # brute force: points with tail 0 and tail 1 are the two endpoints
    c = cylinder(w)
    lo, hi = sorted([eval_finite(w), eval_finite(w[:-1] + (w[-1] + 1,))])
    assert (c.left, c.right) == (lo, hi)
    inner = eval_finite(w + (3,))
    assert c.left < inner < c.right


# ---- compare ----------------------------------------------------------------

def test_compare_examples():
    E = parse_expansion
    assert compare(E("0;1"), E("0;2")).order == ">"
    assert compare(E("0;1,2"), E("0;1,3")).order == "<"
    assert compare(E("0;(1)"), E("0;(1)")).order == "="


def test_compare_dual_representation():
    E = parse_expansion
    assert compare(E("0;2,3,1"), E("0;2,4")).order == "="
    assert compare(E("0;1"), E("1;")).order == "="
    assert canonical(E("0;1,1")) == Expansion(0, (2,), ())


def test_compare_all_short_words():
    ws = list(words_upto(3, 5, 1))
    vals = {w: eval_finite(w) for w in ws}
    for x, y in itertools.product(ws, repeat=2):
        got = compare(Expansion(0, x), Expansion(0, y)).order
        want = "<" if vals[x] < vals[y] else ">" if vals[x] > vals[y] else "="
        assert got == want, (x, y)


@settings(max_examples=400)
@given(st.lists(st.integers(1, 3), max_size=6).map(tuple),
       st.lists(st.integers(1, 3), max_size=6).map(tuple))
def test_compare_matches_exact_values(x, y):
    vx, vy = eval_finite(x), eval_finite(y)
    want = "<" if vx < vy else ">" if vx > vy else "="
    res = compare(Expansion(0, x), Expansion(0, y))
    assert res.order == want
    if res.bound is not None:
        assert abs(vx - vy) < res.bound


@settings(max_examples=100)
@given(st.lists(st.integers(1, 3), max_size=3).map(tuple),
       st.lists(st.integers(1, 3), min_size=1, max_size=3).map(tuple),
       st.lists(st.integers(1, 3), max_size=3).map(tuple),
       st.lists(st.integers(1, 3), min_size=1, max_size=3).map(tuple))
def test_compare_periodic_matches_surds(p1, c1, p2, c2):
    vx, vy = eval_periodic(p1, c1).exact, eval_periodic(p2, c2).exact
    want = "<" if vx < vy else ">" if vx > vy else "="
    assert compare(Expansion(0, p1, c1), Expansion(0, p2, c2)).order == want


# ---- separation -------------------------------------------------------------

def test_separation_empty_prefix():
    s = separation_lower_bound((), 2)
    want = eval_periodic((1,), (1, 2)).exact - eval_periodic((2,), (2, 1)).exact
    assert s.gap == want


def test_separation_prefix_1():
    s = separation_lower_bound((1,), 2)
    # r = 1 is where the relative gap is least, so the gap equals c(2)|I(1)|
    assert s.gap == s.c_N * Fraction(1, 2)
    assert s.rational_lower <= s.gap.float_bounds()[1]
    assert Surd.rational(s.rational_lower) <= s.gap


def test_separation_degenerate_N1():
    assert separation_lower_bound((1, 1), 1).degenerate
    with pytest.raises(InputError):
        separation_lower_bound((), 0)


def test_separation_constant_brute_force():
    # oracle: sample pairs of Cantor points with long periodic tails
    for N in (2, 3):
        c = float(separation_constant(N))
        for w in words_upto(N, 3):
            I = float(cylinder_length(w)) if w else 1.0
            best = min(
                abs(mp_cf(0, w + (d,) + (1, N) * 30) - mp_cf(0, w + (d + 1,) + (N, 1) * 30))
                for d in range(1, N))
            assert best / I >= c * (1 - 1e-12)
            s = separation_lower_bound(w, N)
            assert abs(float(s.gap) - float(best)) < 1e-12


# ---- distortion -------------------------------------------------------------

def test_distortion_single_pair():
    assert distortion_ratio((1,), (1,)) == Fraction(2, 3)
    assert distortion_ratio((), (2, 1)) == 1


def test_distortion_depth1_brute_force():
    want = max(max(r, 1 / r) for a in [(1,), (2,)] for b in [(1,), (2,)]
               for r in [distortion_ratio(a, b)])
    assert distortion_constant(2, 1) == want


@pytest.mark.parametrize("N,depth", [(2, 3), (3, 2), (2, 4)])
def test_distortion_matches_exhaustive(N, depth):
    ws = list(words_upto(N, depth, 1))
    want = max(max(r, 1 / r) for a in ws for b in ws for r in [distortion_ratio(a, b)])
    assert distortion_constant(N, depth) == want


def test_distortion_monotone_and_bounds():
    prev = Fraction(1)
    for depth in range(1, 7):
        C = distortion_constant(3, depth)
        assert C >= prev
        prev = C
    C8 = distortion_constant(2, 8)
    for a in words_upto(2, 4, 1):
        for b in words_upto(2, 4, 1):
            r = distortion_ratio(a, b)
            assert 1 / C8 <= r <= C8


def test_geometric_rates_bound_hulls():
    for N in (2, 3):
        g = geometric_rates(N)
        lam1, lam2, C = (float(x) for x in (g.lam1, g.lam2, g.C))
        for w in words_upto(N, 6, 1):
            L = float(hull_length(w, N))
            n = len(w)
            assert L >= lam1 ** n / C * (1 - 1e-9)
            assert L <= C * lam2 ** n * (1 + 1e-9)


# ---- closed forms -----------------------------------------------------------

@given(st.lists(st.integers(1, 4), max_size=6).map(tuple),
       st.integers(1, 4), st.integers(1, 4), st.integers(1, 4))
def test_child_ratio_closed_forms(w, a, b, c):
    r = reverse_ratio(w)
    base = cylinder_length(w)
    assert cylinder_length(w + (a, b)) / base == ratio_two_step(a, b, r)
    assert cylinder_length(w + (a, b, c)) / base == ratio_three_step(a, b, c, r)


# ---- constants --------------------------------------------------------------

def test_named_constants():
    t = named_constants((2,))
    assert t["c_F"].digits(12) == "4.52782956616"
    assert t["threshold_3.0406"].digits(12).startswith("3.0406")
    assert t["threshold_3.4109"].digits(12).startswith("3.4109")
    assert t["max_f_2"].exact == Surd.sqrt(12)
    assert abs(float(t["max_f_2"]) - 3.4641016) < 1e-7
    # at least 15 correct digits: compare with an mpmath evaluation
    with mpmath.workdps(40):
        cf = (2221564096 + 283748 * mpmath.sqrt(462)) / 491993569
        assert abs(t["c_F"].exact.to_mpf() - cf) < mpmath.mpf(10) ** -30
        phi = (mpmath.sqrt(5) - 1) / 2
        thr = 2 + phi + mp_cf(0, (2,) + (2, 1) * 60)
        assert abs(t["threshold_3.0406"].exact.to_mpf() - thr) < mpmath.mpf(10) ** -20


def test_max_min_f_identities():
    for N in range(1, 6):
        root = Surd.sqrt(N * N + 4 * N)
        assert 2 * B(N) + N == root
        assert N * (2 * A(N) + 1) == root
        assert named_constants((N,))[f"min_f_{N}"].exact == root / N


def test_parse_expansion_forms():
    assert parse_expansion("0;2:(2,1)") == Expansion(0, (2,), (2, 1))
    assert parse_expansion("0;(1)") == Expansion(0, (), (1,))
    assert parse_expansion("2,1,1") == Expansion(0, (2, 1, 1), ())
    for bad in ("x;1", "0;1:(", "0;1,0", "0;()"):
        with pytest.raises(InputError):
            parse_expansion(bad)
    with pytest.raises(InputError):
        check_word((1, 3), 2)
