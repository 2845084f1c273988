"""Re-derivation of the published numbers, one named check at a time.

Each check reports the computed value, the published value and the margin
between them; a check passes when the computed value matches the published
digits or stays on the claimed side of a published bound.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction

import mpmath

from .cf_core import A, B, named_constants
from .dimension import FIRST_LIMIT, SECOND_LIMIT, TWO_LETTER_LIMIT, branch_sums_verify
from .errors import InputError
from .spectra import discrete_below_3
from .surd import Surd
from .symbolic_dynamics import BiSeq, markov_value


@dataclass
class Check:
    name: str
    computed: str
    published: str
    margin: float
    passed: bool

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag}  {self.name:<24} computed {self.computed:<28} published {self.published:<16} margin {self.margin:.3g}"

    def to_dict(self) -> dict:
        return asdict(self)


def _digits(x: Surd, places: int) -> str:
    """``x`` truncated (not rounded) to ``places`` decimals, from an exact enclosure."""
    iv = x.enclose(4 * places + 64)
    with mpmath.workdps(places + 20):
        scale = mpmath.mpf(10) ** places
        a, b = (int(mpmath.floor(mpmath.mpf(e) * scale)) for e in (iv.a, iv.b))
    if a != b:
        raise ArithmeticError("enclosure too wide for the requested digits")
    s = str(a).rjust(places + 1, "0")
    return f"{s[:-places]}.{s[-places:]}"


def _digit_check(name: str, x: Surd, published: str) -> Check:
    places = len(published.split(".")[1])
    got = _digits(x, places)
    return Check(name, got, published, abs(float(x) - float(published)), got == published)


def _equal_check(name: str, x: Surd, y: Surd, published: str) -> Check:
    return Check(name, str(x), published, abs(float(x - y)), x == y)


def _bound_check(name: str, value: float, limit: Fraction) -> Check:
    return Check(name, f"{value:.6f}", f"< {float(limit):g}", float(limit) - value,
                 Fraction(value) < limit)


def check_freiman() -> list[Check]:
    return [_digit_check("freiman c_F", named_constants()["c_F"].exact, "4.52782956616")]


def check_thresholds() -> list[Check]:
    c = named_constants()
    return [_digit_check("junction 3.0406", c["threshold_3.0406"].exact, "3.0406"),
            _digit_check("threshold 3.4109", c["threshold_3.4109"].exact, "3.4109")]


def check_max_min(Ns=(1, 2, 3, 4, 5)) -> list[Check]:
    out = []
    for N in Ns:
        root = Surd.sqrt(N * N + 4 * N)
        out.append(_equal_check(f"max f N={N}", 2 * B(N) + N, root, f"sqrt({N * N + 4 * N})"))
        out.append(_equal_check(f"min f N={N}", 2 * A(N) + 1, root / N,
                                f"sqrt({N * N + 4 * N})/{N}"))
    return out


def check_spectrum() -> list[Check]:
    vals = [v.exact for v in discrete_below_3(4)]
    want = [("k1", Surd.sqrt(5), "sqrt(5)"), ("k2", Surd.sqrt(8), "2*sqrt(2)"),
            ("k3", Surd.sqrt(221) / 5, "sqrt(221)/5")]
    out = [_equal_check(f"spectrum {k}", v, w, text) for (k, w, text), v in zip(want, vals)]
    k1 = markov_value(BiSeq.periodic((1,))).value.exact
    out.append(_equal_check("markov overline{1}", k1, Surd.sqrt(5), "sqrt(5)"))
    return out


def check_branch_sums(ms=range(1, 9)) -> list[Check]:
    out = []
    for m in ms:
        r = branch_sums_verify(m)
        out.append(_bound_check(f"branch m={m} first", r.first_sup, FIRST_LIMIT))
        out.append(_bound_check(f"branch m={m} second", r.second_sup, SECOND_LIMIT))
        out.append(_bound_check(f"branch m={m} second closed", r.second_closed, SECOND_LIMIT))
        tot = max(a + b for _, a, b in r.per_i)
        out.append(Check(f"branch m={m} total", f"{tot:.6f}", "< 1", 1 - tot, r.total_ok))
    return out


def check_two_letter() -> list[Check]:
    r = branch_sums_verify(1)
    return [_bound_check("two-letter sum", r.two_letter_sup, TWO_LETTER_LIMIT)]


CHECKS = {
    "freiman": check_freiman,
    "thresholds": check_thresholds,
    "maxmin": check_max_min,
    "spectrum": check_spectrum,
    "branch-sums": check_branch_sums,
    "two-letter": check_two_letter,
}


ALIASES = {"eq32": "branch-sums"}      # the name used in the interface description


def run_checks(only: str | None = None, m: int | None = None) -> list[Check]:
    only = ALIASES.get(only, only)
    if only is not None and only not in CHECKS:
        raise InputError(f"unknown check {only!r}; choose from {', '.join(CHECKS)}")
    if m is not None and m < 1:
        raise InputError("m must be at least 1")
    out = []
    for name, fn in CHECKS.items():
        if only is not None and name != only:
            continue
        out.extend(fn([m]) if name == "branch-sums" and m is not None else fn())
    return out
