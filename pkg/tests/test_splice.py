import itertools
import math

import numpy as np
import pytest

from markov_spectra.errors import InputError, NotMixingError
from markov_spectra.subshift_graph import TransitionGraph
from markov_spectra.splice import (
    audit_splice, cut_position, holder_exponent_probe, prepare_chain, sample_pairs,
    splice_theta, window_lambda_bounds,
)
from markov_spectra.surd import Surd
from markov_spectra.symbolic_dynamics import BiSeq, lambda_exact

GOLDEN = TransitionGraph.from_word_set([(1, 1), (1, 2), (2, 1)])
SPARSE = TransitionGraph.from_word_set([(1, 1, 1), (1, 1, 2), (1, 2, 1), (2, 1, 1)])
BASE = TransitionGraph.from_word_set([(1, 1, 1, 1), (1, 1, 1, 2), (1, 1, 2, 1),
                                      (1, 2, 1, 1), (2, 1, 1, 1)])


@pytest.fixture(scope="module")
def chain():
    return prepare_chain([GOLDEN, SPARSE])


@pytest.fixture(scope="module")
def spliced(chain):
    return splice_theta(itertools.repeat(1), chain, 10_000, r0=3, rule="power")


def strip_blocks(digits, sched):
    out, at = [], 0
    for start, h in zip(sched.starts, sched.blocks):
        out.extend(digits[at:start])
        at = start + len(h)
    out.extend(digits[at:])
    return out


# ---- chain --------------------------------------------------------------------------

def test_chain_maxima(chain):
    assert chain[0].max_lo == Surd.sqrt(12)
    assert chain[1].max_lo == 4 * Surd.sqrt(6) / 3
    assert [c.mixing for c in chain] == [2, 4]


def test_chain_rejects_periodic_orbit():
    swap = TransitionGraph([(1,), (2,)], [((1,), (2,)), ((2,), (1,))])
    with pytest.raises(NotMixingError):
        prepare_chain([swap])


def test_chain_rejects_two_components():
    two = TransitionGraph.from_word_set([(1, 1), (2, 2)])
    with pytest.raises(InputError):
        prepare_chain([two])


# ---- theta ---------------------------------------------------------------------------

def test_empty_chain_is_identity():
    base = tuple((1, 2, 2, 1, 1, 1, 2) * 30)
    digits, sched = splice_theta(base, [])
    assert digits == base and sched.blocks == []


def test_infinite_base_needs_prefix(chain):
    with pytest.raises(InputError):
        splice_theta(itertools.repeat(1), chain)


def test_unknown_rule(chain):
    with pytest.raises(InputError):
        splice_theta((1,) * 50, chain, rule="cubic")
    with pytest.raises(InputError):
        cut_position(5, "cubic")


def test_schedule_structure(spliced, chain):
    digits, sched = spliced
    assert len(digits) == 10_000 and len(sched.blocks) == 4
    assert sched.positions == [169, 1024, 2809, 5776]
    for n, (r, c, s, h) in enumerate(zip(sched.radii, sched.connector_lengths,
                                         sched.s, sched.blocks), 1):
        assert r == n + sched.r0
        assert len(h) == 2 * r + 2 * c + 1
        assert sched.planned(chain, n) == (r, c, s, s * s)
    for n, start in enumerate(sched.starts):
        assert start == sched.positions[n] + sum(len(h) for h in sched.blocks[:n])


def test_base_segments_survive(spliced):
    digits, sched = spliced
    rest = strip_blocks(digits, sched)
    assert set(rest) == {1}


def test_factorial_rule_position(chain):
    base = (1,) * 5100
    digits, sched = splice_theta(base, chain[:1], r0=0, rule="factorial")
    assert sched.s[0] == 7 and sched.positions == [math.factorial(7)]
    assert sched.starts == [5040] and digits[:5040] == base[:5040]
    assert strip_blocks(digits, sched) == list(base)


def test_blocks_are_admissible(spliced, chain):
    digits, sched = spliced
    for start, h, li in zip(sched.starts, sched.blocks, sched.links):
        g = chain[li].graph
        span = digits[start - g.L:start + len(h) + g.L]
        lang = g.language(g.L + 1)
        assert all(tuple(span[j:j + g.L + 1]) in lang for j in range(len(span) - g.L))


def test_central_block_is_witness_window(spliced, chain):
    digits, sched = spliced
    for start, h, r, c, li in zip(sched.starts, sched.blocks, sched.radii,
                                  sched.connector_lengths, sched.links):
        link = chain[li]
        assert h[c:c + 2 * r + 1] == link.witness.window(link.centre - r, link.centre + r + 1)


def test_connector_leaving_subshift_rejected(chain):
    with pytest.raises(InputError):
        splice_theta((2,) * 400, chain[1:], r0=3, rule="power")


def test_audit(spliced, chain):
    digits, sched = spliced
    audit = audit_splice(digits, sched, chain, 2)
    assert audit.ok and len(audit.per_insertion) == 4
    assert abs(audit.final_estimate - audit.final_target) < 1e-3


def test_window_bounds_enclose_exact():
    seq = BiSeq.periodic((1, 1, 2))
    digits = seq.window(0, 120)
    lo, hi = window_lambda_bounds(digits, 2, radius=24)
    for i in (24, 40, 77):
        v = float(lambda_exact(seq, i))
        assert lo[i - 24] <= v <= hi[i - 24]
        assert hi[i - 24] - lo[i - 24] < 1e-12 + 2.0 ** -20


# ---- Holder probe ---------------------------------------------------------------------

DEPTHS = sorted({int(round(x)) for x in np.geomspace(8, 1200, 34)})


def test_sample_pairs_agreement_depth():
    for (u, v), k in zip(sample_pairs(BASE, DEPTHS[:10]), DEPTHS[:10]):
        assert u[:k] == v[:k] and u[k] != v[k]


def test_probe_identity_exact():
    fit = holder_exponent_probe(sample_pairs(BASE, DEPTHS), [])
    assert fit.exponent == 1.0 and fit.n_pairs == len(DEPTHS)


def test_probe_nontrivial(chain):
    fit = holder_exponent_probe(sample_pairs(BASE, DEPTHS), chain)
    assert fit.exponent >= 0.85 and len(fit.residuals) == fit.n_pairs


def test_probe_needs_30_pairs(chain):
    with pytest.raises(InputError):
        holder_exponent_probe(sample_pairs(BASE, DEPTHS[:29]), chain)


def test_probe_rejects_degenerate():
    pairs = [((1,) * 60, (1,) * 60)] * 40
    with pytest.raises(InputError):
        holder_exponent_probe(pairs, [])


def test_probe_needs_two_decades():
    pairs = sample_pairs(BASE, list(range(10, 45)))
    with pytest.raises(InputError):
        holder_exponent_probe(pairs, [])
