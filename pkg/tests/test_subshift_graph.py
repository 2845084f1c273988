import itertools
import random
import warnings

import numpy as np
import pytest

from markov_spectra.errors import InputError, NotMixingError
from markov_spectra.subshift_graph import (
    MIXING, PERIODIC, TRIVIAL, EmptyCoreWarning, TransitionGraph, TransientSet,
    classify_components, connector, mixing_constant, primitivity_exponent,
    scc_decompose,
)


def abstract(n, edges):
    """Graph on vertices (1,), ..., (n,); length-1 vertices accept any edge set."""
    return TransitionGraph([(i,) for i in range(1, n + 1)],
                           [((a,), (b,)) for a, b in edges], N=n)


def closure(n, edges):
    R = np.zeros((n, n), dtype=bool)
    for a, b in edges:
        R[a - 1, b - 1] = True
    for k in range(n):
        R = R | (R[:, [k]] & R[[k], :])
    return R


def check_against_closure(n, edges):
    g = abstract(n, edges)
    d = scc_decompose(g)
    R = closure(n, edges)
    recurrent = {i + 1 for i in range(n) if R[i, i]}
    assert {v[0] for v in d.transient_states} == set(range(1, n + 1)) - recurrent
    want = {frozenset(j + 1 for j in range(n) if R[i, j] and R[j, i]) for i in range(n) if R[i, i]}
    got = {frozenset(v[0] for v in c) for c in d.components}
    assert got == want
    # block-triangular: nothing reaches an earlier component
    pos = {v[0]: i for i, c in enumerate(d.components) for v in c}
    for a in pos:
        for b in pos:
            if R[a - 1, b - 1]:
                assert pos[b] >= pos[a]
    assert d.check_block_triangular()
    # transient sets: exactly the reachable ordered pairs
    _, ts = classify_components(d)
    want_ts = {(pos[a], pos[b]) for a in pos for b in pos
               if pos[a] != pos[b] and R[a - 1, b - 1]}
    assert {(t.source, t.sink) for t in ts} == want_ts
    return g, d, R


def test_scc_exhaustive_small():
    for n in range(1, 4):
        pairs = [(a, b) for a in range(1, n + 1) for b in range(1, n + 1)]
        for mask in range(1 << len(pairs)):
            check_against_closure(n, [p for k, p in enumerate(pairs) if mask >> k & 1])


def test_scc_exhaustive_four_vertices():
    pairs = [(a, b) for a in range(1, 5) for b in range(1, 5)]
    for mask in range(0, 1 << 16, 7):
        check_against_closure(4, [p for k, p in enumerate(pairs) if mask >> k & 1])


def test_scc_random_graphs():
    rng = random.Random(7)
    for _ in range(200):
        n = rng.randint(5, 40)
        p = rng.uniform(0.02, 0.2)
        edges = [(a, b) for a in range(1, n + 1) for b in range(1, n + 1) if rng.random() < p]
        check_against_closure(n, edges)


def closed_walk_exists(g, v, max_len):
    frontier = {v}
    for _ in range(max_len):
        frontier = {w for u in frontier for w in g.succ[u]}
        if v in frontier:
            return True
    return False


def test_nonwandering_iff_in_component():
    rng = random.Random(11)
    for _ in range(150):
        n = rng.randint(1, 6)
        edges = [(a, b) for a in range(1, n + 1) for b in range(1, n + 1) if rng.random() < 0.3]
        g = abstract(n, edges)
        d = scc_decompose(g)
        for v in g.vertices:
            assert closed_walk_exists(g, v, 2 * n) == (v in d.component_of)


def is_primitive(A):
    n = len(A)
    M = A.copy()
    for _ in range((n - 1) ** 2 + 1):
        if M.all():
            return True
        M = (M @ A > 0).astype(np.int64)
    return bool(M.all())


def test_kinds_against_matrix_oracle():
    rng = random.Random(3)
    for _ in range(200):
        n = rng.randint(1, 7)
        edges = [(a, b) for a in range(1, n + 1) for b in range(1, n + 1) if rng.random() < 0.35]
        g = abstract(n, edges)
        d = scc_decompose(g)
        for comp, kind in zip(d.components, d.kinds):
            A = g.adjacency(comp)
            single_cycle = all(A[i].sum() == 1 for i in range(len(comp)))
            if single_cycle:
                assert kind == TRIVIAL
            else:
                assert kind == (MIXING if is_primitive(A) else PERIODIC)


# ---- construction -------------------------------------------------------------

def test_full_two_shift():
    g = TransitionGraph.from_word_set([(1,), (2,)])
    assert len(g.vertices) == 2 and len(g.edges) == 4
    d = scc_decompose(g)
    assert len(d.components) == 1 and not d.transient_states


def test_golden_mean_graph():
    X = [(1, 1), (1, 2), (2, 1)]
    g = TransitionGraph.from_word_set(X)
    assert len(g.vertices) == 3
    for v, w in g.edges:
        assert v[1:] == w[:-1]
    # length-3 factors of the graph's paths are exactly the words avoiding 2,2
    want = {w for w in itertools.product((1, 2), repeat=3) if all(w[i:i + 2] in X for i in range(2))}
    assert g.language(3) == want
    d = scc_decompose(g)
    kinds, ts = classify_components(d)
    assert kinds == [MIXING] and ts == []


def test_single_word_empty_core():
    with pytest.warns(EmptyCoreWarning):
        g = TransitionGraph.from_word_set([(1, 2)])
    assert len(g.core()) == 0


def test_mixed_lengths_need_normalize():
    with pytest.raises(InputError):
        TransitionGraph.from_word_set([(1,), (2, 1)])
    g = TransitionGraph.from_word_set([(1,), (2, 1)], normalize=True)
    # every position starts with 1 or with 2,1: the golden-mean shift
    assert g.vertices == [(1, 1), (1, 2), (2, 1)]


def test_padding_language_matches_definition():
    X = [(1,), (2, 1, 2), (2, 2)]
    g = TransitionGraph.from_word_set(X, normalize=True, N=2)
    L = g.language(6)
    for w in itertools.product((1, 2), repeat=6):
        # positions 0..3 of w can be completed inside w; check the defining property there
        ok = all(any(w[i:i + len(x)] == x for x in X) for i in range(4))
        if w in L:
            assert ok


def test_text_roundtrip():
    g = TransitionGraph.from_word_set([(1, 1), (1, 2), (2, 1)])
    assert TransitionGraph.from_text(g.to_text()) == g
    assert "1,1: 1,1 1,2" in g.to_text()
    with pytest.raises(InputError):
        TransitionGraph.from_text("1,1 -> 1,2")
    with pytest.raises(InputError):
        TransitionGraph([(1, 1), (1, 2)], [((1, 1), (1, 1)), ((1, 2), (1, 1))])


def test_example_three_vertex_graphs():
    # a<->b, b->c, c->c
    g = abstract(3, [(1, 2), (2, 1), (2, 3), (3, 3)])
    d = scc_decompose(g)
    assert d.components == [((1,), (2,)), ((3,),)] and d.transient_states == []
    kinds, ts = classify_components(d)
    assert kinds == [TRIVIAL, TRIVIAL] and ts == [TransientSet(0, 1)]
    # chain a->b->c, loops at a and c
    d = scc_decompose(abstract(3, [(1, 1), (1, 2), (2, 3), (3, 3)]))
    assert d.components == [((1,),), ((3,),)] and d.transient_states == [(2,)]
    d = scc_decompose(abstract(1, [(1, 1)]))
    assert d.kinds == [TRIVIAL]


# ---- connectors -----------------------------------------------------------------

def test_connector_examples():
    d = scc_decompose(TransitionGraph.full_shift(2))
    assert connector(d, 0, (1,), (2,)).vertices == ()
    gm = TransitionGraph.from_word_set([(1, 1), (1, 2), (2, 1)])
    d = scc_decompose(gm)
    c = connector(d, 0, (1, 2), (1, 2))
    assert c.vertices == ((2, 1),)
    assert connector(d, 0, (1, 2), (1, 2)) == c
    two_cycle = scc_decompose(abstract(2, [(1, 2), (2, 1)]))
    with pytest.raises(NotMixingError):
        connector(two_cycle, 0, (1,), (2,))


def bfs_dist(g, a, b, members):
    frontier, k = {a}, 0
    while True:
        k += 1
        frontier = {w for u in frontier for w in g.succ[u] if w in members}
        if b in frontier:
            return k


def test_connector_bounds_random():
    rng = random.Random(5)
    for _ in range(60):
        n = rng.randint(2, 8)
        edges = [(a, b) for a in range(1, n + 1) for b in range(1, n + 1) if rng.random() < 0.4]
        g = abstract(n, edges)
        d = scc_decompose(g)
        for i, kind in enumerate(d.kinds):
            if kind != MIXING:
                continue
            comp = d.components[i]
            m = len(comp)
            c = mixing_constant(d, i)
            assert c + 1 <= (m - 1) ** 2 + 1
            for a in comp:
                for b in comp:
                    con = connector(d, i, a, b)
                    assert len(con) <= c
                    path = (a,) + con.vertices + (b,)
                    assert all(y in g.succ[x] for x, y in zip(path, path[1:]))
                    assert len(path) - 1 == bfs_dist(g, a, b, set(comp))
                    exact = connector(d, i, a, b, length=c + 1)
                    assert len(exact) == c


def wielandt(n):
    return abstract(n, [(i, i + 1) for i in range(1, n)] + [(n, 1), (n, 2)])


def test_mixing_constant_wielandt_extremal():
    for n in range(3, 8):
        d = scc_decompose(wielandt(n))
        assert primitivity_exponent(d, 0) == (n - 1) ** 2 + 1


def test_vertex_plus_diameter_bound_fails_in_general():
    # documented counterexample to the bound c <= |V| + diameter
    import networkx as nx
    g = wielandt(6)
    d = scc_decompose(g)
    diam = nx.diameter(g.to_networkx())
    assert mixing_constant(d, 0) > len(g) + diam
