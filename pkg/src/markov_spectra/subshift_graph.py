"""Subshifts of finite type as digraphs on equal-length words.

A vertex ``v`` may be followed by ``w`` only when they overlap in all but one
digit: ``v[1:] == w[:-1]``. Bi-infinite paths in the graph are then exactly
the sequences whose length-``|v|`` factors are all vertices.

Strongly connected components come from networkx; ordering, classification
and connector words are computed here.
"""
from __future__ import annotations

import itertools
import math
import warnings
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import networkx as nx
import numpy as np

from .cf_core import check_word, format_word, parse_word
from .errors import EmptyResultError, InputError, NotMixingError


class EmptyCoreWarning(UserWarning):
    """The graph carries no bi-infinite path."""


Vertex = tuple  # tuple[int, ...]


class TransitionGraph:
    def __init__(self, vertices: Iterable[Sequence[int]], edges: Iterable[tuple] = None,
                 N: int | None = None, check_overlap: bool = True):
        vs = [check_word(v, N) for v in vertices]
        if len(set(vs)) != len(vs):
            raise InputError("duplicate vertices")
        if vs and len({len(v) for v in vs}) != 1:
            raise InputError("all vertices must have the same length")
        self.vertices: list[Vertex] = sorted(vs)
        self.N = N if N is not None else max((max(v) for v in vs if v), default=1)
        vset = set(self.vertices)
        if edges is None:
            by_prefix: dict[Vertex, list[Vertex]] = {}
            for w in self.vertices:
                by_prefix.setdefault(w[:-1], []).append(w)
            edges = [(v, w) for v in self.vertices for w in by_prefix.get(v[1:], ())]
        succ: dict[Vertex, list[Vertex]] = {v: [] for v in self.vertices}
        for v, w in edges:
            v, w = tuple(v), tuple(w)
            if v not in vset or w not in vset:
                raise InputError(f"edge {v}->{w} uses an unknown vertex")
            if check_overlap and v[1:] != w[:-1]:
                raise InputError(f"edge {v}->{w} violates the overlap condition")
            succ[v].append(w)
        self.succ = {v: sorted(set(ws)) for v, ws in succ.items()}

    # -- basic structure --------------------------------------------------------
    @property
    def L(self) -> int:
        """Vertex length."""
        return len(self.vertices[0]) if self.vertices else 0

    @property
    def edges(self) -> list[tuple[Vertex, Vertex]]:
        return [(v, w) for v in self.vertices for w in self.succ[v]]

    def __len__(self):
        return len(self.vertices)

    def __eq__(self, other):
        return (isinstance(other, TransitionGraph) and self.vertices == other.vertices
                and self.succ == other.succ)

    def __repr__(self):
        return f"TransitionGraph({len(self.vertices)} vertices, {len(self.edges)} edges)"

    def pred(self) -> dict[Vertex, list[Vertex]]:
        out: dict[Vertex, list[Vertex]] = {v: [] for v in self.vertices}
        for v, w in self.edges:
            out[w].append(v)
        return out

    def to_networkx(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edges)
        return g

    def subgraph(self, keep: Iterable[Vertex]) -> "TransitionGraph":
        keep = set(map(tuple, keep))
        vs = [v for v in self.vertices if v in keep]
        es = [(v, w) for v in vs for w in self.succ[v] if w in keep]
        return TransitionGraph(vs, es, self.N, check_overlap=False)

    def reversed(self) -> "TransitionGraph":
        """Same shift read backwards: vertices and edges reversed."""
        vs = [v[::-1] for v in self.vertices]
        es = [(w[::-1], v[::-1]) for v, w in self.edges]
        return TransitionGraph(vs, es, self.N, check_overlap=False)

    def core(self) -> "TransitionGraph":
        """Iteratively drop vertices with no in-edge or no out-edge."""
        alive = set(self.vertices)
        indeg = {v: 0 for v in alive}
        for v, w in self.edges:
            indeg[w] += 1
        outdeg = {v: len(self.succ[v]) for v in alive}
        pred = self.pred()
        queue = deque(v for v in self.vertices if indeg[v] == 0 or outdeg[v] == 0)
        while queue:
            v = queue.popleft()
            if v not in alive:
                continue
            alive.discard(v)
            for w in self.succ[v]:
                if w in alive:
                    indeg[w] -= 1
                    if indeg[w] == 0:
                        queue.append(w)
            for u in pred[v]:
                if u in alive:
                    outdeg[u] -= 1
                    if outdeg[u] == 0:
                        queue.append(u)
        return self.subgraph(alive)

    def adjacency(self, order: Sequence[Vertex] | None = None) -> np.ndarray:
        order = list(order) if order is not None else self.vertices
        idx = {v: i for i, v in enumerate(order)}
        A = np.zeros((len(order), len(order)), dtype=np.int64)
        for v in order:
            for w in self.succ[v]:
                if w in idx:
                    A[idx[v], idx[w]] = 1
        return A

    # -- language ---------------------------------------------------------------
    def paths(self, k: int) -> Iterable[tuple[Vertex, ...]]:
        """All vertex paths with k vertices (lexicographic)."""
        if k <= 0:
            return
        stack = [(v,) for v in reversed(self.vertices)]
        while stack:
            p = stack.pop()
            if len(p) == k:
                yield p
                continue
            for w in reversed(self.succ[p[-1]]):
                stack.append(p + (w,))

    @staticmethod
    def path_word(path: Sequence[Vertex]) -> tuple[int, ...]:
        return tuple(path[0]) + tuple(v[-1] for v in path[1:])

    def language(self, n: int) -> set[tuple[int, ...]]:
        """Length-n words that occur in some bi-infinite path of the graph."""
        core = self.core()
        L = core.L
        if not core.vertices:
            return set()
        if n <= L:
            return {v[i:i + n] for v in core.vertices for i in range(L - n + 1)}
        return {core.path_word(p) for p in core.paths(n - L + 1)}

    # -- text format ------------------------------------------------------------
    def to_text(self) -> str:
        return "\n".join(f"{format_word(v)}: {' '.join(format_word(w) for w in self.succ[v])}".rstrip()
                         for v in self.vertices) + "\n"

    @classmethod
    def from_text(cls, text: str, N: int | None = None) -> "TransitionGraph":
        vs: dict[Vertex, None] = {}
        es = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if ":" not in line:
                raise InputError(f"line {lineno}: expected 'vertex: successors'")
            head, tail = line.split(":", 1)
            v = parse_word(head)
            vs.setdefault(v)
            for tok in tail.split():
                w = parse_word(tok)
                vs.setdefault(w)
                es.append((v, w))
        return cls(list(vs), es, N)

    # -- construction from words ------------------------------------------------
    @classmethod
    def full_shift(cls, N: int, L: int = 1) -> "TransitionGraph":
        return cls(itertools.product(range(1, N + 1), repeat=L), N=N)

    @classmethod
    def from_word_set(cls, X: Iterable[Sequence[int]], normalize: bool = False,
                      N: int | None = None) -> "TransitionGraph":
        """Graph of the shift in which every position starts some word of X.

        Mixed lengths are padded to ``n = max |x|``: the vertices are all
        length-n words having a prefix in X. The overlap graph on them has
        exactly the required bi-infinite paths.
        """
        words = {check_word(x, N) for x in X}
        if not words:
            raise InputError("word set is empty")
        if () in words:
            raise InputError("empty word in word set")
        lengths = {len(x) for x in words}
        N = N if N is not None else max(max(x) for x in words)
        n = max(lengths)
        if len(lengths) > 1:
            if not normalize:
                raise InputError("mixed word lengths need normalize=True")
            padded = set()
            for x in words:
                for tail in itertools.product(range(1, N + 1), repeat=n - len(x)):
                    padded.add(x + tail)
            words = padded
        g = cls(words, N=N)
        if not g.core().vertices:
            warnings.warn("graph core is empty: no bi-infinite admissible sequence",
                          EmptyCoreWarning, stacklevel=2)
        return g


# ---- decomposition ----------------------------------------------------------

TRIVIAL, MIXING, PERIODIC = "trivial", "mixing", "periodic-nonmixing"


@dataclass
class Decomposition:
    graph: TransitionGraph
    components: list[tuple[Vertex, ...]]
    transient_states: list[Vertex]
    kinds: list[str]
    periods: list[int]
    component_of: dict = field(default_factory=dict)
    _exponents: dict = field(default_factory=dict, repr=False)
    _reach: dict = field(default_factory=dict, repr=False)

    def component_graph(self, i: int) -> TransitionGraph:
        return self.graph.subgraph(self.components[i])

    def nontrivial(self) -> list[int]:
        return [i for i, k in enumerate(self.kinds) if k != TRIVIAL]

    def check_block_triangular(self) -> bool:
        """No edge (through transient states or not) runs to an earlier component."""
        pos = {v: i for i, c in enumerate(self.components) for v in c}
        g = self.graph.to_networkx()
        for i, comp in enumerate(self.components):
            reach = set()
            for v in comp:
                reach |= nx.descendants(g, v)
            if any(pos.get(w, i) < i for w in reach):
                return False
        return True


def _period(comp: Sequence[Vertex], succ) -> int:
    members = set(comp)
    root = comp[0]
    level = {root: 0}
    queue = deque([root])
    g = 0
    while queue:
        v = queue.popleft()
        for w in succ[v]:
            if w not in members:
                continue
            if w not in level:
                level[w] = level[v] + 1
                queue.append(w)
            else:
                g = math.gcd(g, level[v] + 1 - level[w])
    return abs(g)


def scc_decompose(g: TransitionGraph) -> Decomposition:
    G = g.to_networkx()
    sccs = [tuple(sorted(c)) for c in nx.strongly_connected_components(G)]
    C = nx.condensation(G, scc=[set(c) for c in sccs])
    members = {n: tuple(sorted(C.nodes[n]["members"])) for n in C.nodes}
    order = list(nx.lexicographical_topological_sort(C, key=lambda n: members[n][0]))
    comps, transient = [], []
    for n in order:
        c = members[n]
        if len(c) == 1 and c[0] not in g.succ[c[0]]:
            transient.append(c[0])
        else:
            comps.append(c)
    kinds, periods = [], []
    for c in comps:
        cs = set(c)
        inner = [sum(1 for w in g.succ[v] if w in cs) for v in c]
        p = _period(c, g.succ)
        periods.append(p)
        if all(k == 1 for k in inner):
            kinds.append(TRIVIAL)
        else:
            kinds.append(MIXING if p == 1 else PERIODIC)
    comp_of = {v: i for i, c in enumerate(comps) for v in c}
    return Decomposition(g, comps, sorted(transient), kinds, periods, comp_of)


@dataclass(frozen=True)
class TransientSet:
    """Points whose past lies in ``source`` and whose future lies in ``sink``."""
    source: int
    sink: int


def classify_components(d: Decomposition) -> tuple[list[str], list[TransientSet]]:
    G = d.graph.to_networkx()
    out = []
    for i, comp in enumerate(d.components):
        reach = nx.descendants(G, comp[0])
        for j, other in enumerate(d.components):
            if j != i and other[0] in reach:
                out.append(TransientSet(i, j))
    return list(d.kinds), out


# ---- mixing constant and connectors -----------------------------------------

def primitivity_exponent(d: Decomposition, i: int) -> int:
    """Least e with every pair of the component joined by a path of exactly e edges."""
    if d.kinds[i] != MIXING and not (d.kinds[i] == TRIVIAL and len(d.components[i]) == 1):
        raise NotMixingError(f"component {i} is {d.kinds[i]}; no uniform connector length")
    if i not in d._exponents:
        comp = d.components[i]
        A = (d.graph.adjacency(comp) > 0)
        n = len(comp)
        M = A.copy()
        e = 1
        limit = (n - 1) ** 2 + 1
        while not M.all():
            if e > limit:
                raise NotMixingError("component is not primitive")
            M = (M.astype(np.int64) @ A.astype(np.int64)) > 0
            e += 1
        d._exponents[i] = e
    return d._exponents[i]


def mixing_constant(d: Decomposition, i: int) -> int:
    """Uniform bound on the number of interior vertices of a connecting path."""
    return primitivity_exponent(d, i) - 1


def _exact_path(g: TransitionGraph, members: set, a: Vertex, b: Vertex, k: int):
    """Lexicographically least path from a to b with exactly k edges inside ``members``."""
    # can[j] = vertices that reach b in exactly j steps
    can = [{b}]
    rev: dict[Vertex, list[Vertex]] = {v: [] for v in members}
    for v in members:
        for w in g.succ[v]:
            if w in members:
                rev[w].append(v)
    for _ in range(k):
        nxt = set()
        for w in can[-1]:
            nxt.update(rev[w])
        can.append(nxt)
    if a not in can[k]:
        return None
    path = [a]
    for j in range(k - 1, -1, -1):
        v = path[-1]
        path.append(next(w for w in g.succ[v] if w in members and w in can[j]))
    return path


@dataclass(frozen=True)
class Connector:
    vertices: tuple[Vertex, ...]   # interior vertices of the path a -> ... -> b
    digits: tuple[int, ...]        # digits they append after a

    def __len__(self):
        return len(self.vertices)


def connector(d: Decomposition, i: int, a: Sequence[int], b: Sequence[int],
              length: int | None = None) -> Connector:
    """Deterministic connecting path from a to b inside mixing component i.

    Without ``length`` the lexicographically least shortest path is used;
    otherwise a path with exactly ``length`` edges. Only the interior vertices
    are returned, and their count never exceeds :func:`mixing_constant`.
    """
    a, b = tuple(a), tuple(b)
    comp = d.components[i]
    members = set(comp)
    if a not in members or b not in members:
        raise InputError("both endpoints must lie in the component")
    e = primitivity_exponent(d, i)
    key = (i, a, b, length)
    if key not in d._reach:
        if length is None:
            k = 1
            while True:
                path = _exact_path(d.graph, members, a, b, k)
                if path is not None:
                    break
                k += 1
        else:
            if length < 1:
                raise InputError("length must be >= 1")
            path = _exact_path(d.graph, members, a, b, length)
            if path is None:
                raise InputError(f"no path of exactly {length} edges")
        inner = tuple(path[1:-1])
        d._reach[key] = Connector(inner, tuple(v[-1] for v in inner))
    out = d._reach[key]
    assert length is not None or len(out) <= e - 1
    return out
