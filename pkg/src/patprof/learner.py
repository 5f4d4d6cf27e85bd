"""Pattern learning from positive examples.

The learner explores *suffix states*: one cursor per string.  From a state,
every atom compatible with all remaining suffixes yields an edge to the state
where each cursor has advanced by that atom's match length.  Every atom
consumes at least one character of every string, so the state graph is a DAG,
and the start-to-accept paths are exactly the patterns (over the enriched
universe) that describe all strings.

Because the cost of a pattern is a sum of per-atom terms that depend only on
the lengths matched at that step, edge weights are known when an edge is
created and the best pattern is a least-cost path.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .errors import ConfigError, LearningCapacityError
from .library import AtomUniverse, default_universe
from .pattern import BOTTOM, CLASS, EMPTY, Atom, Pattern

DEFAULT_STATE_BUDGET = 200_000
REL_TOL = 1e-9
_ROW_CACHE_LIMIT = 100_000


def state_budget() -> int:
    raw = os.environ.get("PATPROF_STATE_BUDGET")
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise ConfigError(f"PATPROF_STATE_BUDGET must be an integer, got {raw!r}") from None
        if value < 1:
            raise ConfigError("PATPROF_STATE_BUDGET must be positive")
        return value
    return DEFAULT_STATE_BUDGET


@dataclass(frozen=True)
class BestPatternResult:
    pattern: object
    cost: float

    def __iter__(self):
        return iter((self.pattern, self.cost))


BOTTOM_RESULT = BestPatternResult(BOTTOM, math.inf)


class _Enrichment:
    """Per-universe caches of match rows and enrichment atoms."""

    def __init__(self, universe: AtomUniverse):
        self.universe = universe
        self.atoms = universe.atoms
        self.rows: dict = {}
        self.consts: dict = {}
        self.widths: dict = {}

    def const(self, literal: str) -> Atom:
        a = self.consts.get(literal)
        if a is None:
            a = self.consts[literal] = self.universe.const(literal)
        return a

    def width(self, j: int, z: int) -> Atom:
        key = (j, z)
        a = self.widths.get(key)
        if a is None:
            a = self.widths[key] = self.atoms[j].with_width(z)
        return a

    def row(self, s: str) -> np.ndarray:
        """Match length of every base atom at every position of ``s``.

        Class entries hold the maximal run length; the fixed-width check is
        done by the caller.
        """
        r = self.rows.get(s)
        if r is not None:
            return r
        n = len(s)
        out = np.zeros((n + 1, len(self.atoms)), dtype=np.int32)
        for j, a in enumerate(self.atoms):
            if a.kind == CLASS:
                run = 0
                for pos in range(n - 1, -1, -1):
                    run = run + 1 if a.match(s[pos]) else 0
                    out[pos, j] = run
            else:
                for pos in range(n):
                    out[pos, j] = a.match(s, pos)
        if len(self.rows) >= _ROW_CACHE_LIMIT:
            self.rows.clear()
        self.rows[s] = out
        return out


_ENRICH: dict = {}


def _enrichment(universe: AtomUniverse) -> _Enrichment:
    e = _ENRICH.get(id(universe))
    if e is None or e.universe is not universe:
        if len(_ENRICH) > 64:
            _ENRICH.clear()
        e = _ENRICH[id(universe)] = _Enrichment(universe)
    return e


class _Tables:
    def __init__(self, strings: Sequence[str], universe: AtomUniverse):
        self.strings = list(strings)
        self.enrich = _enrichment(universe)
        self.n = len(strings)
        self.lens = np.array([len(s) for s in strings], dtype=np.int64)
        width = int(self.lens.max()) + 1 if self.n else 1
        self.table = np.zeros((self.n, width, len(universe.atoms)), dtype=np.int32)
        for i, s in enumerate(strings):
            self.table[i, : len(s) + 1] = self.enrich.row(s)
        self.index = np.arange(self.n)

    def compatible(self, offsets: np.ndarray, use_consts: bool = True) -> list:
        """(atom, length vector) for every compatible atom at ``offsets``."""
        enrich = self.enrich
        L = self.table[self.index, offsets]
        out = []
        for j in np.flatnonzero((L > 0).all(axis=0)):
            j = int(j)
            lv = L[:, j].astype(np.int64)
            atom = enrich.atoms[j]
            out.append((atom, lv))
            if atom.kind == CLASS:
                z = int(lv[0])
                if (lv == z).all():
                    out.append((enrich.width(j, z), lv))
        if use_consts:
            suffixes = [s[o:] for s, o in zip(self.strings, offsets.tolist())]
            lcp = os.path.commonprefix(suffixes)
            for k in range(1, len(lcp) + 1):
                out.append((enrich.const(lcp[:k]), np.full(self.n, k, dtype=np.int64)))
        return out


class _Overflow(Exception):
    pass


class PatternGraph:
    """DAG of suffix states; every start-to-accept path is a describing pattern."""

    def __init__(self, strings, offsets, edges, start, accept):
        self.strings = strings
        self.offsets = offsets
        self.edges = edges
        self.start = start
        self.accept = accept
        self._live = None

    @property
    def n_states(self) -> int:
        return len(self.offsets)

    @property
    def n_edges(self) -> int:
        return sum(len(e) for e in self.edges)

    def live(self) -> list:
        """Flags marking states from which the accept state is reachable."""
        if self._live is None:
            live = [False] * len(self.offsets)
            if self.accept is not None:
                for u in self._reverse_topological():
                    if u == self.accept:
                        live[u] = True
                    else:
                        live[u] = any(live[v] for _, v, _ in self.edges[u])
            self._live = live
        return self._live

    def _reverse_topological(self) -> list:
        sums = [int(o.sum()) for o in self.offsets]
        return sorted(range(len(self.offsets)), key=lambda u: -sums[u])

    @property
    def is_empty(self) -> bool:
        return not self.live()[self.start]

    def edge_list(self) -> Iterator[tuple]:
        for u, out in enumerate(self.edges):
            for atom, v, w in out:
                yield u, atom, v, w

    def count_paths(self) -> int:
        live = self.live()
        counts = [0] * len(self.offsets)
        for u in self._reverse_topological():
            if not live[u]:
                continue
            counts[u] = 1 if u == self.accept else sum(counts[v] for _, v, _ in self.edges[u])
        return counts[self.start]

    def patterns(self, max_len: Optional[int] = None) -> Iterator[Pattern]:
        """Every pattern in the graph, optionally limited to ``max_len`` atoms."""
        live = self.live()
        if not live[self.start]:
            return
        stack = [(self.start, ())]
        while stack:
            u, prefix = stack.pop()
            if u == self.accept:
                yield Pattern(prefix)
                continue
            if max_len is not None and len(prefix) >= max_len:
                continue
            for atom, v, _ in self.edges[u]:
                if live[v]:
                    stack.append((v, prefix + (atom,)))

    def best(self) -> BestPatternResult:
        live = self.live()
        if not live[self.start]:
            return BOTTOM_RESULT
        cost = [math.inf] * len(self.offsets)
        choice: list = [None] * len(self.offsets)
        text = [""] * len(self.offsets)
        cost[self.accept] = 0.0
        for u in self._reverse_topological():
            if not live[u] or u == self.accept:
                continue
            best_c, best_t, best_e = math.inf, None, None
            for atom, v, w in self.edges[u]:
                if not live[v]:
                    continue
                c = w + cost[v]
                t = None
                if best_e is None:
                    take = True
                elif c < best_c and not _close(c, best_c):
                    take = True
                elif _close(c, best_c):
                    t = _join(atom, text[v])
                    if best_t is None:
                        best_t = _join(best_e[0], text[best_e[1]])
                    take = t < best_t
                else:
                    take = False
                if take:
                    best_c, best_e = c, (atom, v)
                    best_t = t
            cost[u] = best_c
            choice[u] = best_e
            text[u] = best_t if best_t is not None else _join(best_e[0], text[best_e[1]])
        if math.isinf(cost[self.start]):
            return BOTTOM_RESULT
        atoms = []
        u = self.start
        while u != self.accept:
            atom, u = choice[u]
            atoms.append(atom)
        return BestPatternResult(Pattern(atoms), cost[self.start])


def _close(a: float, b: float) -> bool:
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= REL_TOL * max(1.0, abs(a), abs(b))


def _join(atom: Atom, rest: str) -> str:
    head = atom.render("human")
    return head + " " + rest if rest else head


def _canonical(strings: Iterable[str]) -> tuple:
    return tuple(sorted(set(strings)))


def _build(strings: tuple, universe: AtomUniverse, use_consts: bool, budget: int) -> PatternGraph:
    n = len(strings)
    tab = _Tables(strings, universe)
    lens = tab.lens
    start = np.zeros(n, dtype=np.int64)
    index = {start.tobytes(): 0}
    offsets = [start]
    edges: list = [[]]
    accept = None
    inv_len = np.where(lens > 0, 1.0 / np.maximum(lens, 1), 0.0)
    stack = [0]
    while stack:
        u = stack.pop()
        o = offsets[u]
        done = o == lens
        if done.all():
            accept = u
            continue
        if done.any():
            continue
        out = edges[u]
        for atom, lv in tab.compatible(o, use_consts):
            nxt = o + lv
            key = nxt.tobytes()
            v = index.get(key)
            if v is None:
                v = index[key] = len(offsets)
                if v >= budget:
                    raise _Overflow()
                offsets.append(nxt)
                edges.append([])
                stack.append(v)
            w = atom.cost * float(np.dot(lv, inv_len)) / n
            out.append((atom, v, w))
    return PatternGraph(strings, offsets, edges, 0, accept)


def learn_patterns(S: Iterable[str], universe: Optional[AtomUniverse] = None,
                   budget: Optional[int] = None) -> PatternGraph:
    """Graph of all patterns over the enriched universe describing every string in ``S``.

    Duplicates are ignored.  If the state budget is exceeded the search is
    retried without constant enrichment; a second overflow raises
    :class:`LearningCapacityError`.
    """
    universe = universe or default_universe()
    strings = _canonical(S)
    if not strings:
        raise ValueError("cannot learn from an empty dataset")
    budget = budget or state_budget()
    try:
        return _build(strings, universe, True, budget)
    except _Overflow:
        pass
    try:
        return _build(strings, universe, False, budget)
    except _Overflow:
        raise LearningCapacityError(
            f"learning over {len(strings)} strings exceeded the state budget of {budget}"
        ) from None


@lru_cache(maxsize=32768)
def _best_cached(strings: tuple, universe: AtomUniverse, budget: int) -> BestPatternResult:
    if all(s == "" for s in strings):
        return BestPatternResult(EMPTY, 0.0)
    if any(s == "" for s in strings):
        return BOTTOM_RESULT
    return learn_patterns(strings, universe, budget).best()


def learn_best_pattern(S: Iterable[str], universe: Optional[AtomUniverse] = None,
                       budget: Optional[int] = None) -> BestPatternResult:
    """Least-cost pattern describing every string in ``S``, or (⊥, ∞)."""
    universe = universe or default_universe()
    strings = _canonical(S)
    if not strings:
        raise ValueError("cannot learn from an empty dataset")
    return _best_cached(strings, universe, budget or state_budget())


def compatible_atoms(S: Sequence[str], universe: Optional[AtomUniverse] = None,
                     offsets: Optional[Sequence[int]] = None, use_consts: bool = True) -> list:
    """Maximal set of enriched atoms matching a nonempty prefix of every suffix.

    ``offsets`` gives the cursor into each string (default: all zero).
    """
    universe = universe or default_universe()
    S = list(S)
    if not S:
        raise ValueError("compatible_atoms needs at least one string")
    o = np.zeros(len(S), dtype=np.int64) if offsets is None else np.asarray(offsets, dtype=np.int64)
    if any(o[i] >= len(s) for i, s in enumerate(S)):
        raise ValueError("every suffix must be nonempty")
    tab = _Tables(S, universe)
    seen = []
    for atom, _ in tab.compatible(o, use_consts):
        if atom not in seen:
            seen.append(atom)
    return seen
