"""Brute-force reference implementations used by the test suite.

They share only atom matching with the main code and are deliberately
naive, so each is limited to small inputs and refuses anything larger.
"""

from __future__ import annotations

import itertools
import math
from typing import Optional, Sequence

from .clustering import TIE_TOL, Hierarchy, dissimilarity
from .errors import OracleLimitError
from .library import AtomUniverse, default_universe
from .pattern import CLASS, EMPTY, Atom, Pattern

MAX_STRINGS = 3
MAX_LENGTH = 6
MAX_PATTERN = 4
MAX_MATRIX = 10
MAX_OBJECTIVE = 8


def enriched_candidates(S: Sequence[str], universe: AtomUniverse) -> list:
    """Ω plus every fixed-width class variant and every substring constant."""
    longest = max((len(s) for s in S), default=0)
    out = list(universe.atoms)
    for a in universe.atoms:
        if a.kind == CLASS:
            out.extend(a.with_width(z) for z in range(1, longest + 1))
    subs = set()
    for s in S:
        for i in range(len(s)):
            for j in range(i + 1, len(s) + 1):
                subs.add(s[i:j])
    out.extend(universe.const(t) for t in sorted(subs))
    return out


def brute_force_patterns(S: Sequence[str], universe: Optional[AtomUniverse] = None,
                         max_len: int = MAX_PATTERN) -> set:
    """Every atom sequence of length <= max_len over Ω̂ describing all of S."""
    universe = universe or default_universe()
    S = sorted(set(S))
    if not S or len(S) > MAX_STRINGS or any(len(s) > MAX_LENGTH for s in S) or max_len > MAX_PATTERN:
        raise OracleLimitError(
            f"brute_force_patterns needs 1..{MAX_STRINGS} strings of length <= {MAX_LENGTH} "
            f"and max_len <= {MAX_PATTERN}")
    if all(s == "" for s in S):
        return {EMPTY}
    candidates = enriched_candidates(S, universe)
    found = set()

    def walk(pos: tuple, prefix: tuple):
        if all(p == len(s) for p, s in zip(pos, S)):
            if prefix:
                found.add(Pattern(prefix))
            return
        if len(prefix) == max_len:
            return
        for a in candidates:
            step = tuple(a.match(s, p) for s, p in zip(S, pos))
            if all(step):
                walk(tuple(p + n for p, n in zip(pos, step)), prefix + (a,))

    walk(tuple(0 for _ in S), ())
    return {p for p in found if all(p.describes(s) for s in S)}


def brute_force_best(S: Sequence[str], universe: Optional[AtomUniverse] = None,
                     max_len: int = MAX_PATTERN) -> float:
    """Minimum cost over the brute-force pattern set, straight from the cost formula."""
    S = sorted(set(S))
    best = math.inf
    for p in brute_force_patterns(S, universe, max_len):
        total = 0.0
        for i, a in enumerate(p.atoms):
            w = sum(p.match_lengths(s)[i] / len(s) for s in S) / len(S)
            total += a.cost * w
        best = min(best, total)
    return best


def brute_force_linkage(A) -> Hierarchy:
    """Textbook complete linkage recomputed from the original matrix at every step."""
    n = len(A)
    if n > MAX_MATRIX:
        raise OracleLimitError(f"brute_force_linkage handles at most {MAX_MATRIX} points")
    clusters = {i: frozenset([i]) for i in range(n)}
    H = Hierarchy([str(i) for i in range(n)])
    next_id = n
    while len(clusters) > 1:
        scored = []
        for a, b in itertools.combinations(sorted(clusters), 2):
            link = max(float(A[x][y]) for x in clusters[a] for y in clusters[b])
            scored.append((link, a, b))
        best = min(s[0] for s in scored)
        tol = 0.0 if math.isinf(best) else TIE_TOL * max(1.0, abs(best))
        tied = [s for s in scored if s[0] <= best + tol]
        link, a, b = min(tied, key=lambda s: tuple(sorted((min(clusters[s[1]]), min(clusters[s[2]])))))
        H.merges.append((min(a, b), max(a, b), link))
        clusters[next_id] = clusters.pop(a) | clusters.pop(b)
        next_id += 1
    return H


def _partitions(items: list, k: int):
    if k == 0:
        if not items:
            yield []
        return
    if len(items) < k:
        return
    first, rest = items[0], items[1:]
    for p in _partitions(rest, k - 1):
        yield [[first]] + p
    for p in _partitions(rest, k):
        for i in range(len(p)):
            yield p[:i] + [[first] + p[i]] + p[i + 1 :]


def exact_objective(S: Sequence[str], k: int, universe: Optional[AtomUniverse] = None) -> tuple:
    """Optimal k-partition under Σ (max pairwise η within a block); (score, blocks)."""
    universe = universe or default_universe()
    S = list(dict.fromkeys(S))
    if len(S) > MAX_OBJECTIVE or not 1 <= k <= len(S):
        raise OracleLimitError(f"exact_objective needs <= {MAX_OBJECTIVE} strings and 1 <= k <= |S|")
    eta = {}
    for x, y in itertools.combinations(S, 2):
        eta[(x, y)] = eta[(y, x)] = dissimilarity(x, y, universe).cost
    best = (math.inf, None)
    for blocks in _partitions(S, k):
        score = 0.0
        for b in blocks:
            score += max((eta[(x, y)] for x, y in itertools.combinations(b, 2)), default=0.0)
        key = sorted(sorted(b) for b in blocks)
        if score < best[0] or (score == best[0] and best[1] is not None and key < best[1]):
            best = (score, key)
    return best
