"""Hierarchical clustering of strings under the learned dissimilarity.

The dissimilarity of two strings is the cost of the best pattern describing
both.  Computing it for every pair is the expensive part, so only the rows of
a few farthest-first seed strings are learned exactly; the remaining entries
are estimated from the patterns those rows produced.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .cost import string_cost
from .errors import LearningCapacityError
from .learner import BOTTOM_RESULT, BestPatternResult, learn_best_pattern
from .library import AtomUniverse, default_universe
from .pattern import EMPTY, Pattern

KNEE_THRESHOLD = 0.10
TIE_TOL = 1e-9


def _distinct(S: Iterable[str]) -> list:
    return list(dict.fromkeys(S))


class PairCache:
    """Symmetric map from string pairs to their best-pattern results."""

    def __init__(self):
        self._d: dict = {}
        self.seeds: list = []

    @staticmethod
    def _key(x: str, y: str) -> tuple:
        return (x, y) if x <= y else (y, x)

    def get(self, x: str, y: str) -> Optional[BestPatternResult]:
        return self._d.get(self._key(x, y))

    def __contains__(self, pair) -> bool:
        return self._key(*pair) in self._d

    def put(self, x: str, y: str, result: BestPatternResult) -> None:
        self._d[self._key(x, y)] = result

    def __len__(self) -> int:
        return len(self._d)

    def items(self):
        return self._d.items()

    def patterns(self) -> list:
        """Distinct non-⊥ patterns learned for pairs of distinct strings, in insertion order."""
        seen = {}
        for (x, y), r in self._d.items():
            if x != y and not r.pattern.is_bottom and r.pattern not in seen:
                seen[r.pattern] = None
        return list(seen)


def dissimilarity(x: str, y: str, universe: Optional[AtomUniverse] = None) -> BestPatternResult:
    """η(x, y): the best pattern describing both strings and its cost."""
    universe = universe or default_universe()
    if x == y:
        return BestPatternResult(Pattern([universe.const(x)]) if x else EMPTY, 0.0)
    return learn_best_pattern((x, y), universe)


def _safe_dissimilarity(x: str, y: str, universe: AtomUniverse) -> BestPatternResult:
    try:
        return dissimilarity(x, y, universe)
    except LearningCapacityError:
        return BOTTOM_RESULT


def sample_dissimilarities(S: Sequence[str], m_hat: int, universe: Optional[AtomUniverse] = None,
                           rng: Optional[random.Random] = None, start: Optional[str] = None) -> PairCache:
    """Learn exact rows for up to ``m_hat`` seed strings chosen farthest-first.

    The first seed is ``start`` if given, else drawn from ``rng``.  Each next
    seed maximizes its minimum dissimilarity to the seeds chosen so far; ties
    go to the earlier string.  Chosen seeds are recorded in ``cache.seeds``.
    """
    universe = universe or default_universe()
    S = _distinct(S)
    if not S:
        raise ValueError("cannot sample an empty dataset")
    if m_hat < 1:
        raise ValueError("m_hat must be at least 1")
    rng = rng or random.Random(0)
    cache = PairCache()
    if start is None:
        a = S[rng.randrange(len(S))]
    else:
        if start not in S:
            raise ValueError(f"start string {start!r} is not in the dataset")
        a = start
    nearest = np.full(len(S), math.inf)
    chosen = np.zeros(len(S), dtype=bool)
    index = {s: i for i, s in enumerate(S)}
    for _ in range(min(m_hat, len(S))):
        cache.seeds.append(a)
        chosen[index[a]] = True
        for j, b in enumerate(S):
            r = cache.get(a, b)
            if r is None:
                r = _safe_dissimilarity(a, b, universe)
                cache.put(a, b, r)
            if r.cost < nearest[j]:
                nearest[j] = r.cost
        if chosen.all():
            break
        # argmax over unchosen strings, first occurrence on ties
        masked = np.where(chosen, -1.0, nearest)
        a = S[int(np.argmax(masked))]
    return cache


@dataclass
class DissimilarityMatrix:
    strings: list
    values: np.ndarray
    exact: Optional[np.ndarray] = None

    def __getitem__(self, key):
        return self.values[key]

    def __len__(self) -> int:
        return len(self.strings)


def approx_dmatrix(S: Sequence[str], D: PairCache, universe: Optional[AtomUniverse] = None) -> DissimilarityMatrix:
    """Dissimilarity matrix with exact cached entries and pattern-based estimates.

    An uncached pair gets the cheapest cost, over cached patterns describing
    both strings, of that pattern on the pair.  If no cached pattern fits, the
    pair is learned and its pattern joins the pool for later pairs.  Pairs
    are visited in row-major index order, so results are deterministic.
    """
    universe = universe or default_universe()
    S = _distinct(S)
    n = len(S)
    A = np.zeros((n, n))
    exact = np.zeros((n, n), dtype=bool)
    pool = D.patterns()
    known = set(pool)
    rows = [np.array([string_cost(p, s) for s in S]) for p in pool]
    C = np.vstack(rows) if rows else np.full((0, n), math.inf)
    for i in range(n):
        exact[i, i] = True
        if i + 1 == n:
            break
        if C.shape[0]:
            est = ((C[:, i : i + 1] + C[:, i + 1 :]) / 2.0).min(axis=0)
        else:
            est = np.full(n - i - 1, math.inf)
        for off in range(n - i - 1):
            j = i + 1 + off
            r = D.get(S[i], S[j])
            if r is not None:
                A[i, j] = A[j, i] = r.cost
                exact[i, j] = exact[j, i] = True
                continue
            v = est[off]
            if math.isinf(v):
                r = _safe_dissimilarity(S[i], S[j], universe)
                D.put(S[i], S[j], r)
                A[i, j] = A[j, i] = r.cost
                exact[i, j] = exact[j, i] = True
                p = r.pattern
                if not p.is_bottom and p not in known:
                    known.add(p)
                    row = np.array([string_cost(p, s) for s in S])
                    C = np.vstack([C, row])
                    if off + 1 < n - i - 1:
                        tail = (row[i] + row[j + 1 :]) / 2.0
                        est[off + 1 :] = np.minimum(est[off + 1 :], tail)
                continue
            A[i, j] = A[j, i] = v
    return DissimilarityMatrix(S, A, exact)


def exact_dmatrix(S: Sequence[str], universe: Optional[AtomUniverse] = None) -> DissimilarityMatrix:
    universe = universe or default_universe()
    S = _distinct(S)
    n = len(S)
    A = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            A[i, j] = A[j, i] = _safe_dissimilarity(S[i], S[j], universe).cost
    return DissimilarityMatrix(S, A, np.ones((n, n), dtype=bool))


@dataclass
class Hierarchy:
    """Binary dendrogram in scipy-style numbering.

    Leaves are ``0..n-1``; the t-th merge creates node ``n + t``.  Each merge
    is ``(left, right, height)``.
    """

    leaves: list
    merges: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.leaves)

    def height(self, node: int) -> float:
        return 0.0 if node < self.n else self.merges[node - self.n][2]

    def cut_nodes(self, k: int) -> list:
        """(node id, sorted leaf indices) of the k-cut, ordered by smallest leaf."""
        n = self.n
        if n == 0:
            return []
        k = max(1, min(k, n))
        members = {i: [i] for i in range(n)}
        for t, (a, b, _) in enumerate(self.merges[: n - k]):
            members[n + t] = members.pop(a) + members.pop(b)
        out = [(node, sorted(m)) for node, m in members.items()]
        out.sort(key=lambda x: x[1][0])
        return out

    def cut(self, k: int) -> list:
        return [m for _, m in self.cut_nodes(k)]

    def clusters(self, k: int) -> list:
        return [[self.leaves[i] for i in m] for m in self.cut(k)]

    def mean_height(self, k: int) -> float:
        """Mean over leaves of the height of the k-cut cluster holding them."""
        nodes = self.cut_nodes(k)
        total = 0.0
        for node, members in nodes:
            h = self.height(node)
            if math.isinf(h):
                return math.inf
            total += h * len(members)
        return total / self.n

    def to_dict(self) -> dict:
        return {
            "leaves": list(self.leaves),
            "merges": [[a, b, _encode_height(h)] for a, b, h in self.merges],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Hierarchy":
        return cls(list(d["leaves"]), [(int(a), int(b), _decode_height(h)) for a, b, h in d["merges"]])


def _encode_height(h: float):
    return "inf" if math.isinf(h) else h


def _decode_height(h) -> float:
    return math.inf if h == "inf" else float(h)


def _ties(values: np.ndarray, best: float) -> np.ndarray:
    if math.isinf(best):
        return values == best
    return values <= best + TIE_TOL * max(1.0, abs(best))


def ahc(S: Sequence[str], A) -> Hierarchy:
    """Complete-linkage agglomerative clustering.

    Among pairs at the minimal linkage (within a relative 1e-9), the pair whose
    clusters have the lexicographically smallest (min-leaf, min-leaf) ids wins.
    Pairs at infinite linkage merge only once nothing finite remains.
    """
    values = A.values if isinstance(A, DissimilarityMatrix) else np.asarray(A, dtype=float)
    n = len(S)
    if values.shape != (n, n):
        raise ValueError("matrix shape does not match the number of strings")
    H = Hierarchy(list(S))
    if n < 2:
        return H
    W = values.astype(float).copy()
    np.fill_diagonal(W, np.nan)
    node = list(range(n))
    label = list(range(n))  # smallest leaf index in each slot's cluster
    for t in range(n - 1):
        best = np.nanmin(W)
        rows, cols = np.nonzero(_ties(W, best) & ~np.isnan(W))
        pick = None
        for r, c in zip(rows.tolist(), cols.tolist()):
            if r >= c:
                continue
            key = tuple(sorted((label[r], label[c])))
            if pick is None or key < pick[0]:
                pick = (key, r, c)
        _, a, b = pick
        h = float(W[a, b])
        merged = np.fmax(W[a], W[b])
        W[a, :] = merged
        W[:, a] = merged
        W[a, a] = np.nan
        W[b, :] = np.nan
        W[:, b] = np.nan
        left, right = sorted((node[a], node[b]))
        H.merges.append((left, right, h))
        node[a] = n + t
        label[a] = min(label[a], label[b])
    return H


def split(H: Hierarchy, m: int, M: int) -> list:
    """Choose a cut of ``H`` with between m and M clusters (leaf-index lists).

    With m = M the m-cut is returned.  Otherwise k runs from m upward and
    stops at the first k whose mean intra-cluster height drops by less than
    10% when going to k + 1.
    """
    if not 1 <= m <= M:
        raise ValueError("need 1 <= m <= M")
    n = H.n
    if n == 0:
        return []
    return H.cut(choose_k(H, m, M))


def choose_k(H: Hierarchy, m: int, M: int) -> int:
    n = H.n
    lo, hi = min(m, n), min(M, n)
    if lo >= hi:
        return lo
    prev = H.mean_height(lo)
    for k in range(lo, hi):
        nxt = H.mean_height(k + 1)
        if not math.isinf(prev):
            if prev == 0 or (prev - nxt) / prev < KNEE_THRESHOLD:
                return k
        prev = nxt
    return hi


def build_hierarchy(S: Sequence[str], M: int, theta: float, universe: Optional[AtomUniverse] = None,
                    rng: Optional[random.Random] = None) -> Hierarchy:
    """Sample ⌈θ·M⌉ seed rows, approximate the matrix, and cluster the distinct strings."""
    if theta < 1.0:
        raise ValueError("theta must be at least 1.0")
    universe = universe or default_universe()
    S = _distinct(S)
    if not S:
        return Hierarchy([])
    D = sample_dissimilarities(S, math.ceil(theta * M), universe, rng)
    A = approx_dmatrix(S, D, universe)
    return ahc(S, A)
