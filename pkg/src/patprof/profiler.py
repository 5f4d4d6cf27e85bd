"""Syntactic profiles: partition a dataset and describe each part by a pattern."""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .clustering import _distinct, build_hierarchy, choose_k
from .cost import pattern_cost, string_cost
from .errors import LearningCapacityError
from .learner import BOTTOM_RESULT, learn_best_pattern
from .library import AtomUniverse, default_universe
from .pattern import BOTTOM, EMPTY, Pattern

DEFAULT_M = 1
DEFAULT_MAX = 10
DEFAULT_THETA = 1.25
DEFAULT_MU = 4.0


@dataclass(frozen=True)
class ApproxParams:
    m: int = DEFAULT_M
    M: int = DEFAULT_MAX
    theta: float = DEFAULT_THETA
    mu: float = DEFAULT_MU
    seed: int = 0

    def __post_init__(self):
        if not (isinstance(self.m, int) and isinstance(self.M, int)) or not 1 <= self.m <= self.M:
            raise ValueError(f"pattern bounds need 1 <= m <= M, got m={self.m}, M={self.M}")
        if not self.theta >= 1.0:
            raise ValueError(f"theta must be at least 1.0, got {self.theta}")
        if not self.mu >= 1.0:
            raise ValueError(f"mu must be at least 1.0, got {self.mu}")

    def as_dict(self) -> dict:
        return {"min_patterns": self.m, "max_patterns": self.M, "theta": self.theta,
                "mu": self.mu, "seed": self.seed}


@dataclass(frozen=True)
class ProfileEntry:
    data: tuple
    pattern: object
    cost: float
    count: int


@dataclass
class Profile:
    entries: list
    params: Optional[ApproxParams] = None
    universe_fingerprint: str = ""
    iterations: int = 0

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def patterns(self) -> list:
        return [e.pattern for e in self.entries]

    def partition_of(self, s: str) -> Optional[int]:
        for i, e in enumerate(self.entries):
            if s in e.data:
                return i
        return None


def _learn(strings: Sequence[str], universe: AtomUniverse):
    try:
        return learn_best_pattern(strings, universe)
    except LearningCapacityError:
        return None


def _entry(data: Sequence[str], result, counts: Counter) -> ProfileEntry:
    data = tuple(data)
    return ProfileEntry(data, result.pattern, result.cost, sum(counts.get(s, 1) for s in data))


def _entries_for_cluster(cluster: Sequence[str], universe: AtomUniverse, counts: Counter) -> tuple:
    """Entries for one cluster and whether it had to be broken into singletons."""
    r = _learn(cluster, universe)
    if r is not None:
        return [_entry(cluster, r, counts)], False
    out = []
    for s in cluster:
        p = Pattern([universe.const(s)]) if s else EMPTY
        out.append(ProfileEntry((s,), p, pattern_cost(p, [s]).total, counts.get(s, 1)))
    return out, True


def profile(S: Sequence[str], m: int = DEFAULT_M, M: int = DEFAULT_MAX, theta: float = DEFAULT_THETA,
            universe: Optional[AtomUniverse] = None, rng: Optional[random.Random] = None,
            seed: int = 0) -> Profile:
    """Cluster ``S`` into between m and M groups and learn a pattern for each.

    If learning a cluster's pattern exhausts the state budget, its strings
    become constant singleton entries and the profile is compressed back to M.
    """
    universe = universe or default_universe()
    params = ApproxParams(m, M, theta, DEFAULT_MU, seed)
    S = list(S)
    if not S:
        raise ValueError("cannot profile an empty dataset")
    rng = rng or random.Random(seed)
    counts = Counter(S)
    distinct = _distinct(S)
    H = build_hierarchy(distinct, M, theta, universe, rng)
    clusters = H.clusters(choose_k(H, m, M))
    entries = []
    broken = False
    for cluster in clusters:
        es, b = _entries_for_cluster(cluster, universe, counts)
        entries.extend(es)
        broken = broken or b
    prof = Profile(entries, params, universe.fingerprint, 1)
    if broken:
        prof = compress_profile(prof, M, universe)
    return prof


def compress_profile(P: Profile, M: int, universe: Optional[AtomUniverse] = None) -> Profile:
    """Merge entries until at most M remain, always merging the cheapest union."""
    if M < 1:
        raise ValueError("M must be at least 1")
    universe = universe or default_universe()
    entries = list(P.entries)
    memo: dict = {}

    def union_result(a: ProfileEntry, b: ProfileEntry):
        key = frozenset((a.data, b.data))
        r = memo.get(key)
        if r is None:
            r = _learn(a.data + b.data, universe) or BOTTOM_RESULT
            memo[key] = r
        return r

    while len(entries) > M:
        best = None
        for i in range(len(entries)):
            for j in range(i + 1, len(entries)):
                r = union_result(entries[i], entries[j])
                if best is None or r.cost < best[0].cost:
                    best = (r, i, j)
        r, i, j = best
        a, b = entries[i], entries[j]
        merged = ProfileEntry(a.data + b.data, r.pattern, r.cost, a.count + b.count)
        entries[i] = merged
        del entries[j]
    return Profile(entries, P.params, P.universe_fingerprint or universe.fingerprint, P.iterations)


def big_profile(S: Sequence[str], m: int = DEFAULT_M, M: int = DEFAULT_MAX, theta: float = DEFAULT_THETA,
                mu: float = DEFAULT_MU, universe: Optional[AtomUniverse] = None, seed: int = 0,
                rng: Optional[random.Random] = None) -> Profile:
    """Sample, profile and filter until every string is covered.

    Each pass profiles ⌈μ·M⌉ strings drawn from those not yet covered, merges
    the result into the running profile, compresses it to M entries, and
    drops every string that some entry's pattern describes.  At the end each
    distinct string is assigned to the entry whose partition produced it, or
    else to the cheapest describing entry.
    """
    universe = universe or default_universe()
    params = ApproxParams(m, M, theta, mu, seed)
    S = list(S)
    if not S:
        raise ValueError("cannot profile an empty dataset")
    rng = rng or random.Random(seed)
    counts = Counter(S)
    distinct = _distinct(S)
    chunk = math.ceil(mu * M)
    entries: list = []
    remaining = distinct
    passes = 0
    while remaining:
        passes += 1
        sample = remaining if len(remaining) <= chunk else rng.sample(remaining, chunk)
        sub = profile(sample, m, M, theta, universe, rng, seed)
        merged = compress_profile(Profile(entries + sub.entries), M, universe)
        entries = merged.entries
        covered = set()
        for e in entries:
            covered.update(e.data)
        patterns = [e.pattern for e in entries if not e.pattern.is_bottom]
        remaining = [s for s in remaining
                     if s not in covered and not any(p.describes(s) for p in patterns)]
    return _finalize(entries, distinct, counts, Profile([], params, universe.fingerprint, passes))


def _finalize(entries: list, distinct: list, counts: Counter, shell: Profile) -> Profile:
    owner = {}
    for i, e in enumerate(entries):
        for s in e.data:
            owner.setdefault(s, i)
    parts: list = [[] for _ in entries]
    for s in distinct:
        i = owner.get(s)
        if i is None:
            best = (math.inf, None)
            for k, e in enumerate(entries):
                c = string_cost(e.pattern, s)
                if c < best[0]:
                    best = (c, k)
            i = best[1]
        parts[i].append(s)
    final = []
    for e, data in zip(entries, parts):
        if not data:
            continue
        if e.pattern.is_bottom:
            cost = math.inf
        else:
            cost = pattern_cost(e.pattern, data).total
        final.append(ProfileEntry(tuple(data), e.pattern, cost, sum(counts[s] for s in data)))
    shell.entries = final
    return shell


REFINE_LIMIT = 500


def refinement_hierarchy(S: Sequence[str], M: int, theta: float = DEFAULT_THETA,
                         universe: Optional[AtomUniverse] = None, seed: int = 0):
    """Hierarchy over the distinct strings of ``S``, for cutting at any k <= M.

    Above :data:`REFINE_LIMIT` distinct strings a seeded sample of that size
    (kept in input order) is clustered instead.
    """
    universe = universe or default_universe()
    rng = random.Random(seed)
    distinct = _distinct(S)
    if len(distinct) > REFINE_LIMIT:
        keep = sorted(rng.sample(range(len(distinct)), REFINE_LIMIT))
        distinct = [distinct[i] for i in keep]
    return build_hierarchy(distinct, M, theta, universe, rng)


def refine(S: Sequence[str], k: int, hierarchy, universe: Optional[AtomUniverse] = None,
           params: Optional[ApproxParams] = None) -> Profile:
    """Profile from the k-cut of ``hierarchy``: one entry per cluster.

    Strings outside the hierarchy's leaves join the cheapest entry whose
    pattern describes them; any left over form a final ⊥ entry.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    universe = universe or default_universe()
    counts = Counter(S)
    clusters = hierarchy.clusters(k)
    entries = []
    for cluster in clusters:
        r = _learn(cluster, universe) or BOTTOM_RESULT
        entries.append(ProfileEntry(tuple(cluster), r.pattern, r.cost, 0))
    inside = set(hierarchy.leaves)
    extra = [s for s in _distinct(S) if s not in inside]
    shell = Profile([], params, universe.fingerprint, 1)
    if not extra:
        shell.entries = [replace(e, count=sum(counts[s] for s in e.data)) for e in entries]
        return shell
    leftovers = [s for s in extra if not any(e.pattern.describes(s) for e in entries)]
    if leftovers:
        entries.append(ProfileEntry(tuple(leftovers), BOTTOM, math.inf, 0))
    return _finalize(entries, _distinct(S), counts, shell)
