"""Choosing representative inputs to show a user, one syntactic group at a time.

Partitions of a profile are ordered farthest-first: start with the cheapest
partition, then repeatedly take the partition whose cheapest joint pattern
with any already chosen partition is most expensive.  Inputs are then drawn
round-robin over that order.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import LearningCapacityError
from .learner import learn_best_pattern
from .library import AtomUniverse, default_universe


@dataclass(frozen=True)
class PartitionOrder:
    partitions: tuple
    indices: tuple
    trace: tuple

    def __len__(self) -> int:
        return len(self.partitions)


def _joint_cost(a: tuple, b: tuple, universe: AtomUniverse) -> float:
    try:
        return learn_best_pattern(a + b, universe).cost
    except LearningCapacityError:
        return math.inf


def order_partitions(profile, universe: Optional[AtomUniverse] = None) -> PartitionOrder:
    """Farthest-first order of a profile's partitions (ties go to the lower entry index)."""
    universe = universe or default_universe()
    entries = list(profile.entries if hasattr(profile, "entries") else profile)
    if not entries:
        raise ValueError("cannot order an empty profile")
    first = min(range(len(entries)), key=lambda i: (entries[i].cost, i))
    chosen = [first]
    trace = [entries[first].cost]
    memo: dict = {}
    nearest = {}
    for i in range(len(entries)):
        if i != first:
            nearest[i] = math.inf
    last = first
    while nearest:
        for i in nearest:
            key = (min(i, last), max(i, last))
            if key not in memo:
                memo[key] = _joint_cost(entries[key[0]].data, entries[key[1]].data, universe)
            nearest[i] = min(nearest[i], memo[key])
        pick = max(nearest, key=lambda i: (nearest[i], -i))
        chosen.append(pick)
        trace.append(nearest.pop(pick))
        last = pick
    return PartitionOrder(tuple(tuple(entries[i].data) for i in chosen), tuple(chosen), tuple(trace))


def _permutation(part: tuple, seed, position: int) -> list:
    order = list(part)
    random.Random(f"{seed}/{position}").shuffle(order)
    return order


def next_significant(order: PartitionOrder, labeled: Iterable[str], seed=0) -> Optional[str]:
    """Next input to label, or None when every string is labeled.

    The partition with the fewest labeled strings comes first (earliest in the
    order on ties), so each pass visits every non-exhausted partition once
    before any is revisited.  Within a partition strings come in a fixed
    seeded permutation.
    """
    labeled = set(labeled)
    best = None
    for pos, part in enumerate(order.partitions):
        done = sum(1 for s in part if s in labeled)
        if done == len(part):
            continue
        if best is None or done < best[0]:
            best = (done, pos)
    if best is None:
        return None
    pos = best[1]
    for s in _permutation(order.partitions[pos], seed, pos):
        if s not in labeled:
            return s
    return None


def suggest_examples(order: PartitionOrder, n: int, seed=0, labeled: Iterable[str] = ()) -> list:
    """The first ``n`` picks of :func:`next_significant`, labelling as it goes."""
    if n < 1:
        raise ValueError("n must be at least 1")
    seen = set(labeled)
    out = []
    while len(out) < n:
        s = next_significant(order, seen, seed)
        if s is None:
            break
        out.append(s)
        seen.add(s)
    return out
