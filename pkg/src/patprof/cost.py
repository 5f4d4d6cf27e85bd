"""The pattern cost C(P, S) = sum_i Q(a_i) * W(i, S | P).

W(i) is the fraction of each string consumed by the i-th atom, averaged over
the (deduplicated) dataset.  Costs are linear in the strings: the cost over S
is the mean of the per-string costs, which the clustering code exploits when
approximating pairwise dissimilarities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import DescribesError
from .library import AtomUniverse

INF = math.inf


@dataclass(frozen=True)
class CostTerm:
    atom: object
    q: float
    weight: float

    @property
    def value(self) -> float:
        return self.q * self.weight


@dataclass(frozen=True)
class CostBreakdown:
    terms: tuple
    total: float

    def __float__(self) -> float:
        return self.total


def _lengths(pattern, s: str):
    lengths = pattern.match_lengths(s)
    if lengths is None:
        raise DescribesError(f"pattern {pattern.render()} does not describe {s!r}")
    return lengths


def pattern_cost(pattern, S: Iterable[str], universe: Optional[AtomUniverse] = None) -> CostBreakdown:
    """Cost breakdown of ``pattern`` over the distinct strings of ``S``.

    Raises :class:`DescribesError` if the pattern fails on some string.
    Static costs come from ``universe`` when given, else from the atoms.
    """
    strings = sorted(set(S))
    if not strings:
        raise ValueError("cannot score a pattern on an empty dataset")
    if pattern.is_bottom:
        raise DescribesError("⊥ describes no string")
    k = len(pattern.atoms)
    sums = [0.0] * k
    for s in strings:
        lengths = _lengths(pattern, s)
        for i, n in enumerate(lengths):
            sums[i] += n / len(s)
    terms = []
    total = 0.0
    for i, atom in enumerate(pattern.atoms):
        q = universe.static_cost(atom) if universe is not None else atom.cost
        w = sums[i] / len(strings)
        terms.append(CostTerm(atom, q, w))
        total += q * w
    return CostBreakdown(tuple(terms), total)


def string_cost(pattern, s: str) -> float:
    """Cost of ``pattern`` on the single string ``s``; ∞ if it does not describe it."""
    if pattern.is_bottom:
        return INF
    lengths = pattern.match_lengths(s)
    if lengths is None:
        return INF
    if not lengths:
        return 0.0
    n = len(s)
    return sum(a.cost * l / n for a, l in zip(pattern.atoms, lengths))


def cost_of(pattern, S: Iterable[str]) -> float:
    """Total cost, with ⊥ or any non-described string giving ∞."""
    if pattern.is_bottom:
        return INF
    try:
        return pattern_cost(pattern, S).total
    except DescribesError:
        return INF
