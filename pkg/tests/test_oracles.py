import random

import numpy as np
import pytest

from patprof.clustering import dissimilarity
from patprof.errors import OracleLimitError
from patprof.oracles import brute_force_linkage, brute_force_patterns, exact_objective
from patprof.pattern import EMPTY
from patprof.synth import (DESK_FORMATS, MOTIVATING_FORMATS, SyntheticSpec, desk_spec, generate,
                           motivating_dataset, nmi, template_regex)


def test_brute_force_lower_ab(universe):
    lower = universe.subset(["Lower"])
    got = {p.render() for p in brute_force_patterns(["ab"], lower, 2)}
    # a width-1 class needs a run of exactly one, so L L and L "b" fail on "ab"
    assert got == {"L+", "L{2}", '"ab"', '"a" "b"', '"a" L', '"a" L+'}


def test_brute_force_trivial_cases(universe):
    assert brute_force_patterns([""], universe) == {EMPTY}
    assert brute_force_patterns(["a", "1"], universe.subset(["Digit"])) == set()


def test_brute_force_limits(universe):
    with pytest.raises(OracleLimitError):
        brute_force_patterns(["a", "b", "c", "d"], universe)
    with pytest.raises(OracleLimitError):
        brute_force_patterns(["abcdefg"], universe)
    with pytest.raises(OracleLimitError):
        brute_force_patterns(["a"], universe, 5)
    with pytest.raises(OracleLimitError):
        brute_force_linkage(np.zeros((11, 11)))
    with pytest.raises(OracleLimitError):
        exact_objective(list("abcdefghi"), 2, universe)
    with pytest.raises(OracleLimitError):
        exact_objective(["a"], 2, universe)


def test_linkage_reference_small():
    A = np.array([[0, 1, 5], [1, 0, 9], [5, 9, 0]], dtype=float)
    assert brute_force_linkage(A).merges == [(0, 1, 1.0), (2, 3, 9.0)]


def test_exact_objective_two_formats(universe):
    S = ["2019-01-02", "1999-12-31", "apple", "pear"]
    score, blocks = exact_objective(S, 2, universe)
    assert blocks == [["1999-12-31", "2019-01-02"], ["apple", "pear"]]
    assert score == pytest.approx(dissimilarity(S[0], S[1], universe).cost
                                  + dissimilarity(S[2], S[3], universe).cost)


def test_exact_objective_extremes(universe):
    S = ["ab", "12", "x-y"]
    assert exact_objective(S, 3, universe) == (0.0, [["12"], ["ab"], ["x-y"]])
    score, blocks = exact_objective(S, 1, universe)
    assert blocks == [sorted(S)]
    assert score == max(dissimilarity(x, y, universe).cost for x in S for y in S if x != y)


def test_template_generation():
    rng = random.Random(1)
    for t in DESK_FORMATS + tuple(t for t, _ in MOTIVATING_FORMATS):
        rx = template_regex(t)
        for _ in range(20):
            assert rx.fullmatch(generate(t, rng))
    assert generate("{{x}}", rng) == "{x}"
    with pytest.raises(ValueError):
        generate("{Q}", rng)
    with pytest.raises(ValueError):
        SyntheticSpec((("{D}", 0),))


def test_generated_formats_are_disjoint():
    spec = SyntheticSpec(tuple((t, 30) for t in DESK_FORMATS), seed=3)
    S, labels = spec.generate()
    spec.check_disjoint(S, labels)
    S, labels = motivating_dataset(0)
    SyntheticSpec(MOTIVATING_FORMATS).check_disjoint(S, labels)
    assert sorted(labels.count(i) for i in set(labels)) == [5, 11, 34, 110, 267, 1024]
    with pytest.raises(ValueError):
        SyntheticSpec((("{D}", 1), ("{D:1-2}", 1))).check_disjoint(["7"], [0])


def test_desk_spec_is_seeded():
    assert desk_spec(4, 10, 2) == desk_spec(4, 10, 2)
    assert desk_spec(4, 10, 2).generate() == desk_spec(4, 10, 2).generate()
    assert len(desk_spec(5, 3, 0).formats) == 5


def test_nmi():
    assert nmi([0, 0, 1, 1], [1, 1, 0, 0]) == pytest.approx(1.0)
    assert nmi([0, 0, 0, 0], [0, 0, 0, 0]) == 1.0
    assert nmi([0, 1, 0, 1], [0, 0, 1, 1]) == pytest.approx(0.0)
    sklearn = pytest.importorskip("sklearn.metrics")
    rng = random.Random(4)
    for _ in range(20):
        a = [rng.randrange(3) for _ in range(40)]
        b = [rng.randrange(4) for _ in range(40)]
        assert nmi(a, b) == pytest.approx(sklearn.normalized_mutual_info_score(a, b), abs=1e-9)
