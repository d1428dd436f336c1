import json

import pytest

from localix.errors import DomainError, StructureError
from localix.order import FinPoset, MonotoneMap, lower_sets_of, poset_isomorphic

from conftest import posets_up_to, random_poset


def chain(n):
    return FinPoset(range(n), [(i, i + 1) for i in range(n - 1)])


def test_transitive_closure():
    p = FinPoset("abc", [("a", "b"), ("b", "c")])
    assert p.leq("a", "c")
    assert not p.leq("c", "a")
    assert p.lt("a", "b") and not p.lt("a", "a")


def test_cycle_rejected():
    with pytest.raises(StructureError):
        FinPoset("ab", [("a", "b"), ("b", "a")])


def test_unknown_element_rejected():
    with pytest.raises(DomainError):
        FinPoset("ab", [("a", "z")])


def test_cover_pairs_drop_transitive_edges():
    p = FinPoset("abc", [("a", "b"), ("b", "c"), ("a", "c")])
    assert set(p.cover_pairs()) == {("a", "b"), ("b", "c")}


def test_linear_extension_respects_order(rng):
    for _ in range(20):
        p = random_poset(rng, 6)
        order = p.linear_extension()
        pos = {x: i for i, x in enumerate(order)}
        for a in p.elements:
            for b in p.elements:
                if p.lt(a, b):
                    assert pos[a] < pos[b]


def test_lower_sets_counts():
    assert len(lower_sets_of(chain(4))) == 5
    assert len(lower_sets_of(FinPoset(range(4)))) == 16


def test_lower_sets_are_lower(rng):
    p = random_poset(rng, 6)
    for s in lower_sets_of(p):
        for b in s:
            assert p.down(b) <= s


def test_subposet_and_relabel():
    p = chain(4)
    q = p.subposet([0, 2, 3])
    assert q.leq(0, 3) and len(q) == 3
    r = p.relabel(lambda x: x * 10)
    assert r.leq(0, 30)


def test_json_round_trip(rng):
    for _ in range(10):
        p = random_poset(rng, 5)
        assert FinPoset.from_json(p.to_json()) == p


def test_dot_output_mentions_covers():
    p = chain(3)
    dot = p.to_dot()
    assert dot.startswith("digraph") and dot.count("->") == len(p.cover_pairs())


def test_isomorphism_positive_negative():
    p = FinPoset("ab", [("a", "b")])
    q = FinPoset("xy", [("y", "x")])
    assert poset_isomorphic(p, q)
    assert not poset_isomorphic(p, FinPoset("xy"))


def test_enumeration_class_counts():
    counts = {}
    for p in posets_up_to(5):
        counts[len(p.elements)] = counts.get(len(p.elements), 0) + 1
    assert counts == {0: 1, 1: 1, 2: 2, 3: 5, 4: 16, 5: 63}


def test_monotone_map_validated():
    p, q = chain(3), chain(2)
    MonotoneMap(p, q, {0: 0, 1: 0, 2: 1})
    with pytest.raises(StructureError):
        MonotoneMap(p, q, {0: 1, 1: 0, 2: 0})


def test_directedness_and_extremes():
    assert chain(3).is_directed()
    assert not FinPoset("ab").is_directed()
    assert chain(3).maximal() == (2,)
    assert chain(3).minimal() == (0,)
