import itertools

import pytest

from localix.budgets import DEFAULT_BUDGETS
from localix.errors import DomainError, ResourceBudgetError
from localix.lattice import lower_sets
from localix.order import FinPoset
from localix.posite import (
    PolyOrder,
    canonical_coverage,
    canonical_polyorder,
    cov_ideals,
    cov_ideals_from_generators,
    downtri,
    polyposet_coproduct,
    polyposet_entails,
    polyposet_oracle,
    saturate_coverage,
    saturate_polyposet,
)

from conftest import random_poset


def chain_lattice(n):
    return lower_sets(FinPoset(range(n - 1), [(i, i + 1) for i in range(n - 2)]))


def random_coverage_generators(rng, base, count):
    elems = list(base.elements)
    gens = []
    for _ in range(count):
        a = rng.choice(elems)
        cover = [rng.choice(elems) for _ in range(rng.randint(0, 2))]
        gens.append((a, cover))
    return gens


def test_saturation_contains_reflexivity_and_generators():
    a = chain_lattice(3)
    mid = frozenset([0])
    c = saturate_coverage(a, [(a.top, [mid])])
    assert c.covers(a.top, [mid])
    for e in a.elements:
        assert c.covers(e, [e])
        assert c.covers(e, list(a.elements))  # supersets of a cover still cover


def test_canonical_coverage_is_join_covering():
    a = chain_lattice(3)
    c = canonical_coverage(a)
    for e in a.elements:
        for k in range(len(a) + 1):
            for cov in itertools.combinations(list(a.elements), k):
                assert c.covers(e, cov) == (e <= a.join_of(cov))


def test_downtri_of_top_in_canonical_coverage():
    a = chain_lattice(3)
    c = canonical_coverage(a)
    assert downtri(c, a.top) == frozenset(a.elements)
    assert downtri(c, a.bot) == frozenset({a.bot})


def test_ideals_of_empty_coverage_are_lower_sets():
    a = chain_lattice(3)
    c = saturate_coverage(a, [])
    lat, _ = cov_ideals(c)
    assert len(lat) == 4  # lower sets of a 3-chain of elements


def test_nullary_cover_forces_bottom():
    a = chain_lattice(3)
    c = saturate_coverage(a, [])
    lat, _ = cov_ideals(c, include_empty_join=True)
    assert len(lat) == 3  # every ideal now contains bottom


def test_generated_vs_saturated_ideals_agree(rng):
    for _ in range(40):
        base = lower_sets(random_poset(rng, rng.randint(1, 3)))
        gens = random_coverage_generators(rng, base, rng.randint(0, 3))
        sat = saturate_coverage(base, gens, DEFAULT_BUDGETS.bumped(carrier=8))
        lat, to_elem = cov_ideals(sat)
        plain = cov_ideals_from_generators(base, gens)
        assert sorted(to_elem, key=sorted) == sorted(plain, key=sorted)


def test_coverage_budget_enforced():
    base = lower_sets(random_poset(__import__("random").Random(0), 5))
    with pytest.raises(ResourceBudgetError):
        saturate_coverage(base, [], DEFAULT_BUDGETS.bumped(carrier=3))


def test_coverage_rejects_foreign_elements():
    a = chain_lattice(3)
    with pytest.raises(DomainError):
        saturate_coverage(a, [(frozenset(["zz"]), [])])


# -- polyposets ---------------------------------------------------------------


def test_polyposet_matches_oracle_exhaustively_small():
    carrier = ("a", "b", "c")
    gens = [(("a",), ("b",)), (("b", "c"), ())]
    p = saturate_polyposet(carrier, gens)
    subsets = [
        frozenset(s)
        for k in range(4)
        for s in itertools.combinations(carrier, k)
    ]
    for left in subsets:
        for right in subsets:
            assert polyposet_entails(p, left, right) == polyposet_oracle(
                p, left, right
            ), (left, right)


def test_polyposet_matches_oracle_random(rng):
    for _ in range(15):
        n = rng.randint(1, 4)
        carrier = tuple(f"p{i}" for i in range(n))
        gens = []
        for _ in range(rng.randint(0, 3)):
            l = tuple(x for x in carrier if rng.random() < 0.4)
            r = tuple(x for x in carrier if rng.random() < 0.4)
            gens.append((l, r))
        p = saturate_polyposet(carrier, gens)
        subsets = [
            frozenset(s)
            for k in range(n + 1)
            for s in itertools.combinations(carrier, k)
        ]
        for left in subsets:
            for right in subsets:
                assert polyposet_entails(p, left, right) == polyposet_oracle(
                    p, left, right
                )


def test_canonical_polyorder_restricts_to_order():
    p = canonical_polyorder("abc", [("a", "b"), ("b", "c")])
    assert p.holds(["a"], ["c"])
    assert not p.holds(["c"], ["a"])


def test_coproduct_is_saturated_and_componentwise(rng):
    p1 = canonical_polyorder("ab", [("a", "b")])
    p2 = canonical_polyorder("xy", [("x", "y")])
    cp = polyposet_coproduct([p1, p2])
    # re-saturating the coproduct relation changes nothing (rectangle rule)
    resat = saturate_polyposet(
        cp.carrier, cp.pairs(), DEFAULT_BUDGETS.bumped(carrier=8)
    )
    assert resat.rel == cp.rel
    assert cp.holds([(0, "a")], [(0, "b")])
    assert not cp.holds([(0, "a")], [(1, "y")])
