"""Shared enumeration helpers: all small posets up to isomorphism, and
seeded random structure generators used across the suites."""

from __future__ import annotations

import random
from functools import lru_cache

import pytest

from localix.order import FinPoset, lower_sets_of, poset_isomorphic


@lru_cache(maxsize=None)
def posets_up_to(n: int) -> tuple:
    """All posets with at most ``n`` elements, one per isomorphism class.

    Elements are added in label order as maxima, so every class shows
    up with the identity as a linear extension; classes are then
    deduplicated by invariant buckets plus isomorphism search.
    """
    all_posets: list[FinPoset] = []
    for size in range(n + 1):
        partial: list[frozenset] = [frozenset()]
        for k in range(size):
            grown = []
            for rel in partial:
                p = FinPoset(range(k), rel)
                for low in lower_sets_of(p):
                    grown.append(
                        rel | frozenset((x, k) for x in low)
                    )
            partial = grown
        seen: dict = {}
        for rel in set(partial):
            p = FinPoset(range(size), rel)
            sig = _poset_signature(p)
            bucket = seen.setdefault(sig, [])
            if not any(poset_isomorphic(p, q) for q in bucket):
                bucket.append(p)
        all_posets.extend(p for bucket in seen.values() for p in bucket)
    return tuple(all_posets)


def _poset_signature(p: FinPoset) -> tuple:
    downs = sorted(sum(p.leq(a, b) for a in p.elements) for b in p.elements)
    ups = sorted(sum(p.leq(b, a) for a in p.elements) for b in p.elements)
    return (len(p.elements), tuple(downs), tuple(ups))


def random_poset(rng: random.Random, n: int) -> FinPoset:
    """A random poset on ``n`` labels: random edges upward, then closure."""
    rel = [
        (i, j)
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < 0.4
    ]
    return FinPoset(range(n), rel)


def random_relation_pairs(rng: random.Random, n: int, p: float) -> list:
    return [(a, b) for a in range(n) for b in range(n) if rng.random() < p]


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20260823)
