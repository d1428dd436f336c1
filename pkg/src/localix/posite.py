"""Coverages on finite meet-lattices and distributive polyposets.

A coverage relates elements to finite subsets ("a is covered by C");
its saturation is the least relation closed under reflexivity, both
transitivities, and meet-stability.  Cover-ideals of the saturation
form the presented frame at finite scale.  Polyposets relate finite
subsets to finite subsets and present lattices with both meets and
joins; their saturation is checked against a Boolean entailment oracle.
"""

from __future__ import annotations

from typing import Iterable

from .budgets import DEFAULT_BUDGETS, Budgets, check_budget
from .errors import DomainError, StructureError
from .lattice import FinLattice, lattice_from_abstract
from .order import canon_key

__all__ = [
    "Coverage",
    "saturate_coverage",
    "canonical_coverage",
    "cov_ideals",
    "downtri",
    "cov_ideals_from_generators",
    "PolyOrder",
    "saturate_polyposet",
    "canonical_polyorder",
    "polyposet_entails",
    "polyposet_coproduct",
]


class _CovIndex:
    """Bitmask tables for one coverage base."""

    def __init__(self, base: FinLattice):
        self.base = base
        self.elems = list(base.elements)
        self.index = {e: i for i, e in enumerate(self.elems)}
        n = len(self.elems)
        self.n = n
        self.below = [
            [j for j in range(n) if self.elems[j] <= self.elems[i]] for i in range(n)
        ]
        self.meet = [
            [self.index[self.elems[i] & self.elems[j]] for j in range(n)]
            for i in range(n)
        ]

    def mask(self, subset: Iterable[frozenset]) -> int:
        m = 0
        for c in subset:
            if c not in self.index:
                raise DomainError(f"{c!r} not in the coverage base")
            m |= 1 << self.index[c]
        return m

    def unmask(self, m: int) -> frozenset:
        return frozenset(self.elems[i] for i in range(self.n) if m >> i & 1)


class Coverage:
    """A saturated cover relation, stored in full over all subsets."""

    __slots__ = ("base", "generators", "_idx", "_rel")

    def __init__(self, base: FinLattice, generators, idx: _CovIndex, rel: list[set]):
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "generators", generators)
        object.__setattr__(self, "_idx", idx)
        object.__setattr__(self, "_rel", rel)  # per element: set of cover masks

    def __setattr__(self, *a):
        raise AttributeError("Coverage is immutable")

    def covers(self, a: frozenset, c: Iterable[frozenset]) -> bool:
        idx = self._idx
        if a not in idx.index:
            raise DomainError(f"{a!r} not in the coverage base")
        return idx.mask(c) in self._rel[idx.index[a]]

    def pairs(self) -> list[tuple[frozenset, frozenset]]:
        idx = self._idx
        out = [
            (idx.elems[i], idx.unmask(m)) for i in range(idx.n) for m in self._rel[i]
        ]
        out.sort(key=canon_key)
        return out

    def __repr__(self) -> str:
        return f"Coverage({sum(len(s) for s in self._rel)} pairs on {len(self.base)} elements)"


def _meet_stabilize(idx: _CovIndex, gen_pairs: set[tuple[int, int]]) -> set:
    """Close generators under: a <= b covered by C forces a covered by a /\\ C."""
    out = set(gen_pairs)
    for i, cm in gen_pairs:
        for a in idx.below[i]:
            m = 0
            j = cm
            while j:
                low = (j & -j).bit_length() - 1
                m |= 1 << idx.meet[a][low]
                j &= j - 1
            out.add((a, m))
    return out


def saturate_coverage(
    base: FinLattice,
    gen: Iterable[tuple[frozenset, Iterable[frozenset]]],
    budgets: Budgets = DEFAULT_BUDGETS,
) -> Coverage:
    """Least coverage containing ``gen``; fixpoint over the closure rules."""
    check_budget(budgets, "carrier", len(base))
    idx = _CovIndex(base)
    n = idx.n
    gen_pairs = set()
    for a, c in gen:
        if a not in idx.index:
            raise DomainError(f"{a!r} not in the coverage base")
        gen_pairs.add((idx.index[a], idx.mask(c)))
    gen_pairs = _meet_stabilize(idx, gen_pairs)
    rel: list[set] = [set() for _ in range(n)]
    for i, cm in gen_pairs:
        rel[i].add(cm)
    # reflexivity over every subset
    for cm in range(1 << n):
        j = cm
        while j:
            low = (j & -j).bit_length() - 1
            rel[low].add(cm)
            j &= j - 1
    changed = True
    while changed:
        changed = False
        # left-transitivity and meet-stability
        for b in range(n):
            for cm in list(rel[b]):
                for a in idx.below[b]:
                    if cm not in rel[a]:
                        rel[a].add(cm)
                        changed = True
                    m = 0
                    j = cm
                    while j:
                        low = (j & -j).bit_length() - 1
                        m |= 1 << idx.meet[a][low]
                        j &= j - 1
                    if m not in rel[a]:
                        rel[a].add(m)
                        changed = True
        # right-transitivity: a covered by C, every c in C covered by D
        for dm in range(1 << n):
            ok = 0  # elements covered by D
            for c in range(n):
                if dm in rel[c]:
                    ok |= 1 << c
            for a in range(n):
                for cm in list(rel[a]):
                    if cm & ~ok == 0 and dm not in rel[a]:
                        rel[a].add(dm)
                        changed = True
    return Coverage(base, tuple(sorted(((a, frozenset(c)) for a, c in gen), key=canon_key)), idx, rel)


def canonical_coverage(base: FinLattice, budgets: Budgets = DEFAULT_BUDGETS) -> Coverage:
    """The coverage ``a covered by C  iff  a <= join(C)`` (separated)."""
    check_budget(budgets, "carrier", len(base))
    idx = _CovIndex(base)
    rel: list[set] = [set() for _ in range(idx.n)]
    for cm in range(1 << idx.n):
        j = base.bot
        m = cm
        while m:
            low = (m & -m).bit_length() - 1
            j |= idx.elems[low]
            m &= m - 1
        for a in range(idx.n):
            if idx.elems[a] <= j:
                rel[a].add(cm)
    return Coverage(base, (), idx, rel)


def _ideals_against(
    base: FinLattice, pair_test, include_empty_join: bool
) -> list[frozenset]:
    """Lower sets closed under a cover-pair predicate."""
    from .order import lower_sets_of

    out = []
    for d in lower_sets_of(base.element_poset()):
        if include_empty_join and base.bot not in d:
            continue
        if pair_test(d):
            out.append(d)
    return out


def cov_ideals(
    c: Coverage, include_empty_join: bool = False
) -> tuple[FinLattice, dict]:
    """The lattice of cover-ideals ordered by inclusion.

    An ideal is a lower set D with: a covered by C, C a subset of D,
    implies a in D.  With ``include_empty_join`` the nullary cover of
    bottom is added first, so every ideal contains bottom.
    Returns the lattice together with the ideal -> element map.
    """
    if include_empty_join:
        c = saturate_coverage(
            c.base,
            list(c.generators) + [(c.base.bot, frozenset())],
            DEFAULT_BUDGETS.bumped(unsafe=True),
        )
    idx = c._idx

    def closed(d: frozenset) -> bool:
        dm = idx.mask(d)
        for a in range(idx.n):
            if dm >> a & 1:
                continue
            for cm in c._rel[a]:
                if cm & ~dm == 0:
                    return False
        return True

    ideals = _ideals_against(c.base, closed, False)
    lat, to_elem = lattice_from_abstract(ideals, lambda i, j: i <= j)
    return lat, to_elem


def cov_ideals_from_generators(
    base: FinLattice,
    gen: Iterable[tuple[frozenset, Iterable[frozenset]]],
    include_empty_join: bool = False,
) -> list[frozenset]:
    """Ideals computed against the meet-stabilized generators alone.

    Closure under the generators suffices to characterize the ideals of
    the full saturation; the agreement is a test surface, not assumed.
    """
    idx = _CovIndex(base)
    pairs = set()
    for a, c in gen:
        pairs.add((idx.index[a], idx.mask(c)))
    pairs = _meet_stabilize(idx, pairs)
    if include_empty_join:
        pairs.add((idx.index[base.bot], 0))

    def closed(d: frozenset) -> bool:
        dm = idx.mask(d)
        for a, cm in pairs:
            if cm & ~dm == 0 and not dm >> a & 1:
                return False
        return True

    return _ideals_against(base, closed, False)


def downtri(c: Coverage, a: frozenset) -> frozenset:
    """The least cover-ideal containing ``a``: everything covered by {a}."""
    idx = c._idx
    if a not in idx.index:
        raise DomainError(f"{a!r} not in the coverage base")
    am = 1 << idx.index[a]
    return frozenset(idx.elems[b] for b in range(idx.n) if am in c._rel[b])


# -- polyposets ---------------------------------------------------------------


class PolyOrder:
    """A saturated relation between finite subsets of a carrier."""

    __slots__ = ("carrier", "generators", "rel", "_index")

    def __init__(self, carrier: tuple, generators, rel: set[tuple[int, int]]):
        object.__setattr__(self, "carrier", carrier)
        object.__setattr__(self, "generators", generators)
        object.__setattr__(self, "rel", frozenset(rel))
        object.__setattr__(self, "_index", {x: i for i, x in enumerate(carrier)})

    def __setattr__(self, *a):
        raise AttributeError("PolyOrder is immutable")

    def mask(self, subset: Iterable) -> int:
        m = 0
        for x in subset:
            if x not in self._index:
                raise DomainError(f"{x!r} not in the carrier")
            m |= 1 << self._index[x]
        return m

    def unmask(self, m: int) -> frozenset:
        return frozenset(self.carrier[i] for i in range(len(self.carrier)) if m >> i & 1)

    def holds(self, left: Iterable, right: Iterable) -> bool:
        return (self.mask(left), self.mask(right)) in self.rel

    def pairs(self) -> list[tuple[frozenset, frozenset]]:
        out = [(self.unmask(l), self.unmask(r)) for l, r in self.rel]
        out.sort(key=canon_key)
        return out

    def __repr__(self) -> str:
        return f"PolyOrder({len(self.rel)} pairs on {len(self.carrier)} points)"


def _saturate_masks(n: int, gen: set[tuple[int, int]]) -> set[tuple[int, int]]:
    full = (1 << n) - 1
    rel = set(gen)
    # reflexivity
    for i in range(n):
        rel.add((1 << i, 1 << i))
    subsets = list(range(full + 1))
    changed = True
    while changed:
        changed = False
        # monotonicity: grow both sides
        for l, r in list(rel):
            for i in range(n):
                for pair in ((l | 1 << i, r), (l, r | 1 << i)):
                    if pair not in rel:
                        rel.add(pair)
                        changed = True
        # one-sided transitivity, left form: B u C covered, and B covered
        # by {c} u E for each c in C, gives B covered by E
        for b in subsets:
            for e in subsets:
                if (b, e) in rel:
                    continue
                for c in subsets:
                    if (b | c, e) not in rel:
                        continue
                    if all(
                        (b, (1 << i) | e) in rel
                        for i in range(n)
                        if c >> i & 1
                    ):
                        rel.add((b, e))
                        changed = True
                        break
                else:
                    # right form: B covered by D u E, and B u {d} covered
                    # by E for each d in D
                    for d in subsets:
                        if (b, d | e) not in rel:
                            continue
                        if all(
                            (b | (1 << i), e) in rel
                            for i in range(n)
                            if d >> i & 1
                        ):
                            rel.add((b, e))
                            changed = True
                            break
    return rel


def saturate_polyposet(
    carrier: Iterable, gen: Iterable[tuple], budgets: Budgets = DEFAULT_BUDGETS
) -> PolyOrder:
    """Least polyorder containing ``gen``.

    Closure under monotonicity, reflexivity, and the two one-sided
    transitivity forms (equivalent to the two-sided rule).
    """
    carrier = tuple(sorted(set(carrier), key=canon_key))
    check_budget(budgets, "carrier", len(carrier))
    index = {x: i for i, x in enumerate(carrier)}
    gm = set()
    gens = []
    for left, right in gen:
        l = r = 0
        for x in left:
            if x not in index:
                raise DomainError(f"{x!r} not in the carrier")
            l |= 1 << index[x]
        for x in right:
            if x not in index:
                raise DomainError(f"{x!r} not in the carrier")
            r |= 1 << index[x]
        gm.add((l, r))
        gens.append((frozenset(left), frozenset(right)))
    rel = _saturate_masks(len(carrier), gm)
    return PolyOrder(carrier, tuple(sorted(gens, key=canon_key)), rel)


def canonical_polyorder(
    carrier: Iterable, leq_pairs: Iterable[tuple], budgets: Budgets = DEFAULT_BUDGETS
) -> PolyOrder:
    """Saturation of singleton generators from an order relation."""
    return saturate_polyposet(
        carrier, [((a,), (b,)) for a, b in leq_pairs], budgets
    )


def polyposet_entails(p: PolyOrder, left: Iterable, right: Iterable) -> bool:
    """Membership in the saturated relation.

    The independent oracle (used by tests) is Boolean entailment of
    ``meet(left) <= join(right)`` under the generator relations; the
    saturation theorem says the two agree.
    """
    return p.holds(left, right)


def polyposet_oracle(p: PolyOrder, left: Iterable, right: Iterable) -> bool:
    """Truth-table entailment over all valuations satisfying the generators."""
    import itertools

    n = len(p.carrier)
    lm, rm = p.mask(left), p.mask(right)
    gens = [(p.mask(l), p.mask(r)) for l, r in p.generators]
    for bits in itertools.product((0, 1), repeat=n):
        v = 0
        for i, b in enumerate(bits):
            if b:
                v |= 1 << i
        if any((gl & ~v == 0) and (gr & v == 0) for gl, gr in gens):
            continue
        if (lm & ~v == 0) and (rm & v == 0):
            return False
    return True


def polyposet_coproduct(ps: list[PolyOrder]) -> PolyOrder:
    """Disjoint-union polyorder: a pair holds iff some component affirms
    its restriction to that component's carrier."""
    carrier = []
    tagged: list[tuple] = []
    for i, p in enumerate(ps):
        tags = tuple((i, x) for x in p.carrier)
        carrier += list(tags)
        tagged.append(tags)
    carrier = tuple(sorted(carrier, key=canon_key))
    index = {x: k for k, x in enumerate(carrier)}
    n = len(carrier)
    rel = set()
    import itertools

    for lm in range(1 << n):
        left = [carrier[k] for k in range(n) if lm >> k & 1]
        for rm in range(1 << n):
            right = [carrier[k] for k in range(n) if rm >> k & 1]
            for i, p in enumerate(ps):
                li = [x for (j, x) in left if j == i]
                ri = [x for (j, x) in right if j == i]
                if p.holds(li, ri):
                    rel.add((lm, rm))
                    break
    gens = []
    for i, p in enumerate(ps):
        for l, r in p.generators:
            gens.append(
                (frozenset((i, x) for x in l), frozenset((i, x) for x in r))
            )
    return PolyOrder(carrier, tuple(sorted(gens, key=canon_key)), rel)
