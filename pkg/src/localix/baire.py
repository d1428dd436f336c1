"""Finite topologies, closure/interior, Comgr, and Baire decompositions.

A FrameTopology is built from a point set and a family of opens closed
under union and intersection.  Points with identical neighborhoood
filters are collapsed to a representative, so the ambient Boolean
algebra is the powerset of the spectrum of the opens lattice and every
open is join-irreducibly generated by a minimal neighborhood.  All
category-style notions (dense, meager, comeager) live in that ambient.
"""

from __future__ import annotations

from typing import Iterable

from .errors import DomainError, StructureError
from .lattice import FinLattice, lattice_from_abstract, powerset_lattice
from .order import canon_key

__all__ = [
    "FrameTopology",
    "interior",
    "closure",
    "boundary",
    "regularize",
    "regular_opens",
    "comgr",
    "is_dense",
    "is_meager",
    "baire_decompose",
    "sigma2_family",
]


class FrameTopology:
    """A finite point-set topology, reduced to its spectrum.

    ``points`` may contain topologically indistinguishable points;
    each class is collapsed to its canonically least member, so the
    stored opens form a sublattice of the powerset of the class
    representatives with exactly one join-irreducible per point.
    """

    __slots__ = ("points", "reps", "rep_of", "ambient", "opens", "min_nbhd")

    def __init__(self, points: Iterable, opens: Iterable[frozenset]):
        pts = tuple(sorted(set(points), key=canon_key))
        fam = {frozenset(o) for o in opens}
        full = frozenset(pts)
        for o in fam:
            if not o <= full:
                raise DomainError(f"open {o!r} is not a subset of the points")
        fam |= {frozenset(), full}
        for o in fam:
            for o2 in fam:
                if o & o2 not in fam or o | o2 not in fam:
                    raise StructureError("opens must be closed under union and intersection")
        nbhd = {p: full for p in pts}
        for o in fam:
            for p in o:
                nbhd[p] &= o
        classes: dict[frozenset, list] = {}
        for p in pts:
            classes.setdefault(nbhd[p], []).append(p)
        rep_of = {}
        for cls in classes.values():
            r = min(cls, key=canon_key)
            for p in cls:
                rep_of[p] = r
        reps = tuple(sorted(set(rep_of.values()), key=canon_key))
        red = {frozenset(r for r in reps if r in o) for o in fam}
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "reps", reps)
        object.__setattr__(self, "rep_of", rep_of)
        object.__setattr__(self, "ambient", powerset_lattice(reps))
        object.__setattr__(self, "opens", tuple(sorted(red, key=canon_key)))
        object.__setattr__(
            self,
            "min_nbhd",
            {r: frozenset(s for s in reps if s in nbhd[r]) for r in reps},
        )

    def __setattr__(self, *a):
        raise AttributeError("FrameTopology is immutable")

    def __repr__(self) -> str:
        return f"FrameTopology({len(self.reps)} points, {len(self.opens)} opens)"

    def top(self) -> frozenset:
        return frozenset(self.reps)

    def is_open(self, b: frozenset) -> bool:
        self.check(b)
        return b in set(self.opens)

    def check(self, b: frozenset) -> None:
        if not b <= frozenset(self.reps):
            raise DomainError(f"{b!r} is not an ambient element")

    def opens_lattice(self) -> tuple[FinLattice, dict]:
        """The opens as an abstract distributive lattice."""
        return lattice_from_abstract(list(self.opens), lambda u, v: u <= v)


def interior(t: FrameTopology, b: frozenset) -> frozenset:
    """Largest open below ``b``."""
    t.check(b)
    out = frozenset()
    for o in t.opens:
        if o <= b:
            out |= o
    return out


def closure(t: FrameTopology, b: frozenset) -> frozenset:
    """Least closed set (complement of an open) above ``b``."""
    t.check(b)
    return t.top() - interior(t, t.top() - b)


def boundary(t: FrameTopology, b: frozenset) -> frozenset:
    return closure(t, b) - interior(t, b)


def regularize(t: FrameTopology, u: frozenset) -> frozenset:
    """Interior of the closure; idempotent on opens."""
    return interior(t, closure(t, u))


def regular_opens(t: FrameTopology) -> list[frozenset]:
    return [u for u in t.opens if regularize(t, u) == u]


def comgr(t: FrameTopology) -> tuple[frozenset, FinLattice]:
    """The comeager core and the regular-open algebra.

    The core is the meet over all opens U of (closure(U) implies U),
    implication taken in the ambient Boolean algebra.
    """
    core = t.top()
    for u in t.opens:
        core &= (t.top() - closure(t, u)) | u
    regs = regular_opens(t)
    lat, _ = lattice_from_abstract(regs, lambda u, v: u <= v)
    return core, lat


def is_dense(t: FrameTopology, b: frozenset) -> bool:
    return closure(t, b) == t.top()


def is_meager(t: FrameTopology, b: frozenset) -> bool:
    """Meager: disjoint from the comeager core."""
    t.check(b)
    return not (b & comgr(t)[0])


def baire_decompose(t: FrameTopology, b: frozenset) -> tuple[frozenset, frozenset]:
    """An open differing from ``b`` by a meager set.

    Scans the opens in canonical order and returns the first one whose
    symmetric difference with ``b`` misses the comeager core; existence
    is a theorem at finite scale, so exhaustion is an error.
    """
    t.check(b)
    core = comgr(t)[0]
    for u in t.opens:
        m = b ^ u
        if not (m & core):
            return u, m
    raise StructureError("no open differs from the element by a meager set")


def sigma2_family(t: FrameTopology) -> frozenset:
    """Sublattice of the ambient generated by opens and their complements."""
    fam = set(t.opens) | {t.top() - o for o in t.opens}
    changed = True
    while changed:
        changed = False
        for a in list(fam):
            for b in list(fam):
                for c in (a & b, a | b):
                    if c not in fam:
                        fam.add(c)
                        changed = True
    return frozenset(fam)
