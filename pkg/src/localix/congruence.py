"""Order-congruences on finite distributive lattices.

An order-congruence is a preorder refining the lattice order that is
meet-stable and for which lattice joins remain joins.  The closure
engine works on boolean matrices so that exhaustive enumeration stays
tractable on lattices with a few dozen elements.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .errors import DomainError, StructureError
from .lattice import FinLattice, LatticeHom, lattice_from_abstract

__all__ = [
    "OrderCongruence",
    "gen_order_congruence",
    "order_kernel",
    "quotient",
    "enumerate_order_congruences",
]


class _Tables:
    """Index tables for one lattice: leq matrix, meet/join index tables."""

    def __init__(self, a: FinLattice):
        self.lattice = a
        self.elems = list(a.elements)
        self.index = {e: i for i, e in enumerate(self.elems)}
        n = len(self.elems)
        self.n = n
        self.leq = np.zeros((n, n), dtype=bool)
        self.meet = np.zeros((n, n), dtype=np.int64)
        self.join = np.zeros((n, n), dtype=np.int64)
        for i, x in enumerate(self.elems):
            for j, y in enumerate(self.elems):
                self.leq[i, j] = x <= y
                self.meet[i, j] = self.index[x & y]
                self.join[i, j] = self.index[x | y]


_TABLE_CACHE: dict[FinLattice, _Tables] = {}


def _tables(a: FinLattice) -> _Tables:
    t = _TABLE_CACHE.get(a)
    if t is None:
        t = _Tables(a)
        _TABLE_CACHE[a] = t
    return t


def _close(t: _Tables, rel: np.ndarray) -> np.ndarray:
    """Least order-congruence (as a boolean matrix) containing ``rel``.

    Fixpoint of: contains leq; transitive; meet-stable; the set of
    elements below any fixed right-hand side is join-closed.
    """
    r = rel | t.leq
    n = t.n
    while True:
        before = r.tobytes()
        # transitivity
        u = r.astype(np.uint8)
        r = r | (u @ u > 0)
        # meet stability: (a, b) forces (c /\ a, c /\ b) for every c
        rows, cols = np.nonzero(r)
        for c in range(n):
            r[t.meet[c, rows], t.meet[c, cols]] = True
        # join rule: {a | (a, c) in r} is closed under binary joins
        for c in range(n):
            sel = np.nonzero(r[:, c])[0]
            if len(sel) > 1:
                r[t.join[np.ix_(sel, sel)].ravel(), c] = True
        if r.tobytes() == before:
            return r


def _matrix_to_pairs(t: _Tables, r: np.ndarray) -> frozenset:
    rows, cols = np.nonzero(r)
    return frozenset((t.elems[i], t.elems[j]) for i, j in zip(rows, cols))


def _pairs_to_matrix(t: _Tables, pairs: Iterable[tuple]) -> np.ndarray:
    r = np.zeros((t.n, t.n), dtype=bool)
    for a, b in pairs:
        if a not in t.index or b not in t.index:
            raise DomainError(f"pair ({a!r}, {b!r}) mentions a non-element")
        r[t.index[a], t.index[b]] = True
    return r


class OrderCongruence:
    """A validated order-congruence, stored as its full pair set."""

    __slots__ = ("base", "rel")

    def __init__(self, base: FinLattice, rel: Iterable[tuple]):
        t = _tables(base)
        r = _pairs_to_matrix(t, rel)
        if not (r | t.leq == r).all():
            raise StructureError("congruence must contain the lattice order")
        u = r.astype(np.uint8)
        if ((u @ u > 0) & ~r).any():
            raise StructureError("congruence must be transitive")
        rows, cols = np.nonzero(r)
        for c in range(t.n):
            if (~r[t.meet[c, rows], t.meet[c, cols]]).any():
                raise StructureError("congruence must be meet-stable")
        for c in range(t.n):
            sel = np.nonzero(r[:, c])[0]
            if len(sel) > 1 and (~r[t.join[np.ix_(sel, sel)].ravel(), c]).any():
                raise StructureError("lattice joins must remain joins")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "rel", _matrix_to_pairs(t, r))

    def __setattr__(self, *a):
        raise AttributeError("OrderCongruence is immutable")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, OrderCongruence)
            and self.base == other.base
            and self.rel == other.rel
        )

    def __hash__(self) -> int:
        return hash((self.base, self.rel))

    def __repr__(self) -> str:
        return f"OrderCongruence({len(self.rel)} pairs on {len(self.base)} elements)"

    def holds(self, a, b) -> bool:
        return (a, b) in self.rel

    def equivalent(self, a, b) -> bool:
        return (a, b) in self.rel and (b, a) in self.rel

    def classes(self) -> list[frozenset]:
        seen: set = set()
        out = []
        for x in self.base.elements:
            if x in seen:
                continue
            cls = frozenset(y for y in self.base.elements if self.equivalent(x, y))
            seen |= cls
            out.append(cls)
        return out


def gen_order_congruence(a: FinLattice, pairs: Iterable[tuple]) -> OrderCongruence:
    """Least order-congruence on ``a`` containing the given pairs."""
    t = _tables(a)
    r = _close(t, _pairs_to_matrix(t, pairs))
    return OrderCongruence(a, _matrix_to_pairs(t, r))


def order_kernel(f: LatticeHom) -> OrderCongruence:
    """The pairs ``(a, b)`` with ``f(a) <= f(b)``."""
    return OrderCongruence(
        f.dom,
        [(a, b) for a in f.dom.elements for b in f.dom.elements if f(a) <= f(b)],
    )


def quotient(a: FinLattice, c: OrderCongruence) -> tuple[FinLattice, LatticeHom]:
    """Quotient lattice and projection; the projection's kernel is ``c``."""
    if c.base != a:
        raise DomainError("congruence is not on this lattice")
    classes = c.classes()
    cls_of = {}
    for cls in classes:
        for x in cls:
            cls_of[x] = cls

    def cleq(p, q):
        return c.holds(next(iter(p)), next(iter(q)))

    lat, to_elem = lattice_from_abstract(classes, cleq)
    q = LatticeHom(a, lat, {x: to_elem[cls_of[x]] for x in a.elements})
    if order_kernel(q).rel != c.rel:
        raise StructureError("projection kernel mismatch")
    return lat, q


def enumerate_order_congruences(a: FinLattice) -> list[OrderCongruence]:
    """All order-congruences on ``a``.

    Search: any congruence is a join of single-step ones, and a
    collapsed pair forces the collapse of each covering step between
    the two elements, so closures of cover collapses generate
    everything.  Breadth-first join closure over that generating set.
    """
    t = _tables(a)
    bottom = _close(t, np.zeros((t.n, t.n), dtype=bool))
    covers = a.element_poset().cover_pairs()
    steps = []
    for low, high in covers:
        g = np.zeros((t.n, t.n), dtype=bool)
        g[t.index[high], t.index[low]] = True
        steps.append((t.index[high], t.index[low], _close(t, g)))
    seen = {bottom.tobytes(): bottom}
    queue = [bottom]
    while queue:
        cur = queue.pop()
        for hi, lo, theta in steps:
            if cur[hi, lo]:
                continue
            nxt = _close(t, cur | theta)
            key = nxt.tobytes()
            if key not in seen:
                seen[key] = nxt
                queue.append(nxt)
    out = [OrderCongruence(a, _matrix_to_pairs(t, r)) for r in seen.values()]
    out.sort(key=lambda c: (len(c.rel), sorted(map(repr, c.rel))))
    return out
