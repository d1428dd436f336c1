"""Finite distributive lattices in set representation, with homs.

A :class:`FinLattice` carries a spectrum poset and a family of subsets
of the spectrum: each element is a lower set (in the spectrum order),
the family is closed under intersection and union, and contains the
empty and the full set.  Order is inclusion, meet is intersection,
join is union.  Boolean lattices additionally have an antichain
spectrum and a complement-closed element family.
"""

from __future__ import annotations

import json
from typing import Callable, Hashable, Iterable

from .errors import DomainError, NoImageError, PreconditionError, StructureError
from .order import FinPoset, canon_key, lower_sets_of, poset_isomorphic

__all__ = [
    "FinLattice",
    "LatticeHom",
    "lower_sets",
    "join_irreducibles",
    "birkhoff_embedding",
    "lattice_from_abstract",
    "powerset_lattice",
    "lattice_isomorphic",
    "enumerate_homs",
    "borel_image",
    "disjointify",
    "filterquotient",
    "product_decompose",
    "ideal_completion",
]


class FinLattice:
    """Immutable finite distributive (or Boolean) lattice of sets."""

    __slots__ = ("spectrum", "elements", "kind", "_eset", "_hash")

    def __init__(
        self,
        spectrum: FinPoset,
        elements: Iterable[frozenset],
        kind: str = "distributive",
    ):
        if kind not in ("distributive", "boolean"):
            raise DomainError(f"unknown lattice kind {kind!r}")
        elems = tuple(sorted({frozenset(e) for e in elements}, key=canon_key))
        eset = frozenset(elems)
        pts = frozenset(spectrum.elements)
        full = pts
        if frozenset() not in eset or full not in eset:
            raise StructureError("element family must contain the empty and full set")
        for e in elems:
            if not e <= pts:
                raise StructureError(f"element {e!r} is not a subset of the spectrum")
            for x in e:
                for y in spectrum.elements:
                    if spectrum.leq(y, x) and y not in e:
                        raise StructureError(
                            f"element {e!r} is not a lower set: misses {y!r} <= {x!r}"
                        )
        for a in elems:
            for b in elems:
                if (a & b) not in eset or (a | b) not in eset:
                    raise StructureError("family not closed under intersection/union")
        if kind == "boolean":
            if not spectrum.is_antichain():
                raise StructureError("boolean lattice requires an antichain spectrum")
            for a in elems:
                if (full - a) not in eset:
                    raise StructureError(f"no complement for {a!r}")
        object.__setattr__(self, "spectrum", spectrum)
        object.__setattr__(self, "elements", elems)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "_eset", eset)
        object.__setattr__(self, "_hash", hash((spectrum, eset, kind)))

    def __setattr__(self, *a):
        raise AttributeError("FinLattice is immutable")

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, e) -> bool:
        return e in self._eset

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FinLattice)
            and self.kind == other.kind
            and self.spectrum == other.spectrum
            and self._eset == other._eset
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"FinLattice({len(self.elements)} elements, kind={self.kind})"

    # -- lattice operations ------------------------------------------------

    @property
    def bot(self) -> frozenset:
        return frozenset()

    @property
    def top(self) -> frozenset:
        return frozenset(self.spectrum.elements)

    def _check(self, *xs):
        for x in xs:
            if x not in self._eset:
                raise DomainError(f"{x!r} is not an element of this lattice")

    def leq(self, a: frozenset, b: frozenset) -> bool:
        self._check(a, b)
        return a <= b

    def meet(self, a: frozenset, b: frozenset) -> frozenset:
        self._check(a, b)
        return a & b

    def join(self, a: frozenset, b: frozenset) -> frozenset:
        self._check(a, b)
        return a | b

    def complement(self, a: frozenset) -> frozenset:
        """The unique complement, when one exists in the family."""
        self._check(a)
        c = self.top - a
        if c not in self._eset:
            raise StructureError(f"{a!r} has no complement in this lattice")
        return c

    def join_of(self, xs: Iterable[frozenset]) -> frozenset:
        out = frozenset()
        for x in xs:
            self._check(x)
            out |= x
        return out

    def meet_of(self, xs: Iterable[frozenset]) -> frozenset:
        out = self.top
        for x in xs:
            self._check(x)
            out &= x
        return out

    def atoms(self) -> tuple:
        bot = self.bot
        out = []
        for a in self.elements:
            if a == bot:
                continue
            if not any(e != bot and e != a and e < a for e in self.elements):
                out.append(a)
        return tuple(out)

    def element_poset(self) -> FinPoset:
        return FinPoset(
            self.elements,
            [(a, b) for a in self.elements for b in self.elements if a <= b],
        )

    # -- serialization ------------------------------------------------------

    def to_json(self) -> str:
        from .order import _label

        return json.dumps(
            {
                "kind": self.kind,
                "spectrum": json.loads(self.spectrum.to_json()),
                "elements": [sorted(_label(x) for x in e) for e in self.elements],
            },
            sort_keys=True,
        )

    @staticmethod
    def from_json(text: str) -> "FinLattice":
        from .order import _unlabel

        data = json.loads(text)
        spectrum = FinPoset.from_json(json.dumps(data["spectrum"]))
        elems = [frozenset(_unlabel(x) for x in e) for e in data["elements"]]
        return FinLattice(spectrum, elems, data["kind"])

    def to_dot(self, name: str = "lattice") -> str:
        return self.element_poset().to_dot(name)


class LatticeHom:
    """A bounded lattice homomorphism, validated on construction."""

    __slots__ = ("dom", "cod", "graph")

    def __init__(self, dom: FinLattice, cod: FinLattice, graph: dict):
        if set(graph) != set(dom.elements):
            raise DomainError("graph must be defined on exactly the domain elements")
        for v in graph.values():
            if v not in cod:
                raise DomainError(f"image {v!r} not in codomain")
        if graph[dom.bot] != cod.bot or graph[dom.top] != cod.top:
            raise StructureError("homomorphism must preserve bottom and top")
        for a in dom.elements:
            for b in dom.elements:
                if graph[a & b] != graph[a] & graph[b]:
                    raise StructureError(f"meet not preserved at ({a!r}, {b!r})")
                if graph[a | b] != graph[a] | graph[b]:
                    raise StructureError(f"join not preserved at ({a!r}, {b!r})")
        object.__setattr__(self, "dom", dom)
        object.__setattr__(self, "cod", cod)
        object.__setattr__(self, "graph", dict(graph))

    def __setattr__(self, *a):
        raise AttributeError("LatticeHom is immutable")

    def __call__(self, x: frozenset) -> frozenset:
        try:
            return self.graph[x]
        except KeyError:
            raise DomainError(f"{x!r} not in domain") from None

    def compose(self, other: "LatticeHom") -> "LatticeHom":
        """self after other."""
        if other.cod != self.dom:
            raise DomainError("composition mismatch")
        return LatticeHom(other.dom, self.cod, {a: self(other(a)) for a in other.dom.elements})

    def is_injective(self) -> bool:
        return len(set(self.graph.values())) == len(self.graph)

    def is_surjective(self) -> bool:
        return set(self.graph.values()) == set(self.cod.elements)

    @staticmethod
    def identity(a: FinLattice) -> "LatticeHom":
        return LatticeHom(a, a, {x: x for x in a.elements})


# -- constructions ----------------------------------------------------------


def lower_sets(p: FinPoset) -> FinLattice:
    """The lattice of all lower sets of ``p`` (Boolean iff ``p`` is an antichain)."""
    kind = "boolean" if p.is_antichain() else "distributive"
    return FinLattice(p, lower_sets_of(p), kind)


def join_irreducibles(a: FinLattice) -> FinPoset:
    """The poset of join-irreducible elements of ``a``.

    An element is join-irreducible when it differs from the join of
    everything strictly below it (so bottom is excluded).
    """
    irr = []
    for e in a.elements:
        below = frozenset().union(*[x for x in a.elements if x < e]) if e else frozenset()
        if e != below:
            irr.append(e)
    return FinPoset(irr, [(x, y) for x in irr for y in irr if x <= y])


def birkhoff_embedding(a: FinLattice) -> tuple[FinLattice, LatticeHom]:
    """The canonical representation of ``a`` on its join-irreducibles.

    Returns the lattice of lower sets of the irreducible poset together
    with the map ``b -> {j irreducible | j <= b}``, and verifies that
    the map is an isomorphism (it is, for any distributive lattice).
    """
    jp = join_irreducibles(a)
    rep = lower_sets(jp)
    graph = {b: frozenset(j for j in jp.elements if j <= b) for b in a.elements}
    if len(set(graph.values())) != len(a.elements) or set(graph.values()) != set(rep.elements):
        raise StructureError("lattice is not distributive: set representation fails")
    return rep, LatticeHom(a, rep, graph)


def lattice_from_abstract(
    items: Iterable[Hashable],
    leq: Callable[[Hashable, Hashable], bool],
) -> tuple[FinLattice, dict]:
    """Realize an abstract finite lattice given by a leq predicate.

    Meets and joins are computed from ``leq`` (they must exist), the
    join-irreducibles become the spectrum, and each item maps to the
    set of irreducibles below it.  Raises when the input is not a
    distributive lattice.  Returns the lattice and the item->element map.
    """
    items = list(dict.fromkeys(items))

    def glb(x, y):
        lows = [z for z in items if leq(z, x) and leq(z, y)]
        for m in lows:
            if all(leq(z, m) for z in lows):
                return m
        raise StructureError(f"no meet for ({x!r}, {y!r})")

    def lub(x, y):
        ups = [z for z in items if leq(x, z) and leq(y, z)]
        for m in ups:
            if all(leq(m, z) for z in ups):
                return m
        raise StructureError(f"no join for ({x!r}, {y!r})")

    irr = []
    for e in items:
        strictly_below = [x for x in items if leq(x, e) and x != e]
        if not strictly_below:
            continue  # bottom
        j = strictly_below[0]
        for x in strictly_below[1:]:
            j = lub(j, x)
        if j != e:
            irr.append(e)
    if not items:
        raise StructureError("empty carrier is not a lattice")
    to_elem = {x: frozenset(j for j in irr if leq(j, x)) for x in items}
    if len(set(to_elem.values())) != len(items):
        raise StructureError("not a distributive lattice: representation collapses items")
    for x in items:
        for y in items:
            if to_elem[glb(x, y)] != to_elem[x] & to_elem[y]:
                raise StructureError("not distributive: meet is not intersection")
            if to_elem[lub(x, y)] != to_elem[x] | to_elem[y]:
                raise StructureError("not distributive: join is not union")
    spectrum = FinPoset(irr, [(x, y) for x in irr for y in irr if leq(x, y)])
    family = set(to_elem.values())
    full = frozenset(irr)
    kind = "boolean" if spectrum.is_antichain() and all(full - e in family for e in family) else "distributive"
    return FinLattice(spectrum, family, kind), to_elem


def powerset_lattice(points: Iterable[Hashable]) -> FinLattice:
    pts = list(dict.fromkeys(points))
    subsets = [frozenset()]
    for p in pts:
        subsets += [s | {p} for s in subsets]
    return FinLattice(FinPoset(pts), subsets, "boolean")


def lattice_isomorphic(a: FinLattice, b: FinLattice) -> bool:
    """Isomorphism of finite distributive lattices via their irreducible posets."""
    if len(a) != len(b):
        return False
    return poset_isomorphic(join_irreducibles(a), join_irreducibles(b))


def enumerate_homs(a: FinLattice, b: FinLattice) -> list[LatticeHom]:
    """All bounded lattice homs ``a -> b`` (small instances only).

    A hom is determined by its values on join-irreducibles; candidates
    are monotone assignments that respect the meet table and top.
    """
    jp = join_irreducibles(a)
    js = list(jp.elements)
    out = []

    def extend(i: int, assign: dict):
        if i == len(js):
            # meet condition: e_j /\ e_k must equal the join of e_r over
            # irreducibles r below both j and k
            for j in js:
                for k in js:
                    lows = [r for r in js if r <= j and r <= k]
                    rhs = frozenset().union(*[assign[r] for r in lows]) if lows else frozenset()
                    if assign[j] & assign[k] != rhs:
                        return
            total = frozenset().union(*assign.values()) if assign else frozenset()
            if total != b.top:
                return
            graph = {
                x: frozenset().union(*[assign[j] for j in js if j <= x]) if any(j <= x for j in js) else frozenset()
                for x in a.elements
            }
            try:
                out.append(LatticeHom(a, b, graph))
            except StructureError:
                pass
            return
        j = js[i]
        for v in b.elements:
            ok = all(
                (not jp.leq(js[k], j) or assign[js[k]] <= v)
                and (not jp.leq(j, js[k]) or v <= assign[js[k]])
                for k in range(i)
            )
            if ok:
                assign[j] = v
                extend(i + 1, assign)
                del assign[j]

    extend(0, {})
    return out


# -- derived operations ------------------------------------------------------


def borel_image(f: LatticeHom, b: frozenset) -> frozenset:
    """Least ``c`` in the domain of ``f`` with ``b <= f(c)``.

    Satisfies the adjunction ``b <= f(c)  iff  borel_image(f, b) <= c``.
    At finite scale the candidate set is meet-closed and nonempty, so
    the minimum exists; the error path guards malformed inputs.
    """
    if b not in f.cod:
        raise DomainError(f"{b!r} not in the codomain of f")
    candidates = [c for c in f.dom.elements if b <= f(c)]
    m = f.dom.top
    for c in candidates:
        m &= c
    if m not in f.dom or not b <= f(m):
        raise NoImageError(f"no least cover for {b!r} along f")
    return m


def disjointify(a: FinLattice, cover: list[frozenset]) -> list[frozenset]:
    """Turn a finite cover into a disjoint refinement, in input order.

    ``d_i = c_i /\\ not(c_0 \\/ ... \\/ c_{i-1})``; requires the running
    partial joins to be complemented in ``a``.
    """
    for c in cover:
        if c not in a:
            raise DomainError(f"{c!r} not an element")
    out = []
    sofar = a.bot
    for c in cover:
        neg = a.top - sofar
        if neg not in a:
            raise StructureError("partial join has no complement; cannot disjointify")
        out.append(c & neg)
        sofar |= c
    return out


def filterquotient(a: FinLattice, d: frozenset) -> tuple[FinLattice, LatticeHom]:
    """Quotient by the principal filter at ``d``: the lattice below ``d``.

    Returns the lattice ``{x | x <= d}`` (with top ``d``) and the
    quotient map ``x -> x /\\ d``.
    """
    if d not in a:
        raise DomainError(f"{d!r} not an element")
    sub_spec = a.spectrum.subposet(d)
    elems = [x for x in a.elements if x <= d]
    eset = set(elems)
    kind = (
        "boolean"
        if sub_spec.is_antichain() and all((d - x) in eset for x in elems)
        else "distributive"
    )
    down = FinLattice(sub_spec, elems, kind)
    q = LatticeHom(a, down, {x: x & d for x in a.elements})
    return down, q


def product_decompose(
    a: FinLattice, partition: list[frozenset]
) -> tuple[list[tuple[FinLattice, LatticeHom]], Callable]:
    """Split ``a`` along a finite partition of its top.

    Returns the factor filterquotients and a reassembly function
    sending a tuple of factor elements back to their join in ``a``;
    the decomposition is verified to be a bijection.
    """
    join = a.bot
    for i, d in enumerate(partition):
        if d not in a:
            raise DomainError(f"{d!r} not an element")
        for e in partition[i + 1 :]:
            if d & e != a.bot:
                raise PreconditionError("partition", f"{d!r} and {e!r} overlap")
        join |= d
    if join != a.top:
        raise PreconditionError("partition", "pieces do not join to top")
    factors = [filterquotient(a, d) for d in partition]

    def reassemble(parts: tuple) -> frozenset:
        if len(parts) != len(partition):
            raise DomainError("wrong arity for reassembly")
        out = frozenset()
        for (fac, _), x in zip(factors, parts):
            if x not in fac:
                raise DomainError(f"{x!r} not in its factor")
            out |= x
        if out not in a:
            raise StructureError("reassembled element missing; decomposition failed")
        return out

    # bijectivity check
    seen = set()
    import itertools

    for combo in itertools.product(*[fac.elements for fac, _ in factors]):
        seen.add(reassemble(combo))
    if seen != set(a.elements):
        raise StructureError("decomposition is not bijective")
    return factors, reassemble


def ideal_completion(a: FinLattice) -> tuple[FinLattice, LatticeHom]:
    """Lattice of ideals (lower, join-closed, containing bottom) of ``a``.

    At finite scale every ideal is principal, so the unit ``x -> down(x)``
    is an isomorphism; this is asserted.
    """
    elems = list(a.elements)
    ideals = []
    for d in lower_sets_of(a.element_poset()):
        if not d:
            continue
        if all((x | y) in d for x in d for y in d):
            ideals.append(d)
    lat, to_elem = lattice_from_abstract(ideals, lambda i, j: i <= j)
    unit_graph = {
        x: to_elem[frozenset(y for y in elems if y <= x)] for x in elems
    }
    unit = LatticeHom(a, lat, unit_graph)
    if not (unit.is_injective() and unit.is_surjective()):
        raise StructureError("ideal completion is not an isomorphism at finite scale")
    return lat, unit
