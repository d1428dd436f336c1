"""Presented lattices: 2-valuation spectra, realization, colimits.

A presentation lists generators and inequations between lattice terms.
Its spectrum is the set of 2-valuations of the generators satisfying
every relation; realizing a presentation embeds it into the powerset
of its spectrum.  At finite scale this embedding is faithful, which is
what makes the spectrum enumeration a usable decision procedure and a
system-wide oracle for the colimit constructions below.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Callable, Iterable

from .budgets import DEFAULT_BUDGETS, Budgets, check_budget
from .errors import DomainError, PreconditionError, StructureError
from .lattice import FinLattice, LatticeHom, join_irreducibles, powerset_lattice
from .order import FinPoset, canon_key

__all__ = [
    "TOP",
    "BOT",
    "var",
    "neg",
    "meet",
    "join",
    "eval_term",
    "eval_term_in",
    "term_vars",
    "term_to_str",
    "Presentation",
    "SpecModel",
    "spec",
    "realize",
    "presentation_of_lattice",
    "term_of_element",
    "check_assignment",
    "extend_hom",
    "coproduct_dl",
    "pushout_points",
    "pushout_ba",
    "cocomma_dl",
    "bilax_pushout",
    "preimage_hom",
    "direct_image",
]

# Lattice terms are nested tuples: ("top",), ("bot",), ("var", g),
# ("not", t), ("meet", t1, ..., tk), ("join", t1, ..., tk).

TOP = ("top",)
BOT = ("bot",)


def var(name: str) -> tuple:
    return ("var", name)


def neg(t: tuple) -> tuple:
    return ("not", t)


def meet(*ts: tuple) -> tuple:
    return ("meet", *ts)


def join(*ts: tuple) -> tuple:
    return ("join", *ts)


def term_vars(t: tuple) -> frozenset:
    op = t[0]
    if op == "var":
        return frozenset([t[1]])
    if op in ("top", "bot"):
        return frozenset()
    return frozenset().union(*[term_vars(s) for s in t[1:]])


def eval_term(t: tuple, val: dict) -> bool:
    """Evaluate under a 2-valuation; empty meet is true, empty join false."""
    op = t[0]
    if op == "var":
        return val[t[1]]
    if op == "top":
        return True
    if op == "bot":
        return False
    if op == "not":
        return not eval_term(t[1], val)
    if op == "meet":
        return all(eval_term(s, val) for s in t[1:])
    if op == "join":
        return any(eval_term(s, val) for s in t[1:])
    raise DomainError(f"unknown term operator {op!r}")


def eval_term_in(t: tuple, assign: dict, target: FinLattice) -> frozenset:
    """Evaluate a term in a target lattice under a generator assignment."""
    op = t[0]
    if op == "var":
        return assign[t[1]]
    if op == "top":
        return target.top
    if op == "bot":
        return target.bot
    if op == "not":
        return target.complement(eval_term_in(t[1], assign, target))
    out = target.top if op == "meet" else target.bot
    for s in t[1:]:
        v = eval_term_in(s, assign, target)
        out = out & v if op == "meet" else out | v
    return out


def term_to_str(t: tuple) -> str:
    op = t[0]
    if op == "var":
        return t[1]
    if op == "top":
        return "1"
    if op == "bot":
        return "0"
    if op == "not":
        return "!" + term_to_str(t[1])
    sym = " & " if op == "meet" else " | "
    if len(t) == 1:
        return "1" if op == "meet" else "0"
    return "(" + sym.join(term_to_str(s) for s in t[1:]) + ")"


def _check_term(t: tuple, gens: frozenset, boolean: bool) -> None:
    op = t[0]
    if op == "var":
        if t[1] not in gens:
            raise DomainError(f"unknown generator {t[1]!r}")
        return
    if op in ("top", "bot"):
        return
    if op == "not":
        if not boolean:
            raise StructureError("complement only allowed in boolean presentations")
        _check_term(t[1], gens, boolean)
        return
    if op in ("meet", "join"):
        for s in t[1:]:
            _check_term(s, gens, boolean)
        return
    raise DomainError(f"unknown term operator {op!r}")


@dataclass(frozen=True)
class Presentation:
    """Generators plus inequations ``lhs <= rhs`` between terms."""

    gens: tuple
    rels: tuple
    kind: str = "distributive"

    def __post_init__(self):
        if self.kind not in ("distributive", "boolean"):
            raise DomainError(f"unknown presentation kind {self.kind!r}")
        if len(set(self.gens)) != len(self.gens):
            raise DomainError("duplicate generator names")
        gset = frozenset(self.gens)
        for lhs, rhs in self.rels:
            _check_term(lhs, gset, self.kind == "boolean")
            _check_term(rhs, gset, self.kind == "boolean")

    def to_json(self) -> str:
        def enc(t):
            return list(t[0:1]) + [enc(s) if isinstance(s, tuple) else s for s in t[1:]]

        return json.dumps(
            {
                "kind": self.kind,
                "gens": list(self.gens),
                "rels": [[enc(l), enc(r)] for l, r in self.rels],
            },
            sort_keys=True,
        )

    @staticmethod
    def from_json(text: str) -> "Presentation":
        def dec(t):
            return tuple(dec(s) if isinstance(s, list) else s for s in t)

        data = json.loads(text)
        return Presentation(
            tuple(data["gens"]),
            tuple((dec(l), dec(r)) for l, r in data["rels"]),
            data["kind"],
        )


@dataclass(frozen=True)
class SpecModel:
    """All satisfying 2-valuations of a presentation, in lexicographic order."""

    presentation: Presentation
    points: tuple  # each point is a tuple of bools aligned with gens


def spec(p: Presentation, budgets: Budgets = DEFAULT_BUDGETS) -> SpecModel:
    """Enumerate every 2-valuation of the generators satisfying the relations."""
    check_budget(budgets, "gens", len(p.gens))
    points = []
    for bits in itertools.product((False, True), repeat=len(p.gens)):
        val = dict(zip(p.gens, bits))
        if all(
            (not eval_term(l, val)) or eval_term(r, val) for l, r in p.rels
        ):
            points.append(bits)
    return SpecModel(p, tuple(points))


def realize(
    p: Presentation, budgets: Budgets = DEFAULT_BUDGETS
) -> tuple[FinLattice, dict]:
    """The lattice presented by ``p``, as subsets of its spectrum.

    Returns the lattice and the map from generator names to elements.
    For distributive presentations the spectrum carries the reverse
    valuation order, under which every generated element is a lower
    set; boolean spectra are discrete.
    """
    model = spec(p, budgets)
    pts = model.points
    full = frozenset(range(len(pts)))
    gen_img = {
        g: frozenset(i for i, bits in enumerate(pts) if bits[k])
        for k, g in enumerate(p.gens)
    }
    family = {frozenset(), full} | set(gen_img.values())
    if p.kind == "boolean":
        family |= {full - e for e in gen_img.values()}
    changed = True
    while changed:
        changed = False
        items = list(family)
        for i, x in enumerate(items):
            for y in items[i + 1 :]:
                for z in (x & y, x | y):
                    if z not in family:
                        family.add(z)
                        changed = True
        if p.kind == "boolean":
            for x in list(family):
                if full - x not in family:
                    family.add(full - x)
                    changed = True
    check_budget(budgets, "elements", len(family))
    if p.kind == "boolean":
        spectrum = FinPoset(range(len(pts)))
    else:
        # reverse valuation order: smaller points satisfy more generators
        spectrum = FinPoset(
            range(len(pts)),
            [
                (i, j)
                for i in range(len(pts))
                for j in range(len(pts))
                if all(x >= y for x, y in zip(pts[i], pts[j]))
            ],
        )
    lat = FinLattice(spectrum, family, p.kind)
    return lat, gen_img


def presentation_of_lattice(
    a: FinLattice, prefix: str = "g"
) -> tuple[Presentation, dict]:
    """Present ``a`` by its join-irreducibles.

    Relations: generator order mirrors the irreducible order, each
    binary meet of irreducibles is the join of the irreducibles below
    both, and top is the join of all generators.  Boolean lattices keep
    kind boolean (their irreducibles are atoms, so the meet relations
    make distinct generators disjoint).
    """
    jp = join_irreducibles(a)
    js = list(jp.elements)
    names = {j: f"{prefix}{i}" for i, j in enumerate(js)}
    rels = []
    for x in js:
        for y in js:
            if x != y and jp.leq(x, y):
                rels.append((var(names[x]), var(names[y])))
    for i, x in enumerate(js):
        for y in js[i + 1 :]:
            lows = [r for r in js if r <= x and r <= y]
            rels.append(
                (meet(var(names[x]), var(names[y])), join(*[var(names[r]) for r in lows]))
            )
    rels.append((TOP, join(*[var(names[j]) for j in js])))
    pres = Presentation(tuple(names[j] for j in js), tuple(rels), a.kind)
    return pres, {names[j]: j for j in js}


def term_of_element(a: FinLattice, x: frozenset, gen_of_irr: dict) -> tuple:
    """Express a lattice element as a join of irreducible generators."""
    if x not in a:
        raise DomainError(f"{x!r} not an element")
    parts = [var(g) for g, j in gen_of_irr.items() if j <= x]
    return join(*sorted(parts, key=canon_key))


def check_assignment(p: Presentation, assign: dict, target: FinLattice) -> bool:
    """Does a generator assignment into ``target`` satisfy all relations?"""
    if set(assign) != set(p.gens):
        raise DomainError("assignment must cover exactly the generators")
    for v in assign.values():
        if v not in target:
            raise DomainError(f"{v!r} not in target")
    return all(
        eval_term_in(l, assign, target) <= eval_term_in(r, assign, target)
        for l, r in p.rels
    )


def extend_hom(
    p: Presentation,
    realized: tuple[FinLattice, dict],
    assign: dict,
    target: FinLattice,
) -> LatticeHom:
    """The unique hom out of the realized lattice extending ``assign``.

    Runs the generation closure on (element, image) pairs in parallel;
    a collision would mean the assignment violates the relations.
    """
    lat, gen_img = realized
    if not check_assignment(p, assign, target):
        raise PreconditionError("relations", "assignment does not satisfy the relations")
    images: dict[frozenset, frozenset] = {lat.bot: target.bot, lat.top: target.top}
    for g in p.gens:
        e = gen_img[g]
        if e in images and images[e] != assign[g]:
            raise StructureError("assignment does not extend to a hom")
        images[e] = assign[g]
    changed = True
    while changed:
        changed = False
        items = list(images.items())
        for i, (e1, v1) in enumerate(items):
            for e2, v2 in items[i:]:
                for e, v in ((e1 & e2, v1 & v2), (e1 | e2, v1 | v2)):
                    if e in images:
                        if images[e] != v:
                            raise StructureError("assignment does not extend to a hom")
                    else:
                        images[e] = v
                        changed = True
        if p.kind == "boolean":
            for e, v in list(images.items()):
                ce, cv = lat.top - e, target.complement(v)
                if ce in images:
                    if images[ce] != cv:
                        raise StructureError("assignment does not extend to a hom")
                else:
                    images[ce] = cv
                    changed = True
    if set(images) != set(lat.elements):
        raise StructureError("generators do not generate the realized lattice")
    return LatticeHom(lat, target, images)


def _hom_from_irreducibles(b: FinLattice, d: FinLattice, irr_img: dict) -> LatticeHom:
    """Hom ``b -> d`` determined by images of the irreducibles of ``b``."""
    graph = {}
    for x in b.elements:
        v = d.bot
        for j, img in irr_img.items():
            if j <= x:
                v |= img
        graph[x] = v
    return LatticeHom(b, d, graph)


def coproduct_dl(
    a: FinLattice, b: FinLattice, budgets: Budgets = DEFAULT_BUDGETS
) -> tuple[FinLattice, LatticeHom, LatticeHom]:
    """Coproduct of distributive lattices by presentation merge."""
    pa, irr_a = presentation_of_lattice(a, "l")
    pb, irr_b = presentation_of_lattice(b, "r")
    merged = Presentation(pa.gens + pb.gens, pa.rels + pb.rels, "distributive")
    lat, gen_img = realize(merged, budgets)
    inl = _hom_from_irreducibles(a, lat, {j: gen_img[g] for g, j in irr_a.items()})
    inr = _hom_from_irreducibles(b, lat, {j: gen_img[g] for g, j in irr_b.items()})
    return lat, inl, inr


def _point_of(a: FinLattice, hom_values: Callable[[frozenset], bool]) -> frozenset:
    """The atom of a Boolean lattice carrying a given 2-valued hom."""
    m = a.top
    for x in a.elements:
        if hom_values(x):
            m &= x
    if m not in a or not hom_values(m):
        raise StructureError("valuation does not come from an atom")
    return m


def pushout_points(
    f: LatticeHom, g: LatticeHom
) -> tuple[list, Callable, Callable]:
    """Spectra pullback for a Boolean pushout square.

    Returns the pullback points (pairs of atoms of the codomains of
    ``f`` and ``g`` inducing the same point of the shared domain) and
    the two coprojections as maps from elements to point sets.
    """
    if f.dom != g.dom:
        raise DomainError("pushout requires a shared domain")
    for h in (f, g):
        if h.dom.kind != "boolean" or h.cod.kind != "boolean":
            raise PreconditionError("boolean", "pushout is for Boolean lattices")
    b, c, a = f.cod, g.cod, f.dom

    def trace(h: LatticeHom, atom: frozenset) -> frozenset:
        return _point_of(a, lambda x: atom <= h(x))

    points = [
        (beta, gamma)
        for beta in b.atoms()
        for gamma in c.atoms()
        if trace(f, beta) == trace(g, gamma)
    ]
    points.sort(key=canon_key)

    def i1(x: frozenset) -> frozenset:
        return frozenset(p for p in points if p[0] <= x)

    def i2(y: frozenset) -> frozenset:
        return frozenset(p for p in points if p[1] <= y)

    return points, i1, i2


def pushout_ba(
    f: LatticeHom, g: LatticeHom, budgets: Budgets = DEFAULT_BUDGETS
) -> tuple[FinLattice, LatticeHom, LatticeHom]:
    """Pushout of Boolean lattices: powerset of the spectra pullback."""
    points, i1, i2 = pushout_points(f, g)
    check_budget(budgets, "elements", 2 ** len(points))
    d = powerset_lattice(points)
    inl = LatticeHom(f.cod, d, {x: i1(x) for x in f.cod.elements})
    inr = LatticeHom(g.cod, d, {y: i2(y) for y in g.cod.elements})
    if any(inl(f(x)) != inr(g(x)) for x in f.dom.elements):
        raise StructureError("pushout square does not commute")
    return d, inl, inr


def cocomma_dl(
    f: LatticeHom, g: LatticeHom, budgets: Budgets = DEFAULT_BUDGETS
) -> tuple[FinLattice, LatticeHom, LatticeHom]:
    """Lax pushout of distributive lattices along a shared domain.

    Presented by the two codomains with the cross relations
    ``inl(f(x)) <= inr(g(x))`` for every ``x`` in the shared domain.
    """
    if f.dom != g.dom:
        raise DomainError("cocomma requires a shared domain")
    pb, irr_b = presentation_of_lattice(f.cod, "l")
    pc, irr_c = presentation_of_lattice(g.cod, "r")
    gb = {j: g_ for g_, j in irr_b.items()}
    gc = {j: g_ for g_, j in irr_c.items()}
    cross = []
    for x in f.dom.elements:
        lhs = join(*[var(gb[j]) for j in gb if j <= f(x)])
        rhs = join(*[var(gc[j]) for j in gc if j <= g(x)])
        cross.append((lhs, rhs))
    merged = Presentation(
        pb.gens + pc.gens, pb.rels + pc.rels + tuple(cross), "distributive"
    )
    lat, gen_img = realize(merged, budgets)
    inl = _hom_from_irreducibles(f.cod, lat, {j: gen_img[g_] for g_, j in irr_b.items()})
    inr = _hom_from_irreducibles(g.cod, lat, {j: gen_img[g_] for g_, j in irr_c.items()})
    if any(not inl(f(x)) <= inr(g(x)) for x in f.dom.elements):
        raise StructureError("cocomma laxity failed")
    return lat, inl, inr


def bilax_pushout(
    fs: list[LatticeHom],
    gs: list[LatticeHom],
    budgets: Budgets = DEFAULT_BUDGETS,
) -> tuple[FinLattice, LatticeHom, list[LatticeHom], list[LatticeHom]]:
    """N-ary two-sided lax pushout over a shared domain.

    Generated by the shared domain and all codomains, subject to
    ``in_i(f_i(x)) <= center(x)`` and ``center(x) <= out_j(g_j(x))``.
    Returns the apex, the center hom, and both coprojection families.
    """
    if not fs and not gs:
        raise DomainError("at least one leg required")
    doms = {h.dom for h in fs} | {h.dom for h in gs}
    if len(doms) != 1:
        raise DomainError("all legs must share one domain")
    a = next(iter(doms))
    pa, irr_a = presentation_of_lattice(a, "a")
    ga = {j: g_ for g_, j in irr_a.items()}
    gens, rels = list(pa.gens), list(pa.rels)
    sides = []
    for tag, homs in (("b", fs), ("c", gs)):
        per = []
        for i, h in enumerate(homs):
            pres, irr = presentation_of_lattice(h.cod, f"{tag}{i}_")
            gens += list(pres.gens)
            rels += list(pres.rels)
            gmap = {j: g_ for g_, j in irr.items()}
            per.append((h, irr, gmap))
        sides.append(per)

    def aterm(x):
        return join(*[var(ga[j]) for j in ga if j <= x])

    for h, irr, gmap in sides[0]:
        for x in a.elements:
            rels.append((join(*[var(gmap[j]) for j in gmap if j <= h(x)]), aterm(x)))
    for h, irr, gmap in sides[1]:
        for x in a.elements:
            rels.append((aterm(x), join(*[var(gmap[j]) for j in gmap if j <= h(x)])))
    merged = Presentation(tuple(gens), tuple(rels), "distributive")
    lat, gen_img = realize(merged, budgets)
    center = _hom_from_irreducibles(a, lat, {j: gen_img[g_] for g_, j in irr_a.items()})
    inls = [
        _hom_from_irreducibles(h.cod, lat, {j: gen_img[g_] for g_, j in irr.items()})
        for h, irr, gmap in sides[0]
    ]
    inrs = [
        _hom_from_irreducibles(h.cod, lat, {j: gen_img[g_] for g_, j in irr.items()})
        for h, irr, gmap in sides[1]
    ]
    return lat, center, inls, inrs


# -- finite-set plumbing used by image/pullback checks ------------------------


def preimage_hom(fun: dict, dom_pts: Iterable, cod_pts: Iterable) -> LatticeHom:
    """Preimage along a finite function, as a hom of powerset lattices.

    ``fun`` maps dom points to cod points; the hom goes from the
    powerset of the codomain to the powerset of the domain.
    """
    px, py = powerset_lattice(dom_pts), powerset_lattice(cod_pts)
    for x in px.spectrum.elements:
        if fun.get(x) not in py.spectrum.elements:
            raise DomainError(f"function undefined or out of range at {x!r}")
    return LatticeHom(
        py, px, {s: frozenset(x for x in px.spectrum.elements if fun[x] in s) for s in py.elements}
    )


def direct_image(fun: dict, s: frozenset) -> frozenset:
    return frozenset(fun[x] for x in s)
