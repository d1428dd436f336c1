"""Prenex Boolean terms and the one-sided cut-free sequent calculus.

Terms are negation-normal: literals over generators, and set-valued
meet/join nodes.  A two-sided sequent A |- B is decided through its
one-sided form |- notA, B.  Proof search is backward, memoized over
the finite subterm-closed sequent space; refutations come with a
two-valuation countermodel.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .budgets import DEFAULT_BUDGETS, Budgets, check_budget
from .errors import DomainError, StructureError
from .order import canon_key

__all__ = [
    "Term",
    "var",
    "nvar",
    "meet_t",
    "join_t",
    "TOP",
    "BOT",
    "neg",
    "term_key",
    "term_vars",
    "term_depth",
    "term_to_str",
    "Sequent",
    "Derivation",
    "ProofResult",
    "prove",
    "eval_term",
    "term_leq",
    "cut_check",
]


class Term:
    """A prenex term: ``kind`` is pos/neg/meet/join.

    Structurally equal terms are interned, so identity comparison and
    hashing are cheap and child sets deduplicate for free.
    """

    __slots__ = ("kind", "gen", "children", "depth", "_hash")
    _interned: dict = {}

    def __new__(cls, kind: str, gen=None, children: frozenset = frozenset()):
        key = (kind, gen, children)
        hit = cls._interned.get(key)
        if hit is not None:
            return hit
        self = super().__new__(cls)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "gen", gen)
        object.__setattr__(self, "children", children)
        depth = 1 + max((c.depth for c in children), default=0) if children else 1
        object.__setattr__(self, "depth", depth)
        object.__setattr__(self, "_hash", hash(key))
        cls._interned[key] = self
        return self

    def __setattr__(self, *a):
        raise AttributeError("Term is immutable")

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        return self is other

    def __repr__(self) -> str:
        return term_to_str(self)


def var(x) -> Term:
    return Term("pos", x)


def nvar(x) -> Term:
    return Term("neg", x)


def meet_t(children: Iterable[Term]) -> Term:
    return Term("meet", None, frozenset(children))


def join_t(children: Iterable[Term]) -> Term:
    return Term("join", None, frozenset(children))


TOP = meet_t([])
BOT = join_t([])


def neg(t: Term) -> Term:
    """The involution swapping pos/neg literals and meet/join nodes."""
    if t.kind == "pos":
        return Term("neg", t.gen)
    if t.kind == "neg":
        return Term("pos", t.gen)
    if t.kind == "meet":
        return join_t(neg(c) for c in t.children)
    return meet_t(neg(c) for c in t.children)


def term_key(t: Term):
    """Deterministic total order on terms, for canonical display."""
    if t.kind in ("pos", "neg"):
        return (0, t.kind, canon_key(t.gen))
    return (1, t.kind, len(t.children), tuple(sorted(term_key(c) for c in t.children)))


def term_vars(t: Term) -> frozenset:
    if t.kind in ("pos", "neg"):
        return frozenset([t.gen])
    out = frozenset()
    for c in t.children:
        out |= term_vars(c)
    return out


def term_depth(t: Term) -> int:
    return t.depth


def term_to_str(t: Term) -> str:
    if t.kind == "pos":
        return str(t.gen)
    if t.kind == "neg":
        return f"!{t.gen}"
    body = ",".join(term_to_str(c) for c in sorted(t.children, key=term_key))
    return ("/\\{" if t.kind == "meet" else "\\/{") + body + "}"


def eval_term(t: Term, v: Mapping) -> bool:
    """Standard evaluation; empty meet is true, empty join is false."""
    if t.kind in ("pos", "neg"):
        if t.gen not in v:
            raise DomainError(f"valuation does not assign generator {t.gen!r}")
        return bool(v[t.gen]) if t.kind == "pos" else not v[t.gen]
    if t.kind == "meet":
        return all(eval_term(c, v) for c in t.children)
    return any(eval_term(c, v) for c in t.children)


@dataclass(frozen=True)
class Sequent:
    left: frozenset
    right: frozenset

    def __post_init__(self):
        for t in self.left | self.right:
            if not isinstance(t, Term):
                raise DomainError("sequent sides must contain terms")

    def one_sided(self) -> frozenset:
        return frozenset(neg(t) for t in self.left) | self.right

    def __str__(self) -> str:
        def side(s):
            return "{" + ",".join(term_to_str(t) for t in sorted(s, key=term_key)) + "}"

        return f"{side(self.left)} |- {side(self.right)}"


@dataclass(frozen=True)
class Derivation:
    """A one-sided derivation tree; ``validate`` re-checks every node."""

    sequent: frozenset
    rule: str
    principal: Optional[Term]
    children: tuple

    def validate(self) -> None:
        a = self.sequent
        if self.rule == "axiom":
            if self.children:
                raise StructureError("axiom must be a leaf")
            if not any(t.kind == "pos" and Term("neg", t.gen) in a for t in a):
                raise StructureError("axiom leaf lacks a complementary literal pair")
            return
        p = self.principal
        if p is None or p not in a:
            raise StructureError("principal term must occur in the sequent")
        premises = tuple(c.sequent for c in self.children)
        if self.rule == "meetR":
            if p.kind != "meet":
                raise StructureError("meetR principal must be a meet")
            want = tuple(a | {b} for b in sorted(p.children, key=term_key))
            if premises != want:
                raise StructureError("meetR premises must add each conjunct")
        elif self.rule == "joinR":
            if p.kind != "join":
                raise StructureError("joinR principal must be a join")
            if len(premises) != 1 or not any(
                premises[0] == a | {b} for b in p.children
            ):
                raise StructureError("joinR premise must add one disjunct")
        elif self.rule == "joinR-inf":
            if p.kind != "join":
                raise StructureError("joinR-inf principal must be a join")
            if premises != (a | p.children,):
                raise StructureError("joinR-inf premise must add all disjuncts")
        else:
            raise StructureError(f"unknown rule {self.rule!r}")
        for c in self.children:
            c.validate()

    def pretty(self, left_origin: frozenset = frozenset(), indent: int = 0) -> str:
        names = {"meetR": "/\\R", "joinR": "\\/R", "joinR-inf": "\\/R", "axiom": "ax"}
        rule = names[self.rule]
        if self.principal is not None and self.principal in left_origin:
            rule = {"/\\R": "\\/L", "\\/R": "/\\L"}[rule]
        body = "{" + ",".join(
            term_to_str(t) for t in sorted(self.sequent, key=term_key)
        ) + "}"
        lines = ["  " * indent + f"|- {body}   [{rule}]"]
        for c in self.children:
            lines.append(c.pretty(left_origin, indent + 1))
        return "\n".join(lines)


@dataclass(frozen=True)
class ProofResult:
    derivable: bool
    derivation: Optional[Derivation]
    countermodel: Optional[dict]


def _as_one_sided(s) -> frozenset:
    if isinstance(s, Sequent):
        return s.one_sided()
    return frozenset(s)


def prove(
    s, calculus: str = "finitary", budgets: Budgets = DEFAULT_BUDGETS
) -> ProofResult:
    """Decide a sequent by complete backward search.

    Accepts a two-sided ``Sequent`` or a set of terms read as the
    one-sided right side.  A repeated sequent along a branch cannot
    occur in any minimal derivation (premises only grow), so cyclic
    branches are failures and both verdicts memoize soundly.
    """
    if calculus not in ("finitary", "infinitary"):
        raise DomainError(f"unknown calculus {calculus!r}")
    a0 = _as_one_sided(s)
    gens = frozenset()
    for t in a0:
        gens |= term_vars(t)
        check_budget(budgets, "sequent_depth", t.depth)
    check_budget(budgets, "sequent_gens", len(gens))
    memo: dict[frozenset, Optional[Derivation] | bool] = {}
    in_progress: set[frozenset] = set()

    def search(a: frozenset):
        if a in memo:
            return memo[a]
        if a in in_progress:
            return False  # exact self-repeat: no minimal derivation here
        for t in a:
            if t.kind == "pos" and Term("neg", t.gen) in a:
                d = Derivation(a, "axiom", None, ())
                memo[a] = d
                return d
        in_progress.add(a)
        found = False
        for p in sorted(a, key=term_key):
            if p.kind == "meet":  # empty meet: zero premises, immediate
                subs = []
                for b in sorted(p.children, key=term_key):
                    sub = search(a | {b})
                    if not sub:
                        break
                    subs.append(sub)
                else:
                    found = Derivation(a, "meetR", p, tuple(subs))
                    break
            elif p.kind == "join" and p.children:
                if calculus == "finitary":
                    for b in sorted(p.children, key=term_key):
                        sub = search(a | {b})
                        if sub:
                            found = Derivation(a, "joinR", p, (sub,))
                            break
                    if found:
                        break
                else:
                    sub = search(a | p.children)
                    if sub:
                        found = Derivation(a, "joinR-inf", p, (sub,))
                        break
        in_progress.discard(a)
        memo[a] = found
        return found

    d = search(a0)
    if d:
        d.validate()
        return ProofResult(True, d, None)
    counter = _countermodel(a0, gens)
    return ProofResult(False, None, counter)


def _countermodel(a: frozenset, gens: frozenset) -> dict:
    import itertools

    order = sorted(gens, key=canon_key)
    for bits in itertools.product((False, True), repeat=len(order)):
        v = dict(zip(order, bits))
        if not any(eval_term(t, v) for t in a):
            return v
    raise StructureError("refuted sequent admits no countermodel")


def term_leq(a: Term, b: Term, budgets: Budgets = DEFAULT_BUDGETS) -> bool:
    """The term-model preorder: {a} |- {b} is derivable."""
    return prove(Sequent(frozenset([a]), frozenset([b])), budgets=budgets).derivable


def cut_check(a: Iterable[Term], t: Term, budgets: Budgets = DEFAULT_BUDGETS) -> bool:
    """Cut adds nothing: if |- A,t and |- A,not t, then |- A cut-free.

    Vacuously true when either premise is underivable.
    """
    a = frozenset(a)
    if not prove(a | {t}, budgets=budgets).derivable:
        return True
    if not prove(a | {neg(t)}, budgets=budgets).derivable:
        return True
    return prove(a, budgets=budgets).derivable
