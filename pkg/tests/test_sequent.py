import itertools

import pytest

from localix.budgets import DEFAULT_BUDGETS
from localix.errors import DomainError, ResourceBudgetError, StructureError
from localix.sequent import (
    BOT,
    TOP,
    Derivation,
    Sequent,
    cut_check,
    eval_term,
    join_t,
    meet_t,
    neg,
    nvar,
    prove,
    term_leq,
    term_to_str,
    term_vars,
    var,
)


def random_term(rng, gens, depth):
    if depth == 0 or rng.random() < 0.35:
        g = rng.choice(gens)
        return var(g) if rng.random() < 0.5 else nvar(g)
    kids = [random_term(rng, gens, depth - 1) for _ in range(rng.randint(0, 3))]
    return meet_t(kids) if rng.random() < 0.5 else join_t(kids)


def truth_table_valid(seq, gens):
    for bits in itertools.product((0, 1), repeat=len(gens)):
        v = dict(zip(gens, bits))
        if all(eval_term(t, v) for t in seq.left) and not any(
            eval_term(t, v) for t in seq.right
        ):
            return False
    return True


def test_interning_gives_identity():
    assert var("x") is var("x")
    assert meet_t([var("x"), var("y")]) is meet_t([var("y"), var("x")])
    assert TOP is meet_t([])


def test_neg_is_involutive(rng):
    for _ in range(50):
        t = random_term(rng, ["a", "b"], 3)
        assert neg(neg(t)) is t


def test_eval_and_rendering():
    t = join_t([meet_t([var("a"), nvar("b")]), var("c")])
    assert eval_term(t, {"a": 1, "b": 0, "c": 0})
    assert not eval_term(t, {"a": 0, "b": 0, "c": 0})
    assert term_to_str(t) == "\\/{c,/\\{!b,a}}"
    assert term_vars(t) == {"a", "b", "c"}
    with pytest.raises(DomainError):
        eval_term(var("z"), {})


def test_axioms_and_constants():
    assert prove(Sequent(frozenset([var("x")]), frozenset([var("x")]))).derivable
    assert prove(frozenset([TOP])).derivable  # empty meet is provable outright
    assert not prove(frozenset([BOT])).derivable
    assert prove(Sequent(frozenset([BOT]), frozenset())).derivable


def test_distributivity_is_derivable():
    # /\{a, \/B} |- \/{ /\{a,b} : b in B } for small B
    for k in range(4):
        bs = [var(f"b{i}") for i in range(k)]
        lhs = meet_t([var("a"), join_t(bs)])
        rhs = join_t([meet_t([var("a"), b]) for b in bs])
        assert prove(Sequent(frozenset([lhs]), frozenset([rhs]))).derivable


def test_weakening_preserved():
    s = Sequent(frozenset([var("x")]), frozenset([var("x"), var("y")]))
    assert prove(s).derivable


def test_provability_matches_truth_tables(rng):
    gens = ["a", "b", "c"]
    for _ in range(300):
        left = frozenset(random_term(rng, gens, 2) for _ in range(rng.randint(0, 2)))
        right = frozenset(random_term(rng, gens, 2) for _ in range(rng.randint(0, 2)))
        s = Sequent(left, right)
        res = prove(s)
        assert res.derivable == truth_table_valid(s, gens), str(s)
        if res.derivable:
            res.derivation.validate()
        else:
            v = res.countermodel
            assert all(eval_term(t, v) for t in left)
            assert not any(eval_term(t, v) for t in right)


def test_finitary_equals_infinitary(rng):
    gens = ["a", "b"]
    for _ in range(100):
        s = frozenset(random_term(rng, gens, 2) for _ in range(rng.randint(1, 3)))
        assert prove(s, "finitary").derivable == prove(s, "infinitary").derivable


def test_infinitary_derivation_validates():
    s = frozenset([join_t([var("a"), nvar("a")])])
    res = prove(s, "infinitary")
    assert res.derivable and res.derivation.rule == "joinR-inf"
    res.derivation.validate()


def test_cut_adds_nothing(rng):
    gens = ["a", "b"]
    for _ in range(100):
        a = frozenset(random_term(rng, gens, 2) for _ in range(rng.randint(0, 2)))
        t = random_term(rng, gens, 2)
        assert cut_check(a, t)


def test_term_leq_preorder():
    a, b = var("a"), var("b")
    assert term_leq(meet_t([a, b]), a)
    assert term_leq(a, join_t([a, b]))
    assert not term_leq(a, b)
    assert term_leq(BOT, a) and term_leq(a, TOP)


def test_derivation_validation_rejects_bad_trees():
    a = frozenset([var("x")])
    with pytest.raises(StructureError):
        Derivation(a, "axiom", None, ()).validate()  # no complementary pair
    good = frozenset([var("x"), nvar("x")])
    leaf = Derivation(good, "axiom", None, ())
    with pytest.raises(StructureError):
        Derivation(good, "meetR", var("x"), (leaf,)).validate()  # not a meet
    with pytest.raises(StructureError):
        Derivation(good, "nonsense", var("x"), ()).validate()


def test_budgets_enforced():
    wide = frozenset(var(f"g{i}") for i in range(20))
    with pytest.raises(ResourceBudgetError):
        prove(wide, budgets=DEFAULT_BUDGETS)
    deep = var("x")
    for _ in range(20):
        deep = meet_t([deep])
    with pytest.raises(ResourceBudgetError):
        prove(frozenset([deep]))
    with pytest.raises(DomainError):
        prove(frozenset([var("x")]), calculus="classical")


def test_sequent_rejects_non_terms():
    with pytest.raises(DomainError):
        Sequent(frozenset(["x"]), frozenset())
