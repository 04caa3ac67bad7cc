import itertools
import random

import pytest

from nomeq.birkhoff import (
    ClassicTheory,
    FiniteAlgebra,
    SelAxiom,
    SelJudgement,
    SelRef,
    SelSubst,
    SelSym,
    SelTrans,
    enumerate_models,
    eval_term,
    path_to_sel_proof,
    satisfies,
    sel_check,
    soundness_audit,
)
from nomeq.errors import ChildMismatch, MissingAssignment, NotClassical
from nomeq.presentations import parse_presentation
from nomeq.snr import equal_bounded
from nomeq.syntax import parse_term
from nomeq.terms import show

XOR = FiniteAlgebra.of(2, {"m": [0, 1, 1, 0], "e": [0]})


@pytest.fixture
def T(monoid):
    return lambda text: parse_term(text, monoid.families)


def test_classic_theory_checks(lam, monoid):
    assert ClassicTheory(monoid).name == "monoid"
    with pytest.raises(NotClassical):
        ClassicTheory(lam)


def test_sel_examples(monoid, T):
    j = sel_check(SelAxiom("assoc"), monoid)
    assert (show(j.lhs), show(j.rhs)) == ("m(m(x,y),z)", "m(x,m(y,z))")
    j = sel_check(SelSubst(SelAxiom("unitl"), (("x", SelRef(frozenset(), T("e"))),)), monoid)
    assert j == SelJudgement(frozenset(), T("m(e,e)"), T("e"))
    with pytest.raises(ChildMismatch):
        sel_check(SelTrans(SelAxiom("unitl"), SelAxiom("unitl")), monoid)
    with pytest.raises(ChildMismatch):
        sel_check(SelSubst(SelAxiom("unitl"), ()), monoid)


def test_eval_examples(T):
    three = FiniteAlgebra.of(3, {"m": [0] * 9, "e": [2]})
    assert eval_term(T("x"), three, {"x": 2}) == 2
    assert eval_term(T("e"), three, {}) == 2
    assert eval_term(T("m(x,x)"), XOR, {"x": 1}) == 0
    assert eval_term(T("e"), XOR, {}) == 0
    with pytest.raises(MissingAssignment):
        eval_term(T("m(x,y)"), XOR, {"x": 0})


def test_algebra_validation_and_json():
    with pytest.raises(ValueError):
        FiniteAlgebra.of(2, {"m": [0, 1, 2, 0]})
    with pytest.raises(ValueError):
        FiniteAlgebra.of(2, {"m": [0, 1, 1]})
    assert FiniteAlgebra.from_json(XOR.to_json()) == XOR


def test_satisfies_examples(monoid, T):
    one = FiniteAlgebra.of(1, {"m": [0], "e": [0]})
    for eq in monoid.equations:
        assert satisfies(one, eq)
        assert satisfies(XOR, eq)
    assert satisfies(XOR, (T("m(x,y)"), T("m(y,x)")))
    assert not satisfies(XOR, (T("x"), T("m(x,x)")))


def monoid_oracle(size):
    """All (e, m) on range(size) with unit and associativity, by direct loops."""
    found = set()
    n = range(size)
    for unit in n:
        for table in itertools.product(n, repeat=size * size):
            def mul(p, q):
                return table[p * size + q]
            if any(mul(unit, p) != p or mul(p, unit) != p for p in n):
                continue
            if any(mul(mul(p, q), r) != mul(p, mul(q, r)) for p in n for q in n for r in n):
                continue
            found.add((size, unit, table))
    return found


def test_enumeration_matches_oracle(monoid):
    models = enumerate_models(monoid, 3)
    got = {(m.size, m.table("e")[0], m.table("m")) for m in models}
    want = set().union(*(monoid_oracle(k) for k in (1, 2, 3)))
    assert got == want
    assert len([m for m in models if m.size == 2]) == len(monoid_oracle(2)) == 4
    with pytest.raises(ValueError):
        enumerate_models(monoid, 5)


def test_parallel_enumeration_is_identical(monoid):
    assert enumerate_models(monoid, 3, jobs=3) == enumerate_models(monoid, 3)


def test_satisfies_invariant_under_relabelling(monoid, T):
    rng = random.Random(31)
    judgements = [(T("m(x,y)"), T("m(y,x)")), (T("m(x,x)"), T("x")), (T("m(e,x)"), T("x"))]
    for alg in enumerate_models(monoid, 3):
        perm = list(range(alg.size))
        rng.shuffle(perm)
        other = alg.relabel(perm)
        for j in judgements:
            assert satisfies(alg, j) == satisfies(other, j)


def test_audit_examples(monoid, T):
    assert soundness_audit(monoid, [(T("m(e,e)"), T("e"))], 3) == []
    collapse = parse_presentation("theory c\nop m : 2 args\nop e : 0 args\neq both (x:0, y:0) : x = y")
    models = enumerate_models(collapse, 3)
    assert [m.size for m in models] == [1]
    assert soundness_audit(collapse, [(T("m(x,y)"), T("y"))], 3) == []
    bad = soundness_audit(monoid, [(T("x"), T("m(x,x)"))], 2, models=[XOR])
    assert len(bad) == 1 and bad[0].assignment == {"x": 1}


def test_path_to_proof(monoid, T):
    for s, t in [("m(m(x,e),m(e,y))", "m(x,y)"), ("m(m(x,y),m(z,e))", "m(x,m(y,z))"), ("x", "x")]:
        v = equal_bounded(T(s), T(t), monoid, max_depth=6)
        assert v
        j = sel_check(path_to_sel_proof(v.path, monoid), monoid)
        assert (j.lhs, j.rhs) == (T(s), T(t))


def test_sym_and_trans(monoid, T):
    p = SelTrans(SelSym(SelAxiom("unitl")), SelAxiom("unitl"))
    j = sel_check(p, monoid)
    assert j.lhs == j.rhs == T("x")
