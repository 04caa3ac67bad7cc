"""Acceptance suite.  Run with ``pytest tests/test_acceptance.py`` (or directly as a script);
the terminal summary prints one PASS/FAIL line per criterion."""

import itertools
import random
import time

import pytest

from gen import atom_tuple, lambda_term, substitution
from nomeq.birkhoff import (
    SelAxiom,
    SelRef,
    SelSubst,
    SelSym,
    SelTrans,
    enumerate_models,
    path_to_sel_proof,
    sel_check,
    soundness_audit,
)
from nomeq.errors import ChildMismatch, SideConditionViolated, UnknownAxiom, ValenceMismatch
from nomeq.nominal import (
    Abstraction,
    Atom,
    Permutation,
    act,
    alpha_eq,
    fresh,
    multi_transposition,
    perm_compose,
    perm_inverse,
    support_of,
)
from nomeq.presentations import NominalContext, VariableContext, builtin_lambda, builtin_monoid
from nomeq.semantics import check_satisfaction_sampled, identity_environment, interpret
from nomeq.snel import LAMBDA_EXAMPLE_PROOF, check, parse_proof
from nomeq.snr import Equal, equal_bounded, layered_congruence, replay, successors
from nomeq.syntax import parse_term
from nomeq.terms import (
    Op,
    Var,
    act_substitution,
    compose_substitutions,
    depth,
    substitute,
    term_support,
    variables,
)

LAM = builtin_lambda()
MON = builtin_monoid()
START, END = "A(L[a](L[a](x(a))),y)", "L[a](x(a))"
CASES = 1000


def L(text):
    return parse_term(text, LAM.families)


def M(text):
    return parse_term(text, MON.families)


# ------------------------------------------------------------ proof replay

MUTATIONS = {
    "dropped Elim freshness": (
        ("(elim [b] (trans (trans B D) (sym A)))", "(elim [b] D)"), SideConditionViolated),
    "wrong Eqvar tuple": (
        ("(elim [b] (trans (trans B D) (sym A)))", "(elim [b] (eqvar [c] (trans (trans B D) (sym A))))"),
        ChildMismatch),
    "swapped Trans middle": (("(trans (trans B D) (sym A))", "(trans (trans D B) (sym A))"), ChildMismatch),
    "wrong axiom name": (("(axiom beta_k)", "(axiom beta_kappa)"), UnknownAxiom),
    "valence mismatch in Subst": (("(x [c] (ref [c] (x:1, y:0) x(c)))", "(x [] (ref [] (x:1, y:0) y))"),
                                  ValenceMismatch),
    "non-fresh Intro tuple": (("(intro [b] 1 (axiom beta_k))", "(intro [a] 1 (axiom beta_k))"),
                              SideConditionViolated),
}


@pytest.mark.criterion("proof replay and 6 mutations (< 1 s)")
def test_proof_replay():
    t0 = time.perf_counter()
    j = check(parse_proof(LAMBDA_EXAMPLE_PROOF, LAM), LAM)
    assert str(j) == "⟨a | x:1,y:0⟩ ⊢ A(L[a](L[a](x(a))),y) ≡ L[a](x(a))"
    for (old, new), error in MUTATIONS.values():
        assert old in LAMBDA_EXAMPLE_PROOF
        with pytest.raises(error):
            check(parse_proof(LAMBDA_EXAMPLE_PROOF.replace(old, new), LAM), LAM)
    assert time.perf_counter() - t0 < 1.0


# ------------------------------------------------------------ rewrite replay


@pytest.mark.criterion("rewrite replay: 3 steps alpha, beta_k, alpha (< 5 s)")
def test_rewrite_replay():
    t0 = time.perf_counter()
    v = equal_bounded(L(START), L(END), LAM, max_depth=4, node_budget=10**5)
    elapsed = time.perf_counter() - t0
    assert isinstance(v, Equal)
    assert v.path.equations() == ["alpha", "beta_k", "alpha"]
    assert replay(v.path, LAM)
    assert elapsed < 5.0


# ------------------------------------------------------------ nominal core


def rperm(rng, max_moved=8, window=12):
    dom = rng.sample(range(window), rng.randint(0, max_moved))
    img = dom[:]
    rng.shuffle(img)
    return Permutation({Atom(i): Atom(j) for i, j in zip(dom, img) if i != j})


def rvalue(rng):
    k = rng.randrange(4)
    if k == 0:
        return Atom(rng.randrange(12))
    if k == 1:
        return atom_tuple(rng, rng.randint(0, 4), 12)
    if k == 2:
        return lambda_term(rng, atom_tuple(rng, 3, 12), {"x": 1, "y": 0}, 3)
    n = rng.randint(0, 2)
    return Abstraction(atom_tuple(rng, n, 12), lambda_term(rng, atom_tuple(rng, 3, 12), {"x": 1, "y": 0}, 3))


def rename_binder(ab, marker_base=1000):
    """Independent alpha oracle: binder atoms become reserved markers, pointwise."""
    ren = {x: Atom(marker_base + i) for i, x in enumerate(ab.binder)}

    def go(t):
        if isinstance(t, Var):
            return Var(t.name, tuple(ren.get(x, x) for x in t.args))
        o = t.op
        return Op(type(o)(o.family, tuple(ren.get(x, x) for x in o.params)), tuple(go(k) for k in t.children))

    return go(ab.body)


@pytest.mark.criterion("nominal core properties (1000 cases each)")
def test_group_laws():
    rng = random.Random(100)
    for _ in range(CASES):
        p, q, r = rperm(rng), rperm(rng), rperm(rng)
        assert perm_compose(perm_compose(p, q), r) == perm_compose(p, perm_compose(q, r))
        assert perm_compose(p, perm_inverse(p)).is_identity()
        assert perm_compose(Permutation.identity(), p) == p == perm_compose(p, Permutation.identity())


@pytest.mark.criterion("nominal core properties (1000 cases each)")
def test_action_laws():
    rng = random.Random(101)
    for _ in range(CASES):
        p, q, v = rperm(rng), rperm(rng), rvalue(rng)
        assert act(Permutation.identity(), v) == v
        assert act(p, act(q, v)) == act(perm_compose(p, q), v)


@pytest.mark.criterion("nominal core properties (1000 cases each)")
def test_support_equivariance():
    rng = random.Random(102)
    for _ in range(CASES):
        p, v = rperm(rng), rvalue(rng)
        assert support_of(act(p, v)) == {p(x) for x in support_of(v)}


@pytest.mark.criterion("nominal core properties (1000 cases each)")
def test_alpha_equivalence():
    rng = random.Random(103)
    for _ in range(CASES):
        n = rng.randint(0, 2)
        ctx = atom_tuple(rng, 3, 10)
        x = Abstraction(atom_tuple(rng, n, 10), lambda_term(rng, ctx, {"x": 1, "y": 0}, 3))
        variants = [x]
        for _ in range(2):
            base = variants[-1]
            avoid = set(base.binder) | set(term_support(base.body))
            c = fresh(n, avoid)
            variants.append(Abstraction(c, act(multi_transposition(base.binder, c), base.body)))
        other = Abstraction(atom_tuple(rng, n, 10), lambda_term(rng, ctx, {"x": 1, "y": 0}, 3))
        pool = variants + [other]
        for u, v in itertools.product(pool, repeat=2):
            verdict = alpha_eq(u, v)
            assert verdict == (rename_binder(u) == rename_binder(v))
            assert verdict == alpha_eq(v, u)
            w1 = fresh(n, set(u.binder) | set(v.binder) | set(term_support(u.body)) | set(term_support(v.body)))
            w2 = fresh(n, set(w1) | set(u.binder) | set(v.binder) | set(term_support(u.body)) | set(term_support(v.body)))
            assert alpha_eq(u, v, witness=w1) == alpha_eq(u, v, witness=w2) == verdict
        assert all(alpha_eq(u, u) for u in pool)
        assert alpha_eq(variants[0], variants[1]) and alpha_eq(variants[1], variants[2])
        assert alpha_eq(variants[0], variants[2])
        for u, v, w in itertools.product(pool, repeat=3):
            if alpha_eq(u, v) and alpha_eq(v, w):
                assert alpha_eq(u, w)


@pytest.mark.criterion("nominal core properties (1000 cases each)")
def test_multi_transposition_bijective():
    rng = random.Random(104)
    for _ in range(CASES):
        n = rng.randint(0, 5)
        src, dst = atom_tuple(rng, n, 12), atom_tuple(rng, n, 12)
        p = multi_transposition(src, dst)
        dom = set(src) | set(dst)
        assert [p(x) for x in src] == list(dst)
        assert {p(x) for x in dom} == dom
        assert all(p(Atom(i)) == Atom(i) for i in range(16) if Atom(i) not in dom)


# ------------------------------------------------------------ substitution

VALENCES = {"x": 1, "y": 0, "z": 2}
FREE = (Atom(20), Atom(21))


@pytest.mark.criterion("substitution suite (500 cases + worked step)")
def test_substitution_equivariance_and_composition():
    rng = random.Random(200)
    for _ in range(500):
        ctx = atom_tuple(rng, 3)
        t = lambda_term(rng, ctx, VALENCES, 3)
        theta = substitution(rng, VALENCES, FREE, {"u": 1, "w": 0}, 2)
        sigma = substitution(rng, {"u": 1, "w": 0}, (), {"q": 0}, 2)
        p = rperm(rng, 6, 24)
        assert act(p, substitute(t, theta)) == substitute(act(p, t), act_substitution(p, theta))
        assert substitute(substitute(t, theta), sigma) == substitute(t, compose_substitutions(theta, sigma))


@pytest.mark.criterion("substitution suite (500 cases + worked step)")
def test_substitution_worked_step():
    theta = {"x": Abstraction((Atom(1),), L("L[b](x(b))")), "y": Abstraction((Atom(0), Atom(1)), L("y"))}
    assert substitute(L("A(L[a](x(b)),y(a,b))"), theta) == L("A(L[a](L[b](x(b))),y)")
    assert substitute(L("x(b)"), theta) == L("L[b](x(b))")


# ------------------------------------------------------------ classical fragment


def random_monoid_term(rng, k, names=("x", "y", "z")):
    if k == 0 or rng.random() < 0.35:
        return M(rng.choice(list(names) + ["e"]))
    return Op(MON.families["m"](), (random_monoid_term(rng, k - 1, names), random_monoid_term(rng, k - 1, names)))


def derived_judgement(rng, scope):
    """A random SEL proof and the number of rewrite steps it stands for."""
    refs = lambda t: SelRef(scope, t)

    def instance():
        eq = rng.choice(MON.equations)
        prems = tuple((x, refs(random_monoid_term(rng, 1))) for x in sorted(eq.context.vars))
        p = SelSubst(SelAxiom(eq.name), prems)
        return (SelSym(p) if rng.random() < 0.5 else p), 1

    def congruence():
        (p1, n1), (p2, n2) = instance(), (instance() if rng.random() < 0.5 else (refs(random_monoid_term(rng, 1)), 0))
        head = SelRef(frozenset({"z1", "z2"}), M("m(z1,z2)"))
        return SelSubst(head, (("z1", p1), ("z2", p2))), n1 + n2

    def unit_tail(p, n):
        rhs = sel_check(p, MON).rhs
        name = rng.choice(["unitl", "unitr"])
        pad = SelSym(SelSubst(SelAxiom(name), (("x", refs(rhs)),)))
        return SelTrans(p, pad), n + 1

    p, n = instance() if rng.random() < 0.5 else congruence()
    if n < 3 and rng.random() < 0.6:
        p, n = unit_tail(p, n)
    return p, n


def classical_judgements():
    rng = random.Random(300)
    scope = frozenset({"x", "y", "z"})
    out = []
    while len(out) < 30:
        p, n = derived_judgement(rng, scope)
        j = sel_check(p, MON)
        if j.lhs != j.rhs:
            out.append((j, n))
    return out


def classical_pairs():
    rng = random.Random(301)
    out = []
    while len(out) < 30:
        s = random_monoid_term(rng, 3)
        t, steps = s, rng.randint(1, 3)
        for _ in range(steps):
            t = rng.choice(successors(t, MON))[0]
        if t != s:
            out.append((s, t))
    return out


JUDGEMENTS = classical_judgements()
PAIRS = classical_pairs()


@pytest.mark.criterion("classical completeness cross-check (30 + 30)")
def test_sel_judgements_confirmed_by_rewriting():
    assert len(JUDGEMENTS) == 30
    for j, steps in JUDGEMENTS:
        assert steps <= 3
        v = equal_bounded(j.lhs, j.rhs, MON, max_depth=6)
        assert isinstance(v, Equal), str(j)
        assert replay(v.path, MON)


@pytest.mark.criterion("classical completeness cross-check (30 + 30)")
def test_rewrite_paths_become_sel_proofs():
    assert len(PAIRS) == 30
    for s, t in PAIRS:
        v = equal_bounded(s, t, MON, max_depth=6)
        assert isinstance(v, Equal)
        j = sel_check(path_to_sel_proof(v.path, MON), MON)
        assert (j.lhs, j.rhs) == (s, t)


def monoid_oracle(size):
    rows = range(size)
    out = set()
    for unit in rows:
        for table in itertools.product(rows, repeat=size * size):
            mul = lambda p, q: table[p * size + q]
            if all(mul(unit, p) == p == mul(p, unit) for p in rows) and all(
                mul(mul(p, q), r) == mul(p, mul(q, r)) for p in rows for q in rows for r in rows
            ):
                out.add((size, unit, table))
    return out


@pytest.mark.criterion("soundness audit against models up to size 3")
def test_soundness_audit():
    models = enumerate_models(MON, 3)
    assert {(m.size, m.table("e")[0], m.table("m")) for m in models} == set().union(
        *(monoid_oracle(k) for k in (1, 2, 3))
    )
    judgements = [j for j, _ in JUDGEMENTS] + list(PAIRS)
    assert len(judgements) == 60
    assert soundness_audit(MON, judgements, 3, models=models) == []


# ------------------------------------------------------------ quotient chain


def quotient_pairs():
    rng = random.Random(400)
    valences = {"x": 1, "y": 0}
    out = []
    while len(out) < 50:
        ctx = atom_tuple(rng, 2, 4)
        s = lambda_term(rng, ctx, valences, 3)
        if len(out) % 2 == 0:
            t = lambda_term(rng, ctx, valences, 3)
        else:
            t = s
            for _ in range(rng.randint(1, 2)):
                near = [v for v, _ in successors(t, LAM) if depth(v) <= 3]
                if near:
                    t = rng.choice(near)
        if depth(s) <= 3 and depth(t) <= 3:
            out.append((s, t))
    return out


@pytest.mark.criterion("quotient chain oracle (50 pairs, n = 3)")
def test_layered_congruence_never_outruns_search():
    related = 0
    for s, t in quotient_pairs():
        universe = {s, t} | {v for v, _ in successors(s, LAM)} | {v for v, _ in successors(t, LAM)}
        layers = layered_congruence(universe, LAM, 3)
        if layers.related(s, t):
            related += 1
            v = equal_bounded(s, t, LAM, max_depth=8)
            assert isinstance(v, Equal), f"{s} ~ {t} not confirmed: {v.stats}"
    assert related >= 10


# ------------------------------------------------------------ interpretation


@pytest.mark.criterion("interpretation checks")
def test_identity_environment_law():
    rng = random.Random(500)
    for _ in range(200):
        ctx = NominalContext(atom_tuple(rng, rng.randint(1, 3)), VariableContext(VALENCES))
        t = lambda_term(rng, ctx.atoms, ctx.vars, 3)
        assert interpret(ctx, t, identity_environment(ctx)) == t


@pytest.mark.criterion("interpretation checks")
@pytest.mark.parametrize("name", ["alpha", "eta"])
def test_lambda_model_laws(name):
    report = check_satisfaction_sampled(LAM, LAM.equation(name), samples=20, max_depth=6, seed=0)
    assert len(report.results) == 20
    assert report.all_confirmed, "\n".join(report.lines())
    for r in report.results:
        assert set(variables(r.lhs)) <= {"g", "h"}


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
