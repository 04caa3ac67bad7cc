"""Proof objects and the checking kernel for synthetic nominal equational logic.

Proofs are explicit trees carrying every witness (atom tuples, contexts,
axiom names).  :func:`check` recomputes the conclusion of a tree bottom-up
and never trusts anything stored in it.

Proof scripts are s-expressions::

    (let A (subst (axiom alpha) (x [c] (ref [c] (x:1, y:0) x(c))))
      (elim [b] (trans A (sym A))))
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import (
    ChildMismatch,
    ScopeError,
    SideConditionViolated,
    UnknownAxiom,
    ValenceMismatch,
)
from .nominal import Abstraction, Atom, act, fresh, multi_transposition
from .presentations import NominalContext, Presentation, VariableContext
from .syntax import TokenStream, read_atom_tuple, read_term, read_var_context, tokenize
from .terms import Term, Var, first_unscoped, leaves, show, substitute, term_support


@dataclass(frozen=True)
class Judgement:
    context: NominalContext
    lhs: Term
    rhs: Term

    def __str__(self) -> str:
        return f"{self.context} ⊢ {show(self.lhs)} ≡ {show(self.rhs)}"


class Proof:
    """Base class of proof nodes."""

    rule = "?"

    def children(self) -> tuple[Proof, ...]:
        return ()


@dataclass(frozen=True, eq=False)
class Eqvar(Proof):
    target: tuple[Atom, ...]
    child: Proof
    rule = "Eqvar"

    def children(self):
        return (self.child,)


@dataclass(frozen=True, eq=False)
class Ref(Proof):
    context: NominalContext
    term: Term
    rule = "Ref"


@dataclass(frozen=True, eq=False)
class Sym(Proof):
    child: Proof
    rule = "Sym"

    def children(self):
        return (self.child,)


@dataclass(frozen=True, eq=False)
class Trans(Proof):
    left: Proof
    right: Proof
    rule = "Trans"

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=False)
class Axiom(Proof):
    name: str
    rule = "Axiom"


@dataclass(frozen=True, eq=False)
class Elim(Proof):
    dropped: tuple[Atom, ...]
    child: Proof
    rule = "Elim"

    def children(self):
        return (self.child,)


@dataclass(frozen=True, eq=False)
class Intro(Proof):
    atoms: tuple[Atom, ...]
    child: Proof
    m: int | None = None
    rule = "Intro"

    def children(self):
        return (self.child,)


@dataclass(frozen=True, eq=False)
class Premise:
    """Premise for variable ``var`` of a substitution: a proof in context ``<binder | U>``."""

    var: str
    binder: tuple[Atom, ...]
    proof: Proof


@dataclass(frozen=True, eq=False)
class SubstCoprod(Proof):
    head: Proof
    premises: tuple[Premise, ...]
    target: VariableContext | None = None
    rule = "Subst"

    def children(self):
        return (self.head,) + tuple(p.proof for p in self.premises)


@dataclass(frozen=True, eq=False)
class IntroSubst(Proof):
    atoms: tuple[Atom, ...]
    head: Proof
    premises: tuple[Premise, ...]
    target: VariableContext | None = None
    rule = "IntroSubst"

    def children(self):
        return (self.head,) + tuple(p.proof for p in self.premises)


@dataclass(frozen=True, eq=False)
class Inc(Proof):
    atoms: tuple[Atom, ...]
    child: Proof
    rule = "Inc"

    def children(self):
        return (self.child,)


def _atoms_txt(xs: Iterable[Atom]) -> str:
    return "(" + ",".join(map(str, xs)) + ")"


def _scope(rule: str, ctx: NominalContext, t: Term) -> None:
    bad = first_unscoped(t, ctx.atoms, ctx.vars)
    if bad is not None:
        raise ScopeError(f"{rule} in {ctx}", show(bad[0]), bad[1])


class _Checker:
    def __init__(self, th: Presentation):
        self.th = th
        self.memo: dict[int, Judgement] = {}

    def __call__(self, p: Proof) -> Judgement:
        key = id(p)
        if key not in self.memo:
            self.memo[key] = self.rule(p)
        return self.memo[key]

    def rule(self, p: Proof) -> Judgement:
        match p:
            case Ref(ctx, t):
                _scope("Ref", ctx, t)
                return Judgement(ctx, t, t)
            case Axiom(name):
                if not self.th.has_equation(name):
                    raise UnknownAxiom(name)
                eq = self.th.equation(name)
                return Judgement(eq.context, eq.lhs, eq.rhs)
            case Sym(child):
                j = self(child)
                return Judgement(j.context, j.rhs, j.lhs)
            case Trans(left, right):
                j1, j2 = self(left), self(right)
                if j1.context != j2.context:
                    raise ChildMismatch("Trans", f"premises live in different contexts {j1.context} and {j2.context}")
                if j1.rhs != j2.lhs:
                    raise ChildMismatch("Trans", f"middle terms differ: {show(j1.rhs)} vs {show(j2.lhs)}")
                return Judgement(j1.context, j1.lhs, j2.rhs)
            case Eqvar(target, child):
                return self.eqvar(target, self(child))
            case Elim(dropped, child):
                return self.elim(dropped, self(child))
            case Intro(new, child, m):
                return self.intro(new, m, self(child))
            case Inc(new, child):
                j = self(child)
                self._fresh_for_context("Inc", new, j.context)
                return Judgement(NominalContext(j.context.atoms + tuple(new), j.context.vars), j.lhs, j.rhs)
            case SubstCoprod(head, premises, target):
                return self.subst("Subst", (), self(head), premises, target)
            case IntroSubst(new, head, premises, target):
                j = self(head)
                self._fresh_for_context("IntroSubst", new, j.context)
                return self.subst("IntroSubst", tuple(new), j, premises, target)
        raise TypeError(f"not a proof node: {p!r}")

    def eqvar(self, target: tuple[Atom, ...], j: Judgement) -> Judgement:
        src = j.context.atoms
        if len(target) != len(src) or len(set(target)) != len(target):
            raise ChildMismatch(
                "Eqvar", f"target {_atoms_txt(target)} must be {len(src)} distinct atoms to rename {_atoms_txt(src)}"
            )
        pi = multi_transposition(src, target)
        return Judgement(NominalContext(tuple(target), j.context.vars), act(pi, j.lhs), act(pi, j.rhs))

    def elim(self, dropped: tuple[Atom, ...], j: Judgement) -> Judgement:
        ctx = j.context
        k = len(dropped)
        if k > len(ctx.atoms) or tuple(ctx.atoms[len(ctx.atoms) - k:]) != tuple(dropped):
            raise ChildMismatch("Elim", f"{_atoms_txt(dropped)} is not a suffix of the atom context {ctx}")
        kept = ctx.atoms[: len(ctx.atoms) - k]
        clash = (term_support(j.lhs) | term_support(j.rhs)) & set(dropped)
        if clash:
            raise SideConditionViolated(
                "Elim", f"b⃗ # a⃗, t,t′ fails: {', '.join(map(str, sorted(clash)))} occur in {show(j.lhs)} ≡ {show(j.rhs)}"
            )
        return Judgement(NominalContext(kept, ctx.vars), j.lhs, j.rhs)

    def intro(self, new: tuple[Atom, ...], m: int | None, j: Judgement) -> Judgement:
        if m is not None and m != len(new):
            raise ChildMismatch("Intro", f"m = {m} but {len(new)} atoms given")
        ctx = j.context
        self._fresh_for_context("Intro", new, ctx)
        for side in (j.lhs, j.rhs):
            for leaf in leaves(side):
                if set(leaf.args) & set(new):
                    raise SideConditionViolated("Intro", f"b⃗ # b⃗_x fails at leaf {show(leaf)}")
        avoid = set(ctx.atoms) | set(new)
        theta = {}
        for x, n in ctx.vars.entries:
            e = fresh(n, avoid)
            theta[x] = Abstraction(e, Var(x, e + tuple(new)))
        out_ctx = NominalContext(ctx.atoms + tuple(new), ctx.vars.extend(len(new)))
        return Judgement(out_ctx, substitute(j.lhs, theta), substitute(j.rhs, theta))

    def subst(
        self,
        rule: str,
        new: tuple[Atom, ...],
        head: Judgement,
        premises: tuple[Premise, ...],
        target: VariableContext | None,
    ) -> Judgement:
        valences = head.context.vars
        given = [p.var for p in premises]
        if len(set(given)) != len(given):
            raise ChildMismatch(rule, "a variable has two premises")
        if set(given) != set(valences):
            missing = sorted(set(valences) - set(given))
            extra = sorted(set(given) - set(valences))
            raise ChildMismatch(rule, f"premises must cover the head context exactly (missing {missing}, extra {extra})")
        u_ctx = target
        theta, theta2 = {}, {}
        for prem in premises:
            if len(prem.binder) != valences[prem.var]:
                raise ValenceMismatch(
                    f"{rule}: {prem.var} has valence {valences[prem.var]} but its premise binds {len(prem.binder)} atoms"
                )
            pj = self(prem.proof)
            expected = tuple(prem.binder) + new
            if pj.context.atoms != expected:
                raise ChildMismatch(
                    rule, f"premise for {prem.var} has atom context {_atoms_txt(pj.context.atoms)}, expected {_atoms_txt(expected)}"
                )
            if u_ctx is None:
                u_ctx = pj.context.vars
            elif pj.context.vars != u_ctx:
                raise ChildMismatch(rule, f"premise for {prem.var} has variable context {pj.context.vars}, expected {u_ctx}")
            theta[prem.var] = Abstraction(tuple(prem.binder), pj.lhs)
            theta2[prem.var] = Abstraction(tuple(prem.binder), pj.rhs)
        if u_ctx is None:
            raise ChildMismatch(rule, "no premises and no target context: the conclusion context is undetermined")
        out_ctx = NominalContext(head.context.atoms + new, u_ctx)
        return Judgement(out_ctx, substitute(head.lhs, theta), substitute(head.rhs, theta2))

    @staticmethod
    def _fresh_for_context(rule: str, new: Iterable[Atom], ctx: NominalContext) -> None:
        new = tuple(new)
        if len(set(new)) != len(new):
            raise SideConditionViolated(rule, f"{_atoms_txt(new)} are not distinct")
        clash = set(new) & set(ctx.atoms)
        if clash:
            raise SideConditionViolated(rule, f"b⃗ # a⃗ fails: {', '.join(map(str, sorted(clash)))} already in {ctx}")


def check(p: Proof, th: Presentation) -> Judgement:
    """The judgement derived by ``p`` in theory ``th``; raises on any faulty step."""
    return _Checker(th)(p)


# ------------------------------------------------------------------ derived rules


def elaborate(p: Proof, th: Presentation) -> Proof:
    """Rewrite IntroSubst and Inc nodes into Intro followed by Subst."""
    checker = _Checker(th)
    memo: dict[int, Proof] = {}

    def go(q: Proof) -> Proof:
        key = id(q)
        if key in memo:
            return memo[key]
        match q:
            case Ref() | Axiom():
                out = q
            case Sym(c):
                out = Sym(go(c))
            case Trans(l, r):
                out = Trans(go(l), go(r))
            case Eqvar(t, c):
                out = Eqvar(t, go(c))
            case Elim(d, c):
                out = Elim(d, go(c))
            case Intro(b, c, m):
                out = Intro(b, go(c), m)
            case SubstCoprod(h, prems, target):
                out = SubstCoprod(go(h), tuple(Premise(x.var, x.binder, go(x.proof)) for x in prems), target)
            case IntroSubst(b, h, prems, target):
                checker(q)  # validate before rewriting
                out = SubstCoprod(
                    Intro(tuple(b), go(h), len(b)),
                    tuple(Premise(x.var, tuple(x.binder) + tuple(b), go(x.proof)) for x in prems),
                    target if target is not None else _premise_vars(checker, prems),
                )
            case Inc(b, c):
                out = go(inc_as_introsubst(b, c, checker(c)))
            case _:
                raise TypeError(f"not a proof node: {q!r}")
        memo[key] = out
        return out

    return go(p)


def _premise_vars(checker: _Checker, prems: tuple[Premise, ...]) -> VariableContext | None:
    if not prems:
        return None
    return checker(prems[0].proof).context.vars


def inc_as_introsubst(new: tuple[Atom, ...], child: Proof, j: Judgement) -> IntroSubst:
    """Inc as IntroSubst whose premises are the reflexivities ``x(b_x) ≡ x(b_x)``."""
    ctx = j.context
    avoid = set(ctx.atoms) | set(new)
    prems = []
    for x, n in ctx.vars.entries:
        e = fresh(n, avoid)
        prems.append(Premise(x, e, Ref(NominalContext(e + tuple(new), ctx.vars), Var(x, e))))
    return IntroSubst(tuple(new), child, tuple(prems), ctx.vars)


def uses_derived_rules(p: Proof) -> bool:
    seen: set[int] = set()
    stack = [p]
    while stack:
        q = stack.pop()
        if id(q) in seen:
            continue
        seen.add(id(q))
        if isinstance(q, (IntroSubst, Inc)):
            return True
        stack.extend(q.children())
    return False


# ------------------------------------------------------------------ proof scripts


def parse_proof(text: str, th: Presentation) -> Proof:
    ts = TokenStream(tokenize(text))
    p = _read_proof(ts, th, {})
    if not ts.done():
        ts.error(f"trailing input {ts.peek.text!r}")
    return p


def _read_proof(ts: TokenStream, th: Presentation, env: Mapping[str, Proof]) -> Proof:
    if ts.peek.kind == "ident":
        tok = ts.next()
        if tok.text not in env:
            ts.error(f"unbound proof name {tok.text!r}", tok)
        return env[tok.text]
    ts.expect("(")
    head = ts.ident("a rule name")
    rule = head.text.lower()
    fam = th.families
    if rule == "axiom":
        p: Proof = Axiom(ts.ident("an equation name").text)
    elif rule == "ref":
        atoms_ = read_atom_tuple(ts)
        vars_ = VariableContext(read_var_context(ts))
        p = Ref(NominalContext(atoms_, vars_), read_term(ts, fam, vars_))
    elif rule == "sym":
        p = Sym(_read_proof(ts, th, env))
    elif rule == "trans":
        left = _read_proof(ts, th, env)
        p = Trans(left, _read_proof(ts, th, env))
    elif rule == "eqvar":
        target = read_atom_tuple(ts)
        p = Eqvar(target, _read_proof(ts, th, env))
    elif rule == "elim":
        dropped = read_atom_tuple(ts)
        p = Elim(dropped, _read_proof(ts, th, env))
    elif rule == "intro":
        new = read_atom_tuple(ts)
        m = ts.number() if ts.peek.kind == "num" else None
        p = Intro(new, _read_proof(ts, th, env), m)
    elif rule == "inc":
        new = read_atom_tuple(ts)
        p = Inc(new, _read_proof(ts, th, env))
    elif rule in ("subst", "introsubst"):
        new = read_atom_tuple(ts) if rule == "introsubst" else ()
        hd = _read_proof(ts, th, env)
        prems, target = _read_premises(ts, th, env)
        p = SubstCoprod(hd, prems, target) if rule == "subst" else IntroSubst(new, hd, prems, target)
    elif rule == "let":
        name = ts.ident("a proof name").text
        bound = _read_proof(ts, th, env)
        p = _read_proof(ts, th, {**env, name: bound})
    else:
        ts.error(f"unknown rule {head.text!r}", head)
        raise AssertionError  # unreachable
    ts.expect(")")
    return p


def _read_premises(ts: TokenStream, th: Presentation, env: Mapping[str, Proof]):
    prems: list[Premise] = []
    target = None
    while ts.accept("("):
        tok = ts.ident("a variable or 'target'")
        if tok.text == "target" and ts.at("("):
            target = VariableContext(read_var_context(ts))
        else:
            binder = read_atom_tuple(ts)
            prems.append(Premise(tok.text, binder, _read_proof(ts, th, env)))
        ts.expect(")")
    return tuple(prems), target


def format_proof(p: Proof, indent: int = 0) -> str:
    """Proof script text for ``p`` (shared subproofs are printed in full)."""
    pad = "  " * indent

    def tup(xs):
        return "[" + " ".join(map(str, xs)) + "]"

    def vctx(v: VariableContext):
        return "(" + ", ".join(f"{x}:{n}" for x, n in v.entries) + ")"

    def sub(q):
        return format_proof(q, indent + 1)

    match p:
        case Axiom(name):
            body = f"(axiom {name})"
        case Ref(ctx, t):
            body = f"(ref {tup(ctx.atoms)} {vctx(ctx.vars)} {show(t)})"
        case Sym(c):
            body = f"(sym\n{sub(c)})"
        case Trans(l, r):
            body = f"(trans\n{sub(l)}\n{sub(r)})"
        case Eqvar(t, c):
            body = f"(eqvar {tup(t)}\n{sub(c)})"
        case Elim(d, c):
            body = f"(elim {tup(d)}\n{sub(c)})"
        case Intro(b, c, m):
            body = f"(intro {tup(b)} {len(b) if m is None else m}\n{sub(c)})"
        case Inc(b, c):
            body = f"(inc {tup(b)}\n{sub(c)})"
        case SubstCoprod(h, prems, target) | IntroSubst(_, h, prems, target):
            name = "subst" if isinstance(p, SubstCoprod) else f"introsubst {tup(p.atoms)}"
            parts = [f"({name}", sub(h)]
            for x in prems:
                parts.append(f"{pad}  ({x.var} {tup(x.binder)}\n{format_proof(x.proof, indent + 2)})")
            if target is not None:
                parts.append(f"{pad}  (target {vctx(target)})")
            body = "\n".join(parts) + ")"
        case _:
            raise TypeError(p)
    return pad + body


def proof_size(p: Proof) -> int:
    return 1 + sum(proof_size(c) for c in p.children())


LAMBDA_EXAMPLE_PROOF = """\
# A(L[a](L[a](x(a))), y) = L[a](x(a)) in context <a | x:1, y:0>
(let A (subst (axiom alpha)
              (x [c] (ref [c] (x:1, y:0) x(c))))
(let B (subst (ref [a b] (z:2, w:0) A(L[a](z(a,b)), w))
              (z [a b] A)
              (w [] (ref [] (x:1, y:0) y)))
(let C (intro [b] 1 (axiom beta_k))
(let D (subst C
              (x [b] (ref [b] (x:1, y:0) L[b](x(b))))
              (y [a b] (ref [a b] (x:1, y:0) y)))
  (elim [b] (trans (trans B D) (sym A)))))))
"""
