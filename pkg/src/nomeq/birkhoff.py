"""The atom-free fragment: equational proofs, finite algebras and a soundness audit.

Classical terms are ordinary terms whose operators take no atom parameters
and whose variables take no atom arguments, so the rewriting engine of
:mod:`nomeq.snr` applies to them unchanged.
"""

from __future__ import annotations

import itertools
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import ChildMismatch, MissingAssignment, NotClassical, ScopeError, UnknownAxiom
from .nominal import Abstraction
from .presentations import NominalEquation, Presentation
from .snr import LR, RewritePath
from .terms import Op, Term, Var, replace_at, show, substitute, variables

DEFAULT_MAX_SIZE = 4


class ClassicTheory:
    """A presentation with no atoms anywhere; checked on construction."""

    def __init__(self, presentation: Presentation):
        if not presentation.is_classical():
            raise NotClassical(f"{presentation.name} uses atom parameters, valences or atom contexts")
        self.presentation = presentation

    @property
    def name(self) -> str:
        return self.presentation.name

    @property
    def equations(self) -> tuple[NominalEquation, ...]:
        return self.presentation.equations

    @property
    def operators(self):
        return sorted(self.presentation.families.values(), key=lambda f: f.name)

    def equation(self, name: str) -> NominalEquation:
        return self.presentation.equation(name)


def as_classic(th: Presentation | ClassicTheory) -> ClassicTheory:
    return th if isinstance(th, ClassicTheory) else ClassicTheory(th)


# ------------------------------------------------------------------ proofs


@dataclass(frozen=True)
class SelJudgement:
    variables: frozenset[str]
    lhs: Term
    rhs: Term

    def __str__(self) -> str:
        return f"{{{','.join(sorted(self.variables))}}} ⊢ {show(self.lhs)} ≡ {show(self.rhs)}"


class SelProof:
    rule = "?"


@dataclass(frozen=True, eq=False)
class SelRef(SelProof):
    variables: frozenset[str]
    term: Term
    rule = "Ref"


@dataclass(frozen=True, eq=False)
class SelSym(SelProof):
    child: SelProof
    rule = "Sym"


@dataclass(frozen=True, eq=False)
class SelTrans(SelProof):
    left: SelProof
    right: SelProof
    rule = "Trans"


@dataclass(frozen=True, eq=False)
class SelAxiom(SelProof):
    name: str
    rule = "Axiom"


@dataclass(frozen=True, eq=False)
class SelSubst(SelProof):
    """From ``V ⊢ t ≡ t'`` and ``U ⊢ s_u ≡ s'_u`` for every ``u`` in ``V``."""

    head: SelProof
    premises: tuple[tuple[str, SelProof], ...]
    rule = "Subst"


def _classic_theta(terms: Mapping[str, Term]) -> dict[str, Abstraction]:
    return {u: Abstraction((), s) for u, s in terms.items()}


def sel_check(p: SelProof, th: Presentation | ClassicTheory) -> SelJudgement:
    th = as_classic(th)
    memo: dict[int, SelJudgement] = {}

    def go(p: SelProof) -> SelJudgement:
        if id(p) not in memo:
            memo[id(p)] = rule(p)
        return memo[id(p)]

    def rule(p: SelProof) -> SelJudgement:
        match p:
            case SelRef(vs, t):
                stray = set(variables(t)) - set(vs)
                if stray:
                    raise ScopeError(f"Ref in {{{','.join(sorted(vs))}}}", show(t), f"variables {sorted(stray)}")
                return SelJudgement(frozenset(vs), t, t)
            case SelAxiom(name):
                if not th.presentation.has_equation(name):
                    raise UnknownAxiom(name)
                eq = th.equation(name)
                return SelJudgement(frozenset(eq.context.vars), eq.lhs, eq.rhs)
            case SelSym(child):
                j = go(child)
                return SelJudgement(j.variables, j.rhs, j.lhs)
            case SelTrans(left, right):
                j1, j2 = go(left), go(right)
                if j1.variables != j2.variables:
                    raise ChildMismatch("Trans", "premises have different variable sets")
                if j1.rhs != j2.lhs:
                    raise ChildMismatch("Trans", f"middle terms differ: {show(j1.rhs)} vs {show(j2.lhs)}")
                return SelJudgement(j1.variables, j1.lhs, j2.rhs)
            case SelSubst(head, premises):
                j = go(head)
                given = dict(premises)
                if len(given) != len(premises) or set(given) != set(j.variables):
                    raise ChildMismatch(
                        "Subst", f"premises for {sorted(given)} but the head has variables {sorted(j.variables)}"
                    )
                js = {u: go(q) for u, q in given.items()}
                shared = {pj.variables for pj in js.values()}
                if len(shared) > 1:
                    raise ChildMismatch("Subst", "premises have different variable sets")
                target = shared.pop() if shared else frozenset()
                left = substitute(j.lhs, _classic_theta({u: pj.lhs for u, pj in js.items()}))
                right = substitute(j.rhs, _classic_theta({u: pj.rhs for u, pj in js.items()}))
                return SelJudgement(target, left, right)
        raise TypeError(f"not a proof node: {p!r}")

    return go(p)


def path_to_sel_proof(path: RewritePath, th: Presentation | ClassicTheory) -> SelProof:
    """Turn a classical rewrite path into a proof concluding ``start ≡ end``.

    Each step ``C[l theta] -> C[r theta]`` becomes a substitution into the
    reflexivity of ``C[z]`` for a hole variable ``z``, whose premise for ``z``
    is the axiom instantiated by ``theta``.
    """
    th = as_classic(th)
    names: set[str] = set()
    for t in path.terms():
        names.update(variables(t))
    for inst, _ in path.steps:
        for ab in inst.substitution.values():
            names.update(variables(ab.body))
    scope = frozenset(names)
    hole = _hole_name(names)
    refs = {u: SelRef(scope, Var(u)) for u in sorted(scope)}
    proof: SelProof | None = None
    prev = path.start
    for inst, nxt in path.steps:
        eq = th.equation(inst.equation)
        theta = inst.substitution
        axiom: SelProof = SelSubst(
            SelAxiom(eq.name), tuple((x, SelRef(scope, theta[x].body)) for x in sorted(eq.context.vars))
        )
        if inst.direction != LR:
            axiom = SelSym(axiom)
        ctx = replace_at(prev, inst.position, Var(hole))
        step = SelSubst(SelRef(scope | {hole}, ctx), tuple(sorted(refs.items())) + ((hole, axiom),))
        proof = step if proof is None else SelTrans(proof, step)
        prev = nxt
    return proof if proof is not None else SelRef(scope, path.start)


def _hole_name(taken: set[str]) -> str:
    for i in itertools.count():
        name = f"_z{i}"
        if name not in taken:
            return name
    raise AssertionError


# ------------------------------------------------------------------ finite algebras


@dataclass(frozen=True)
class FiniteAlgebra:
    """Carrier ``{0..size-1}``; each table is flat and row-major over its arguments."""

    size: int
    tables: tuple[tuple[str, tuple[int, ...]], ...]
    _arity: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError("carrier must be non-empty")
        ar = {}
        for name, tab in self.tables:
            k = 0
            while self.size**k < len(tab):
                k += 1
            if self.size**k != len(tab):
                raise ValueError(f"table for {name} has {len(tab)} entries, not a power of {self.size}")
            if any(not 0 <= v < self.size for v in tab):
                raise ValueError(f"table for {name} leaves the carrier")
            ar[name] = k
        object.__setattr__(self, "_arity", ar)

    @classmethod
    def of(cls, size: int, tables: Mapping[str, Sequence[int]]) -> FiniteAlgebra:
        return cls(size, tuple(sorted((k, tuple(v)) for k, v in tables.items())))

    def table(self, name: str) -> tuple[int, ...]:
        return dict(self.tables)[name]

    def apply(self, name: str, args: Sequence[int]) -> int:
        i = 0
        for a in args:
            i = i * self.size + a
        return self.table(name)[i]

    def to_json(self) -> str:
        return json.dumps({"size": self.size, "tables": {k: list(v) for k, v in self.tables}}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> FiniteAlgebra:
        d = json.loads(text)
        return cls.of(d["size"], d["tables"])

    def relabel(self, perm: Sequence[int]) -> FiniteAlgebra:
        """The isomorphic copy with element ``i`` renamed ``perm[i]``."""
        inv = [0] * self.size
        for i, j in enumerate(perm):
            inv[j] = i
        out = {}
        for name, tab in self.tables:
            k = self._arity[name]
            new = []
            for args in itertools.product(range(self.size), repeat=k):
                new.append(perm[self.apply(name, [inv[a] for a in args])])
            out[name] = new
        return FiniteAlgebra.of(self.size, out)


def eval_term(t: Term, alg: FiniteAlgebra, assignment: Mapping[str, int]) -> int:
    match t:
        case Var(name, _):
            try:
                return assignment[name]
            except KeyError:
                raise MissingAssignment(name) from None
        case Op(o, children):
            return alg.apply(o.name, [eval_term(c, alg, assignment) for c in children])
    raise TypeError(t)


def _compile(t: Term, order: Sequence[str]):
    """``t`` as a function of (tables, assignment tuple)."""
    slot = {x: i for i, x in enumerate(order)}

    def build(t: Term):
        match t:
            case Var(name, _):
                i = slot[name]
                return lambda tabs, m, env: env[i]
            case Op(o, children):
                name = o.name
                subs = [build(c) for c in children]
                if not subs:
                    return lambda tabs, m, env: tabs[name][0]
                if len(subs) == 1:
                    (f,) = subs
                    return lambda tabs, m, env: tabs[name][f(tabs, m, env)]
                if len(subs) == 2:
                    f, g = subs
                    return lambda tabs, m, env: tabs[name][f(tabs, m, env) * m + g(tabs, m, env)]

                def node(tabs, m, env):
                    i = 0
                    for f in subs:
                        i = i * m + f(tabs, m, env)
                    return tabs[name][i]

                return node
        raise TypeError(t)

    return build(t)


def _equation_checker(lhs: Term, rhs: Term):
    order = sorted(set(variables(lhs)) | set(variables(rhs)))
    fl, fr = _compile(lhs, order), _compile(rhs, order)

    def holds(tabs, m) -> dict[str, int] | None:
        for env in itertools.product(range(m), repeat=len(order)):
            if fl(tabs, m, env) != fr(tabs, m, env):
                return dict(zip(order, env))
        return None

    return holds, len(order)


def counterexample(alg: FiniteAlgebra, lhs: Term, rhs: Term) -> dict[str, int] | None:
    """An assignment falsifying ``lhs = rhs`` in ``alg``, or ``None``."""
    holds, _ = _equation_checker(lhs, rhs)
    return holds(dict(alg.tables), alg.size)


def satisfies(alg: FiniteAlgebra, eq: NominalEquation | tuple[Term, Term]) -> bool:
    lhs, rhs = (eq.lhs, eq.rhs) if isinstance(eq, NominalEquation) else eq
    return counterexample(alg, lhs, rhs) is None


def _models_of_size(args) -> list[FiniteAlgebra]:
    th, m, first_range = args
    ops = th.operators
    checks = sorted((_equation_checker(e.lhs, e.rhs) for e in th.equations), key=lambda c: c[1])
    spaces = [itertools.product(range(m), repeat=m**f.arity) for f in ops]
    if ops and first_range is not None:
        spaces[0] = itertools.islice(spaces[0], *first_range)
    out = []
    for combo in itertools.product(*(list(s) for s in spaces)):
        tabs = {f.name: combo[i] for i, f in enumerate(ops)}
        if all(holds(tabs, m) is None for holds, _ in checks):
            out.append(FiniteAlgebra(m, tuple(sorted(tabs.items()))))
    return out


def enumerate_models(
    th: Presentation | ClassicTheory,
    max_size: int,
    allow_large: bool = False,
    jobs: int = 1,
) -> list[FiniteAlgebra]:
    """Every algebra on ``{0..m-1}`` (``1 <= m <= max_size``) satisfying all equations.

    Brute force: ``m ** (m ** k)`` tables per ``k``-ary operator, so sizes
    above 4 need ``allow_large``.
    """
    th = as_classic(th)
    if max_size > DEFAULT_MAX_SIZE and not allow_large:
        raise ValueError(f"max_size {max_size} exceeds {DEFAULT_MAX_SIZE}; pass allow_large to insist")
    work = []
    for m in range(1, max_size + 1):
        if jobs > 1 and th.operators:
            total = m ** (m ** th.operators[0].arity)
            chunk = -(-total // jobs)
            work.extend((th, m, (i, min(i + chunk, total))) for i in range(0, total, chunk))
        else:
            work.append((th, m, None))
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            parts = list(ex.map(_models_of_size, work))
    else:
        parts = [_models_of_size(w) for w in work]
    return sorted((a for part in parts for a in part), key=lambda a: (a.size, a.tables))


@dataclass(frozen=True)
class Violation:
    algebra: FiniteAlgebra
    assignment: dict
    lhs: Term
    rhs: Term

    def __str__(self) -> str:
        env = ", ".join(f"{k}↦{v}" for k, v in sorted(self.assignment.items()))
        return f"{show(self.lhs)} ≡ {show(self.rhs)} fails in {self.algebra.to_json()} at {{{env}}}"


def soundness_audit(
    th: Presentation | ClassicTheory,
    judgements: Iterable[SelJudgement | tuple[Term, Term]],
    max_size: int,
    models: Sequence[FiniteAlgebra] | None = None,
) -> list[Violation]:
    """Every (model, judgement) pair where the judgement fails; empty when sound."""
    if models is None:
        models = enumerate_models(th, max_size)
    out = []
    for j in judgements:
        lhs, rhs = (j.lhs, j.rhs) if isinstance(j, SelJudgement) else j
        for alg in models:
            bad = counterexample(alg, lhs, rhs)
            if bad is not None:
                out.append(Violation(alg, bad, lhs, rhs))
    return out
