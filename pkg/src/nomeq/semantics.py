"""Interpretation of scoped terms in the free term algebra, and sampled satisfaction.

An environment for ``<a | V>`` assigns each variable ``x`` an abstraction
``<c_x> m_x`` of the right length, together with a tuple ``d`` of distinct
atoms fresh for every entry.  Operator nodes are interpreted by the term
constructors, so equality in a quotient model is decided (boundedly) by
:func:`nomeq.snr.equal_bounded`.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import ScopeError, SeparationViolated, ValenceMismatch
from .nominal import Abstraction, Atom, Permutation, act, fresh, multi_transposition, register_action, support_of
from .presentations import NominalContext, NominalEquation, Presentation
from .snr import Equal, equal_bounded
from .terms import Op, OperatorFamily, OperatorInstance, Term, Var, first_unscoped, show

ATOM_WINDOW = 8
SAMPLE_DEPTH = 3
GENERATORS: Mapping[str, int] = {"g": 0, "h": 1}


@dataclass(frozen=True)
class Environment:
    entries: tuple[tuple[str, Abstraction], ...]
    d: tuple[Atom, ...]

    @classmethod
    def of(cls, entries: Mapping[str, Abstraction], d: Sequence[Atom]) -> Environment:
        return cls(tuple(sorted(entries.items())), tuple(d))

    @property
    def mapping(self) -> dict[str, Abstraction]:
        return dict(self.entries)

    def support(self) -> frozenset[Atom]:
        out: set[Atom] = set()
        for _, ab in self.entries:
            out |= support_of(ab)
        return frozenset(out)

    def validate(self, ctx: NominalContext) -> None:
        if len(self.d) != len(ctx.atoms) or len(set(self.d)) != len(self.d):
            raise SeparationViolated(f"d must be {len(ctx.atoms)} distinct atoms, got {tuple(map(str, self.d))}")
        m = self.mapping
        for x, n in ctx.vars.items():
            if x not in m:
                raise ValenceMismatch(f"environment has no entry for {x}")
            if len(m[x].binder) != n:
                raise ValenceMismatch(f"{x} has valence {n} but its entry binds {len(m[x].binder)}")
        clash = self.support() & set(self.d)
        if clash:
            raise SeparationViolated(f"{', '.join(map(str, sorted(clash)))} both in d and free in an entry")

    def __str__(self) -> str:
        body = ", ".join(f"{x}↦{ab}" for x, ab in self.entries)
        return f"{{{body}}}; d=({','.join(map(str, self.d))})"

    def digest(self) -> str:
        return hashlib.sha1(_canonical(self).encode()).hexdigest()[:10]


def _canonical(env: Environment) -> str:
    parts = [f"{x}:<{','.join(str(a.index) for a in ab.binder)}>{_indexed(ab.body)}" for x, ab in env.entries]
    return ";".join(parts) + "|" + ",".join(str(a.index) for a in env.d)


def _indexed(t: Term) -> str:
    match t:
        case Var(name, args):
            return f"{name}({','.join(str(a.index) for a in args)})"
        case Op(o, children):
            return f"{o.name}[{','.join(str(a.index) for a in o.params)}]({','.join(_indexed(c) for c in children)})"
    raise TypeError(t)


@register_action(Environment)
def _(env: Environment, p: Permutation) -> Environment:
    return Environment(tuple((x, act(p, ab)) for x, ab in env.entries), tuple(p(a) for a in env.d))


def identity_environment(ctx: NominalContext) -> Environment:
    """``x ↦ <c>x(c)`` with canonical fresh ``c`` and ``d`` equal to the context atoms."""
    avoid = set(ctx.atoms)
    entries = {}
    for x, n in ctx.vars.items():
        c = fresh(n, avoid)
        entries[x] = Abstraction(c, Var(x, c))
    return Environment.of(entries, ctx.atoms)


def interpret(ctx: NominalContext, t: Term, env: Environment) -> Term:
    """The value of ``t`` at ``env`` in the free term algebra."""
    bad = first_unscoped(t, ctx.atoms, ctx.vars)
    if bad is not None:
        raise ScopeError(f"interpretation in {ctx}", show(bad[0]), bad[1])
    env.validate(ctx)
    rename = multi_transposition(ctx.atoms, env.d)
    entries = env.mapping

    def go(u: Term) -> Term:
        match u:
            case Var(name, args):
                ab = entries[name]
                c = tuple(rename(b) for b in args)
                return act(multi_transposition(ab.binder, c), ab.body)
            case Op(o, children):
                return Op(act(rename, o), tuple(go(k) for k in children))
        raise TypeError(u)

    return go(t)


# ------------------------------------------------------------------ sampling


def random_term(
    rng: random.Random,
    families: Sequence[OperatorFamily],
    atom_choices: Sequence[Atom],
    valences: Mapping[str, int],
    depth: int,
) -> Term:
    """A random term of depth at most ``depth``; leaves come from ``valences`` and nullary operators."""
    fams = sorted(families, key=lambda f: f.name)
    leaves_v = [(x, n) for x, n in sorted(valences.items()) if n <= len(atom_choices)]
    leaf_ops = [f for f in fams if f.arity == 0 and f.atom_params <= len(atom_choices) and (f.atom_params == 0 or atom_choices)]
    inner = [f for f in fams if f.arity > 0 and (f.atom_params == 0 or atom_choices)]

    def pick_op(f: OperatorFamily, kids: tuple[Term, ...]) -> Op:
        params = tuple(rng.choice(atom_choices) for _ in range(f.atom_params))
        return Op(OperatorInstance(f, params), kids)

    def leaf() -> Term:
        n_choices = len(leaves_v) + len(leaf_ops)
        if n_choices == 0:
            raise ValueError("no leaves available")
        i = rng.randrange(n_choices)
        if i < len(leaves_v):
            x, n = leaves_v[i]
            return Var(x, tuple(rng.sample(list(atom_choices), n)))
        return pick_op(leaf_ops[i - len(leaves_v)], ())

    def go(k: int) -> Term:
        if k == 0 or not inner or rng.random() < 0.3:
            return leaf()
        f = rng.choice(inner)
        return pick_op(f, tuple(go(k - 1) for _ in range(f.arity)))

    return go(depth)


def sample_environment(
    rng: random.Random,
    th: Presentation,
    ctx: NominalContext,
    window: int = ATOM_WINDOW,
    depth: int = SAMPLE_DEPTH,
    generators: Mapping[str, int] = GENERATORS,
) -> Environment:
    """A random valid environment; ``d`` collisions are renamed to fresh atoms."""
    pool = [Atom(i) for i in range(window)]
    fams = list(th.families.values())
    entries = {}
    for x, n in ctx.vars.items():
        binder = tuple(rng.sample(pool, n))
        entries[x] = Abstraction(binder, random_term(rng, fams, pool, generators, depth))
    d = list(rng.sample(pool, len(ctx.atoms)))
    env = Environment.of(entries, d)
    busy = env.support()
    clashes = [i for i, a in enumerate(d) if a in busy]
    if clashes:
        repl = fresh(len(clashes), busy | set(d))
        for i, a in zip(clashes, repl):
            d[i] = a
        env = Environment.of(entries, d)
    return env


@dataclass(frozen=True)
class SampleResult:
    index: int
    seed: int
    environment: Environment
    lhs: Term
    rhs: Term
    verdict: str
    path_length: int | None
    stats: dict = field(default_factory=dict)

    def line(self) -> str:
        n = "-" if self.path_length is None else str(self.path_length)
        return f"sample {self.index} seed={self.seed} env={self.environment.digest()} {self.verdict} path={n}"


@dataclass(frozen=True)
class SatisfactionReport:
    equation: str
    results: tuple[SampleResult, ...]
    bounds: dict

    @property
    def confirmed(self) -> int:
        return sum(r.verdict == "Confirmed" for r in self.results)

    @property
    def all_confirmed(self) -> bool:
        return self.confirmed == len(self.results)

    def lines(self) -> list[str]:
        b = " ".join(f"{k}={v}" for k, v in sorted(self.bounds.items()))
        head = f"{self.equation}: {self.confirmed}/{len(self.results)} Confirmed ({b})"
        return [head] + [r.line() for r in self.results]


def check_satisfaction_sampled(
    th: Presentation,
    eq: NominalEquation,
    samples: int = 20,
    max_depth: int = 6,
    node_budget: int = 100_000,
    seed: int = 0,
    pool_size: int = 2,
    environments: Sequence[Environment] | None = None,
) -> SatisfactionReport:
    """Interpret both sides of ``eq`` at sampled environments and compare in the quotient.

    A ``Confirmed`` verdict carries a rewrite path; ``Unknown`` only means the
    bounds ran out.  Passing ``environments`` replaces sampling.
    """
    master = random.Random(seed)
    results = []
    count = samples if environments is None else len(environments)
    for i in range(count):
        sub_seed = master.randrange(2**32)
        env = (
            sample_environment(random.Random(sub_seed), th, eq.context)
            if environments is None
            else environments[i]
        )
        lhs = interpret(eq.context, eq.lhs, env)
        rhs = interpret(eq.context, eq.rhs, env)
        v = equal_bounded(lhs, rhs, th, max_depth=max_depth, node_budget=node_budget, pool_size=pool_size)
        if isinstance(v, Equal):
            results.append(SampleResult(i, sub_seed, env, lhs, rhs, "Confirmed", len(v.path), v.stats))
        else:
            results.append(SampleResult(i, sub_seed, env, lhs, rhs, "Unknown", None, v.stats))
    bounds = {"depth": max_depth, "budget": node_budget, "pool": pool_size, "seed": seed}
    return SatisfactionReport(eq.name, tuple(results), bounds)
