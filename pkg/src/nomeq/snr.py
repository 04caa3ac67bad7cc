"""Synthetic nominal rewriting.

One rewrite step replaces, at some position of a term, an instance
``((a b) . l) theta`` of one side of an equation by the matching instance of
the other side, where ``b`` is a tuple of distinct atoms fresh for every
abstraction in ``theta``.  Equality in the free algebra is the equivalence
generated by these steps; :func:`equal_bounded` semi-decides it by
bidirectional breadth-first search and :func:`layered_congruence` computes
the stagewise approximations on a finite universe of terms.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import FreshnessViolated, LengthMismatch, ValenceMismatch
from .nominal import Abstraction, Atom, act, fresh, multi_transposition
from .presentations import NominalEquation, Presentation
from .terms import (
    Op,
    Position,
    Term,
    Var,
    positions,
    replace_at,
    show,
    sort_key,
    substitute,
    subterm_at,
    subterms,
    term_support,
    variables,
)

LR, RL = "LR", "RL"
DEFAULT_POOL = 2


@dataclass(frozen=True)
class RuleInstance:
    equation: str
    direction: str
    atoms: tuple[Atom, ...]
    theta: tuple[tuple[str, Abstraction], ...]
    position: Position

    @property
    def substitution(self) -> dict[str, Abstraction]:
        return dict(self.theta)

    def flipped(self) -> RuleInstance:
        return RuleInstance(self.equation, RL if self.direction == LR else LR, self.atoms, self.theta, self.position)

    def moved(self, position: Position) -> RuleInstance:
        return RuleInstance(self.equation, self.direction, self.atoms, self.theta, position)

    def sort_key(self) -> tuple:
        return (self.position, self.equation, self.direction, tuple(a.index for a in self.atoms))

    def label(self) -> str:
        pos = "[" + ",".join(map(str, self.position)) + "]"
        b = "[" + ",".join(map(str, self.atoms)) + "]"
        return f"{self.equation}, {self.direction}, {pos}, b={b}"


@dataclass(frozen=True)
class RewritePath:
    start: Term
    steps: tuple[tuple[RuleInstance, Term], ...] = ()

    @property
    def end(self) -> Term:
        return self.steps[-1][1] if self.steps else self.start

    def __len__(self) -> int:
        return len(self.steps)

    def terms(self) -> list[Term]:
        return [self.start] + [t for _, t in self.steps]

    def equations(self) -> list[str]:
        return [r.equation for r, _ in self.steps]

    def reversed(self) -> RewritePath:
        ts = self.terms()
        steps = tuple((r.flipped(), ts[i]) for i, (r, _) in reversed(list(enumerate(self.steps))))
        return RewritePath(self.end, steps)

    def format(self) -> str:
        lines = []
        prev = self.start
        for k, (r, t) in enumerate(self.steps, start=1):
            lines.append(f"{k}: {show(prev)} --({r.label()})--> {show(t)}")
            prev = t
        return "\n".join(lines)


# ------------------------------------------------------------------ instantiation


def _check_theta(eq: NominalEquation, b: Sequence[Atom], theta: Mapping[str, Abstraction]) -> None:
    a = eq.context.atoms
    if len(b) != len(a):
        raise LengthMismatch(f"{eq.name} has {len(a)} atoms in context, got {len(b)}")
    if len(set(b)) != len(b):
        raise ValueError(f"instance atoms {tuple(map(str, b))} are not distinct")
    for x, n in eq.context.vars.items():
        if x not in theta:
            raise ValenceMismatch(f"{eq.name}: no substitute for {x}")
        ab = theta[x]
        if len(ab.binder) != n:
            raise ValenceMismatch(f"{eq.name}: {x} has valence {n} but its substitute binds {len(ab.binder)}")
        free = term_support(ab.body) - set(ab.binder)
        clash = free & set(b)
        if clash:
            raise FreshnessViolated(x, f"{', '.join(map(str, sorted(clash)))} free in {ab}")


def instantiate(eq: NominalEquation, b: Sequence[Atom], theta: Mapping[str, Abstraction]) -> tuple[Term, Term]:
    """Both sides of ``eq`` renamed by ``(a b)`` and substituted by ``theta``."""
    b = tuple(b)
    _check_theta(eq, b, theta)
    pi = multi_transposition(eq.context.atoms, b)
    return substitute(act(pi, eq.lhs), theta), substitute(act(pi, eq.rhs), theta)


# ------------------------------------------------------------------ matching


def _skeleton(p: Term, s: Term, binding: dict[Atom, Atom], taken: set[Atom], occ: list[tuple[Var, Term]]) -> bool:
    if isinstance(p, Var):
        occ.append((p, s))
        return True
    if not isinstance(s, Op) or s.op.family != p.op.family:
        return False
    for pa, sa in zip(p.op.params, s.op.params):
        cur = binding.get(pa)
        if cur is None:
            if sa in taken:
                return False
            binding[pa] = sa
            taken.add(sa)
        elif cur != sa:
            return False
    return all(_skeleton(pc, sc, binding, taken, occ) for pc, sc in zip(p.children, s.children))


def match(
    eq: NominalEquation,
    side: str,
    subject: Term,
    pool: Iterable[Atom],
    avoid: Iterable[Atom] = (),
) -> list[tuple[tuple[Atom, ...], dict[str, Abstraction]]]:
    """All ``(b, theta)`` with ``instantiate(eq, b, theta)[side] == subject``.

    ``side`` is ``"lhs"`` or ``"rhs"``.  Atoms of the equation context that the
    matched side does not pin down range over ``pool``.  A side that misses
    some variable of the equation has no finite set of instances and yields
    no matches.  Substitutes get canonical binders fresh for ``avoid`` and
    the subject.
    """
    pattern = eq.lhs if side == "lhs" else eq.rhs
    valences = eq.context.vars
    binding: dict[Atom, Atom] = {}
    taken: set[Atom] = set()
    occ: list[tuple[Var, Term]] = []
    if not _skeleton(pattern, subject, binding, taken, occ):
        return []
    if {v.name for v, _ in occ} != set(valences):
        return []
    a = eq.context.atoms
    free = [x for x in a if x not in binding]
    candidates = sorted(set(pool) - taken)
    avoid_set = set(avoid) | term_support(subject) | set(pool)
    out = []
    for choice in itertools.permutations(candidates, len(free)):
        full = dict(binding)
        full.update(zip(free, choice))
        theta = _solve(occ, full, valences, avoid_set)
        if theta is None:
            continue
        b = tuple(full[x] for x in a)
        bset = set(b)
        if any(not (term_support(ab.body) - set(ab.binder)).isdisjoint(bset) for ab in theta.values()):
            continue
        out.append((b, theta))
    return out


def _solve(occ, full, valences, avoid) -> dict[str, Abstraction] | None:
    theta: dict[str, Abstraction] = {}
    for leaf, u in occ:
        e = tuple(full[d] for d in leaf.args)
        ab = theta.get(leaf.name)
        if ab is None:
            c = fresh(valences[leaf.name], avoid)
            theta[leaf.name] = Abstraction(c, act(multi_transposition(c, e).inverse(), u))
        elif act(multi_transposition(ab.binder, e), ab.body) != u:
            return None
    return theta


# ------------------------------------------------------------------ one step


def atom_pool(t: Term, extra: Iterable[Atom] = (), k: int = DEFAULT_POOL) -> tuple[Atom, ...]:
    """Atoms of ``t`` and ``extra`` plus ``k`` fresh ones, ascending."""
    base = set(term_support(t)) | set(extra)
    return tuple(sorted(base)) + fresh(k, base)


def successors(
    t: Term,
    th: Presentation,
    pool_size: int = DEFAULT_POOL,
    extra_atoms: Iterable[Atom] = (),
) -> list[tuple[Term, RuleInstance]]:
    """Every one-step rewrite of ``t``, both directions, canonically ordered."""
    pool = atom_pool(t, extra_atoms, pool_size)
    eqs = sorted(th.equations, key=lambda e: e.name)
    found: list[tuple[tuple, Term, RuleInstance]] = []
    for pos, u in positions(t):
        for eq in eqs:
            pi_cache: dict[tuple[Atom, ...], object] = {}
            for direction, src, dst in ((LR, "lhs", eq.rhs), (RL, "rhs", eq.lhs)):
                for b, theta in match(eq, src, u, pool):
                    pi = pi_cache.get(b)
                    if pi is None:
                        pi = pi_cache[b] = multi_transposition(eq.context.atoms, b)
                    new_sub = substitute(act(pi, dst), theta)
                    inst = RuleInstance(eq.name, direction, b, tuple(sorted(theta.items())), pos)
                    found.append((inst.sort_key(), replace_at(t, pos, new_sub), inst))
    found.sort(key=lambda f: f[0])
    seen: set[tuple[Term, Position]] = set()
    out = []
    for _, new, inst in found:
        key = (new, inst.position)
        if key not in seen:
            seen.add(key)
            out.append((new, inst))
    return out


def apply_instance(t: Term, inst: RuleInstance, th: Presentation) -> Term:
    """Replay one step; raises ``ValueError`` if the instance does not fit ``t``."""
    eq = th.equation(inst.equation)
    lhs, rhs = instantiate(eq, inst.atoms, inst.substitution)
    src, dst = (lhs, rhs) if inst.direction == LR else (rhs, lhs)
    if subterm_at(t, inst.position) != src:
        raise ValueError(f"{inst.label()}: subterm {show(subterm_at(t, inst.position))} is not {show(src)}")
    return replace_at(t, inst.position, dst)


def replay(path: RewritePath, th: Presentation) -> bool:
    cur = path.start
    for inst, t in path.steps:
        if apply_instance(cur, inst, th) != t:
            return False
        cur = t
    return True


# ------------------------------------------------------------------ bounded equality


@dataclass(frozen=True)
class Equal:
    path: RewritePath
    stats: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class Unknown:
    stats: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return False


Verdict = Equal | Unknown


def _expand(args):
    t, th, pool_size, extra = args
    return successors(t, th, pool_size, extra)


class _Side:
    def __init__(self, root: Term):
        self.root = root
        self.parent: dict[Term, tuple[Term, RuleInstance] | None] = {root: None}
        self.frontier: list[Term] = [root]
        self.depth = 0

    def chain(self, node: Term) -> list[tuple[Term, RuleInstance, Term]]:
        """Steps from the root to ``node`` as (from, instance, to)."""
        out = []
        while self.parent[node] is not None:
            prev, inst = self.parent[node]
            out.append((prev, inst, node))
            node = prev
        return out[::-1]


def equal_bounded(
    s: Term,
    t: Term,
    th: Presentation,
    max_depth: int = 6,
    node_budget: int = 100_000,
    pool_size: int = DEFAULT_POOL,
    jobs: int = 1,
) -> Verdict:
    """Search for a rewrite path between ``s`` and ``t`` from both ends.

    ``max_depth`` bounds the total path length and ``node_budget`` the number
    of distinct terms visited.  ``Unknown`` never claims the terms differ.
    """
    stats = {"nodes": 2, "max_depth": max_depth, "node_budget": node_budget, "pool_size": pool_size}
    if s == t:
        return Equal(RewritePath(s), {**stats, "nodes": 1, "depth": 0})
    extra = tuple(sorted(term_support(s) | term_support(t)))
    fwd, bwd = _Side(s), _Side(t)
    # tie-breaks depend on the terms, not on argument order, so swapping s and t mirrors the search
    first, second = (fwd, bwd) if sort_key(s) <= sort_key(t) else (bwd, fwd)
    nodes = 2
    pool_exec = ProcessPoolExecutor(jobs) if jobs > 1 else None
    try:
        while fwd.depth + bwd.depth < max_depth:
            side = first if len(first.frontier) <= len(second.frontier) else second
            other = second if side is first else first
            if not side.frontier:
                return Unknown({**stats, "nodes": nodes, "reason": "exhausted", "depth": fwd.depth + bwd.depth})
            work = [(u, th, pool_size, extra) for u in side.frontier]
            results = pool_exec.map(_expand, work) if pool_exec else map(_expand, work)
            new_frontier: list[Term] = []
            for u, succ in zip(side.frontier, results):
                for v, inst in succ:
                    if v in side.parent:
                        continue
                    side.parent[v] = (u, inst)
                    new_frontier.append(v)
                    nodes += 1
                    if v in other.parent:
                        path = _join(fwd, bwd, v)
                        return Equal(path, {**stats, "nodes": nodes, "depth": len(path)})
                    if nodes > node_budget:
                        return Unknown({**stats, "nodes": nodes, "reason": "budget", "depth": fwd.depth + bwd.depth})
            side.frontier = new_frontier
            side.depth += 1
        return Unknown({**stats, "nodes": nodes, "reason": "depth", "depth": fwd.depth + bwd.depth})
    finally:
        if pool_exec is not None:
            pool_exec.shutdown()


def _join(fwd: _Side, bwd: _Side, meet: Term) -> RewritePath:
    steps = [(inst, to) for _, inst, to in fwd.chain(meet)]
    for frm, inst, to in reversed(bwd.chain(meet)):
        # bwd step frm -> to read backwards: to -> frm with the opposite direction
        steps.append((inst.flipped(), frm))
    return RewritePath(fwd.root, tuple(steps))


# ------------------------------------------------------------------ layered congruence


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        parent = self.parent
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(self, i: int, j: int) -> bool:
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return False
        # smaller index stays the root so class ids are canonical
        if rj < ri:
            ri, rj = rj, ri
        self.parent[rj] = ri
        return True

    def labels(self) -> tuple[int, ...]:
        return tuple(self.find(i) for i in range(len(self.parent)))


@dataclass(frozen=True)
class CongruenceLayers:
    universe: tuple[Term, ...]
    layers: tuple[tuple[int, ...], ...]

    def index(self, t: Term) -> int:
        return self._index[t]  # type: ignore[attr-defined]

    def __post_init__(self) -> None:
        object.__setattr__(self, "_index", {t: i for i, t in enumerate(self.universe)})

    def related(self, s: Term, t: Term, layer: int | None = None) -> bool:
        """``s`` and ``t`` in one class of layer ``layer`` (1-based; default the last)."""
        labels = self.layers[-1 if layer is None else layer - 1]
        return labels[self.index(s)] == labels[self.index(t)]

    def classes(self, layer: int | None = None) -> list[list[Term]]:
        labels = self.layers[-1 if layer is None else layer - 1]
        groups: dict[int, list[Term]] = {}
        for t, c in zip(self.universe, labels):
            groups.setdefault(c, []).append(t)
        return [groups[k] for k in sorted(groups)]


def subterm_closure(terms: Iterable[Term]) -> list[Term]:
    out: set[Term] = set()
    for t in terms:
        out.update(subterms(t))
    return sorted(out, key=sort_key)


def _anchor_side(eq: NominalEquation) -> str | None:
    """The side to match from: it must mention every variable; prefer fewer unbound atoms."""
    best = None
    for side, t in (("lhs", eq.lhs), ("rhs", eq.rhs)):
        if set(variables(t)) != set(eq.context.vars):
            continue
        params = {p for u in subterms(t) if isinstance(u, Op) for p in u.op.params}
        unbound = len(set(eq.context.atoms) - params)
        if best is None or unbound < best[0]:
            best = (unbound, side)
    return None if best is None else best[1]


def axiom_instances(universe: Sequence[Term], th: Presentation) -> list[tuple[Term, Term, str]]:
    """Pairs of universe terms related by one instance of an equation (no context).

    Each equation is matched from one side only; the relation is used
    symmetrically, so nothing is lost.
    """
    members = set(universe)
    atoms_in = set().union(*(term_support(t) for t in universe)) if universe else set()
    # one atom outside the universe stands for every atom occurring in neither side
    pool = sorted(atoms_in) + list(fresh(1, atoms_in))
    out = []
    for eq in th.equations:
        side = _anchor_side(eq)
        if side is None:
            continue
        other = eq.rhs if side == "lhs" else eq.lhs
        for u in universe:
            for b, theta in match(eq, side, u, pool):
                v = substitute(act(multi_transposition(eq.context.atoms, b), other), theta)
                if v in members:
                    out.append((u, v, eq.name))
    return out


def layered_congruence(universe: Iterable[Term], th: Presentation, n: int) -> CongruenceLayers:
    """Layers 1..n of the stagewise congruence, restricted to ``universe``.

    Layer 1 is generated by equation instances; layer k adds one round of
    congruence over layer k-1.  The universe is closed under subterms first.
    """
    terms = tuple(subterm_closure(universe))
    index = {t: i for i, t in enumerate(terms)}
    uf = UnionFind(len(terms))
    for u, v, _ in axiom_instances(terms, th):
        uf.union(index[u], index[v])
    layers = [uf.labels()]
    for _ in range(1, n):
        prev = layers[-1]
        groups: dict[tuple, list[int]] = {}
        for i, t in enumerate(terms):
            if isinstance(t, Op):
                key = (t.op, tuple(prev[index[c]] for c in t.children))
                groups.setdefault(key, []).append(i)
        for members in groups.values():
            for j in members[1:]:
                uf.union(members[0], j)
        layers.append(uf.labels())
    return CongruenceLayers(terms, tuple(layers[:n]))
