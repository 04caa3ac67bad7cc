"""Nominal signatures and terms, their permutation action, scoping and substitution.

A term is either a variable leaf ``x(b1,...,bn)`` applied to distinct atoms or
an operator node ``o[p1,...,pk](t1,...,tm)`` whose operator instance carries
atom parameters.  Binding is never built in: an abstraction such as ``L[a]``
is just an operator with an atom parameter.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence, Union

from .errors import MissingVariable, ValenceMismatch
from .nominal import (
    Abstraction,
    Atom,
    Permutation,
    act,
    multi_transposition,
    register_action,
    support_of,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class OperatorFamily:
    name: str
    atom_params: int = 0
    arity: int = 0

    def __post_init__(self) -> None:
        if self.atom_params < 0 or self.arity < 0:
            raise ValueError("operator parameter and argument counts must be non-negative")

    def __call__(self, *params: Atom) -> OperatorInstance:
        return OperatorInstance(self, tuple(params))


@dataclass(frozen=True)
class OperatorInstance:
    family: OperatorFamily
    params: tuple[Atom, ...] = ()

    def __post_init__(self) -> None:
        if len(self.params) != self.family.atom_params:
            raise ValueError(
                f"{self.family.name} takes {self.family.atom_params} atom parameters, got {len(self.params)}"
            )

    @property
    def name(self) -> str:
        return self.family.name

    def __str__(self) -> str:
        if not self.params:
            return self.family.name
        return f"{self.family.name}[{','.join(map(str, self.params))}]"


@dataclass(frozen=True)
class Var:
    name: str
    args: tuple[Atom, ...] = ()
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(set(self.args)) != len(self.args):
            raise ValueError(f"variable {self.name} applied to repeated atoms {self.args}")
        object.__setattr__(self, "_hash", hash((self.name, self.args)))

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True)
class Op:
    op: OperatorInstance
    children: tuple[Term, ...] = ()
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.children) != self.op.family.arity:
            raise ValueError(
                f"{self.op.family.name} takes {self.op.family.arity} arguments, got {len(self.children)}"
            )
        object.__setattr__(self, "_hash", hash((self.op, self.children)))

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        return show(self)


Term = Union[Var, Op]
Position = tuple[int, ...]
SubstitutionFamily = Mapping[str, Abstraction]


def var(name: str, *args: Atom) -> Var:
    return Var(name, tuple(args))


def op(family: OperatorFamily, params: Sequence[Atom] = (), *children: Term) -> Op:
    return Op(OperatorInstance(family, tuple(params)), tuple(children))


def show(t: Term) -> str:
    """Concrete syntax: ``x(a,b)``, ``A(t1,t2)``, ``L[a](t)``; ``x()`` prints as ``x``."""
    match t:
        case Var(name, args):
            return f"{name}({','.join(map(str, args))})" if args else name
        case Op(o, children):
            head = str(o)
            return f"{head}({','.join(show(c) for c in children)})" if children else head
    raise TypeError(t)


def sort_key(t: Term) -> tuple:
    """A total order on terms by atom index."""
    match t:
        case Var(name, args):
            return (0, name, tuple(a.index for a in args))
        case Op(o, children):
            return (1, o.family.name, tuple(a.index for a in o.params), tuple(sort_key(c) for c in children))
    raise TypeError(t)


@register_action(Var)
def _(t: Var, p: Permutation) -> Var:
    return Var(t.name, tuple(p(a) for a in t.args))


@register_action(Op)
def _(t: Op, p: Permutation) -> Op:
    o = t.op
    return Op(OperatorInstance(o.family, tuple(p(a) for a in o.params)), tuple(act(p, c) for c in t.children))


@register_action(OperatorInstance)
def _(o: OperatorInstance, p: Permutation) -> OperatorInstance:
    return OperatorInstance(o.family, tuple(p(a) for a in o.params))


def term_act(p: Permutation, t: Term) -> Term:
    return act(p, t)


def term_support(t: Term) -> frozenset[Atom]:
    out: set[Atom] = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            out.update(u.args)
        else:
            out.update(u.op.params)
            stack.extend(u.children)
    return frozenset(out)


support_of.register(Var, term_support)
support_of.register(Op, term_support)


@support_of.register
def _(o: OperatorInstance) -> frozenset[Atom]:
    return frozenset(o.params)


def variables(t: Term) -> dict[str, int]:
    """Variables occurring in ``t`` with the number of atoms they are applied to."""
    out: dict[str, int] = {}
    for u in subterms(t):
        if isinstance(u, Var):
            out.setdefault(u.name, len(u.args))
    return out


def leaves(t: Term) -> Iterator[Var]:
    for u in subterms(t):
        if isinstance(u, Var):
            yield u


def subterms(t: Term) -> Iterator[Term]:
    """Pre-order traversal."""
    stack = [t]
    while stack:
        u = stack.pop()
        yield u
        if isinstance(u, Op):
            stack.extend(reversed(u.children))


def positions(t: Term, prefix: Position = ()) -> Iterator[tuple[Position, Term]]:
    yield prefix, t
    if isinstance(t, Op):
        for i, c in enumerate(t.children):
            yield from positions(c, prefix + (i,))


def subterm_at(t: Term, pos: Position) -> Term:
    for i in pos:
        if not isinstance(t, Op):
            raise IndexError(f"no subterm at {pos}")
        t = t.children[i]
    return t


def replace_at(t: Term, pos: Position, new: Term) -> Term:
    if not pos:
        return new
    if not isinstance(t, Op):
        raise IndexError(f"no subterm at {pos}")
    i = pos[0]
    kids = list(t.children)
    kids[i] = replace_at(kids[i], pos[1:], new)
    return Op(t.op, tuple(kids))


def size(t: Term) -> int:
    return sum(1 for _ in subterms(t))


def depth(t: Term) -> int:
    if isinstance(t, Var) or not t.children:
        return 0
    return 1 + max(depth(c) for c in t.children)


def substitute(t: Term, theta: SubstitutionFamily, diagnostics: list[str] | None = None) -> Term:
    """Replace each leaf ``x(a1..an)`` by ``(c a) . s`` where ``theta[x] = <c>s``.

    The result is only meaningful when the leaf atoms are fresh for the
    abstraction; other uses are computed literally and reported through
    ``diagnostics`` (and the module logger).
    """
    match t:
        case Var(name, args):
            try:
                ab = theta[name]
            except KeyError:
                raise MissingVariable(f"substitution has no entry for {name}") from None
            if len(ab.binder) != len(args):
                raise ValenceMismatch(
                    f"{name} is applied to {len(args)} atoms but its substitute binds {len(ab.binder)}"
                )
            if not support_of(ab).isdisjoint(args):
                msg = f"leaf {show(t)} is not fresh for {ab}"
                log.debug(msg)
                if diagnostics is not None:
                    diagnostics.append(msg)
            return act(multi_transposition(ab.binder, args), ab.body)
        case Op(o, children):
            return Op(o, tuple(substitute(c, theta, diagnostics) for c in children))
    raise TypeError(t)


def act_substitution(p: Permutation, theta: SubstitutionFamily) -> dict[str, Abstraction]:
    return {x: act(p, ab) for x, ab in theta.items()}


def compose_substitutions(theta: SubstitutionFamily, sigma: SubstitutionFamily) -> dict[str, Abstraction]:
    """``theta;sigma``: first ``theta`` then ``sigma`` under each binder."""
    return {x: Abstraction(ab.binder, substitute(ab.body, sigma)) for x, ab in theta.items()}


def identity_substitution(valences: Mapping[str, int], avoid: Sequence[Atom] = ()) -> dict[str, Abstraction]:
    """``x |-> <c>x(c)`` for every variable, with canonical fresh binders."""
    from .nominal import fresh

    out = {}
    for x, n in valences.items():
        c = fresh(n, avoid)
        out[x] = Abstraction(c, Var(x, c))
    return out


def well_scoped(t: Term, atoms: Sequence[Atom], valences: Mapping[str, int]) -> bool:
    """Membership of ``t`` in the terms scoped by the atom tuple and variable context."""
    return first_unscoped(t, atoms, valences) is None


def first_unscoped(t: Term, atoms: Sequence[Atom], valences: Mapping[str, int]) -> tuple[Term, str] | None:
    """The first offending subterm (pre-order) with a reason, or ``None``."""
    allowed = set(atoms)
    for u in subterms(t):
        if isinstance(u, Var):
            if u.name not in valences:
                return u, f"variable {u.name} is not in the context"
            if valences[u.name] != len(u.args):
                return u, f"variable {u.name} has valence {valences[u.name]} but is applied to {len(u.args)} atoms"
            stray = [a for a in u.args if a not in allowed]
            if stray:
                return u, f"atoms {', '.join(map(str, stray))} are not in the atom context"
        else:
            stray = [a for a in u.op.params if a not in allowed]
            if stray:
                return u, f"operator parameters {', '.join(map(str, stray))} are not in the atom context"
    return None
