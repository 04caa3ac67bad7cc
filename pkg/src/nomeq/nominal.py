"""Atoms, finite permutations and multi-atom abstraction.

Every value that carries names gets a permutation action through :func:`act`
and a least support through :func:`support_of`.  Both are single-dispatch
functions so that later modules (terms, operator instances) register their
own clauses.
"""

from __future__ import annotations

import contextlib
import re
from contextvars import ContextVar
from dataclasses import dataclass
from functools import singledispatch
from typing import Any, Generic, Iterable, Iterator, Mapping, Sequence, TypeVar

from .errors import LengthMismatch

_ATOM_NAME = re.compile(r"a(\d+)|([a-z])")


@dataclass(frozen=True, order=True)
class Atom:
    index: int

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError("atom index must be non-negative")

    def __str__(self) -> str:
        # indices 0..25 print as letters so that printing and parsing agree
        return chr(ord("a") + self.index) if self.index < 26 else f"a{self.index}"

    def __repr__(self) -> str:
        return f"Atom({self})"


def atom(name: str | int) -> Atom:
    """Atom from a name: ``a<N>`` is index N, a single letter a..z is its offset (so ``a1`` is ``b``)."""
    if isinstance(name, int):
        return Atom(name)
    m = _ATOM_NAME.fullmatch(name)
    if m is None:
        raise ValueError(f"not an atom name: {name!r}")
    if m.group(1) is not None:
        return Atom(int(m.group(1)))
    return Atom(ord(m.group(2)) - ord("a"))


def atoms(names: str) -> tuple[Atom, ...]:
    """``atoms("a b c")`` -> a tuple of atoms."""
    return tuple(atom(n) for n in names.replace(",", " ").split())


def is_atom_name(name: str) -> bool:
    return _ATOM_NAME.fullmatch(name) is not None


class Permutation:
    """Finitely supported bijection on atoms, stored as its moved atoms only."""

    __slots__ = ("_map", "_key")

    def __init__(self, moved: Mapping[Atom, Atom] | None = None):
        table = {a: b for a, b in (moved or {}).items() if a != b}
        if set(table) != set(table.values()):
            raise ValueError("not a bijection on its moved atoms")
        self._map: dict[Atom, Atom] = table
        self._key = frozenset(table.items())

    @classmethod
    def identity(cls) -> Permutation:
        return _IDENTITY

    @classmethod
    def transposition(cls, a: Atom, b: Atom) -> Permutation:
        return cls({a: b, b: a})

    @property
    def moved(self) -> dict[Atom, Atom]:
        return dict(self._map)

    def __call__(self, a: Atom) -> Atom:
        return self._map.get(a, a)

    def compose(self, first: Permutation) -> Permutation:
        """``self.compose(first)`` applies ``first`` then ``self``."""
        keys = set(self._map) | set(first._map)
        return Permutation({a: self(first(a)) for a in keys})

    def inverse(self) -> Permutation:
        return Permutation({b: a for a, b in self._map.items()})

    def is_identity(self) -> bool:
        return not self._map

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Permutation) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        if not self._map:
            return "Permutation(id)"
        body = ", ".join(f"{a}->{b}" for a, b in sorted(self._map.items()))
        return f"Permutation({body})"


_IDENTITY = Permutation()


def perm_apply(p: Permutation, a: Atom) -> Atom:
    return p(a)


def perm_compose(p2: Permutation, p1: Permutation) -> Permutation:
    return p2.compose(p1)


def perm_inverse(p: Permutation) -> Permutation:
    return p.inverse()


# How the leftover atoms of a multi-transposition are paired up.  "sorted" is
# the canonical choice; "reversed" is a second admissible completion used to
# check that results do not depend on the choice.
_completion: ContextVar[str] = ContextVar("multi_transposition_completion", default="sorted")


@contextlib.contextmanager
def use_completion(kind: str) -> Iterator[None]:
    if kind not in ("sorted", "reversed"):
        raise ValueError(f"unknown completion {kind!r}")
    token = _completion.set(kind)
    try:
        yield
    finally:
        _completion.reset(token)


def multi_transposition(src: Sequence[Atom], dst: Sequence[Atom]) -> Permutation:
    """The bijection sending ``src[i]`` to ``dst[i]`` and fixing atoms outside both.

    Atoms of ``dst`` not in ``src`` are sent, in sorted order, onto the atoms
    of ``src`` not in ``dst`` (reverse-sorted targets under the alternative
    completion).
    """
    if len(src) != len(dst):
        raise LengthMismatch(f"multi-transposition of tuples of lengths {len(src)} and {len(dst)}")
    if len(set(src)) != len(src) or len(set(dst)) != len(dst):
        raise ValueError("multi-transposition needs tuples of distinct atoms")
    table = dict(zip(src, dst))
    src_set, dst_set = set(src), set(dst)
    from_left = sorted(dst_set - src_set)
    onto = sorted(src_set - dst_set, reverse=_completion.get() == "reversed")
    table.update(zip(from_left, onto))
    return Permutation(table)


def fresh(n: int, avoid: Iterable[Atom] = ()) -> tuple[Atom, ...]:
    """The ``n`` smallest-index atoms not in ``avoid``, ascending."""
    used = {a.index for a in avoid}
    out: list[Atom] = []
    i = 0
    while len(out) < n:
        if i not in used:
            out.append(Atom(i))
        i += 1
    return tuple(out)


V = TypeVar("V")


@dataclass(frozen=True)
class Abstraction(Generic[V]):
    """A representative pair for the abstraction of ``binder`` in ``body``.

    Equality is structural on the pair; use :func:`alpha_eq` for the
    quotient comparison.
    """

    binder: tuple[Atom, ...]
    body: V

    def __post_init__(self) -> None:
        if len(set(self.binder)) != len(self.binder):
            raise ValueError(f"binder atoms must be distinct: {self.binder}")

    def __str__(self) -> str:
        return "<" + ",".join(map(str, self.binder)) + ">" + str(self.body)


@singledispatch
def _act_on(v: Any, p: Permutation) -> Any:
    raise TypeError(f"no permutation action for {type(v).__name__}")


def register_action(cls):
    """Decorator registering ``f(v, p)`` as the action of ``p`` on ``cls`` values."""
    return _act_on.register(cls)


def act(p: Permutation, v: Any) -> Any:
    """``p . v`` for any value with a registered action."""
    if p.is_identity():
        return v
    return _act_on(v, p)


@_act_on.register
def _(v: Atom, p: Permutation) -> Atom:
    return p(v)


@_act_on.register
def _(v: tuple, p: Permutation) -> tuple:
    return tuple(act(p, x) for x in v)


@_act_on.register
def _(v: frozenset, p: Permutation) -> frozenset:
    return frozenset(act(p, x) for x in v)


@_act_on.register
def _(v: Abstraction, p: Permutation) -> Abstraction:
    return Abstraction(act(p, v.binder), act(p, v.body))


@singledispatch
def support_of(v: Any) -> frozenset[Atom]:
    """Least support of a value."""
    raise TypeError(f"no support for {type(v).__name__}")


@support_of.register
def _(v: Atom) -> frozenset[Atom]:
    return frozenset((v,))


@support_of.register
def _(v: tuple) -> frozenset[Atom]:
    out: frozenset[Atom] = frozenset()
    for x in v:
        out |= support_of(x)
    return out


@support_of.register
def _(v: frozenset) -> frozenset[Atom]:
    out: frozenset[Atom] = frozenset()
    for x in v:
        out |= support_of(x)
    return out


@support_of.register
def _(v: Abstraction) -> frozenset[Atom]:
    return support_of(v.body) - frozenset(v.binder)


def is_fresh(xs: Iterable[Atom], v: Any) -> bool:
    """``xs # v``: no atom of ``xs`` is in the support of ``v``."""
    return support_of(v).isdisjoint(xs)


def alpha_eq(x: Abstraction, y: Abstraction, witness: Sequence[Atom] | None = None) -> bool:
    """Alpha-equivalence of two abstractions.

    Renames both binders to one tuple of atoms fresh for everything in sight
    and compares the bodies structurally.  ``witness`` overrides the fresh
    tuple; it must itself be fresh.
    """
    n = len(x.binder)
    if n != len(y.binder):
        return False
    avoid = set(x.binder) | set(y.binder) | support_of(x.body) | support_of(y.body)
    if witness is None:
        c = fresh(n, avoid)
    else:
        c = tuple(witness)
        if len(c) != n or not avoid.isdisjoint(c):
            raise ValueError("alpha_eq witness must be a fresh tuple of the binder length")
    return act(multi_transposition(x.binder, c), x.body) == act(multi_transposition(y.binder, c), y.body)
