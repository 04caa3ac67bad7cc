"""Nominal contexts, equations and presentations, plus the theory file format.

Theory files look like::

    theory lambda
    op V : 1 atoms, 0 args
    op A : 2 args
    eq alpha [a b] (x:1) : L[a](x(a)) = L[b](x(b))
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .errors import ScopeError, UnknownOperator
from .nominal import Atom, atoms
from .syntax import TokenStream, read_atom_tuple, read_term, read_var_context, tokenize
from .terms import OperatorFamily, Term, first_unscoped, op, show, subterms, var, Op


class VariableContext(Mapping[str, int]):
    """Variables with their valences.  Order is kept for display only."""

    __slots__ = ("entries", "_map")

    def __init__(self, entries: Iterable[tuple[str, int]] | Mapping[str, int] = ()):
        if isinstance(entries, Mapping):
            entries = entries.items()
        self.entries: tuple[tuple[str, int], ...] = tuple((str(x), int(n)) for x, n in entries)
        self._map = dict(self.entries)
        if len(self._map) != len(self.entries):
            raise ValueError("variable names in a context must be unique")
        if any(n < 0 for n in self._map.values()):
            raise ValueError("valences are natural numbers")

    def __getitem__(self, x: str) -> int:
        return self._map[x]

    def __iter__(self) -> Iterator[str]:
        return iter(self._map)

    def __len__(self) -> int:
        return len(self._map)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, VariableContext):
            return self._map == other._map
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._map.items()))

    def extend(self, m: int) -> VariableContext:
        """Every valence raised by ``m``."""
        return VariableContext((x, n + m) for x, n in self.entries)

    def __str__(self) -> str:
        return ",".join(f"{x}:{n}" for x, n in self.entries)

    def __repr__(self) -> str:
        return f"VariableContext({self})"


@dataclass(frozen=True)
class NominalContext:
    atoms: tuple[Atom, ...]
    vars: VariableContext

    def __post_init__(self) -> None:
        if len(set(self.atoms)) != len(self.atoms):
            raise ValueError(f"atom context must be distinct: {self.atoms}")
        if not isinstance(self.vars, VariableContext):
            object.__setattr__(self, "vars", VariableContext(self.vars))

    def __str__(self) -> str:
        return f"⟨{','.join(map(str, self.atoms))} | {self.vars}⟩"

    def scoped(self, t: Term) -> bool:
        return first_unscoped(t, self.atoms, self.vars) is None


def context(atom_names: str | Iterable[Atom], **valences: int) -> NominalContext:
    """``context("a b", x=1, y=0)``."""
    a = atoms(atom_names) if isinstance(atom_names, str) else tuple(atom_names)
    return NominalContext(a, VariableContext(valences))


@dataclass(frozen=True)
class NominalEquation:
    name: str
    context: NominalContext
    lhs: Term
    rhs: Term
    line: int | None = field(default=None, compare=False)

    def __str__(self) -> str:
        return f"{self.name}: {self.context} ⊢ {show(self.lhs)} ≡ {show(self.rhs)}"


@dataclass(frozen=True)
class Presentation:
    signature: tuple[OperatorFamily, ...] = ()
    equations: tuple[NominalEquation, ...] = ()
    name: str = "theory"

    def __post_init__(self) -> None:
        object.__setattr__(self, "signature", tuple(self.signature))
        object.__setattr__(self, "equations", tuple(self.equations))
        fams: dict[str, OperatorFamily] = {}
        for f in self.signature:
            if f.name in fams:
                raise ValueError(f"operator {f.name} declared twice")
            fams[f.name] = f
        names = set()
        for eq in self.equations:
            if eq.name in names:
                raise ValueError(f"equation {eq.name} declared twice")
            names.add(eq.name)
            for side in (eq.lhs, eq.rhs):
                for u in subterms(side):
                    if isinstance(u, Op) and fams.get(u.op.family.name) != u.op.family:
                        raise UnknownOperator(u.op.family.name)
        object.__setattr__(self, "_families", fams)
        object.__setattr__(self, "_equations", {eq.name: eq for eq in self.equations})

    @property
    def families(self) -> dict[str, OperatorFamily]:
        return self._families  # type: ignore[attr-defined]

    def equation(self, name: str) -> NominalEquation:
        return self._equations[name]  # type: ignore[attr-defined]

    def has_equation(self, name: str) -> bool:
        return name in self._equations  # type: ignore[attr-defined]

    def is_classical(self) -> bool:
        """No atom parameters, no valences, no atom contexts: an ordinary algebraic theory."""
        return (
            all(f.atom_params == 0 for f in self.signature)
            and all(not eq.context.atoms and all(n == 0 for n in eq.context.vars.values()) for eq in self.equations)
        )


# ---------------------------------------------------------------- validation


@dataclass(frozen=True)
class EquationCheck:
    name: str
    lhs_ok: bool
    rhs_ok: bool
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.lhs_ok and self.rhs_ok


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[EquationCheck, ...]

    @property
    def valid(self) -> bool:
        return all(c.ok for c in self.checks)

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            if c.ok:
                out.append(f"ok      {c.name}")
            else:
                side = "lhs" if not c.lhs_ok else "rhs"
                out.append(f"INVALID {c.name} ({side}): {c.detail}")
        return out


def check_equation(eq: NominalEquation) -> EquationCheck:
    lhs_bad = first_unscoped(eq.lhs, eq.context.atoms, eq.context.vars)
    rhs_bad = first_unscoped(eq.rhs, eq.context.atoms, eq.context.vars)
    detail = ""
    bad = lhs_bad or rhs_bad
    if bad is not None:
        detail = f"{show(bad[0])}: {bad[1]}"
    return EquationCheck(eq.name, lhs_bad is None, rhs_bad is None, detail)


def validate(p: Presentation) -> ValidationReport:
    return ValidationReport(tuple(check_equation(eq) for eq in p.equations))


# ------------------------------------------------------------ parse / print


def parse_presentation(text: str, strict: bool = True) -> Presentation:
    """Parse a theory file.  With ``strict`` an ill-scoped equation raises :class:`ScopeError`."""
    name = "theory"
    families: dict[str, OperatorFamily] = {}
    equations: list[NominalEquation] = []
    seen_eqs: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        ts = TokenStream(tokenize(raw, line_offset=lineno - 1))
        if ts.done():
            continue
        head = ts.ident("a declaration")
        if head.text == "theory":
            name = ts.ident("a theory name").text
        elif head.text == "op":
            fam = _read_op(ts)
            if fam.name in families:
                ts.error(f"operator {fam.name} declared twice", head)
            families[fam.name] = fam
        elif head.text == "eq":
            eq_tok = ts.peek
            eq = _read_eq(ts, families, lineno)
            if eq.name in seen_eqs:
                ts.error(f"equation {eq.name} declared twice", eq_tok)
            seen_eqs.add(eq.name)
            if strict:
                for side in (eq.lhs, eq.rhs):
                    bad = first_unscoped(side, eq.context.atoms, eq.context.vars)
                    if bad is not None:
                        raise ScopeError(f"equation {eq.name} (line {lineno})", show(bad[0]), bad[1])
            equations.append(eq)
        else:
            ts.error(f"unknown declaration {head.text!r}", head)
        if not ts.done():
            ts.error(f"trailing input {ts.peek.text!r}")
    return Presentation(tuple(families.values()), tuple(equations), name)


def _read_op(ts: TokenStream) -> OperatorFamily:
    name = ts.ident("an operator name").text
    ts.expect(":")
    first = ts.number()
    unit = ts.ident("'atoms' or 'args'")
    if unit.text in ("atoms", "atom"):
        ts.expect(",")
        k = ts.number()
        unit2 = ts.ident("'args'")
        if unit2.text not in ("args", "arg"):
            ts.error("expected 'args'", unit2)
        return OperatorFamily(name, first, k)
    if unit.text in ("args", "arg"):
        return OperatorFamily(name, 0, first)
    ts.error("expected 'atoms' or 'args'", unit)
    raise AssertionError  # unreachable


def _read_eq(ts: TokenStream, families: Mapping[str, OperatorFamily], lineno: int) -> NominalEquation:
    name = ts.ident("an equation name").text
    atom_ctx: tuple[Atom, ...] = ()
    if ts.at("["):
        atom_ctx = read_atom_tuple(ts)
    var_ctx = VariableContext(read_var_context(ts) if ts.at("(") else ())
    ts.expect(":")
    lhs = read_term(ts, families, var_ctx)
    ts.expect("=")
    rhs = read_term(ts, families, var_ctx)
    return NominalEquation(name, NominalContext(atom_ctx, var_ctx), lhs, rhs, line=lineno)


def serialize_presentation(p: Presentation) -> str:
    lines = [f"theory {p.name}"]
    for f in p.signature:
        if f.atom_params:
            lines.append(f"op {f.name} : {f.atom_params} atoms, {f.arity} args")
        else:
            lines.append(f"op {f.name} : {f.arity} args")
    for eq in p.equations:
        ctx = eq.context
        atoms_txt = " ".join(map(str, ctx.atoms))
        vars_txt = ", ".join(f"{x}:{n}" for x, n in ctx.vars.entries)
        lines.append(f"eq {eq.name} [{atoms_txt}] ({vars_txt}) : {show(eq.lhs)} = {show(eq.rhs)}")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------ built-in theory

LAMBDA_V = OperatorFamily("V", 1, 0)
LAMBDA_L = OperatorFamily("L", 1, 1)
LAMBDA_A = OperatorFamily("A", 0, 2)


def builtin_lambda() -> Presentation:
    """Untyped lambda-calculus modulo alpha, beta and eta, as seven nominal equations."""
    V, L, A = LAMBDA_V, LAMBDA_L, LAMBDA_A
    a, b = atoms("a b")

    def lam(p, body):
        return op(L, [p], body)

    def app(s, t):
        return op(A, [], s, t)

    def v(p):
        return op(V, [p])

    eqs = [
        NominalEquation("alpha", context("a b", x=1), lam(a, var("x", a)), lam(b, var("x", b))),
        NominalEquation("beta_k", context("a", x=0, y=1), app(lam(a, var("x")), var("y", a)), var("x")),
        NominalEquation("beta_V", context("a", x=1), app(lam(a, v(a)), var("x", a)), var("x", a)),
        NominalEquation(
            "beta_L",
            context("a b", x=2, y=1),
            app(lam(a, lam(b, var("x", a, b))), var("y", a)),
            lam(b, app(lam(a, var("x", a, b)), var("y", a))),
        ),
        NominalEquation(
            "beta_A",
            context("a", x=1, y=1, z=1),
            app(lam(a, app(var("x", a), var("y", a))), var("z", a)),
            app(app(lam(a, var("x", a)), var("z", a)), app(lam(a, var("y", a)), var("z", a))),
        ),
        NominalEquation("beta_eps", context("a b", x=1), app(lam(a, var("x", a)), v(b)), var("x", b)),
        NominalEquation("eta", context("a", x=0), lam(a, app(var("x"), v(a))), var("x")),
    ]
    return Presentation((V, L, A), tuple(eqs), "lambda")


def builtin_monoid() -> Presentation:
    """Monoids: ``m`` binary, ``e`` constant; associativity and both unit laws."""
    m, e = OperatorFamily("m", 0, 2), OperatorFamily("e", 0, 0)
    x, y, z = var("x"), var("y"), var("z")
    E = op(e)
    eqs = [
        NominalEquation("assoc", context("", x=0, y=0, z=0), op(m, [], op(m, [], x, y), z), op(m, [], x, op(m, [], y, z))),
        NominalEquation("unitl", context("", x=0), op(m, [], E, x), x),
        NominalEquation("unitr", context("", x=0), op(m, [], x, E), x),
    ]
    return Presentation((m, e), tuple(eqs), "monoid")
