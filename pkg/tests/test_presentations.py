import pytest

from nomeq.errors import ScopeError, TheorySyntaxError, UnknownOperator
from nomeq.nominal import atoms
from nomeq.presentations import (
    Presentation,
    VariableContext,
    builtin_lambda,
    builtin_monoid,
    parse_presentation,
    serialize_presentation,
    validate,
)
from nomeq.terms import show


def test_builtin_lambda_equations(lam):
    assert [e.name for e in lam.equations] == ["alpha", "beta_k", "beta_V", "beta_L", "beta_A", "beta_eps", "eta"]
    alpha, eta = lam.equation("alpha"), lam.equation("eta")
    assert str(alpha.context) == "⟨a,b | x:1⟩"
    assert (show(alpha.lhs), show(alpha.rhs)) == ("L[a](x(a))", "L[b](x(b))")
    assert str(eta.context) == "⟨a | x:0⟩"
    assert (show(eta.lhs), show(eta.rhs)) == ("L[a](A(x,V[a]))", "x")
    assert {f.name: (f.atom_params, f.arity) for f in lam.signature} == {"V": (1, 0), "L": (1, 1), "A": (0, 2)}


@pytest.mark.parametrize("make", [builtin_lambda, builtin_monoid])
def test_round_trip(make):
    th = make()
    text = serialize_presentation(th)
    again = parse_presentation(text)
    assert again == th
    assert serialize_presentation(again) == text


def test_parse_formats():
    text = "\r\n".join([
        "theory t  # comment",
        "op f : 2 args",
        "op N : 1 atoms, 1 args",
        "eq e1 [a b] (x:1, y:0) : N[a](f(x(a),y)) = N[b](f(x(b),y()))",
        "eq e2 (u:0) : f(u, u) = u",
    ])
    th = parse_presentation(text)
    assert th.name == "t" and len(th.equations) == 2
    assert th.equation("e1").context.atoms == atoms("a b")
    assert dict(th.equation("e2").context.vars) == {"u": 0}
    assert validate(th).valid


def test_parse_empty():
    th = parse_presentation("")
    assert th == Presentation() and validate(th).valid


def test_parse_errors():
    with pytest.raises(UnknownOperator):
        parse_presentation("eq bad (x:0) : g(x) = x")
    with pytest.raises(ScopeError):
        parse_presentation("op V : 1 atoms, 0 args\neq bad [a] : V[b] = V[a]")
    with pytest.raises(TheorySyntaxError) as info:
        parse_presentation("op V : 1 atoms, 0 args\nop V : 0 args")
    assert info.value.line == 2
    with pytest.raises(TheorySyntaxError):
        parse_presentation("op f : two args")


def test_validate_reports_side():
    th = parse_presentation("op V : 1 atoms, 0 args\neq bad [a] (x:1) : x(b) = x(a)", strict=False)
    report = validate(th)
    assert not report.valid
    assert report.lines()[0].startswith("INVALID bad (lhs)")
    assert validate(builtin_lambda()).valid


def test_variable_context_order_insensitive():
    assert VariableContext([("x", 1), ("y", 0)]) == VariableContext([("y", 0), ("x", 1)])
    assert str(VariableContext([("x", 1), ("y", 0)]).extend(2)) == "x:3,y:2"


def test_classical_embedding(lam, monoid):
    assert monoid.is_classical()
    assert not lam.is_classical()
