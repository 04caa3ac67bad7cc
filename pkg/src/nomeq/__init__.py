"""Nominal equational theories: terms with atom binding, proofs, rewriting and models."""

from .errors import NomeqError
from .nominal import Abstraction, Atom, Permutation, act, alpha_eq, atom, atoms, fresh, multi_transposition, support_of
from .presentations import (
    NominalContext,
    NominalEquation,
    Presentation,
    builtin_lambda,
    builtin_monoid,
    parse_presentation,
    serialize_presentation,
    validate,
)
from .syntax import parse_term
from .terms import Op, OperatorFamily, OperatorInstance, Term, Var, show, substitute

__all__ = [
    "Abstraction",
    "Atom",
    "NomeqError",
    "NominalContext",
    "NominalEquation",
    "Op",
    "OperatorFamily",
    "OperatorInstance",
    "Permutation",
    "Presentation",
    "Term",
    "Var",
    "act",
    "alpha_eq",
    "atom",
    "atoms",
    "builtin_lambda",
    "builtin_monoid",
    "fresh",
    "multi_transposition",
    "parse_presentation",
    "parse_term",
    "serialize_presentation",
    "show",
    "substitute",
    "support_of",
    "validate",
]
