"""Finite algebras, subpowers, edge terms, varieties, word orders and clonoids."""

from .algebra import (
    AlgebraError,
    App,
    Budget,
    BudgetExceeded,
    FiniteAlgebra,
    Signature,
    Var,
    direct_product,
    load_algebra,
    parse_algebra,
    parse_term,
    serialize_algebra,
)
from .subpower import Subpower, fg_equal, fork, proj, sg

__version__ = "0.1.0"

__all__ = [
    "AlgebraError",
    "App",
    "Budget",
    "BudgetExceeded",
    "FiniteAlgebra",
    "Signature",
    "Subpower",
    "Var",
    "direct_product",
    "fg_equal",
    "fork",
    "load_algebra",
    "parse_algebra",
    "parse_term",
    "proj",
    "serialize_algebra",
    "sg",
]
