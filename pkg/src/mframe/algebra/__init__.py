"""Exact arithmetic kernel: symbols, sparse polynomials, rational expressions, matrices."""

from .matrix import RatMatrix, SingularMatrix, rank_q, solve_q
from .poly import AlgebraError, Poly, gcd, lcm
from .rational import DiffExpr, DivisionByZero, RecursiveBinding, as_expr
from .symbols import (
    CONST,
    DERIV,
    INDEP,
    INV,
    JET,
    WORD,
    Symbol,
    deriv,
    indep,
    inv_H,
    inv_I,
    jet,
    param,
    word,
)

__all__ = [
    "AlgebraError",
    "CONST",
    "DERIV",
    "DiffExpr",
    "DivisionByZero",
    "INDEP",
    "INV",
    "JET",
    "Poly",
    "RatMatrix",
    "RecursiveBinding",
    "SingularMatrix",
    "Symbol",
    "WORD",
    "as_expr",
    "deriv",
    "gcd",
    "indep",
    "inv_H",
    "inv_I",
    "jet",
    "lcm",
    "param",
    "rank_q",
    "solve_q",
    "word",
]
