"""Symbols shared by every expression in the engine.

A symbol is a plain tuple ``(kind, name, idx)`` so that hashing and the
total order are the native tuple ones: kind first, then name, then index.
"""

from __future__ import annotations

from typing import NamedTuple

INDEP = 0  # independent variable x^i
JET = 1  # jet coordinate u^alpha_J (u itself is the zero multi-index)
INV = 2  # normalized invariant H^i or I^alpha_J
DERIV = 3  # monotone derivative symbol D_1^i D_2^j (base)
WORD = 4  # arbitrary derivative word applied to a base (rewriting only)
CONST = 5  # named parameter treated as a constant

KIND_NAMES = {
    INDEP: "IndependentVar",
    JET: "JetCoord",
    INV: "NormalizedInv",
    DERIV: "DerivSym",
    WORD: "DerivWord",
    CONST: "Constant",
}


class Symbol(NamedTuple):
    kind: int
    name: str
    idx: tuple = ()

    def __str__(self) -> str:
        return symbol_str(self)

    def __repr__(self) -> str:
        return f"Symbol({KIND_NAMES[self.kind]}, {symbol_str(self)})"

    @property
    def order(self) -> int:
        """Differential order for jets, invariants and derivative symbols."""
        if self.kind in (JET, DERIV):
            return sum(self.idx)
        if self.kind == INV and self.name != "H":
            return sum(self.idx)
        if self.kind == WORD:
            return len(self.idx)
        return 0


def indep(name: str, i: int) -> Symbol:
    return Symbol(INDEP, name, (i,))


def jet(dep: str, J) -> Symbol:
    return Symbol(JET, dep, tuple(J))


def inv_H(i: int) -> Symbol:
    """Normalized invariant iota(x^i); ``i`` is 1-based."""
    return Symbol(INV, "H", (i,))


def inv_I(J, name: str = "I") -> Symbol:
    return Symbol(INV, name, tuple(J))


def deriv(base: str, i: int = 0, j: int = 0) -> Symbol:
    return Symbol(DERIV, base, (i, j))


def word(base: str, letters) -> Symbol:
    return Symbol(WORD, base, tuple(letters))


def param(name: str) -> Symbol:
    return Symbol(CONST, name, ())


def _index(idx) -> str:
    return ",".join(str(k) for k in idx)


def inv_base_name(s: Symbol) -> str:
    """Base label used for derivative symbols of a normalized invariant."""
    return f"{s.name}[{_index(s.idx)}]"


def symbol_str(s: Symbol) -> str:
    if s.kind == INDEP or s.kind == CONST:
        return s.name
    if s.kind == JET:
        if not any(s.idx):
            return s.name
        return f"{s.name}[{_index(s.idx)}]"
    if s.kind == INV:
        return inv_base_name(s)
    if s.kind == DERIV:
        i, j = s.idx
        if "[" in s.name:
            # derivative of a normalized invariant such as I[3,0]
            return f"D[{i},{j}]({s.name})"
        if i == 0 and j == 0:
            return s.name
        return f"{s.name}[{i},{j}]"
    if s.kind == WORD:
        return f"W[{''.join(str(k) for k in s.idx)}]({s.name})"
    raise ValueError(f"unknown symbol kind {s.kind}")
