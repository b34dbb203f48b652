"""Expansion of monotone symbols into normalized invariants."""

from __future__ import annotations

from typing import Callable, Dict, Mapping, Optional, Tuple

from mframe.algebra import DiffExpr, Symbol
from mframe.algebra.symbols import INV, WORD

from .algebra import DerivationError, mono, mono_parts


class OrderOverflow(ValueError):
    """Raised when an expansion needs recurrence rows beyond the allowed order."""

    def __init__(self, needed: int, limit: int):
        super().__init__(f"expansion needs recurrence rows of order {needed}, limit is {limit}")
        self.needed = needed
        self.limit = limit


Derive = Callable[[DiffExpr, int], DiffExpr]


class Expander:
    """Replace b[i,j] by D1^i D2^j of the definition of b.

    ``derive(e, k)`` must differentiate an expression in normalized
    invariants; ``definitions`` maps base names (aliases) to expressions in
    normalized invariants.  Bases that are invariants such as I[3,0] need no
    definition.
    """

    def __init__(self, derive: Derive, definitions: Optional[Mapping[str, DiffExpr]] = None):
        self.derive = derive
        self.definitions = {k: DiffExpr.coerce(v) for k, v in (definitions or {}).items()}
        self._values: Dict[Tuple[str, int, int], DiffExpr] = {}

    def value(self, base: str, i: int, j: int) -> DiffExpr:
        key = (base, i, j)
        got = self._values.get(key)
        if got is not None:
            return got
        if i == 0 and j == 0:
            got = self.definitions.get(base)
            if got is None:
                got = mono(base)
                if next(iter(got.symbols())).kind != INV:
                    raise DerivationError(f"no definition for base {base}")
        elif i > 0:
            got = self.derive(self.value(base, i - 1, j), 1)
        else:
            got = self.derive(self.value(base, 0, j - 1), 2)
        self._values[key] = got
        return got

    def symbol_value(self, s: Symbol) -> Optional[DiffExpr]:
        if s.kind == WORD:
            v = self.value(s.name, 0, 0)
            for k in reversed(s.idx):
                v = self.derive(v, k)
            return v
        parts = mono_parts(s)
        if parts is None:
            return None
        base, i, j = parts
        if i == 0 and j == 0 and base not in self.definitions:
            return None
        return self.value(base, i, j)

    def bindings(self, e: DiffExpr) -> Dict[Symbol, DiffExpr]:
        out = {}
        for s in sorted(e.symbols()):
            v = self.symbol_value(s)
            if v is not None:
                out[s] = v
        return out

    def expand(self, e) -> DiffExpr:
        e = DiffExpr.coerce(e)
        return e.subs(self.bindings(e))

    def evaluate(self, e, point: Mapping[Symbol, object]):
        """Numeric value of e at a point given on the normalized invariants."""
        e = DiffExpr.coerce(e)
        vals = dict(point)
        for s, v in self.bindings(e).items():
            vals[s] = v.evaluate(point)
        return e.evaluate(vals)


def expand_to_invariants(e, derive: Derive, definitions=None) -> DiffExpr:
    return Expander(derive, definitions).expand(e)
