"""Named Maurer-Cartan invariants (phi, psi, tau, ...) over basic invariants."""

from __future__ import annotations

from typing import Dict, Mapping, Tuple

from mframe.algebra import DiffExpr, Symbol
from mframe.algebra.symbols import INV
from mframe.invderiv import mono


class AliasError(ValueError):
    pass


class AliasTable:
    """Aliases with a triangular inversion back to normalized invariants.

    Each alias, after substituting the invariants already solved for, must be
    affine in exactly one new invariant with a constant coefficient.  This
    lets any expression in the covered invariants be rewritten in aliases.
    """

    def __init__(self, aliases: Mapping[str, object]):
        self.definitions: Dict[str, DiffExpr] = {k: DiffExpr.coerce(v) for k, v in aliases.items()}
        self.names: Tuple[str, ...] = tuple(self.definitions)
        self.inverse: Dict[Symbol, DiffExpr] = {}
        for name in self.names:
            e = self.definitions[name].subs(self.inverse)
            fresh = sorted(s for s in e.symbols() if s.kind == INV)
            if len(fresh) != 1 or not e.is_polynomial():
                raise AliasError(f"alias {name} = {self.definitions[name]} is not affine in one new invariant")
            (s,) = fresh
            a = e.diff(s)
            rest = e - a * DiffExpr.sym(s)
            if not a.is_constant() or s in rest.symbols():
                raise AliasError(f"alias {name} is not affine in {s}")
            self.inverse[s] = (mono(name) - rest) / a

    def __contains__(self, name: str) -> bool:
        return name in self.definitions

    def __iter__(self):
        return iter(self.names)

    def __len__(self) -> int:
        return len(self.names)

    def covers(self, e) -> bool:
        return all(s in self.inverse for s in DiffExpr.coerce(e).symbols() if s.kind == INV)

    def rewrite(self, e) -> DiffExpr:
        """Express e (in normalized invariants) through the aliases."""
        e = DiffExpr.coerce(e)
        missing = sorted(s for s in e.symbols() if s.kind == INV and s not in self.inverse)
        if missing:
            raise AliasError("not expressible in aliases: " + ", ".join(str(s) for s in missing))
        return e.subs(self.inverse)

    def expand(self, e) -> DiffExpr:
        """Replace undifferentiated alias symbols by their definitions."""
        e = DiffExpr.coerce(e)
        binds = {}
        for s in e.symbols():
            if s.kind != INV and s.name in self.definitions and s.idx == (0, 0):
                binds[s] = self.definitions[s.name]
        return e.subs(binds)
