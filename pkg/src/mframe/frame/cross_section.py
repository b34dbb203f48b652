"""Coordinate cross-sections and invariantization."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

from gmpy2 import mpq

from mframe.algebra import DiffExpr, Symbol, inv_H, inv_I
from mframe.algebra.poly import to_mpq
from mframe.algebra.symbols import INDEP, INV, JET
from mframe.jetspace import SURFACES, JetSpace


class CrossSectionError(ValueError):
    pass


def invariant_symbol(s: Symbol, space: JetSpace) -> Symbol:
    """Normalized invariant H^i or I^alpha_J attached to a coordinate."""
    if s.kind == INDEP:
        return inv_H(space.independent.index(s.name) + 1)
    if s.kind == JET:
        a = space.dependent.index(s.name)
        return inv_I(s.idx, "I" if space.q == 1 else f"I{a + 1}")
    raise CrossSectionError(f"{s} is not a jet-space coordinate")


def coordinate_symbol(s: Symbol, space: JetSpace) -> Symbol:
    """Inverse of :func:`invariant_symbol`."""
    if s.kind != INV:
        raise CrossSectionError(f"{s} is not a normalized invariant")
    if s.name == "H":
        return space.x_symbols[s.idx[0] - 1]
    a = 0 if s.name == "I" else int(s.name[1:]) - 1
    return space.jet(a, s.idx)


@dataclass(frozen=True)
class CrossSection:
    """Normalization equations Z_k = c_k, each affine in one coordinate."""

    equations: Tuple[Tuple[DiffExpr, mpq], ...]
    name: str = ""
    space: JetSpace = SURFACES

    def __post_init__(self):
        eqs = tuple((DiffExpr.coerce(z), to_mpq(c)) for z, c in self.equations)
        object.__setattr__(self, "equations", eqs)
        self.pinned  # validates

    @staticmethod
    def from_mapping(mapping: Dict, name: str = "", space: JetSpace = SURFACES) -> "CrossSection":
        return CrossSection(tuple(mapping.items()), name, space)

    @property
    def functions(self) -> Tuple[DiffExpr, ...]:
        return tuple(z for z, _ in self.equations)

    @property
    def order(self) -> int:
        return max(self.space.jet_order(z) for z in self.functions)

    def __len__(self) -> int:
        return len(self.equations)

    @property
    def pinned(self) -> Dict[Symbol, mpq]:
        """Coordinate -> constant fixed by the cross-section."""
        out: Dict[Symbol, mpq] = {}
        for z, c in self.equations:
            syms = [s for s in z.symbols() if s.kind in (INDEP, JET)]
            if len(syms) != 1 or not z.is_polynomial():
                raise CrossSectionError(
                    f"normalization {z} = {c} is not affine in a single coordinate"
                )
            (s,) = syms
            a = z.diff(s)
            if not a.is_constant() or not (z - a * DiffExpr.sym(s)).is_constant() or a.is_zero():
                raise CrossSectionError(f"normalization {z} = {c} is not affine in {s}")
            b = (z - a * DiffExpr.sym(s)).constant_value()
            value = (c - b) / a.constant_value()
            if s in out and out[s] != value:
                raise CrossSectionError(f"coordinate {s} is pinned twice")
            out[s] = value
        return out

    @property
    def phantoms(self) -> Dict[Symbol, mpq]:
        """Normalized-invariant symbol -> its constant value."""
        return {invariant_symbol(s, self.space): v for s, v in self.pinned.items()}

    def is_phantom(self, s: Symbol) -> bool:
        if s.kind == INV:
            return s in self.phantoms
        return s in self.pinned

    def minimal_order_prefix(self, k: int) -> Tuple[DiffExpr, ...]:
        return tuple(z for z in self.functions if self.space.jet_order(z) <= k and _is_order_le(z, k, self.space))


def _is_order_le(z: DiffExpr, k: int, space: JetSpace) -> bool:
    return space.jet_order(z) <= k


def invariantize(e, cs: CrossSection) -> DiffExpr:
    """Replace coordinates by normalized invariants and phantoms by constants."""
    e = DiffExpr.coerce(e)
    pinned = cs.pinned
    phantoms = cs.phantoms
    bindings = {}
    for s in e.symbols():
        if s.kind in (INDEP, JET):
            if s in pinned:
                bindings[s] = DiffExpr.const(pinned[s])
            else:
                bindings[s] = DiffExpr.sym(invariant_symbol(s, cs.space))
        elif s.kind == INV and s in phantoms:
            bindings[s] = DiffExpr.const(phantoms[s])
    return e.subs(bindings)
