"""Maurer-Cartan syzygies, generating sets and the commutator trick."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from mframe.algebra import DiffExpr, Symbol
from mframe.invderiv import mono, word_symbol
from mframe.jetspace import orbit_dimensions

from .context import FrameContext, NondegeneracyError


@dataclass(frozen=True)
class Syzygy:
    slot: int  # 1-based generator index c
    expr: DiffExpr

    @property
    def label(self) -> str:
        return f"Delta_{self.slot}"


def syzygy_invariant_form(ctx: FrameContext, c: int) -> DiffExpr:
    """Syzygy for slot c (0-based) evaluated on normalized invariants; always 0."""
    return _syzygy(ctx, c, ctx.R, ctx.derive, ctx.phi, ctx.psi)


def _syzygy(ctx, c, R, derive, phi, psi) -> DiffExpr:
    # D1 R^2_c - D2 R^1_c + sum_{a<b} C^c_ab (R^1_a R^2_b - R^2_a R^1_b) + phi R^1_c + psi R^2_c
    v = derive(R[1, c], 1) - derive(R[0, c], 2)
    for a, b in itertools.combinations(range(ctx.r), 2):
        k = ctx.C(c, a, b)
        if k:
            v = v + (R[0, a] * R[1, b] - R[1, a] * R[0, b]).__mul__(DiffExpr.const(k))
    return v + phi * R[0, c] + psi * R[1, c]


def mc_syzygies(ctx: FrameContext, keep_zero: bool = False) -> List[Syzygy]:
    """Structure-equation identities among the Maurer-Cartan invariants.

    With aliases the result is written in monotone symbols of the aliases;
    otherwise in monotone symbols of the basic invariants.  Syzygies that are
    identically zero as differential polynomials are dropped.
    """
    if ctx.p != 2:
        raise ValueError("syzygies are implemented for two independent variables")
    if ctx.aliases is not None:
        A = ctx.aliases
        R = ctx.R_named()
        phi, psi = A.rewrite(ctx.phi), A.rewrite(ctx.psi)
        alg = ctx.algebra("aliases")
    else:
        R = ctx.R
        phi, psi = ctx.phi, ctx.psi
        alg = ctx.algebra("invariants")
    out = []
    for c in range(ctx.r):
        e = _syzygy(ctx, c, R, alg.apply, phi, psi)
        if keep_zero or not e.is_zero():
            out.append(Syzygy(c + 1, e))
    return out


# generating sets ----------------------------------------------------------


@dataclass(frozen=True)
class GeneratingSets:
    order_np1: Tuple[Symbol, ...]
    minimal_order: Optional[Tuple[DiffExpr, ...]]
    maurer_cartan: Tuple[DiffExpr, ...]
    minimal_order_reason: str = ""


def is_minimal_order(ctx: FrameContext, seed: int = 0) -> Tuple[bool, str]:
    """Check that exactly r_k normalizations have order <= k for each k."""
    la = orbit_dimensions(ctx.action, ctx.order, seed=seed)
    orders = [ctx.space.jet_order(z) for z in ctx.cs.functions]
    for k, rk in enumerate(la.ranks):
        count = sum(1 for o in orders if o <= k)
        if count != rk:
            return False, f"{count} normalizations of order <= {k}, orbit dimension {rk}"
    return True, ""


def generating_sets(ctx: FrameContext, seed: int = 0) -> GeneratingSets:
    n = ctx.order
    base = tuple(ctx.basic_upto(n + 1))
    J0 = [DiffExpr.sym(s) for s in ctx.basic_upto(n)]

    minimal = None
    ok, why = is_minimal_order(ctx, seed)
    if ok:
        seen = []
        for z in J0 + [
            ctx.iota(ctx.space.total_derivative(z, i)) for z in ctx.cs.functions for i in range(ctx.p)
        ]:
            if not z.is_constant() and z not in seen:
                seen.append(z)
        minimal = tuple(sorted(seen, key=_set_key))

    mc = []
    if ctx.aliases is not None:
        named = ctx.R_named()
        used = set()
        for row in named.rows:
            for e in row:
                used |= {s.name for s in e.symbols()}
        mc = [mono(name) for name in ctx.aliases.names if name in used]
        for z in J0:
            if not ctx.aliases.covers(z):
                mc.append(z)
    else:
        for row in ctx.R.rows:
            for e in row:
                if not e.is_constant() and e not in mc and -e not in mc:
                    mc.append(e)
        mc.extend(z for z in J0 if z not in mc)
    return GeneratingSets(base, minimal, tuple(mc), why)


def _set_key(e: DiffExpr):
    s = sorted(e.symbols())
    return (max((t.order for t in s), default=0), [tuple(-k for k in t.idx) for t in s], str(e))


# commutator trick ---------------------------------------------------------


@dataclass(frozen=True)
class TrickResult:
    target: str  # the invariant recovered ("psi" or "phi")
    source: str
    formula: DiffExpr  # in monotone/word symbols of the source
    value: DiffExpr  # evaluated on normalized invariants
    denominator: DiffExpr
    matches: bool

    @property
    def side_condition(self) -> str:
        return f"{self.denominator} != 0"


def trick_formula(source: str = "phi") -> Tuple[DiffExpr, DiffExpr]:
    """Symbolic formula recovering the other commutator invariant.

    From [D2, D1] = phi*D1 + psi*D2 applied to the source invariant,
    psi = (D2 D1 phi - D1 D2 phi - phi D1 phi) / D2 phi and
    phi = (D2 D1 psi - D1 D2 psi - psi D2 psi) / D1 psi.
    Returns (numerator, denominator) with D2 D1 kept as a word symbol.
    """
    f = mono(source)
    w21 = word_symbol((2, 1), source)
    if source == "phi":
        return w21 - mono(source, 1, 1) - f * mono(source, 1, 0), mono(source, 0, 1)
    if source == "psi":
        return w21 - mono(source, 1, 1) - f * mono(source, 0, 1), mono(source, 1, 0)
    raise ValueError("the commutator trick starts from phi or psi")


def commutator_trick(ctx: FrameContext, source: str = "phi") -> TrickResult:
    """Recover one commutator invariant from the derivatives of the other."""
    target = {"phi": "psi", "psi": "phi"}.get(source)
    if target is None:
        raise ValueError("the commutator trick starts from phi or psi")
    f = ctx.phi if source == "phi" else ctx.psi
    d = ctx.derive
    if source == "phi":
        num = d(d(f, 1), 2) - d(d(f, 2), 1) - f * d(f, 1)
        den = d(f, 2)
    else:
        num = d(d(f, 1), 2) - d(d(f, 2), 1) - f * d(f, 2)
        den = d(f, 1)
    if den.is_zero():
        raise NondegeneracyError(f"nondegeneracy condition violated: D{2 if source == 'phi' else 1}{source} = 0")
    value = num / den
    fnum, fden = trick_formula(source)
    expected = ctx.psi if source == "phi" else ctx.phi
    return TrickResult(target, source, fnum / fden, value, den, value == expected)
