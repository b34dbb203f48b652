"""Maurer-Cartan matrix, recurrence formulae and commutator invariants."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from gmpy2 import mpq

from mframe.algebra import DiffExpr, RatMatrix, SingularMatrix, Symbol, deriv, inv_I, solve_q
from mframe.algebra.poly import AlgebraError
from mframe.algebra.symbols import CONST, INV, inv_base_name
from mframe.invderiv import DerivAlgebra, DerivationError, Expander, OrderOverflow, mono
from mframe.jetspace import VectorFieldSpec, bracket, generalized_lie_matrix
from mframe.jetspace.fields import coefficient_vector
from mframe.jetspace.space import add_index

from .aliases import AliasTable
from .cross_section import CrossSection, CrossSectionError, coordinate_symbol, invariantize


class TransversalityError(CrossSectionError):
    def __init__(self, message: str, det=None):
        super().__init__(message)
        self.det = det


class PhantomInconsistency(RuntimeError):
    pass


class NotALieAlgebra(ValueError):
    pass


class NondegeneracyError(ValueError):
    pass


# structure constants ----------------------------------------------------


@dataclass(frozen=True)
class StructureConstants:
    """C[c][a][b] with [v_a, v_b] = sum_c C^c_ab v_c (0-based slots)."""

    table: Tuple[Tuple[Tuple[mpq, ...], ...], ...]

    @property
    def dim(self) -> int:
        return len(self.table)

    def __call__(self, c: int, a: int, b: int) -> mpq:
        return self.table[c][a][b]

    def nonzero(self) -> Iterator[Tuple[int, int, int, mpq]]:
        r = self.dim
        for c in range(r):
            for a in range(r):
                for b in range(r):
                    v = self.table[c][a][b]
                    if v:
                        yield c, a, b, v

    def is_antisymmetric(self) -> bool:
        r = self.dim
        return all(self.table[c][a][b] == -self.table[c][b][a] for c in range(r) for a in range(r) for b in range(r))

    def jacobi_defect(self) -> int:
        """Number of (a, b, c, e) with a nonzero Jacobi sum."""
        r = self.dim
        C = self.table
        bad = 0
        for a, b, c in itertools.combinations(range(r), 3):
            for e in range(r):
                s = 0
                for d in range(r):
                    s += C[d][a][b] * C[e][d][c] + C[d][b][c] * C[e][d][a] + C[d][c][a] * C[e][d][b]
                if s:
                    bad += 1
        return bad


def structure_constants(gens: Sequence[VectorFieldSpec]) -> StructureConstants:
    """Solve [v_a, v_b] = sum_c C^c_ab v_c on monomial coefficients."""
    r = len(gens)
    basis: list = []
    for g in gens:
        coefficient_vector(g, basis)
    brackets = {}
    for a, b in itertools.combinations(range(r), 2):
        w = bracket(gens[a], gens[b])
        brackets[(a, b)] = w
        coefficient_vector(w, basis)
    cols = [coefficient_vector(g, basis) for g in gens]
    if r and _rank_cols(cols) < r:
        raise NotALieAlgebra("generators are linearly dependent")
    table = [[[mpq(0)] * r for _ in range(r)] for _ in range(r)]
    rows = [[cols[k][m] for k in range(r)] for m in range(len(basis))]
    for (a, b), w in brackets.items():
        rhs = coefficient_vector(w, basis)
        try:
            x = solve_q(rows, rhs)
        except AlgebraError:
            raise NotALieAlgebra(f"bracket of generators {a + 1} and {b + 1} leaves their span") from None
        for c in range(r):
            table[c][a][b] = x[c]
            table[c][b][a] = -x[c]
    return StructureConstants(tuple(tuple(tuple(row) for row in m) for m in table))


def _rank_cols(cols) -> int:
    from mframe.algebra import rank_q

    n = max(len(c) for c in cols)
    return rank_q([c + [mpq(0)] * (n - len(c)) for c in cols])


# recurrence table --------------------------------------------------------


class RecurrenceTable(Mapping):
    """(direction, multi-index) -> D_i I_J, directions 1-based."""

    def __init__(self, rows: Dict[Tuple[int, Tuple[int, ...]], DiffExpr], nmax: int):
        self._rows = dict(rows)
        self.nmax = nmax

    def __getitem__(self, key):
        return self._rows[key]

    def __iter__(self):
        return iter(self._rows)

    def __len__(self) -> int:
        return len(self._rows)


# the frame ---------------------------------------------------------------


class FrameContext:
    """All moving-frame data for one action and one coordinate cross-section.

    The Maurer-Cartan matrix is R = -iota(D(Z)) iota(v(Z))^{-1}, with
    iota applied before inverting.  Recurrence rows
    D_i iota(F) = iota(D_i F) + sum_k R[i][k] iota(v_k(F)) are built on demand
    up to ``max_order`` and memoized.
    """

    def __init__(
        self,
        action: Sequence[VectorFieldSpec],
        cs: CrossSection,
        aliases: Optional[Mapping[str, object]] = None,
        max_order: Optional[int] = None,
        pair: Optional[Sequence[Symbol]] = None,
    ):
        self.action = tuple(action)
        self.cs = cs
        self.space = cs.space
        self.r = len(self.action)
        self.p = self.space.p
        if len(cs) != self.r:
            raise CrossSectionError(
                f"cross-section has {len(cs)} equations but the algebra has dimension {self.r}"
            )
        self.order = cs.order
        self.max_order = max_order if max_order is not None else self.order + 9
        self._rows: Dict[Tuple[int, Symbol], DiffExpr] = {}
        self.R = self._mc_matrix()
        self._check_phantoms()
        self.C = structure_constants(self.action)
        self.aliases = AliasTable(aliases) if aliases else None
        self.pair, self.Y = self._commutators(pair)
        self.phi = self.Y[(1, 2, 1)] if self.p == 2 else None
        self.psi = self.Y[(2, 2, 1)] if self.p == 2 else None

    # construction ------------------------------------------------------

    def iota(self, e) -> DiffExpr:
        return invariantize(e, self.cs)

    def _mc_matrix(self) -> RatMatrix:
        Z = self.cs.functions
        vZ = generalized_lie_matrix(self.action, Z)
        self.iota_vZ = vZ.map(self.iota)
        DZ = RatMatrix([[self.space.total_derivative(z, i) for z in Z] for i in range(self.p)])
        self.iota_DZ = DZ.map(self.iota)
        try:
            Rt = self.iota_vZ.transpose().solve(-self.iota_DZ.transpose())
        except SingularMatrix as exc:
            raise TransversalityError("cross-section not transverse", exc.det) from None
        return Rt.transpose()

    def _check_phantoms(self) -> None:
        for i in range(self.p):
            for j in range(self.r):
                v = self.iota_DZ[i, j]
                for k in range(self.r):
                    v = v + self.R[i, k] * self.iota_vZ[k, j]
                if not v.is_zero():
                    raise PhantomInconsistency(
                        f"recurrence for D{i + 1} of normalization {j + 1} leaves {v}"
                    )

    # invariants --------------------------------------------------------

    @property
    def phantoms(self) -> Dict[Symbol, mpq]:
        return self.cs.phantoms

    def invariant(self, J, alpha: int = 0) -> Symbol:
        name = "I" if self.space.q == 1 else f"I{alpha + 1}"
        return inv_I(tuple(J), name)

    def basic_invariants(self, order: int) -> List[Symbol]:
        """Non-phantom I_J with |J| = order, more x-derivatives first."""
        out = []
        for J in self.space.multi_indices(order):
            for a in range(self.space.q):
                s = self.invariant(J, a)
                if s not in self.phantoms:
                    out.append(s)
        return out

    def basic_upto(self, order: int) -> List[Symbol]:
        return [s for k in range(order + 1) for s in self.basic_invariants(k)]

    # recurrence --------------------------------------------------------

    def row(self, i: int, s: Symbol) -> DiffExpr:
        """D_i applied to the normalized invariant s (i is 1-based)."""
        key = (i, s)
        got = self._rows.get(key)
        if got is not None:
            return got
        if not 1 <= i <= self.p:
            raise DerivationError(f"invariant derivation index {i} out of range")
        if s.kind != INV:
            raise DerivationError(f"{s} is not a normalized invariant")
        c = coordinate_symbol(s, self.space)
        if s.name == "H":
            m = s.idx[0] - 1
            out = DiffExpr.const(1 if m == i - 1 else 0)
            for k, g in enumerate(self.action):
                out = out + self.R[i - 1, k] * self.iota(g.xi[m])
        else:
            J = s.idx
            if sum(J) + 1 > self.max_order:
                raise OrderOverflow(sum(J) + 1, self.max_order)
            a = self.space.dep_index(c)
            out = self.iota(self.space.u(add_index(J, i - 1), a))
            for k, g in enumerate(self.action):
                out = out + self.R[i - 1, k] * self.iota(g.prolonged().coefficient(J, a))
        self._rows[key] = out
        return out

    def recurrence_table(self, nmax: int) -> RecurrenceTable:
        if nmax < 1:
            raise ValueError("nmax must be at least 1")
        rows = {}
        for J in self.space.indices_upto(nmax):
            for a in range(self.space.q):
                s = self.invariant(J, a)
                for i in range(1, self.p + 1):
                    v = self.row(i, s)
                    if s in self.phantoms and not v.is_zero():
                        raise PhantomInconsistency(f"phantom {s}: D{i} gives {v}")
                    rows[(i, J)] = v
        return RecurrenceTable(rows, nmax)

    def derive(self, e, i: int) -> DiffExpr:
        """Invariant derivation D_i of an expression in normalized invariants."""

        def image(s: Symbol):
            if s.kind == INV:
                if s in self.phantoms:
                    return None
                return self.row(i, s)
            if s.kind == CONST:
                return None
            raise DerivationError(f"cannot apply D{i} to {s}; expand it first")

        return DiffExpr.coerce(e).derive_with(image)

    def derive_word(self, e, letters: Sequence[int]) -> DiffExpr:
        out = DiffExpr.coerce(e)
        for k in reversed(tuple(letters)):
            out = self.derive(out, k)
        return out

    # commutator invariants -------------------------------------------

    def _commutators(self, pair):
        p = self.p
        if pair is not None:
            candidates = [tuple(pair)]
        else:
            pool = []
            for k in range(self.order, self.max_order):
                pool.extend(self.basic_invariants(k))
                if len(pool) >= p + 2:
                    break
            candidates = list(itertools.combinations(pool, p))
        last = None
        for cand in candidates:
            M = RatMatrix([[self.derive(DiffExpr.sym(s), k) for k in range(1, p + 1)] for s in cand])
            Y = {}
            try:
                for j, k in itertools.combinations(range(1, p + 1), 2):
                    rhs = RatMatrix(
                        [[self.derive_word(DiffExpr.sym(s), (k, j)) - self.derive_word(DiffExpr.sym(s), (j, k))] for s in cand]
                    )
                    sol = M.solve(rhs)
                    for i in range(1, p + 1):
                        Y[(i, k, j)] = sol[i - 1, 0]
                        Y[(i, j, k)] = -sol[i - 1, 0]
            except SingularMatrix as exc:
                last = exc
                continue
            for i in range(1, p + 1):
                for j in range(1, p + 1):
                    Y[(i, j, j)] = DiffExpr.const(0)
            return cand, Y
        raise DerivationError(f"no invariant tuple with nonsingular derivative matrix ({last})")

    def commutator_formula(self, sign: int = 1) -> Dict[Tuple[int, int, int], DiffExpr]:
        """Y^i_jk = sign * sum_k [R^k_k' iota(D_j xi^i) - R^k_j iota(D_k' xi^i)].

        This is the explicit formula read with j, k as the free indices; it is
        a cross-check for the linear-solve route.
        """
        Y = {}
        p = self.p
        for i in range(1, p + 1):
            for j in range(1, p + 1):
                for k in range(1, p + 1):
                    v = DiffExpr.const(0)
                    for kap, g in enumerate(self.action):
                        xi = g.xi[i - 1]
                        v = v + self.R[k - 1, kap] * self.iota(self.space.total_derivative(xi, j - 1))
                        v = v - self.R[j - 1, kap] * self.iota(self.space.total_derivative(xi, k - 1))
                    Y[(i, j, k)] = v if sign == 1 else -v
        return Y

    def commutator_formula_agrees(self) -> Optional[int]:
        """Sign (+1/-1) under which the explicit formula matches, or None."""
        for sign in (1, -1):
            F = self.commutator_formula(sign)
            if all(F[key] == val for key, val in self.Y.items()):
                return sign
        return None

    # alias world -------------------------------------------------------

    def require_aliases(self) -> AliasTable:
        if self.aliases is None:
            raise DerivationError("this frame has no named Maurer-Cartan invariants")
        return self.aliases

    def R_named(self) -> RatMatrix:
        """R rewritten in alias symbols."""
        return self.R.map(self.require_aliases().rewrite)

    def algebra(self, world: str = "aliases") -> DerivAlgebra:
        """Symbolic derivations whose commutation rule uses phi, psi of this frame."""
        if self.p != 2:
            raise DerivationError("the symbolic derivation algebra is implemented for two derivations")
        key = "_alg_" + world
        got = self.__dict__.get(key)
        if got is None:
            if world == "aliases":
                A = self.require_aliases()
                got = DerivAlgebra(A.rewrite(self.phi), A.rewrite(self.psi))
            elif world == "invariants":
                got = DerivAlgebra(self.phi, self.psi)
            else:
                raise ValueError(f"unknown world {world!r}")
            self.__dict__[key] = got
        return got

    def expander(self) -> Expander:
        got = self.__dict__.get("_expander")
        if got is None:
            defs = self.aliases.definitions if self.aliases else {}
            got = Expander(self.derive, defs)
            self.__dict__["_expander"] = got
        return got

    def expand(self, e) -> DiffExpr:
        """Monotone and word symbols replaced by expressions in normalized invariants."""
        return self.expander().expand(e)


def build_frame(action, cs, aliases=None, max_order=None, pair=None) -> FrameContext:
    return FrameContext(action, cs, aliases=aliases, max_order=max_order, pair=pair)


def mc_matrix(action, cs) -> RatMatrix:
    return FrameContext(action, cs).R


def recurrence_table(ctx: FrameContext, nmax: int) -> RecurrenceTable:
    return ctx.recurrence_table(nmax)


def commutator_invariants(ctx: FrameContext):
    return ctx.Y


# relations in derivative symbols -----------------------------------------


def derivative_symbol(s: Symbol, i: int, j: int) -> DiffExpr:
    """Monotone derivative symbol of a normalized invariant."""
    if i == 0 and j == 0:
        return DiffExpr.sym(s)
    return DiffExpr.sym(deriv(inv_base_name(s), i, j))


def recurrence_relation(ctx: FrameContext, J, i: int) -> DiffExpr:
    """D_i(I_J) - (recurrence right side), the derivative kept as a symbol."""
    s = ctx.invariant(J)
    lhs = derivative_symbol(s, 1, 0) if i == 1 else derivative_symbol(s, 0, 1)
    if s in ctx.phantoms:
        lhs = DiffExpr.const(0)
    return lhs - ctx.row(i, s)


def cross_relation(ctx: FrameContext, J) -> DiffExpr:
    """D2(I_{J+e1}) - D1(I_{J+e2}) minus its recurrence value."""
    a = ctx.invariant(add_index(tuple(J), 0))
    b = ctx.invariant(add_index(tuple(J), 1))
    lhs = DiffExpr.const(0)
    rhs = DiffExpr.const(0)
    if a not in ctx.phantoms:
        lhs = lhs + derivative_symbol(a, 0, 1)
    if b not in ctx.phantoms:
        lhs = lhs - derivative_symbol(b, 1, 0)
    rhs = ctx.row(2, a) - ctx.row(1, b)
    return lhs - rhs
