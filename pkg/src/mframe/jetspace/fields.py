"""Infinitesimal generators, their prolongations and generalized Lie matrices."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from gmpy2 import mpq

from mframe.algebra import DiffExpr, Poly, RatMatrix, Symbol, rank_q
from mframe.algebra.symbols import INDEP, JET

from .space import SURFACES, JetSpace, MultiIndex, add_index


@dataclass(frozen=True, eq=False)
class VectorFieldSpec:
    """v = sum xi^i d/dx^i + sum phi^alpha d/du^alpha on the base space."""

    xi: Tuple[DiffExpr, ...]
    phi: Tuple[DiffExpr, ...]
    space: JetSpace = SURFACES
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "xi", tuple(DiffExpr.coerce(c) for c in self.xi))
        object.__setattr__(self, "phi", tuple(DiffExpr.coerce(c) for c in self.phi))
        if len(self.xi) != self.space.p or len(self.phi) != self.space.q:
            raise ValueError("coefficient count does not match the jet space")
        for c in self.xi + self.phi:
            for s in c.symbols():
                if s.kind in (INDEP, JET) and not self.space.is_base_symbol(s):
                    raise ValueError(f"generator coefficient {c} involves jet coordinate {s}")

    @property
    def coefficients(self) -> Tuple[DiffExpr, ...]:
        return self.xi + self.phi

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, VectorFieldSpec)
            and self.space == other.space
            and self.coefficients == other.coefficients
        )

    def __hash__(self) -> int:
        return hash(self.coefficients)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coefficients)

    def __add__(self, other: "VectorFieldSpec") -> "VectorFieldSpec":
        return VectorFieldSpec(
            tuple(a + b for a, b in zip(self.xi, other.xi)),
            tuple(a + b for a, b in zip(self.phi, other.phi)),
            self.space,
        )

    def scaled(self, c) -> "VectorFieldSpec":
        c = DiffExpr.coerce(c)
        return VectorFieldSpec(tuple(c * a for a in self.xi), tuple(c * a for a in self.phi), self.space)

    def apply_base(self, f) -> DiffExpr:
        """v(f) for a function f of the base coordinates only."""
        f = DiffExpr.coerce(f)
        images = dict(zip(self.space.base_symbols, self.coefficients))

        def image(s):
            c = images.get(s)
            return None if c is None else _poly(c)

        return f.derivation(image)

    def prolonged(self) -> "ProlongedField":
        pf = self._cache.get("prolonged")
        if pf is None:
            pf = ProlongedField(self)
            self._cache["prolonged"] = pf
        return pf

    def __str__(self) -> str:
        parts = []
        names = list(self.space.independent) + list(self.space.dependent)
        for n, c in zip(names, self.coefficients):
            if not c.is_zero():
                parts.append(f"({c})*d/d{n}")
        return " + ".join(parts) if parts else "0"


def _poly(e: DiffExpr) -> Poly:
    if not e.is_polynomial():
        raise ValueError(f"rational coefficient {e} is not supported in a derivation image")
    return e.num.scale(1 / e.den.constant_value())


class ProlongedField:
    """Prolonged coefficients phi^alpha_J of one generator, computed on demand.

    Coefficients are built by the recurrence
    phi_{J+i} = D_i phi_J - sum_k (D_i xi^k) u_{J+k}
    and memoized; :meth:`coefficient_closed` evaluates the closed form
    D_J(phi - sum xi^i u_i) + sum xi^i u_{J,i} independently.  Cache writes
    are idempotent, so concurrent readers at worst repeat a computation.
    """

    def __init__(self, base: VectorFieldSpec):
        self.base = base
        self.space = base.space
        self._coeffs: Dict[Tuple[int, MultiIndex], DiffExpr] = {}
        self._dxi: Dict[int, Tuple[DiffExpr, ...]] = {}
        self._char: Dict[Tuple[int, MultiIndex], DiffExpr] = {}
        for a in range(self.space.q):
            self._coeffs[(a, self.space.zero)] = base.phi[a]

    @property
    def order(self) -> int:
        return max(sum(J) for _, J in self._coeffs)

    def _total_dxi(self, i: int) -> Tuple[DiffExpr, ...]:
        d = self._dxi.get(i)
        if d is None:
            d = tuple(self.space.total_derivative(c, i) for c in self.base.xi)
            self._dxi[i] = d
        return d

    def coefficient(self, J: MultiIndex, alpha: int = 0) -> DiffExpr:
        J = tuple(J)
        key = (alpha, J)
        c = self._coeffs.get(key)
        if c is not None:
            return c
        # extend along the last direction with a positive count
        i = max(k for k in range(self.space.p) if J[k] > 0)
        K = add_index(J, i, -1)
        prev = self.coefficient(K, alpha)
        c = self.space.total_derivative(prev, i)
        for k, dxi in enumerate(self._total_dxi(i)):
            if not dxi.is_zero():
                c = c - dxi * self.space.u(add_index(K, k), alpha)
        self._coeffs[key] = c
        return c

    def characteristic_derivative(self, J: MultiIndex, alpha: int = 0) -> DiffExpr:
        """D_J Q_alpha with Q_alpha = phi_alpha - sum_i xi^i u^alpha_i."""
        J = tuple(J)
        key = (alpha, J)
        c = self._char.get(key)
        if c is not None:
            return c
        if not any(J):
            sp = self.space
            c = self.base.phi[alpha]
            for i, xi in enumerate(self.base.xi):
                c = c - xi * sp.u(sp.unit(i), alpha)
        else:
            i = max(k for k in range(self.space.p) if J[k] > 0)
            c = self.space.total_derivative(self.characteristic_derivative(add_index(J, i, -1), alpha), i)
        self._char[key] = c
        return c

    def coefficient_closed(self, J: MultiIndex, alpha: int = 0) -> DiffExpr:
        J = tuple(J)
        c = self.characteristic_derivative(J, alpha)
        for i, xi in enumerate(self.base.xi):
            c = c + xi * self.space.u(add_index(J, i), alpha)
        return c

    def extend(self, n: int) -> "ProlongedField":
        for J in self.space.indices_upto(n):
            for a in range(self.space.q):
                self.coefficient(J, a)
        return self

    def coefficients(self, n: int) -> Dict[MultiIndex, DiffExpr]:
        """phi_J for all #J <= n (first dependent variable)."""
        return {J: self.coefficient(J) for J in self.space.indices_upto(n)}

    def apply(self, F) -> DiffExpr:
        """v^(n)(F) for a differential function F."""
        F = DiffExpr.coerce(F)
        sp = self.space
        xis = dict(zip(sp.x_symbols, self.base.xi))

        def image(s: Symbol):
            if s in xis:
                return _poly(xis[s])
            if s.kind == JET and s.name in sp.dependent:
                return _poly(self.coefficient(s.idx, sp.dependent.index(s.name)))
            return None

        return F.derivation(image)


def prolong(v: VectorFieldSpec, n: int) -> ProlongedField:
    if n < 0:
        raise ValueError("prolongation order must be nonnegative")
    return v.prolonged().extend(n)


def generalized_lie_matrix(gens: Sequence[VectorFieldSpec], F: Sequence) -> RatMatrix:
    """Matrix with entry (kappa, j) = v_kappa^(n)(F_j)."""
    F = [DiffExpr.coerce(f) for f in F]
    return RatMatrix([[g.prolonged().apply(f) for f in F] for g in gens])


def bracket(v: VectorFieldSpec, w: VectorFieldSpec) -> VectorFieldSpec:
    """[v, w] = v(w) - w(v) coefficient-wise on the base space."""
    return VectorFieldSpec(
        tuple(v.apply_base(b) - w.apply_base(a) for a, b in zip(v.xi, w.xi)),
        tuple(v.apply_base(b) - w.apply_base(a) for a, b in zip(v.phi, w.phi)),
        v.space,
    )


def coefficient_vector(v: VectorFieldSpec, basis: List) -> List[mpq]:
    """Monomial coefficients of v, extending ``basis`` with new keys."""
    out = {}
    for k, c in enumerate(v.coefficients):
        if not c.is_polynomial():
            raise ValueError("rational generator coefficients are not supported here")
        for m, a in _poly(c).terms.items():
            out[(k, m)] = a
    for key in sorted(out, key=repr):
        if key not in basis:
            basis.append(key)
    return [out.get(key, mpq(0)) for key in basis]


def span_dimension(gens: Sequence[VectorFieldSpec]) -> int:
    basis: list = []
    vecs = [coefficient_vector(g, basis) for g in gens]
    n = len(basis)
    return rank_q([v + [mpq(0)] * (n - len(v)) for v in vecs]) if vecs and n else 0


@dataclass(frozen=True)
class LieAnalysis:
    ranks: Tuple[int, ...]
    stabilization: Optional[int]
    span_dim: int

    @property
    def reached(self) -> bool:
        return self.stabilization is not None


def random_point(symbols, rng: random.Random, lo: int = -9, hi: int = 9):
    pt = {}
    for s in sorted(symbols):
        num = rng.randint(lo, hi) or 1
        den = rng.randint(1, 5)
        pt[s] = mpq(num, den)
    return pt


def point_rank(m: RatMatrix, point) -> int:
    """Rank of m evaluated at a rational point (a lower bound for its generic rank)."""
    return rank_q(m.evaluate(point))


def orbit_dimensions(gens: Sequence[VectorFieldSpec], nmax: int, seed: int = 0, trials: int = 3) -> LieAnalysis:
    """Generic ranks r_0..r_nmax of the Lie matrices and the stabilization order.

    The rank at a rational point is a lower bound for the generic rank; when
    it already equals min(rows, columns) it is exact.  Otherwise the symbolic
    fraction-free rank over the rational-function field decides.
    """
    if nmax < 0:
        raise ValueError("nmax must be nonnegative")
    if not gens:
        return LieAnalysis(tuple(0 for _ in range(nmax + 1)), 0, 0)
    space = gens[0].space
    rng = random.Random(seed)
    ranks = []
    for n in range(nmax + 1):
        coords = space.coordinates(n)
        L = generalized_lie_matrix(gens, [DiffExpr.sym(s) for s in coords])
        full = min(L.nrows, L.ncols)
        best = 0
        for _ in range(trials):
            syms = set().union(*(x.symbols() for r in L.rows for x in r))
            best = max(best, point_rank(L, random_point(syms, rng)))
            if best == full:
                break
        ranks.append(best if best == full else L.rank())
    span = span_dimension(gens)
    stab = next((n for n, r in enumerate(ranks) if r == span), None)
    return LieAnalysis(tuple(ranks), stab, span)
