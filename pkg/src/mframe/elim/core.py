"""Reduction, Delta-polynomials, quasilinear solving and zero verification."""

from __future__ import annotations

import random
from math import comb
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Sequence, Tuple

from gmpy2 import mpq

from mframe.algebra import DiffExpr, DivisionByZero, Poly, RatMatrix, SingularMatrix, Symbol
from mframe.invderiv import DerivAlgebra, mono_parts, mono_symbol

from .ranking import Ranking


class EliminationError(ValueError):
    pass


def _as_poly(e) -> Tuple[Poly, Optional[Poly]]:
    """Numerator of e (as relation e = 0) and the cleared denominator."""
    e = DiffExpr.coerce(e)
    if e.is_polynomial():
        return e.num.scale(1 / e.den.constant_value()), None
    return e.num, e.den


def _normal(p: Poly) -> Poly:
    return p.primitive()


class RankedPoly:
    """A differential polynomial with its leader under a ranking.

    The body is kept primitive over the rationals; the relation it encodes is
    body = 0.  Denominators cleared on construction are kept as side
    conditions.
    """

    __slots__ = ("poly", "ranking", "name", "side_conditions", "leader", "degree")

    def __init__(self, body, ranking: Ranking, name: str = "", side_conditions: Sequence = ()):
        if isinstance(body, Poly):
            poly, den = body, None
        else:
            poly, den = _as_poly(body)
        self.poly = _normal(poly)
        self.ranking = ranking
        self.name = name
        sides = list(side_conditions)
        if den is not None and not den.is_constant():
            sides.append(DiffExpr(den))
        self.side_conditions = tuple(sides)
        self.leader = ranking.leader(self.poly.symbols())
        self.degree = self.poly.degree(self.leader) if self.leader is not None else 0

    @property
    def body(self) -> DiffExpr:
        return DiffExpr(self.poly)

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    @property
    def initial(self) -> Poly:
        return self.poly.coeff(self.leader, self.degree) if self.leader is not None else self.poly

    @property
    def separant(self) -> Poly:
        return self.poly.diff(self.leader) if self.leader is not None else Poly()

    def renamed(self, name: str) -> "RankedPoly":
        return RankedPoly(self.poly, self.ranking, name, self.side_conditions)

    def linear_in(self, symbols) -> bool:
        """Degree at most one jointly in the given symbols."""
        syms = set(symbols)
        for m in self.poly.terms:
            if sum(e for s, e in m if s in syms) > 1:
                return False
        return True

    def __repr__(self) -> str:
        return f"RankedPoly({self.name or '?'}, leader={self.leader})"


def _leader_parts(q: RankedPoly):
    if q.leader is None:
        return None
    return mono_parts(q.leader)


class Deriver:
    """Monotone derivatives D1^a D2^b of system members, memoized."""

    def __init__(self, alg: DerivAlgebra):
        self.alg = alg
        self._memo: Dict[Tuple[Poly, int, int], Poly] = {}

    def __call__(self, p: Poly, a: int, b: int) -> Poly:
        if a == 0 and b == 0:
            return p
        key = (p, a, b)
        got = self._memo.get(key)
        if got is None:
            e = self.alg.apply_word(DiffExpr(p), (1,) * a + (2,) * b)
            got, den = _as_poly(e)
            if den is not None:
                raise EliminationError("derivative of a polynomial relation is not polynomial")
            self._memo[key] = got
        return got


def _find_reducer(f: Poly, members: Sequence[RankedPoly], ranking: Ranking):
    for v in ranking.sort(f.symbols(), reverse=True):
        base, i, j = mono_parts(v)
        for q in members:
            lp = _leader_parts(q)
            if lp is None or lp[0] != base:
                continue
            a, b = i - lp[1], j - lp[2]
            if a < 0 or b < 0:
                continue
            if a == 0 and b == 0 and f.degree(v) < q.degree:
                continue
            return v, q, a, b
    return None


def reduce(p: RankedPoly, system: Sequence[RankedPoly], ranking: Ranking, alg: DerivAlgebra,
           deriver: Optional[Deriver] = None, max_steps: int = 10000) -> RankedPoly:
    """Pseudo-reduce p by the system and the monotone derivatives of its members.

    Members sharing a leader are tried in list order.  The loop stops when
    no symbol of the result is a derivative (or a high enough power) of a
    member's leader; termination follows from the ranking being a well-order.
    """
    members = [q for q in system if q.leader is not None]
    deriver = deriver or Deriver(alg)
    f = p.poly
    for _ in range(max_steps):
        if f.is_zero():
            break
        hit = _find_reducer(f, members, ranking)
        if hit is None:
            break
        v, q, a, b = hit
        g = deriver(q.poly, a, b)
        if ranking.leader(g.symbols()) != v:
            raise EliminationError(f"derivative of {q.name or 'member'} does not have leader {v}")
        if g.coeff(v, g.degree(v)).is_zero():
            raise EliminationError(f"zero initial for {v}")
        f = _normal(f.prem(g, v))
    else:
        raise EliminationError("reduction did not terminate within the step budget")
    return RankedPoly(f, ranking, p.name, p.side_conditions)


def delta_polynomial(p: RankedPoly, q: RankedPoly, ranking: Ranking, alg: DerivAlgebra,
                     deriver: Optional[Deriver] = None) -> RankedPoly:
    """Cross-derivative of p and q at the least common derivative of their leaders."""
    lp, lq = _leader_parts(p), _leader_parts(q)
    if lp is None or lq is None:
        raise EliminationError("Delta-polynomial of a relation without leader")
    if lp[0] != lq[0]:
        raise EliminationError(f"leaders {p.leader} and {q.leader} have different bases")
    deriver = deriver or Deriver(alg)
    I, J = max(lp[1], lq[1]), max(lp[2], lq[2])
    lcd = mono_symbol(lp[0], I, J)
    f = deriver(p.poly, I - lp[1], J - lp[2])
    g = deriver(q.poly, I - lq[1], J - lq[2])
    if f.degree(lcd) >= g.degree(lcd):
        out = f.prem(g, lcd)
    else:
        out = g.prem(f, lcd)
    return RankedPoly(out, ranking, "", p.side_conditions + q.side_conditions)


# solving ---------------------------------------------------------------


@dataclass(frozen=True)
class Solution:
    values: Dict[Symbol, DiffExpr]
    determinant: DiffExpr
    side_conditions: Tuple[DiffExpr, ...]

    def __getitem__(self, s: Symbol) -> DiffExpr:
        return self.values[s]


def solve_quasilinear(system: Sequence, targets: Sequence[Symbol]) -> Solution:
    """Solve linear equations (jointly degree one in the targets) exactly."""
    targets = list(targets)
    polys = [q.poly if isinstance(q, RankedPoly) else _as_poly(q)[0] for q in system]
    if len(polys) != len(targets):
        raise EliminationError(f"{len(polys)} relations for {len(targets)} unknowns")
    tset = set(targets)
    A, b = [], []
    for f in polys:
        for m in f.terms:
            if sum(e for s, e in m if s in tset) > 1:
                raise EliminationError("relation is not linear in the unknowns")
        groups = f.coeffs_in_many(tset)
        row = []
        for t in targets:
            row.append(DiffExpr(groups.get(((t, 1),), Poly())))
        A.append(row)
        b.append([-DiffExpr(groups.get((), Poly()))])
    for f in polys:
        for s in f.symbols():
            parts = mono_parts(s)
            if s not in tset and parts and any(
                parts[0] == mono_parts(t)[0] for t in targets if mono_parts(t)
            ):
                raise EliminationError(f"relation still involves {s}")
    if all(x.is_polynomial() for row in A for x in row) and all(r[0].is_polynomial() for r in b):
        det, values = _cramer([[_as_poly(x)[0] for x in row] for row in A], [_as_poly(r[0])[0] for r in b], targets)
    else:
        M = RatMatrix(A)
        det = M.det()
        if det.is_zero():
            raise SingularMatrix("linear system for the unknowns is singular", det)
        sol = M.solve(RatMatrix(b))
        values = {t: sol[k, 0] for k, t in enumerate(targets)}
    sides = []
    if not det.is_constant():
        sides.append(det)
    for v in values.values():
        if not v.is_polynomial() and DiffExpr(v.den) not in sides:
            sides.append(DiffExpr(v.den))
    return Solution(values, det, tuple(sides))


def _poly_det(M):
    n = len(M)
    if n == 1:
        return M[0][0]
    total = Poly()
    for k in range(n):
        if M[0][k].is_zero():
            continue
        minor = [row[:k] + row[k + 1:] for row in M[1:]]
        t = M[0][k] * _poly_det(minor)
        total = total + t if k % 2 == 0 else total - t
    return total


def _cramer(A, b, targets):
    """Exact Cramer's rule for small polynomial systems; one gcd per unknown."""
    det = _poly_det(A)
    if det.is_zero():
        raise SingularMatrix("linear system for the unknowns is singular", DiffExpr(det))
    values = {}
    for k, t in enumerate(targets):
        Ak = [row[:k] + [b[r]] + row[k + 1:] for r, row in enumerate(A)]
        values[t] = DiffExpr(_poly_det(Ak), det)
    return DiffExpr(det), values


# substitution and verification ------------------------------------------


def cleared_subs(p: Poly, values: Mapping[Symbol, Tuple[Poly, Poly]]) -> Poly:
    """p(values) times prod den_s^deg_s(p), for values given as (num, den) pairs.

    No gcd is taken, so the result is exact but not reduced.
    """
    syms = sorted(s for s in p.symbols() if s in values)
    if not syms:
        return p
    deg = {s: p.degree(s) for s in syms}
    cache: Dict[Tuple[Symbol, int], Poly] = {}

    def factor(s, e):
        got = cache.get((s, e))
        if got is None:
            num, den = values[s]
            got = num ** e * den ** (deg[s] - e)
            cache[(s, e)] = got
        return got

    total = Poly()
    sset = set(syms)
    for m, c in p.terms.items():
        t = Poly({tuple(x for x in m if x[0] not in sset): c})
        exps = dict(x for x in m if x[0] in sset)
        for s in syms:
            t = t * factor(s, exps.get(s, 0))
        total = total + t
    return total


def _formula_bases(formulas: Mapping[Symbol, object]) -> Dict[str, DiffExpr]:
    out = {}
    for s, f in formulas.items():
        parts = mono_parts(s)
        if parts is None or parts[1:] != (0, 0):
            raise EliminationError(f"can only substitute for an undifferentiated base, not {s}")
        out[parts[0]] = DiffExpr.coerce(f)
    return out


class Substituter:
    """Replace a base and all its monotone derivatives by a formula.

    Derivatives of a rational formula are kept as unreduced (num, den)
    pairs, D(N/Q) = (D(N) Q - N D(Q)) / Q^2, so no gcd is ever needed.
    """

    def __init__(self, alg: DerivAlgebra, formulas: Mapping[Symbol, object]):
        self.alg = alg
        self.formulas = _formula_bases(formulas)
        self._memo: Dict[Tuple[str, int, int], Tuple[Poly, Poly]] = {}

    def _d(self, p: Poly, k: int) -> Poly:
        return _as_poly(self.alg.apply(DiffExpr(p), k))[0]

    def pair(self, base: str, i: int, j: int) -> Tuple[Poly, Poly]:
        key = (base, i, j)
        got = self._memo.get(key)
        if got is None:
            if i == 0 and j == 0:
                f = self.formulas[base]
                got = (f.num, f.den)
            else:
                k = 1 if i > 0 else 2
                num, den = self.pair(base, i - 1, j) if i > 0 else self.pair(base, 0, j - 1)
                if den.is_constant():
                    got = (self._d(num, k), den)
                else:
                    got = (self._d(num, k) * den - num * self._d(den, k), den * den)
            self._memo[key] = got
        return got

    def bindings(self, symbols) -> Dict[Symbol, Tuple[Poly, Poly]]:
        out = {}
        for s in sorted(symbols):
            parts = mono_parts(s)
            if parts and parts[0] in self.formulas:
                out[s] = self.pair(*parts)
        return out

    def __call__(self, e) -> DiffExpr:
        """Reduced substitution into an expression (uses gcds; for small inputs)."""
        e = DiffExpr.coerce(e)
        binds = {s: DiffExpr(n) / DiffExpr(d) for s, (n, d) in self.bindings(e.symbols()).items()}
        return e.subs(binds)

    def cleared(self, p: Poly) -> Poly:
        return cleared_subs(p, self.bindings(p.symbols()))


def random_point_value(seed, trial: int, s: Symbol) -> mpq:
    """Reproducible random rational attached to a symbol, independent of call order."""
    rng = random.Random(f"{seed}:{trial}:{s.kind}:{s.name}:{s.idx}")
    return mpq(rng.choice([k for k in range(-9, 10) if k]), rng.randint(1, 5))


class PointEvaluator:
    """Exact values at a random point of the normalized invariants.

    Monotone symbols are expanded through ``expander``; bases bound to a
    formula are evaluated by pushing the derivations through the formula
    with the Leibniz rule, so the derivatives of a long rational formula are
    never formed symbolically as quotients.
    """

    def __init__(self, alg: DerivAlgebra, expander, formulas: Mapping[Symbol, object] = None,
                 seed=0, trial: int = 0, cache: Optional[dict] = None):
        self.alg = alg
        self.expander = expander
        self.formulas = _formula_bases(formulas or {})
        self.seed, self.trial = seed, trial
        self._values: Dict[Symbol, mpq] = {}
        self._inv: Dict[Tuple[str, int, int], mpq] = {}
        # symbolic derivatives of formula parts do not depend on the point
        self._sym = cache if cache is not None else {}

    def coordinate(self, s: Symbol) -> mpq:
        return random_point_value(self.seed, self.trial, s)

    def symbol(self, s: Symbol) -> mpq:
        got = self._values.get(s)
        if got is not None:
            return got
        parts = mono_parts(s)
        if parts is not None and parts[0] in self.formulas:
            base, i, j = parts
            got = self._formula_value(base, i, j)
        else:
            v = self.expander.symbol_value(s) if self.expander is not None else None
            if v is None:
                got = self.coordinate(s)
            else:
                got = self._coords(v)
        self._values[s] = got
        return got

    def _coords(self, e: DiffExpr) -> mpq:
        # expanded values live on the normalized invariants themselves
        vals = {t: self.coordinate(t) for t in e.symbols()}
        d = e.den.evaluate(vals)
        if not d:
            raise DivisionByZero(f"denominator vanishes at sample point {self.trial}")
        return e.num.evaluate(vals) / d

    def poly(self, p: Poly) -> mpq:
        return p.evaluate({s: self.symbol(s) for s in p.symbols()})

    def expr(self, e) -> mpq:
        e = DiffExpr.coerce(e)
        d = self.poly(e.den)
        if not d:
            raise DivisionByZero(f"denominator vanishes at sample point {self.trial}")
        return self.poly(e.num) / d

    def _part(self, base: str, which: int, a: int, b: int) -> Poly:
        key = (base, which, a, b)
        got = self._sym.get(key)
        if got is None:
            f = self.formulas[base]
            if a == 0 and b == 0:
                got = f.num if which == 0 else f.den
            else:
                prev = self._part(base, which, a - 1, b) if a > 0 else self._part(base, which, 0, b - 1)
                got = _as_poly(self.alg.apply(DiffExpr(prev), 1 if a > 0 else 2))[0]
            self._sym[key] = got
        return got

    def _formula_value(self, base: str, i: int, j: int) -> mpq:
        # D1^i D2^j (N * g) with g = 1/Q, both factors expanded by Leibniz
        inv = {}
        q0 = self.poly(self._part(base, 1, 0, 0))
        if not q0:
            raise DivisionByZero(f"formula for {base} has a vanishing denominator at sample point {self.trial}")
        for a in range(i + 1):
            for b in range(j + 1):
                if a == 0 and b == 0:
                    inv[(0, 0)] = 1 / q0
                    continue
                acc = mpq(0)
                for c in range(a + 1):
                    for e in range(b + 1):
                        if c == 0 and e == 0:
                            continue
                        acc += comb(a, c) * comb(b, e) * self.poly(self._part(base, 1, c, e)) * inv[(a - c, b - e)]
                inv[(a, b)] = -acc / q0
        total = mpq(0)
        for c in range(i + 1):
            for e in range(j + 1):
                total += comb(i, c) * comb(j, e) * self.poly(self._part(base, 0, c, e)) * inv[(i - c, j - e)]
        return total


@dataclass
class VerifyResult:
    ok: bool
    residual: Optional[DiffExpr]
    stage: str  # "symbolic", "invariants", "points" or "failed"
    trials: int = 0
    trial_failures: int = 0

    def __bool__(self) -> bool:
        return self.ok


def _merge(relations: Sequence[Mapping[Symbol, object]]) -> Dict[Symbol, DiffExpr]:
    out: Dict[Symbol, DiffExpr] = {}
    for rel in relations:
        for s, f in rel.items():
            out[s] = DiffExpr.coerce(f)
    return out


def verify_zero(e, relations: Sequence[Mapping[Symbol, object]], alg: DerivAlgebra,
                expander=None, trials: int = 0, seed=0, symbolic: bool = True) -> VerifyResult:
    """Does e vanish once the relations are substituted?

    ``relations`` are maps base -> formula, applied in order to the base and
    all its derivatives.  The symbolic stage substitutes with cleared
    denominators; if the result is not already zero it is expanded through
    ``expander`` into normalized invariants, where vanishing is exact.
    With ``trials`` > 0, e is also evaluated exactly at that many random
    rational points of the normalized invariants.  ``symbolic=False`` skips
    the symbolic stages (for formulas too long to expand) and decides by the
    sample points alone.
    """
    e = DiffExpr.coerce(e)
    res = VerifyResult(False, None, "failed")
    if symbolic:
        f = e.num
        for rel in relations:
            f = Substituter(alg, rel).cleared(f)
        if f.is_zero():
            res = VerifyResult(True, DiffExpr.const(0), "symbolic")
        elif expander is None:
            return VerifyResult(False, DiffExpr(f), "failed")
        else:
            g = cleared_subs(f, {s: (v.num, v.den) for s, v in expander.bindings(DiffExpr(f)).items()})
            if not g.is_zero():
                return VerifyResult(False, DiffExpr(g.primitive()), "failed")
            res = VerifyResult(True, DiffExpr.const(0), "invariants")
    if trials:
        if expander is None:
            raise EliminationError("point evaluation needs an expander into normalized invariants")
        formulas = _merge(relations)
        cache: dict = {}
        fails, first = 0, None
        done, attempt = 0, 0
        while done < trials:
            if attempt > 4 * trials + 10:
                raise EliminationError("too many sample points hit a vanishing denominator")
            ev = PointEvaluator(alg, expander, formulas, seed, attempt, cache)
            attempt += 1
            try:
                v = ev.expr(e)
            except DivisionByZero:
                continue
            done += 1
            if v != 0:
                fails += 1
                first = first if first is not None else v
        res.trials, res.trial_failures = trials, fails
        if symbolic:
            res.ok = res.ok and fails == 0
        else:
            res.ok = fails == 0
            res.stage = "points" if res.ok else "failed"
            res.residual = DiffExpr.const(0 if first is None else first)
    return res
