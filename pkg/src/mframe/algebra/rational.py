"""Exact rational functions over named symbols."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Mapping, Optional

from gmpy2 import mpq

from .poly import ONE, AlgebraError, Poly, gcd, to_mpq
from .symbols import Symbol


class DivisionByZero(AlgebraError, ZeroDivisionError):
    pass


class RecursiveBinding(AlgebraError):
    pass


_ONE_POLY = Poly.const(1)


class DiffExpr:
    """Quotient num/den kept in lowest terms with a monic denominator."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Poly, den: Optional[Poly] = None, *, reduced: bool = False):
        if den is None or (reduced and den.is_constant()):
            self.num, self.den = num, _ONE_POLY if den is None else den
        elif reduced:
            self.num, self.den = num, den
        else:
            self.num, self.den = _canonical(num, den)
        self._hash = None

    # construction -------------------------------------------------------

    @staticmethod
    def const(c) -> "DiffExpr":
        return DiffExpr(Poly.const(c))

    @staticmethod
    def sym(s: Symbol) -> "DiffExpr":
        return DiffExpr(Poly.sym(s))

    @staticmethod
    def coerce(x) -> "DiffExpr":
        if isinstance(x, DiffExpr):
            return x
        if isinstance(x, Poly):
            return DiffExpr(x)
        if isinstance(x, Symbol):
            return DiffExpr.sym(x)
        if isinstance(x, (int, Fraction)) or type(x) is type(ONE):
            return DiffExpr.const(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to DiffExpr")

    # predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> mpq:
        if not self.is_constant():
            raise AlgebraError(f"expression {self} is not constant")
        return self.num.constant_value()

    def symbols(self) -> set:
        return self.num.symbols() | self.den.symbols()

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffExpr):
            try:
                other = DiffExpr.coerce(other)
            except TypeError:
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __bool__(self) -> bool:
        return not self.is_zero()

    # arithmetic ---------------------------------------------------------

    def __add__(self, other) -> "DiffExpr":
        try:
            other = DiffExpr.coerce(other)
        except TypeError:
            return NotImplemented
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.is_polynomial() and other.is_polynomial():
            return DiffExpr(self.num + other.num)
        if self.den == other.den:
            return DiffExpr(self.num + other.num, self.den)
        g = gcd(self.den, other.den)
        a = self.den.exact_div(g)
        b = other.den.exact_div(g)
        return DiffExpr(self.num * b + other.num * a, a * other.den)

    __radd__ = __add__

    def __neg__(self) -> "DiffExpr":
        return DiffExpr(-self.num, self.den, reduced=True)

    def __sub__(self, other) -> "DiffExpr":
        try:
            other = DiffExpr.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "DiffExpr":
        return DiffExpr.coerce(other) - self

    def __mul__(self, other) -> "DiffExpr":
        try:
            other = DiffExpr.coerce(other)
        except TypeError:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return DiffExpr(Poly())
        if self.is_polynomial() and other.is_polynomial():
            return DiffExpr(self.num * other.num)
        g1 = gcd(self.num, other.den)
        g2 = gcd(other.num, self.den)
        n = self.num.exact_div(g1) * other.num.exact_div(g2)
        d = self.den.exact_div(g2) * other.den.exact_div(g1)
        return DiffExpr(n, d, reduced=True)._normalized()

    __rmul__ = __mul__

    def __truediv__(self, other) -> "DiffExpr":
        other = DiffExpr.coerce(other)
        if other.is_zero():
            raise DivisionByZero(f"division of {self} by the zero expression")
        return self * DiffExpr(other.den, other.num)

    def __rtruediv__(self, other) -> "DiffExpr":
        return DiffExpr.coerce(other) / self

    def __pow__(self, n: int) -> "DiffExpr":
        if n < 0:
            return DiffExpr.const(1) / (self ** (-n))
        return DiffExpr(self.num ** n, self.den ** n, reduced=True)._normalized()

    def _normalized(self) -> "DiffExpr":
        if self.den.is_constant():
            return DiffExpr(self.num.scale(1 / self.den.constant_value()))
        _, c = self.den.leading()
        if c != 1:
            return DiffExpr(self.num.scale(1 / c), self.den.scale(1 / c), reduced=True)
        return self

    # calculus and substitution -----------------------------------------

    def derivation(self, image: Callable[[Symbol], Optional[Poly]]) -> "DiffExpr":
        dn = self.num.derivation(image)
        if self.is_polynomial():
            return DiffExpr(dn.scale(1 / self.den.constant_value()))
        dd = self.den.derivation(image)
        return DiffExpr(dn * self.den - self.num * dd, self.den * self.den)

    def derive_with(self, image: Callable[[Symbol], Optional["DiffExpr"]]) -> "DiffExpr":
        """Derivation whose symbol images may be rational expressions."""
        imgs = {}
        for s in self.symbols():
            v = image(s)
            if v is not None:
                v = DiffExpr.coerce(v)
                if not v.is_zero():
                    imgs[s] = v
        if not imgs:
            return DiffExpr(Poly())
        if all(v.is_polynomial() for v in imgs.values()):
            polys = {s: v.num.scale(1 / v.den.constant_value()) for s, v in imgs.items()}
            return self.derivation(polys.get)
        total = DiffExpr(Poly())
        for s, v in sorted(imgs.items()):
            total = total + self.diff(s) * v
        return total

    def diff(self, s: Symbol) -> "DiffExpr":
        """Formal partial derivative by one symbol."""
        one = Poly.const(1)
        return self.derivation(lambda t: one if t == s else None)

    def subs(self, bindings: Mapping[Symbol, "DiffExpr"]) -> "DiffExpr":
        """Simultaneous substitution; bound symbols may not occur in values."""
        if not bindings:
            return self
        vals = {s: DiffExpr.coerce(v) for s, v in bindings.items()}
        bound = set(vals)
        for s, v in vals.items():
            clash = v.symbols() & bound
            if clash:
                names = ", ".join(sorted(str(c) for c in clash))
                raise RecursiveBinding(f"value bound to {s} mentions bound symbol(s) {names}")
        mine = self.symbols()
        vals = {s: v for s, v in vals.items() if s in mine}
        if not vals:
            return self
        if all(v.is_polynomial() for v in vals.values()):
            pb = {s: v.num.scale(1 / v.den.constant_value()) for s, v in vals.items()}
            return DiffExpr(self.num.subs(pb)) / DiffExpr(self.den.subs(pb))
        return _eval_poly(self.num, vals) / _eval_poly(self.den, vals)

    def evaluate(self, values: Mapping[Symbol, mpq]) -> mpq:
        d = self.den.evaluate(values)
        if not d:
            raise DivisionByZero(f"denominator {self.den} vanishes at the given point")
        return self.num.evaluate(values) / d

    # display ------------------------------------------------------------

    def __str__(self) -> str:
        from .printing import expr_str

        return expr_str(self)

    def __repr__(self) -> str:
        return f"DiffExpr({self})"


def _canonical(num: Poly, den: Poly):
    if den.is_zero():
        raise DivisionByZero("zero denominator")
    if num.is_zero():
        return Poly(), _ONE_POLY
    if den.is_constant():
        return num.scale(1 / den.constant_value()), _ONE_POLY
    g = gcd(num, den)
    if not g.is_constant():
        num = num.exact_div(g)
        den = den.exact_div(g)
    if den.is_constant():
        return num.scale(1 / den.constant_value()), _ONE_POLY
    _, c = den.leading()
    if c != 1:
        num, den = num.scale(1 / c), den.scale(1 / c)
    return num, den


def _eval_poly(p: Poly, vals: Mapping[Symbol, DiffExpr]) -> DiffExpr:
    """Evaluate p with rational-function values for some symbols."""
    total = DiffExpr(Poly())
    for m, c in p.terms.items():
        free = []
        t = DiffExpr.const(c)
        for s, e in m:
            v = vals.get(s)
            if v is None:
                free.append((s, e))
            else:
                t = t * v ** e
        total = total + t * DiffExpr(Poly({tuple(free): to_mpq(1)}))
    return total


def as_expr(x) -> DiffExpr:
    return DiffExpr.coerce(x)
