"""Sparse distributed polynomials with exact rational coefficients.

A monomial is a tuple of ``(Symbol, exponent)`` pairs sorted by symbol; a
polynomial maps monomials to nonzero ``mpq`` coefficients.  Instances are
treated as immutable once built.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional

from gmpy2 import mpq

from .symbols import Symbol

ZERO = mpq(0)
ONE = mpq(1)

Monomial = tuple


class AlgebraError(ArithmeticError):
    """Base class for errors raised by the exact arithmetic kernel."""


def to_mpq(c) -> mpq:
    if isinstance(c, Fraction):
        return mpq(c.numerator, c.denominator)
    return mpq(c)


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        sa, ea = a[i]
        sb, eb = b[j]
        if sa == sb:
            out.append((sa, ea + eb))
            i += 1
            j += 1
        elif sa < sb:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    if i < la:
        out.extend(a[i:])
    if j < lb:
        out.extend(b[j:])
    return tuple(out)


def mono_div(a: Monomial, b: Monomial) -> Optional[Monomial]:
    """Quotient a/b when b divides a, else None."""
    if not b:
        return a
    da = dict(a)
    for s, e in b:
        ea = da.get(s, 0)
        if ea < e:
            return None
        if ea == e:
            del da[s]
        else:
            da[s] = ea - e
    return tuple(sorted(da.items()))


def mono_gcd(a: Monomial, b: Monomial) -> Monomial:
    db = dict(b)
    return tuple((s, min(e, db[s])) for s, e in a if s in db)


def lex_key(m: Monomial):
    """Lexicographic key, largest symbol most significant."""
    return m[::-1]


def grlex_key(m: Monomial):
    return (sum(e for _, e in m), m[::-1])


class Poly:
    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Optional[dict] = None):
        self.terms = terms if terms is not None else {}
        self._hash = None

    # construction -------------------------------------------------------

    @staticmethod
    def const(c) -> "Poly":
        c = to_mpq(c)
        return Poly({(): c}) if c else Poly()

    @staticmethod
    def sym(s: Symbol, e: int = 1) -> "Poly":
        return Poly({((s, e),): ONE})

    @staticmethod
    def from_terms(items: Iterable) -> "Poly":
        d: dict = {}
        for m, c in items:
            c = to_mpq(c)
            v = d.get(m, ZERO) + c
            if v:
                d[m] = v
            else:
                d.pop(m, None)
        return Poly(d)

    # predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        t = self.terms
        return not t or (len(t) == 1 and () in t)

    def constant_value(self) -> mpq:
        if not self.is_constant():
            raise AlgebraError("polynomial is not constant")
        return self.terms.get((), ZERO)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def symbols(self) -> set:
        out = set()
        for m in self.terms:
            for s, _ in m:
                out.add(s)
        return out

    def __len__(self) -> int:
        return len(self.terms)

    def degree(self, s: Symbol) -> int:
        d = 0
        for m in self.terms:
            for t, e in m:
                if t == s:
                    if e > d:
                        d = e
                    break
        return d

    def total_degree(self) -> int:
        return max((sum(e for _, e in m) for m in self.terms), default=0)

    # comparisons --------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)) or type(other) is type(ONE):
            return self.terms == Poly.const(other).terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # arithmetic ---------------------------------------------------------

    @staticmethod
    def _coerce(other) -> "Poly":
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)) or type(other) is type(ONE):
            return Poly.const(other)
        raise TypeError(f"cannot coerce {type(other).__name__} to Poly")

    def __add__(self, other) -> "Poly":
        try:
            other = Poly._coerce(other)
        except TypeError:
            return NotImplemented
        if not other.terms:
            return self
        if not self.terms:
            return other
        a, b = (self, other) if len(self.terms) >= len(other.terms) else (other, self)
        d = dict(a.terms)
        for m, c in b.terms.items():
            v = d.get(m)
            if v is None:
                d[m] = c
            else:
                v = v + c
                if v:
                    d[m] = v
                else:
                    del d[m]
        return Poly(d)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        try:
            other = Poly._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return Poly._coerce(other) - self

    def scale(self, c) -> "Poly":
        c = to_mpq(c)
        if not c:
            return Poly()
        if c == 1:
            return self
        return Poly({m: v * c for m, v in self.terms.items()})

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            try:
                return self.scale(to_mpq(other))
            except (TypeError, ValueError):
                return NotImplemented
        if not self.terms or not other.terms:
            return Poly()
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            ((mb, cb),) = b.items()
            if not mb:
                return Poly({m: c * cb for m, c in a.items()})
            return Poly({mono_mul(m, mb): c * cb for m, c in a.items()})
        d: dict = {}
        get = d.get
        for mb, cb in b.items():
            for ma, ca in a.items():
                m = mono_mul(ma, mb)
                v = get(m)
                d[m] = ca * cb if v is None else v + ca * cb
        return Poly({m: c for m, c in d.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise AlgebraError("negative power of a polynomial")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # structure ----------------------------------------------------------

    def leading(self, key=lex_key):
        m = max(self.terms, key=key)
        return m, self.terms[m]

    def monic(self) -> "Poly":
        if not self.terms:
            return self
        _, c = self.leading()
        return self.scale(1 / c)

    def rational_content(self) -> mpq:
        """Positive rational c with self/c integral and primitive."""
        from math import gcd, lcm

        nums = 0
        dens = 1
        for c in self.terms.values():
            nums = gcd(nums, int(c.numerator))
            dens = lcm(dens, int(c.denominator))
        return mpq(nums, dens) if nums else ONE

    def primitive(self) -> "Poly":
        """Integral primitive associate with positive leading coefficient."""
        if not self.terms:
            return self
        p = self.scale(1 / self.rational_content())
        if p.leading()[1] < 0:
            p = -p
        return p

    def coeffs_in(self, s: Symbol) -> dict:
        """Map exponent k -> coefficient of s^k (polynomials free of s)."""
        out: dict = {}
        for m, c in self.terms.items():
            k = 0
            rest = m
            for pos, (t, e) in enumerate(m):
                if t == s:
                    k = e
                    rest = m[:pos] + m[pos + 1:]
                    break
            out.setdefault(k, {})[rest] = c
        return {k: Poly(v) for k, v in out.items()}

    def coeffs_in_many(self, syms: set) -> dict:
        """Group by the exponents of several symbols at once."""
        out: dict = {}
        for m, c in self.terms.items():
            key = tuple(p for p in m if p[0] in syms)
            rest = tuple(p for p in m if p[0] not in syms)
            out.setdefault(key, {})[rest] = c
        return {k: Poly(v) for k, v in out.items()}

    def coeff(self, s: Symbol, k: int = 1) -> "Poly":
        return self.coeffs_in(s).get(k, Poly())

    def monomial_content(self):
        """Split off the largest monomial dividing every term."""
        it = iter(self.terms)
        g = next(it)
        for m in it:
            g = mono_gcd(g, m)
            if not g:
                return (), self
        if not g:
            return (), self
        return g, Poly({mono_div(m, g): c for m, c in self.terms.items()})

    # calculus and substitution -----------------------------------------

    def derivation(self, image: Callable[[Symbol], Optional["Poly"]]) -> "Poly":
        """Apply the derivation sending each symbol s to image(s)."""
        cache: dict = {}
        d: dict = {}
        get = d.get
        for m, c in self.terms.items():
            for pos, (s, e) in enumerate(m):
                if s in cache:
                    img = cache[s]
                else:
                    img = image(s)
                    if img is not None and not img.terms:
                        img = None
                    cache[s] = img
                if img is None:
                    continue
                if e > 1:
                    rest = m[:pos] + ((s, e - 1),) + m[pos + 1:]
                else:
                    rest = m[:pos] + m[pos + 1:]
                coef = c * e
                for mi, ci in img.terms.items():
                    mm = mono_mul(rest, mi)
                    v = get(mm)
                    d[mm] = coef * ci if v is None else v + coef * ci
        return Poly({m: c for m, c in d.items() if c})

    def diff(self, s: Symbol) -> "Poly":
        one = Poly.const(1)
        return self.derivation(lambda t: one if t == s else None)

    def subs(self, bindings: Mapping[Symbol, "Poly"]) -> "Poly":
        """Simultaneous substitution of polynomials for symbols."""
        if not bindings:
            return self
        powers: dict = {}
        d: dict = {}
        get = d.get
        for m, c in self.terms.items():
            free = []
            factor = None
            for s, e in m:
                b = bindings.get(s)
                if b is None:
                    free.append((s, e))
                    continue
                key = (s, e)
                p = powers.get(key)
                if p is None:
                    p = b ** e
                    powers[key] = p
                factor = p if factor is None else factor * p
            free_m = tuple(free)
            if factor is None:
                v = get(free_m)
                d[free_m] = c if v is None else v + c
                continue
            for mf, cf in factor.terms.items():
                mm = mono_mul(free_m, mf)
                v = get(mm)
                d[mm] = c * cf if v is None else v + c * cf
        return Poly({m: c for m, c in d.items() if c})

    def evaluate(self, values: Mapping[Symbol, mpq]) -> mpq:
        total = ZERO
        for m, c in self.terms.items():
            t = c
            for s, e in m:
                try:
                    t *= values[s] ** e
                except KeyError:
                    raise AlgebraError(f"no value supplied for {s}") from None
            total += t
        return total

    def partial_evaluate(self, values: Mapping[Symbol, mpq]) -> "Poly":
        return self.subs({s: Poly.const(v) for s, v in values.items()})

    # division -----------------------------------------------------------

    def exact_div(self, other: "Poly") -> Optional["Poly"]:
        """Return q with self == q*other, or None if other does not divide."""
        if not other.terms:
            raise AlgebraError("division by the zero polynomial")
        if not self.terms:
            return Poly()
        if other.is_constant():
            return self.scale(1 / other.constant_value())
        if len(other.terms) == 1:
            ((mb, cb),) = other.terms.items()
            out = {}
            for m, c in self.terms.items():
                q = mono_div(m, mb)
                if q is None:
                    return None
                out[q] = c / cb
            return Poly(out)
        for s in other.symbols():
            if other.degree(s) > self.degree(s):
                return None
        lm, lc = other.leading()
        rest = [(m, c) for m, c in other.terms.items() if m != lm]
        r = dict(self.terms)
        keys = {m: lex_key(m) for m in r}
        q: dict = {}
        while r:
            m = max(r, key=keys.__getitem__)
            qm = mono_div(m, lm)
            if qm is None:
                return None
            c = r.pop(m) / lc
            q[qm] = c
            for mb, cb in rest:
                mm = mono_mul(qm, mb)
                v = r.get(mm, ZERO) - c * cb
                if v:
                    if mm not in r:
                        keys[mm] = lex_key(mm)
                    r[mm] = v
                else:
                    r.pop(mm, None)
        return Poly(q)

    def prem(self, g: "Poly", s: Symbol) -> "Poly":
        """Sparse pseudo-remainder of self by g with respect to s."""
        dg = g.degree(s)
        gc = g.coeffs_in(s)
        lc = gc[dg]
        tail = g - lc * Poly.sym(s, dg) if dg else Poly()
        f = self
        while not f.is_zero():
            df = f.degree(s)
            if df < dg:
                break
            fc = f.coeff(s, df)
            shift = Poly.sym(s, df - dg) if df > dg else Poly.const(1)
            f = (f - fc * Poly.sym(s, df)) * lc - fc * shift * tail
        return f

    # display ------------------------------------------------------------

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def __str__(self) -> str:
        from .printing import poly_str

        return poly_str(self)

    def __repr__(self) -> str:
        return f"Poly({self})"


# gcd ---------------------------------------------------------------------


def _content_wrt(p: Poly, syms: set) -> Poly:
    g = None
    for c in sorted(p.coeffs_in_many(syms).values(), key=len):
        g = c if g is None else _gcd(g, c)
        if g.is_constant():
            return Poly.const(1)
    return g.monic()


def _prs(f: Poly, g: Poly, s: Symbol) -> Poly:
    if f.degree(s) < g.degree(s):
        f, g = g, f
    while True:
        r = f.prem(g, s)
        if r.is_zero():
            return g
        if r.degree(s) == 0:
            return Poly.const(1)
        c = _content_wrt(r, {s})
        r = r.exact_div(c)
        f, g = g, r


def _gcd(a: Poly, b: Poly) -> Poly:
    if a.is_constant() or b.is_constant():
        return Poly.const(1)
    ma, a = a.monomial_content()
    mb, b = b.monomial_content()
    mono = Poly({mono_gcd(ma, mb): ONE})
    if a.is_constant() or b.is_constant():
        return mono
    small, big = (a, b) if len(a) <= len(b) else (b, a)
    if big.exact_div(small) is not None:
        return (small * mono).monic()
    sa, sb = a.symbols(), b.symbols()
    if not sa & sb:
        return mono
    if sa - sb:
        return (_gcd(_content_wrt(a, sa - sb), b) * mono).monic()
    if sb - sa:
        return (_gcd(a, _content_wrt(b, sb - sa)) * mono).monic()
    s = min(sa, key=lambda t: (max(a.degree(t), b.degree(t)), t))
    ca = _content_wrt(a, {s})
    cb = _content_wrt(b, {s})
    pa = a.exact_div(ca)
    pb = b.exact_div(cb)
    c = _gcd(ca, cb)
    g = _prs(pa, pb, s)
    if not g.is_constant():
        g = g.exact_div(_content_wrt(g, {s}))
    return (c * g * mono).monic()


def gcd(a: Poly, b: Poly) -> Poly:
    """Monic greatest common divisor over the rationals."""
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    return _gcd(a, b).monic()


def lcm(a: Poly, b: Poly) -> Poly:
    if a.is_zero() or b.is_zero():
        return Poly()
    g = gcd(a, b)
    return (a.exact_div(g) * b).monic()
