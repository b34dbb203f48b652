"""Monotone derivative symbols and the invariant derivations D1, D2.

A monotone symbol b[i,j] stands for D1^i D2^j (b): all D2 letters act
first, then all D1 letters.  For a normalized invariant base such as
I[3,0] the undifferentiated symbol is the invariant itself.  The only
non-trivial rule is the commutator [D2, D1] = phi*D1 + psi*D2.
"""

from __future__ import annotations

import itertools
import re
from typing import Dict, Optional, Sequence, Tuple

from mframe.algebra import DiffExpr, Symbol, deriv, inv_I, word
from mframe.algebra.symbols import DERIV, INV, WORD, inv_base_name


class DerivationError(ValueError):
    pass


_INV_BASE = re.compile(r"^([A-Za-z][A-Za-z0-9]*)\[(\d+(?:,\d+)*)\]$")


def mono_parts(s: Symbol) -> Optional[Tuple[str, int, int]]:
    """(base, i, j) for a monotone symbol, else None."""
    if s.kind == DERIV:
        return s.name, s.idx[0], s.idx[1]
    if s.kind == INV and s.name != "H":
        return inv_base_name(s), 0, 0
    return None


def mono_symbol(base: str, i: int = 0, j: int = 0) -> Symbol:
    """Monotone symbol D1^i D2^j(base); undifferentiated invariants stay INV."""
    if i == 0 and j == 0:
        m = _INV_BASE.match(base)
        if m:
            return inv_I(tuple(int(k) for k in m.group(2).split(",")), m.group(1))
    return deriv(base, i, j)


def mono(base: str, i: int = 0, j: int = 0) -> DiffExpr:
    return DiffExpr.sym(mono_symbol(base, i, j))


def base_of(target) -> str:
    """Base name of a symbol-valued target (string, Symbol or DiffExpr)."""
    if isinstance(target, str):
        return target
    if isinstance(target, DiffExpr):
        syms = target.symbols()
        if len(syms) == 1 and target == DiffExpr.sym(next(iter(syms))):
            target = next(iter(syms))
        else:
            raise DerivationError(f"{target} is not a single base symbol")
    parts = mono_parts(target)
    if parts is None or parts[1:] != (0, 0):
        raise DerivationError(f"{target} is not an undifferentiated base")
    return parts[0]


class DerivAlgebra:
    """Invariant derivations acting on expressions in monotone symbols.

    ``phi`` and ``psi`` are the commutator invariants, themselves written in
    monotone symbols.  D2 images of symbols with i > 0 are memoized; the
    cache only ever gains entries that are pure functions of the key.
    """

    def __init__(self, phi, psi):
        self.phi = DiffExpr.coerce(phi)
        self.psi = DiffExpr.coerce(psi)
        for e in (self.phi, self.psi):
            for s in e.symbols():
                if mono_parts(s) is None and s.kind != WORD:
                    raise DerivationError(f"commutator invariant involves non-monotone symbol {s}")
        self._d2: Dict[Symbol, DiffExpr] = {}

    # single symbols ----------------------------------------------------

    def symbol_derivative(self, s: Symbol, k: int) -> Optional[DiffExpr]:
        parts = mono_parts(s)
        if parts is None:
            if s.kind == WORD:
                raise DerivationError(f"normalize {s} before differentiating it")
            return None  # constants and parameters
        base, i, j = parts
        if k == 1:
            return mono(base, i + 1, j)
        if k != 2:
            raise DerivationError(f"invariant derivation index {k} is not 1 or 2")
        if i == 0:
            return mono(base, 0, j + 1)
        got = self._d2.get(s)
        if got is None:
            # D2 D1 g = D1 D2 g + phi D1 g + psi D2 g with g = b[i-1,j]
            g = mono_symbol(base, i - 1, j)
            d2g = self.symbol_derivative(g, 2)
            got = self.apply(d2g, 1) + self.phi * DiffExpr.sym(s) + self.psi * d2g
            self._d2[s] = got
        return got

    # expressions -------------------------------------------------------

    def apply(self, e, k: int) -> DiffExpr:
        """D_k e by the Leibniz and quotient rules."""
        e = DiffExpr.coerce(e)
        return e.derive_with(lambda s: self.symbol_derivative(s, k))

    def apply_word(self, e, letters: Sequence[int]) -> DiffExpr:
        """Operator product letters[0] letters[1] ... applied to e (rightmost first)."""
        out = DiffExpr.coerce(e)
        for k in reversed(tuple(letters)):
            out = self.apply(out, k)
        return out

    def monotone(self, e, i: int, j: int) -> DiffExpr:
        """D1^i D2^j e."""
        return self.apply_word(e, (1,) * i + (2,) * j)

    def normalize_word(self, letters: Sequence[int], target) -> DiffExpr:
        """Word applied to a base symbol, rewritten in monotone symbols."""
        return self.apply_word(mono(base_of(target)), letters)

    def normalize_word_outer(self, letters: Sequence[int], target) -> DiffExpr:
        """Same value as :meth:`normalize_word`, by leftmost adjacent swaps.

        Independent of the memoized D2 rule: a word A 2 1 B becomes
        A 1 2 B + A(phi * 1B) + A(psi * 2B) and A is pushed through the
        products by expanding over subsets of its letters.
        """
        return _WordRewriter(self.phi, self.psi).word(tuple(letters), mono(base_of(target)))

    def normalize(self, e) -> DiffExpr:
        """Replace every word symbol W[..](b) by its monotone expansion."""
        e = DiffExpr.coerce(e)
        binds = {s: self.normalize_word(s.idx, s.name) for s in e.symbols() if s.kind == WORD}
        return e.subs(binds) if binds else e


def word_symbol(letters: Sequence[int], base: str) -> DiffExpr:
    """Unnormalized symbol for an arbitrary word applied to a base."""
    letters = tuple(letters)
    if list(letters) == sorted(letters):
        return mono(base, letters.count(1), letters.count(2))
    return DiffExpr.sym(word(base, letters))


class _WordRewriter:
    """Slow word-level normalizer used as an oracle for DerivAlgebra."""

    def __init__(self, phi: DiffExpr, psi: DiffExpr):
        self.phi = phi
        self.psi = psi
        self._memo: Dict[Tuple[Tuple[int, ...], DiffExpr], DiffExpr] = {}

    def word(self, w: Tuple[int, ...], f: DiffExpr) -> DiffExpr:
        """Normal form of the word w applied to a single symbol f."""
        (s,) = f.symbols()
        parts = mono_parts(s)
        if parts is None:
            return f if not w else DiffExpr.const(0)
        base, i, j = parts
        w = w + (1,) * i + (2,) * j
        key = (w, base)
        got = self._memo.get(key)
        if got is not None:
            return got
        pos = next((p for p in range(len(w) - 1) if w[p] == 2 and w[p + 1] == 1), None)
        if pos is None:
            out = mono(base, w.count(1), w.count(2))
        else:
            A, B = w[:pos], w[pos + 2:]
            b = mono(base)
            out = self.word(A + (1, 2) + B, b)
            out = out + self.leibniz(A, self.phi, self.word((1,) + B, b))
            out = out + self.leibniz(A, self.psi, self.word((2,) + B, b))
        self._memo[key] = out
        return out

    def expr(self, w: Tuple[int, ...], e: DiffExpr) -> DiffExpr:
        """Word applied to a polynomial in monotone symbols."""
        if not w:
            return e
        if not e.is_polynomial():
            raise DerivationError("the word oracle handles polynomial expressions only")
        total = DiffExpr.const(0)
        for m, c in e.num.scale(1 / e.den.constant_value()).terms.items():
            factors = []
            for s, k in m:
                factors.extend([DiffExpr.sym(s)] * k)
            total = total + self.product(w, factors).__mul__(DiffExpr.const(c))
        return total

    def product(self, w: Tuple[int, ...], factors) -> DiffExpr:
        if not factors:
            return DiffExpr.const(1) if not w else DiffExpr.const(0)
        if len(factors) == 1:
            return self.word(w, factors[0])
        head, rest = factors[0], factors[1:]
        total = DiffExpr.const(0)
        n = len(w)
        for r in range(n + 1):
            for S in itertools.combinations(range(n), r):
                left = tuple(w[p] for p in S)
                right = tuple(w[p] for p in range(n) if p not in S)
                a = self.word(left, head)
                if a.is_zero():
                    continue
                total = total + a * self.product(right, rest)
        return total

    def leibniz(self, w: Tuple[int, ...], g: DiffExpr, h: DiffExpr) -> DiffExpr:
        """The word w applied to the product g*h."""
        n = len(w)
        total = DiffExpr.const(0)
        for r in range(n + 1):
            for S in itertools.combinations(range(n), r):
                left = tuple(w[p] for p in S)
                right = tuple(w[p] for p in range(n) if p not in S)
                total = total + self.expr(left, g) * self.expr(right, h)
        return total
