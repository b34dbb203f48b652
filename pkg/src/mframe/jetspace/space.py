"""The jet space J^n for p independent and q dependent variables."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, List, Tuple

from mframe.algebra import DiffExpr, Poly, Symbol, indep, jet
from mframe.algebra.symbols import INDEP, JET

MultiIndex = Tuple[int, ...]


def multi_indices(p: int, n: int) -> List[MultiIndex]:
    """Multi-indices of order exactly n, more x-derivatives first."""
    if p == 1:
        return [(n,)]
    out = []
    for k in range(n, -1, -1):
        for rest in multi_indices(p - 1, n - k):
            out.append((k,) + rest)
    return out


def add_index(J: MultiIndex, i: int, k: int = 1) -> MultiIndex:
    return J[:i] + (J[i] + k,) + J[i + 1:]


@dataclass(frozen=True)
class JetSpace:
    independent: Tuple[str, ...] = ("x", "y")
    dependent: Tuple[str, ...] = ("u",)

    @property
    def p(self) -> int:
        return len(self.independent)

    @property
    def q(self) -> int:
        return len(self.dependent)

    @cached_property
    def base_symbols(self) -> Tuple[Symbol, ...]:
        return self.x_symbols + tuple(self.jet(a, self.zero) for a in range(self.q))

    @cached_property
    def x_symbols(self) -> Tuple[Symbol, ...]:
        return tuple(indep(n, i) for i, n in enumerate(self.independent))

    @property
    def zero(self) -> MultiIndex:
        return (0,) * self.p

    def unit(self, i: int) -> MultiIndex:
        return tuple(1 if k == i else 0 for k in range(self.p))

    def jet(self, alpha: int, J: MultiIndex) -> Symbol:
        return jet(self.dependent[alpha], J)

    def x(self, i: int) -> DiffExpr:
        return DiffExpr.sym(self.x_symbols[i])

    def u(self, J: MultiIndex = None, alpha: int = 0) -> DiffExpr:
        return DiffExpr.sym(self.jet(alpha, self.zero if J is None else tuple(J)))

    def dep_index(self, s: Symbol) -> int:
        return self.dependent.index(s.name)

    def multi_indices(self, n: int) -> List[MultiIndex]:
        return multi_indices(self.p, n)

    def indices_upto(self, n: int) -> Iterator[MultiIndex]:
        for k in range(n + 1):
            yield from self.multi_indices(k)

    def coordinates(self, n: int) -> List[Symbol]:
        """x^i followed by u^alpha_J for #J <= n in graded order."""
        out = list(self.x_symbols)
        for J in self.indices_upto(n):
            for a in range(self.q):
                out.append(self.jet(a, J))
        return out

    def dimension(self, n: int) -> int:
        return len(self.coordinates(n))

    def is_base_symbol(self, s: Symbol) -> bool:
        return (s.kind == INDEP and s.name in self.independent) or (
            s.kind == JET and s.name in self.dependent and not any(s.idx)
        )

    def jet_order(self, e: DiffExpr) -> int:
        return max((s.order for s in e.symbols() if s.kind == JET), default=0)

    def total_derivative(self, e, i: int) -> DiffExpr:
        """D_i e = de/dx^i + sum_J u_{J+i} de/du_J."""
        e = DiffExpr.coerce(e)
        xi = self.x_symbols[i]
        one = Poly.const(1)

        def image(s: Symbol):
            if s == xi:
                return one
            if s.kind == JET and s.name in self.dependent:
                return Poly.sym(jet(s.name, add_index(s.idx, i)))
            return None

        return e.derivation(image)

    def total_derivative_word(self, e, J: MultiIndex) -> DiffExpr:
        """D_J e, applying x-derivatives last."""
        for i in range(self.p - 1, -1, -1):
            for _ in range(J[i]):
                e = self.total_derivative(e, i)
        return e


SURFACES = JetSpace()
