"""Matrices of rational expressions with fraction-free elimination."""

from __future__ import annotations

from typing import Iterable, List, Sequence

from gmpy2 import mpq

from .poly import AlgebraError, Poly, lcm
from .rational import DiffExpr


class SingularMatrix(AlgebraError):
    """Raised by inverse/solve; ``det`` holds the vanishing determinant."""

    def __init__(self, message: str, det: DiffExpr):
        super().__init__(message)
        self.det = det


class RatMatrix:
    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Sequence]):
        rows = [[DiffExpr.coerce(x) for x in r] for r in rows]
        self.nrows = len(rows)
        self.ncols = len(rows[0]) if rows else 0
        if any(len(r) != self.ncols for r in rows):
            raise ValueError("ragged matrix")
        self.rows = rows

    @staticmethod
    def identity(n: int) -> "RatMatrix":
        return RatMatrix([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @staticmethod
    def zeros(m: int, n: int) -> "RatMatrix":
        return RatMatrix([[0] * n for _ in range(m)])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        return isinstance(other, RatMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(tuple(tuple(r) for r in self.rows))

    @property
    def shape(self):
        return self.nrows, self.ncols

    def transpose(self) -> "RatMatrix":
        return RatMatrix([[self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)])

    def map(self, f) -> "RatMatrix":
        return RatMatrix([[f(x) for x in r] for r in self.rows])

    def __neg__(self) -> "RatMatrix":
        return self.map(lambda x: -x)

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        return RatMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        return self + (-other)

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch in matrix product")
        cols = other.transpose().rows
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = DiffExpr.const(0)
                for a, b in zip(r, c):
                    if not a.is_zero() and not b.is_zero():
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return RatMatrix(out)

    def is_zero(self) -> bool:
        return all(x.is_zero() for r in self.rows for x in r)

    def __str__(self) -> str:
        return "\n".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.rows)

    # elimination --------------------------------------------------------

    def rank(self) -> int:
        """Rank over the field of rational functions in all symbols."""
        rows = [_clear_row(r) for r in self.rows]
        r, _, _ = _bareiss(rows, self.ncols)
        return r

    def det(self) -> DiffExpr:
        if self.nrows != self.ncols:
            raise ValueError("determinant of a non-square matrix")
        n = self.nrows
        scale = DiffExpr.const(1)
        rows = []
        for r in self.rows:
            d = _row_denominator(r)
            scale = scale * DiffExpr(d)
            rows.append([(x * DiffExpr(d)).num for x in r])
        rank, piv, sign = _bareiss(rows, n)
        if rank < n:
            return DiffExpr.const(0)
        return DiffExpr(rows[n - 1][n - 1]).__mul__(sign) / scale

    def solve(self, rhs: "RatMatrix") -> "RatMatrix":
        """Exact solution X of self @ X = rhs for square nonsingular self."""
        n = self.nrows
        if self.ncols != n or rhs.nrows != n:
            raise ValueError("solve needs a square matrix and matching right side")
        k = rhs.ncols
        rows = [_clear_row(list(a) + list(b)) for a, b in zip(self.rows, rhs.rows)]
        rank, pivcols, _ = _bareiss(rows, n, width=n + k)
        if rank < n:
            raise SingularMatrix("matrix is singular over the rational function field", self.det())
        sol = [[None] * k for _ in range(n)]
        for col in range(k):
            for i in range(n - 1, -1, -1):
                acc = DiffExpr(rows[i][n + col])
                for j in range(i + 1, n):
                    if not rows[i][j].is_zero():
                        acc = acc - DiffExpr(rows[i][j]) * sol[j][col]
                sol[i][col] = acc / DiffExpr(rows[i][i])
        return RatMatrix(sol)

    def inverse(self) -> "RatMatrix":
        return self.solve(RatMatrix.identity(self.nrows))

    def evaluate(self, values) -> List[List[mpq]]:
        return [[x.evaluate(values) for x in r] for r in self.rows]


def _row_denominator(r) -> Poly:
    d = Poly.const(1)
    for x in r:
        if not x.is_polynomial():
            d = lcm(d, x.den)
    return d


def _clear_row(r) -> List[Poly]:
    d = DiffExpr(_row_denominator(r))
    return [(x * d).num for x in r]


def _pivot_key(p: Poly, i: int):
    return (0 if p.is_constant() else 1, len(p), i)


def _bareiss(rows: List[List[Poly]], ncols: int, width: int = None):
    """In-place fraction-free echelon form on the first ``ncols`` columns.

    Returns (rank, pivot columns, sign of the row permutation).  Pivot rows
    are chosen deterministically: constant entries first, then fewest
    terms, then lowest row index.
    """
    m = len(rows)
    width = ncols if width is None else width
    prev = Poly.const(1)
    r = 0
    sign = 1
    pivcols = []
    for c in range(ncols):
        if r == m:
            break
        cands = [i for i in range(r, m) if not rows[i][c].is_zero()]
        if not cands:
            continue
        p = min(cands, key=lambda i: _pivot_key(rows[i][c], i))
        if p != r:
            rows[r], rows[p] = rows[p], rows[r]
            sign = -sign
        piv = rows[r][c]
        for i in range(r + 1, m):
            a = rows[i][c]
            row_i = rows[i]
            row_r = rows[r]
            for j in range(c + 1, width):
                v = piv * row_i[j]
                if not a.is_zero() and not row_r[j].is_zero():
                    v = v - a * row_r[j]
                if not prev.is_constant() or prev.constant_value() != 1:
                    q = v.exact_div(prev)
                    if q is None:
                        raise AlgebraError("inexact division in fraction-free elimination")
                    v = q
                row_i[j] = v
            row_i[c] = Poly()
        # columns left of c in later rows are already zero
        prev = piv
        pivcols.append(c)
        r += 1
    return r, pivcols, sign


def rank_q(rows: Sequence[Sequence]) -> int:
    """Rank of a matrix of rationals by ordinary Gaussian elimination."""
    a = [[mpq(x) for x in r] for r in rows]
    m = len(a)
    n = len(a[0]) if a else 0
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        for i in range(r + 1, m):
            f = a[i][c] * inv
            if f:
                ai, ar = a[i], a[r]
                for j in range(c, n):
                    ai[j] -= f * ar[j]
        r += 1
        if r == m:
            break
    return r


def solve_q(rows: Sequence[Sequence], rhs: Sequence) -> List[mpq]:
    """Solve a consistent rational linear system (least-index free choice zero).

    Raises AlgebraError when the system is inconsistent.
    """
    m = len(rows)
    n = len(rows[0]) if rows else 0
    a = [[mpq(x) for x in r] + [mpq(b)] for r, b in zip(rows, rhs)]
    piv = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(m):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        piv.append(c)
        r += 1
    for i in range(r, m):
        if a[i][n]:
            raise AlgebraError("inconsistent linear system")
    x = [mpq(0)] * n
    for i, c in enumerate(piv):
        x[c] = a[i][n]
    return x
