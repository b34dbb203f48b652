"""Expression grammar: parser, canonical printer, text and LaTeX renderers.

Grammar (whitespace insensitive)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("-" | "+") unary | power
    power  := atom ("^" ["-"] INT)?
    atom   := INT | "(" expr ")" | NAME [index] | NAME [index] "(" expr ")"
    index  := "[" INT ("," INT)* "]"

Names: independent variables (``x``, ``y``), dependent variables with an
optional multi-index (``u``, ``u[1,1]``), normalized invariants
(``I[3,0]``, ``H[1]``), named invariants with optional derivative index
(``phi``, ``sigma[0,2]``), and the derivations ``D1(...)``, ``D2(...)``,
``D[i,j](...)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from gmpy2 import mpq

from mframe.algebra import DiffExpr, Poly, Symbol, deriv, indep, inv_H, inv_I, jet, param
from mframe.algebra.printing import coeff_str, expr_str, poly_str
from mframe.algebra.symbols import CONST, DERIV, INDEP, INV, JET, WORD, inv_base_name

GREEK = ("phi", "psi", "tau", "sigma", "kappa", "eta")


class ParseError(ValueError):
    def __init__(self, message: str, text: str = "", pos: int = 0):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {line}, column {col}")
        self.line = line
        self.column = col


class UnknownSymbol(ParseError):
    pass


# tokens ------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def tokenize(text: str) -> List[Tuple[str, str, int]]:
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1) is not None:
            out.append(("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            out.append(("name", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            out.append(("op", m.group(3), m.start(3)))
        pos = m.end()
    out.append(("end", "", n))
    return out


# syntax tree -------------------------------------------------------------


@dataclass
class Num:
    value: int
    pos: int


@dataclass
class Name:
    ident: str
    index: Optional[Tuple[int, ...]]
    pos: int


@dataclass
class Call:
    ident: str
    index: Optional[Tuple[int, ...]]
    arg: object
    pos: int


@dataclass
class BinOp:
    op: str
    left: object
    right: object
    pos: int


@dataclass
class Neg:
    arg: object
    pos: int


@dataclass
class Pow:
    base: object
    exp: int
    pos: int


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.k = 0

    def peek(self):
        return self.toks[self.k]

    def take(self):
        t = self.toks[self.k]
        self.k += 1
        return t

    def expect(self, op: str):
        t = self.take()
        if t[0] != "op" or t[1] != op:
            raise ParseError(f"expected '{op}' but found '{t[1] or 'end of input'}'", self.text, t[2])
        return t

    def parse(self):
        node = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ParseError(f"unexpected '{t[1]}'", self.text, t[2])
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            t = self.take()
            node = BinOp(t[1], node, self.term(), t[2])
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            t = self.take()
            node = BinOp(t[1], node, self.unary(), t[2])
        return node

    def unary(self):
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            arg = self.unary()
            return Neg(arg, t[2]) if t[1] == "-" else arg
        return self.power()

    def power(self):
        node = self.atom()
        t = self.peek()
        if t[0] == "op" and t[1] == "^":
            self.take()
            sign = 1
            if self.peek()[0] == "op" and self.peek()[1] == "-":
                self.take()
                sign = -1
            e = self.take()
            if e[0] != "int":
                raise ParseError("exponent must be an integer", self.text, e[2])
            node = Pow(node, sign * int(e[1]), t[2])
        return node

    def index(self):
        if not (self.peek()[0] == "op" and self.peek()[1] == "["):
            return None
        self.take()
        vals = []
        while True:
            t = self.take()
            if t[0] != "int":
                raise ParseError("index entries must be integers", self.text, t[2])
            vals.append(int(t[1]))
            t = self.take()
            if t[0] == "op" and t[1] == "]":
                return tuple(vals)
            if not (t[0] == "op" and t[1] == ","):
                raise ParseError("expected ',' or ']' in index", self.text, t[2])

    def atom(self):
        t = self.take()
        if t[0] == "int":
            return Num(int(t[1]), t[2])
        if t[0] == "op" and t[1] == "(":
            node = self.expr()
            self.expect(")")
            return node
        if t[0] == "name":
            idx = self.index()
            if self.peek()[0] == "op" and self.peek()[1] == "(":
                self.take()
                arg = self.expr()
                self.expect(")")
                return Call(t[1], idx, arg, t[2])
            return Name(t[1], idx, t[2])
        raise ParseError(f"unexpected '{t[1] or 'end of input'}'", self.text, t[2])


def parse_tree(text: str):
    return _Parser(text).parse()


# evaluation --------------------------------------------------------------


@dataclass
class Env:
    """Name resolution and derivation hooks used while evaluating a tree."""

    independent: Tuple[str, ...] = ("x", "y")
    dependent: Tuple[str, ...] = ("u",)
    invariants: Tuple[str, ...] = GREEK
    params: Tuple[str, ...] = ()
    values: Dict[str, DiffExpr] = field(default_factory=dict)
    derive: Optional[Callable[[DiffExpr, int], DiffExpr]] = None

    def name(self, node: Name, text: str) -> DiffExpr:
        n, idx = node.ident, node.index
        if n in self.values and idx is None:
            return self.values[n]
        if n in self.independent and idx is None:
            return DiffExpr.sym(indep(n, self.independent.index(n)))
        if n in self.dependent:
            J = idx if idx is not None else (0,) * len(self.independent)
            if len(J) != len(self.independent):
                raise ParseError(f"jet index of {n} needs {len(self.independent)} entries", text, node.pos)
            return DiffExpr.sym(jet(n, J))
        if n == "I" and idx is not None:
            return DiffExpr.sym(inv_I(idx))
        if n == "H" and idx is not None and len(idx) == 1:
            return DiffExpr.sym(inv_H(idx[0]))
        if n in self.invariants:
            i, j = idx if idx is not None else (0, 0)
            return DiffExpr.sym(deriv(n, i, j))
        if n in self.params and idx is None:
            return DiffExpr.sym(param(n))
        raise UnknownSymbol(f"unknown symbol '{n}'", text, node.pos)

    def call(self, node: Call, arg: DiffExpr, text: str) -> DiffExpr:
        n = node.ident
        if n in ("D1", "D2") and node.index is None:
            letters = [int(n[1])]
        elif n == "D" and node.index is not None and len(node.index) == 2:
            i, j = node.index
            letters = [1] * i + [2] * j
        else:
            raise UnknownSymbol(f"unknown operator '{n}'", text, node.pos)
        # apply the rightmost letter first
        for letter in reversed(letters):
            arg = self.apply(arg, letter, text, node.pos)
        return arg

    def apply(self, e: DiffExpr, letter: int, text: str, pos: int) -> DiffExpr:
        if self.derive is not None:
            return self.derive(e, letter)
        syms = e.symbols()
        if len(syms) != 1 or e != DiffExpr.sym(next(iter(syms))):
            raise ParseError("invariant derivation of a compound expression needs a context", text, pos)
        (s,) = syms
        if s.kind == INV and s.name == "I":
            base, i, j = inv_base_name(s), 0, 0
        elif s.kind == DERIV:
            base, (i, j) = s.name, s.idx
        else:
            raise ParseError(f"cannot apply an invariant derivation to {s}", text, pos)
        if letter == 1:
            return DiffExpr.sym(deriv(base, i + 1, j))
        if i:
            raise ParseError("non-monotone derivative needs a commutation context", text, pos)
        return DiffExpr.sym(deriv(base, 0, j + 1))


def evaluate(node, env: Env, text: str = "") -> DiffExpr:
    if isinstance(node, Num):
        return DiffExpr.const(node.value)
    if isinstance(node, Name):
        return env.name(node, text)
    if isinstance(node, Neg):
        return -evaluate(node.arg, env, text)
    if isinstance(node, Pow):
        return evaluate(node.base, env, text) ** node.exp
    if isinstance(node, Call):
        return env.call(node, evaluate(node.arg, env, text), text)
    if isinstance(node, BinOp):
        a = evaluate(node.left, env, text)
        b = evaluate(node.right, env, text)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if b.is_zero():
            raise ParseError("division by zero", text, node.pos)
        return a / b
    raise TypeError(node)


DEFAULT_ENV = Env()


def parse_expr(text: str, env: Optional[Env] = None) -> DiffExpr:
    """Parse text into a canonical expression."""
    return evaluate(parse_tree(text), env or DEFAULT_ENV, text)


def canonical(e: DiffExpr) -> str:
    """Canonical serialization; parse_expr(canonical(e)) == e."""
    return expr_str(e)


# renderers ---------------------------------------------------------------


def _compact(idx) -> str:
    if all(0 <= k < 10 for k in idx):
        return "".join(str(k) for k in idx)
    return "[" + ",".join(str(k) for k in idx) + "]"


def text_symbol(s: Symbol) -> str:
    if s.kind == INV:
        return f"{s.name}{_compact(s.idx)}"
    if s.kind == JET:
        return s.name if not any(s.idx) else f"{s.name}{_compact(s.idx)}"
    if s.kind == DERIV:
        i, j = s.idx
        if "[" in s.name:
            inner = s.name.replace("[", "").replace(",", "").replace("]", "")
            ops = ("D1" + (f"^{i}" if i > 1 else "") if i else "") + ("D2" + (f"^{j}" if j > 1 else "") if j else "")
            return f"{ops}({inner})"
        return s.name if i == j == 0 else f"{s.name}{i}{j}"
    return str(s)


_LATEX_GREEK = {n: "\\" + n for n in GREEK}


def latex_symbol(s: Symbol) -> str:
    if s.kind == INV:
        return f"{s.name}_{{{_compact(s.idx).strip('[]')}}}"
    if s.kind == JET:
        if not any(s.idx):
            return s.name
        letters = "".join(v * k for v, k in zip("xyzw", s.idx))
        return f"{s.name}_{{{letters}}}"
    if s.kind == DERIV:
        i, j = s.idx
        if "[" in s.name:
            inner = s.name.split("[")[0] + "_{" + s.name.split("[")[1].rstrip("]").replace(",", "") + "}"
            ops = ""
            if i:
                ops += "\\mathcal{D}_1" + (f"^{{{i}}}" if i > 1 else "")
            if j:
                ops += "\\mathcal{D}_2" + (f"^{{{j}}}" if j > 1 else "")
            return f"{ops}({inner})"
        base = _LATEX_GREEK.get(s.name, s.name)
        return base if i == j == 0 else f"{base}_{{{i}{j}}}"
    if s.kind == INDEP:
        return s.name
    return str(s)


def render_text(e: DiffExpr) -> str:
    return expr_str(e, text_symbol)


def _latex_poly(p: Poly) -> str:
    if p.is_zero():
        return "0"
    out = []
    for k, (m, c) in enumerate(p.sorted_terms()):
        neg = c < 0
        a = -c if neg else c
        mono = " ".join(latex_symbol(s) if e == 1 else f"{latex_symbol(s)}^{{{e}}}" for s, e in m)
        if a.denominator == 1:
            cs = "" if (a == 1 and m) else str(a.numerator)
        else:
            cs = f"\\tfrac{{{a.numerator}}}{{{a.denominator}}}"
        body = (cs + (" " if cs and mono else "") + mono) or "1"
        sign = ("-" if neg else "") if k == 0 else (" - " if neg else " + ")
        out.append(sign + body)
    return "".join(out)


def render_latex(e: DiffExpr) -> str:
    if e.is_polynomial():
        return _latex_poly(e.num)
    return f"\\frac{{{_latex_poly(e.num)}}}{{{_latex_poly(e.den)}}}"


def render(e: DiffExpr, fmt: str = "text") -> str:
    if fmt == "latex":
        return render_latex(e)
    if fmt == "canonical":
        return canonical(e)
    return render_text(e)


def terms_json(p: Poly) -> list:
    return [
        [coeff_str(c), [[str(s), e] for s, e in m]]
        for m, c in p.sorted_terms()
    ]


def expr_json(e: DiffExpr) -> dict:
    """Schema-stable serialization: canonical string plus term lists."""
    return {
        "canonical": canonical(e),
        "numerator": terms_json(e.num),
        "denominator": terms_json(e.den),
    }
