"""Canonical text form of polynomials and rational expressions.

The output is the input grammar of :mod:`mframe.cli.syntax`, so printing
then parsing is the identity on canonical expressions.
"""

from __future__ import annotations


def coeff_str(c) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def monomial_str(m, sym_str=str) -> str:
    parts = []
    for s, e in m:
        parts.append(sym_str(s) if e == 1 else f"{sym_str(s)}^{e}")
    return "*".join(parts)


def poly_str(p, sym_str=str) -> str:
    if p.is_zero():
        return "0"
    out = []
    for k, (m, c) in enumerate(p.sorted_terms()):
        neg = c < 0
        a = -c if neg else c
        if not m:
            body = coeff_str(a)
        elif a == 1:
            body = monomial_str(m, sym_str)
        else:
            body = f"{coeff_str(a)}*{monomial_str(m, sym_str)}"
        if k == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


def _single_factor(p) -> bool:
    if len(p) != 1:
        return False
    ((m, c),) = p.terms.items()
    return c == 1 and len(m) == 1


def expr_str(e, sym_str=str) -> str:
    if e.den.is_constant():
        return poly_str(e.num, sym_str)
    num = poly_str(e.num, sym_str)
    if len(e.num) > 1:
        num = f"({num})"
    den = poly_str(e.den, sym_str)
    if not _single_factor(e.den):
        den = f"({den})"
    return f"{num}/{den}"
