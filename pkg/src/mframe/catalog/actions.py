"""Built-in actions on surfaces u = f(x, y) with their cross-sections and aliases."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Tuple

from mframe.algebra import DiffExpr
from mframe.cli.syntax import parse_expr
from mframe.frame import CrossSection
from mframe.jetspace import SURFACES, VectorFieldSpec

# coefficient strings (xi, eta, phi), in catalog basis order
CONFORMAL = (
    ("1", "0", "0"),
    ("0", "1", "0"),
    ("0", "0", "1"),
    ("-y", "x", "0"),
    ("-u", "0", "x"),
    ("0", "-u", "y"),
    ("x", "y", "u"),
    ("x^2 - y^2 - u^2", "2*x*y", "2*x*u"),
    ("2*x*y", "y^2 - x^2 - u^2", "2*y*u"),
    ("2*x*u", "2*y*u", "u^2 - x^2 - y^2"),
)

PROJECTIVE = (
    ("1", "0", "0"),
    ("0", "1", "0"),
    ("0", "0", "1"),
    ("x", "0", "0"),
    ("y", "0", "0"),
    ("u", "0", "0"),
    ("0", "x", "0"),
    ("0", "y", "0"),
    ("0", "u", "0"),
    ("0", "0", "x"),
    ("0", "0", "y"),
    ("0", "0", "u"),
    ("x^2", "x*y", "x*u"),
    ("x*y", "y^2", "y*u"),
    ("x*u", "y*u", "u^2"),
)

_ZERO3 = ("x", "y", "u", "u[1,0]", "u[0,1]", "u[2,0]", "u[0,2]", "u[2,1]", "u[1,2]")

CROSS_SECTIONS = {
    "conformal": {
        "hyperbolic": [(z, 0) for z in _ZERO3] + [("u[1,1]", 1)],
        "degenerate": [(z, 0) for z in _ZERO3[:5] + ("u[1,1]",) + _ZERO3[6:]] + [("u[2,0]", 1)],
    },
    "projective": {
        "tresse": [(z, 0) for z in _ZERO3 + ("u[3,1]", "u[2,2]", "u[1,3]")]
        + [("u[1,1]", 1), ("u[3,0]", 1), ("u[0,3]", 1)],
    },
}

ALIASES = {
    ("conformal", "hyperbolic"): {
        "phi": "-1/4*I[3,0]",
        "psi": "1/4*I[0,3]",
        "tau": "1 - 1/2*I[1,3] - 1/8*I[0,3]^2",
        "sigma": "1/8*I[3,0]*I[0,3] - 1/2*I[2,2]",
        "kappa": "1 - 1/2*I[3,1] - 1/8*I[3,0]^2",
    },
    ("conformal", "degenerate"): {
        "phi": "I[0,3]",
        "psi": "I[3,0]",
        "tau": "1/2*I[1,3]",
        "kappa": "-1/2*I[3,1]",
        "sigma": "1/2*I[2,2]",
    },
    ("projective", "tresse"): {
        "phi": "-1/3*I[0,4]",
        "psi": "1/3*I[4,0]",
        "eta": "-1/2*I[1,4] - 1/4",
        "tau": "-1/2*I[2,3] + 1/4*I[0,4]",
        "sigma": "-1/2*I[3,2] + 1/4*I[4,0]",
        "kappa": "-1/2*I[4,1] - 1/4",
    },
}

# the pair whose derivative matrix gives the commutator invariants
PAIRS = {"conformal": ("I[3,0]", "I[0,3]"), "projective": ("I[4,0]", "I[0,4]")}


def generators(rows) -> Tuple[VectorFieldSpec, ...]:
    out = []
    for k, (a, b, c) in enumerate(rows):
        out.append(VectorFieldSpec((parse_expr(a), parse_expr(b)), (parse_expr(c),), SURFACES, name=f"v{k + 1}"))
    return tuple(out)


def cross_section(pairs, name: str = "") -> CrossSection:
    return CrossSection(tuple((parse_expr(z), c) for z, c in pairs), name, SURFACES)


def aliases(mapping: Dict[str, str]) -> Dict[str, DiffExpr]:
    return {k: parse_expr(v) for k, v in mapping.items()}
