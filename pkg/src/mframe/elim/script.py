"""Guided elimination scripts and their audit trace.

A script is line oriented.  Blank lines and ``#`` comments are skipped.

    frame = conformal hyperbolic        which frame the script is written for
    world = aliases | invariants        symbols: named MC invariants or I[j,k]
    trials = 20                         random sample points for checks
    ranking = phi, psi < kappa, tau     blocks, lowest first
    name = <expr>                       combination of relations (D1, D2 allowed)
    name = delta(p, q)                  Delta-polynomial
    name = reduce(p, q1, q2, ...)       reduction by the listed relations
    name = subs(p)                      substitute every solved formula
    a, b = solve(p1, p2)                solve linear relations for a, b
    expect leader(p) = s                leader check
    expect linear(p, a, b)              jointly linear in a, b
    expect zero(p)                      vanishes after substitution and expansion
    expect zero_sampled(p)              same, decided at random points only
    expect sound(a)                     solved formula for a expands to a itself
    expect proportional(p, q)           p = c*q after substitution, c constant
    expect equivalent(p, q)             zero(p - q)

Arguments may nest the calls delta, reduce, subs, formula(a) (the solved
expression for a), numerator(p) and denominator(p).
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from mframe.algebra import DiffExpr, Symbol
from mframe.cli.syntax import Env, ParseError, canonical, parse_expr
from mframe.invderiv import DerivAlgebra, mono_parts

from .core import (
    Deriver,
    EliminationError,
    RankedPoly,
    Substituter,
    delta_polynomial,
    reduce,
    solve_quasilinear,
    verify_zero,
)
from .ranking import Ranking, _split_top


class ScriptError(EliminationError):
    def __init__(self, message: str, step: Optional["ScriptStep"] = None):
        where = f"line {step.line}: " if step is not None else ""
        super().__init__(where + message)
        self.step = step


@dataclass(frozen=True)
class ScriptStep:
    line: int
    text: str
    kind: str  # setting, assign, solve, expect
    lhs: str
    rhs: str


_SETTINGS = ("frame", "world", "trials", "ranking")


def parse_script(text: str) -> List[ScriptStep]:
    steps = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("expect "):
            steps.append(ScriptStep(n, line, "expect", "", line[len("expect "):].strip()))
            continue
        if "=" not in line:
            raise ScriptError(f"cannot read {line!r}", ScriptStep(n, line, "", "", ""))
        lhs, rhs = (t.strip() for t in line.split("=", 1))
        if lhs in _SETTINGS:
            kind = "setting"
        elif rhs.startswith("solve("):
            kind = "solve"
        elif re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", lhs):
            kind = "assign"
        else:
            raise ScriptError(f"bad assignment target {lhs!r}", ScriptStep(n, line, "", "", ""))
        steps.append(ScriptStep(n, line, kind, lhs, rhs))
    return steps


def expr_hash(e) -> str:
    return hashlib.sha256(canonical(DiffExpr.coerce(e)).encode()).hexdigest()[:16]


@dataclass
class TraceStep:
    index: int
    line: int
    op: str
    output: str
    inputs: Tuple[str, ...] = ()
    input_hashes: Tuple[str, ...] = ()
    output_hash: str = ""
    leader: str = ""
    detail: str = ""

    def as_dict(self) -> dict:
        return {
            "index": self.index,
            "line": self.line,
            "op": self.op,
            "output": self.output,
            "inputs": list(self.inputs),
            "input_hashes": list(self.input_hashes),
            "output_hash": self.output_hash,
            "leader": self.leader,
            "detail": self.detail,
        }


@dataclass
class EliminationTrace:
    steps: List[TraceStep] = field(default_factory=list)

    def add(self, **kw) -> TraceStep:
        st = TraceStep(index=len(self.steps) + 1, **kw)
        self.steps.append(st)
        return st

    def to_text(self) -> str:
        out = []
        for s in self.steps:
            ins = ", ".join(f"{n}#{h}" for n, h in zip(s.inputs, s.input_hashes))
            row = f"{s.index:3d} L{s.line:<3d} {s.op:<12s} {s.output}"
            if s.output_hash:
                row += f"#{s.output_hash}"
            if ins:
                row += f" <- {ins}"
            if s.leader:
                row += f"  leader {s.leader}"
            if s.detail:
                row += f"  [{s.detail}]"
            out.append(row)
        return "\n".join(out) + ("\n" if out else "")

    def to_json(self) -> str:
        return json.dumps([s.as_dict() for s in self.steps], indent=2, sort_keys=True)


@dataclass
class ScriptResult:
    results: Dict[Symbol, DiffExpr]
    named: Dict[str, DiffExpr]
    side_conditions: Dict[Symbol, Tuple[DiffExpr, ...]]
    checks: List[Tuple[int, str, bool, str]]
    trace: EliminationTrace
    frame: str = ""
    resolved: Dict[Symbol, DiffExpr] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c[2] for c in self.checks)


def frame_relations(ctx, world: str) -> Dict[str, DiffExpr]:
    """Named relations available to scripts in the given world."""
    from mframe.frame import cross_relation, mc_syzygies, recurrence_relation

    rel: Dict[str, DiffExpr] = {}
    if world == "aliases":
        for s in mc_syzygies(ctx):
            rel[s.label] = s.expr
    elif world == "invariants":
        n = ctx.order
        for a in range(n, -1, -1):
            J = (a, n - a)
            for i in (1, 2):
                rel[f"E_{a}{n - a}{i}"] = recurrence_relation(ctx, J, i)
        for a in range(n + 1):
            J = (a, n - a)
            rel[f"S_{a + 1}{n - a + 1}"] = cross_relation(ctx, J)
    else:
        raise ScriptError(f"unknown world {world!r}")
    return rel


class ScriptRunner:
    def __init__(self, ctx, world: Optional[str] = None, seed: int = 0, trials: Optional[int] = None):
        self.ctx = ctx
        self.seed = seed
        self._trials_override = trials
        self.trials = 20
        self.world = None
        self.ranking: Optional[Ranking] = None
        self.named: Dict[str, DiffExpr] = {}
        self.solutions: List[Dict[Symbol, DiffExpr]] = []
        self.results: Dict[Symbol, DiffExpr] = {}
        self.sides: Dict[Symbol, Tuple[DiffExpr, ...]] = {}
        self.checks: List[Tuple[int, str, bool, str]] = []
        self.trace = EliminationTrace()
        self.frame = ""
        if world is not None:
            self._set_world(world)

    # setup -------------------------------------------------------------

    def _set_world(self, world: str) -> None:
        if self.world is not None and world != self.world:
            raise ScriptError("the world cannot change inside a script")
        self.world = world
        self.alg: DerivAlgebra = self.ctx.algebra(world)
        self.relations = frame_relations(self.ctx, world)
        self.deriver = Deriver(self.alg)
        self.env = Env(values=dict(self.relations), derive=self.alg.apply)

    def _need(self, step, what="ranking"):
        if self.world is None:
            self._set_world("aliases" if self.ctx.aliases is not None else "invariants")
        if what == "ranking" and self.ranking is None:
            raise ScriptError("no ranking set", step)

    # expressions -------------------------------------------------------

    def expr(self, text: str, step) -> DiffExpr:
        self._need(step, "world")
        m = re.fullmatch(r"([A-Za-z_]+)\((.*)\)", text.strip(), re.S)
        if m and m.group(1) in ("delta", "reduce", "subs", "formula", "numerator", "denominator") and _balanced(m.group(2)):
            op, args = m.group(1), [a.strip() for a in _split_top(m.group(2))]
            if op == "formula":
                return self.formula(args[0], step)
            if op == "numerator":
                return DiffExpr(self.expr(args[0], step).num)
            if op == "denominator":
                return DiffExpr(self.expr(args[0], step).den)
            self._need(step)
            if op == "delta":
                if len(args) != 2:
                    raise ScriptError("delta takes two arguments", step)
                p, q = (self.ranked(a, step) for a in args)
                out = delta_polynomial(p, q, self.ranking, self.alg, self.deriver)
                self._log(step, "delta", args, [p.body, q.body], out)
                return out.body
            if op == "reduce":
                p = self.ranked(args[0], step)
                system = [self.ranked(a, step) for a in args[1:]]
                out = reduce(p, system, self.ranking, self.alg, self.deriver)
                self._log(step, "reduce", args, [p.body] + [q.body for q in system], out)
                return out.body
            p = self.expr(args[0], step)
            out = self.substitute(p)
            self._log(step, "subs", args[:1], [p], RankedPoly(out, self.ranking))
            return DiffExpr(out.num)
        try:
            return parse_expr(text, self.env)
        except ParseError as exc:
            raise ScriptError(str(exc), step) from None

    def ranked(self, text: str, step) -> RankedPoly:
        return RankedPoly(self.expr(text, step), self.ranking, text)

    def target(self, text: str, step) -> Symbol:
        e = parse_expr(text, Env())
        syms = list(e.symbols())
        if len(syms) != 1 or e != DiffExpr.sym(syms[0]):
            raise ScriptError(f"{text!r} is not a single symbol", step)
        s = syms[0]
        parts = mono_parts(s)
        if parts is None or parts[1:] != (0, 0):
            raise ScriptError(f"{text!r} is not an undifferentiated base", step)
        return s

    def formula(self, text: str, step) -> DiffExpr:
        s = self.target(text, step)
        if s not in self.results:
            raise ScriptError(f"no formula for {text} yet", step)
        return self.results[s]

    def resolved(self) -> Dict[Symbol, DiffExpr]:
        """Solved formulas with earlier unknowns substituted away."""
        out: Dict[Symbol, DiffExpr] = {}
        for sol in self.solutions:
            for s, f in sol.items():
                out[s] = f
        for _ in range(len(out) + 1):
            changed = False
            bases = {mono_parts(s)[0] for s in out}
            for s, f in list(out.items()):
                hit = {t for t in f.symbols() if mono_parts(t) and mono_parts(t)[0] in bases}
                if hit:
                    others = {k: v for k, v in out.items() if k != s}
                    out[s] = Substituter(self.alg, others)(f)
                    changed = True
            if not changed:
                return out
        raise EliminationError("solved formulas depend on each other cyclically")

    def substitute(self, e: DiffExpr) -> DiffExpr:
        forms = self.resolved()
        return Substituter(self.alg, forms)(e) if forms else e

    # logging -----------------------------------------------------------

    def _log(self, step, op, names, inputs, out, detail=""):
        body = out.body if isinstance(out, RankedPoly) else out
        leader = ""
        if isinstance(out, RankedPoly) and out.leader is not None:
            leader = canonical(DiffExpr.sym(out.leader))
        self.trace.add(
            line=step.line,
            op=op,
            output=step.lhs or op,
            inputs=tuple(names),
            input_hashes=tuple(expr_hash(x) for x in inputs),
            output_hash=expr_hash(body),
            leader=leader,
            detail=detail,
        )

    # steps -------------------------------------------------------------

    def run(self, steps: Sequence[ScriptStep]) -> ScriptResult:
        for st in steps:
            if st.kind == "setting":
                self.setting(st)
            elif st.kind == "assign":
                self.assign(st)
            elif st.kind == "solve":
                self.solve(st)
            elif st.kind == "expect":
                self.expect(st)
        return ScriptResult(dict(self.results), dict(self.named), dict(self.sides), list(self.checks), self.trace, self.frame,
                            self.resolved())

    def setting(self, st):
        if st.lhs == "frame":
            self.frame = st.rhs
        elif st.lhs == "world":
            self._set_world(st.rhs)
        elif st.lhs == "trials":
            self.trials = int(st.rhs)
        else:
            self._need(st, "world")
            self.ranking = Ranking.parse(st.rhs)
        self.trace.add(line=st.line, op="set", output=st.lhs, detail=st.rhs)

    def assign(self, st):
        e = self.expr(st.rhs, st)
        self.named[st.lhs] = e
        self.env.values[st.lhs] = e
        leader = ""
        if self.ranking is not None:
            p = RankedPoly(e, self.ranking)
            if p.leader is not None:
                leader = canonical(DiffExpr.sym(p.leader))
        self.trace.add(line=st.line, op="define", output=st.lhs, output_hash=expr_hash(e), leader=leader)

    def solve(self, st):
        self._need(st)
        targets = [self.target(t.strip(), st) for t in _split_top(st.lhs)]
        inner = st.rhs[len("solve("):]
        if not inner.endswith(")"):
            raise ScriptError("unbalanced solve(...)", st)
        args = [a.strip() for a in _split_top(inner[:-1])]
        system = [self.ranked(a, st) for a in args]
        try:
            sol = solve_quasilinear(system, targets)
        except EliminationError as exc:
            raise ScriptError(str(exc), st) from None
        self.solutions.append(dict(sol.values))
        for t in targets:
            self.results[t] = sol.values[t]
            self.sides[t] = sol.side_conditions
        detail = "; ".join(f"{canonical(c)} != 0" for c in sol.side_conditions)
        self.trace.add(
            line=st.line,
            op="solve",
            output=st.lhs,
            inputs=tuple(args),
            input_hashes=tuple(expr_hash(p.body) for p in system),
            output_hash=expr_hash(sum((sol.values[t] for t in targets), DiffExpr.const(0))),
            detail=detail,
        )

    def _trials(self) -> int:
        return self._trials_override if self._trials_override is not None else self.trials

    def _zero(self, e: DiffExpr, sampled: bool, substitute: bool = True):
        forms = self.resolved() if substitute else {}
        rel = [forms] if forms else []
        return verify_zero(e, rel, self.alg, self.ctx.expander(), trials=self._trials(), seed=self.seed,
                           symbolic=not sampled)

    def expect(self, st):
        text = st.rhs
        m = re.fullmatch(r"leader\((.*)\)\s*=\s*(.+)", text)
        if m:
            self._need(st)
            p = self.ranked(m.group(1), st)
            want = self.expr(m.group(2), st)
            got = DiffExpr.sym(p.leader) if p.leader is not None else DiffExpr.const(0)
            return self._check(st, "leader", got == want, f"leader {canonical(got)}")
        m = re.fullmatch(r"([a-z_]+)\((.*)\)", text)
        if not m or not _balanced(m.group(2)):
            raise ScriptError(f"unknown expectation {text!r}", st)
        kind, args = m.group(1), [a.strip() for a in _split_top(m.group(2))]
        if kind == "linear":
            p = RankedPoly(self.expr(args[0], st), self.ranking or Ranking((("_",),)))
            syms = [self.target(a, st) for a in args[1:]]
            return self._check(st, kind, p.linear_in(syms), "")
        if kind in ("zero", "zero_sampled", "equivalent"):
            e = self.expr(args[0], st)
            if kind == "equivalent":
                e = e - self.expr(args[1], st)
            res = self._zero(e, kind == "zero_sampled")
            info = f"{res.stage}, {res.trials} points, {res.trial_failures} failed"
            return self._check(st, kind, res.ok, info)
        if kind == "sound":
            s = self.target(args[0], st)
            res = self._zero(self.formula(args[0], st) - DiffExpr.sym(s), False, substitute=False)
            return self._check(st, kind, res.ok, f"{res.stage}, {res.trials} points")
        if kind == "proportional":
            a = self.substitute(self.expr(args[0], st))
            b = self.substitute(self.expr(args[1], st))
            ok = not b.is_zero() and (a / b).is_constant() and not a.is_zero()
            return self._check(st, kind, ok, f"ratio {canonical(a / b)}" if ok else "")
        raise ScriptError(f"unknown expectation {kind!r}", st)

    def _check(self, st, kind, ok, info):
        self.checks.append((st.line, st.rhs, ok, info))
        self.trace.add(line=st.line, op="expect", output=kind, detail=("ok" if ok else "FAILED") + (f" {info}" if info else ""))
        if not ok:
            raise ScriptError(f"expectation failed: {st.rhs} ({info})", st)


def _balanced(text: str) -> bool:
    depth = 0
    for ch in text:
        depth += ch == "("
        depth -= ch == ")"
        if depth < 0:
            return False
    return depth == 0


def run_script(steps, ctx, world: Optional[str] = None, seed: int = 0, trials: Optional[int] = None) -> ScriptResult:
    """Execute a parsed script (or script text) against a frame."""
    if isinstance(steps, str):
        steps = parse_script(steps)
    return ScriptRunner(ctx, world=world, seed=seed, trials=trials).run(steps)


SCRIPT_NAMES = ("conformal-hyperbolic", "conformal-degenerate", "projective")


def shipped_script(name: str) -> str:
    from importlib.resources import files

    if name not in SCRIPT_NAMES:
        raise ScriptError(f"unknown script {name!r}; shipped scripts: {', '.join(SCRIPT_NAMES)}")
    return files("mframe.elim").joinpath("scripts", f"{name}.mfs").read_text()
