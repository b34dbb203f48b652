"""Command-line entry point: ``mframe <command> [options]``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

from mframe.algebra import DiffExpr
from mframe.algebra.rational import AlgebraError

from .syntax import ParseError, expr_json, render

FORMATS = ("text", "json", "latex")


class CliError(Exception):
    pass


# loading actions ---------------------------------------------------------


class Action:
    """An action from the catalog or from an action file."""

    def __init__(self, spec: str):
        from mframe import catalog

        self.spec = spec
        if spec in catalog.ids():
            e = catalog.get(spec)
            self.name = e.id
            self.generators = e.action
            self._cs = e.cross_sections
            self._aliases = e.aliases
            self.config = None
        elif os.path.isfile(spec):
            from .config import ActionConfig

            cfg = ActionConfig.load(spec)
            self.name = cfg.name
            self.generators = cfg.build_generators()
            self._cs = None
            self._aliases = None
            self.config = cfg
        else:
            raise CliError(f"unknown action {spec!r}: not a catalog id ({', '.join(catalog.ids())}) or a file")

    def cross_section_names(self):
        return list(self._cs) if self.config is None else list(self.config.cross_sections)

    def cross_section(self, name: Optional[str]):
        names = self.cross_section_names()
        if name is None:
            if len(names) != 1:
                raise CliError(f"choose a cross-section with --cross-section: {', '.join(names)}")
            name = names[0]
        if name not in names:
            raise CliError(f"action {self.name} has no cross-section {name!r}; known: {', '.join(names)}")
        if self.config is None:
            return name, self._cs[name], self._aliases.get(name)
        return name, self.config.build_cross_section(name), self.config.build_aliases(name)

    def frame(self, cs_name: Optional[str]):
        from mframe.frame import build_frame

        name, cs, aliases = self.cross_section(cs_name)
        return name, build_frame(self.generators, cs, aliases=aliases)


# output helpers ----------------------------------------------------------


def _e(e: DiffExpr, fmt: str):
    return expr_json(e) if fmt == "json" else render(e, fmt)


def _matrix_latex(M) -> str:
    rows = [" & ".join(render(M[i, j], "latex") for j in range(M.ncols)) for i in range(M.nrows)]
    return "\\begin{pmatrix}\n" + " \\\\\n".join(rows) + "\n\\end{pmatrix}"


def _matrix(M, fmt: str):
    if fmt == "json":
        return [[expr_json(M[i, j]) for j in range(M.ncols)] for i in range(M.nrows)]
    if fmt == "latex":
        return _matrix_latex(M)
    return "\n".join("  [" + ", ".join(render(M[i, j]) for j in range(M.ncols)) + "]" for i in range(M.nrows))


def _eq(lhs: str, rhs: str, fmt: str) -> str:
    return f"{lhs} &= {rhs} \\\\" if fmt == "latex" else f"  {lhs} = {rhs}"


def _emit(out, data, fmt: str, text: str) -> None:
    if fmt == "json":
        out.write(json.dumps(data, indent=2, sort_keys=True) + "\n")
    else:
        out.write(text if text.endswith("\n") else text + "\n")


# commands ----------------------------------------------------------------


def cmd_orbits(args, out) -> int:
    from mframe.jetspace import orbit_dimensions

    act = Action(args.action)
    la = orbit_dimensions(act.generators, args.max_order, seed=args.seed)
    data = {
        "action": act.name,
        "group_dimension": la.span_dim,
        "ranks": list(la.ranks),
        "stabilization": la.stabilization,
    }
    if args.format == "latex":
        body = " & ".join(f"r_{{{n}}} = {r}" for n, r in enumerate(la.ranks))
        text = f"\\begin{{tabular}}{{{'c' * len(la.ranks)}}}\n{body}\n\\end{{tabular}}"
    else:
        lines = [f"action {act.name}, group dimension {la.span_dim}", "order  rank"]
        lines += [f"{n:5d}  {r:4d}" for n, r in enumerate(la.ranks)]
        s = la.stabilization
        lines.append(f"stabilization order: {s}" if s is not None else "orbits not yet full at this order")
        text = "\n".join(lines)
    _emit(out, data, args.format, text)
    return 0


def cmd_frame(args, out) -> int:
    from mframe.frame import mc_syzygies

    act = Action(args.action)
    cs_name, ctx = act.frame(args.cross_section)
    fmt = args.format
    nmax = args.order if args.order is not None else ctx.order
    R = ctx.R_named() if ctx.aliases is not None else ctx.R
    table = ctx.recurrence_table(nmax)
    rec = []
    for (i, J) in sorted(table, key=lambda k: (sum(k[1]), tuple(-x for x in k[1]), k[0])):
        s = ctx.invariant(J)
        if s in ctx.phantoms:
            continue
        rec.append((i, DiffExpr.sym(s), table[(i, J)]))
    syz = mc_syzygies(ctx)
    aliases = []
    if ctx.aliases is not None:
        aliases = [(n, ctx.aliases.definitions[n]) for n in ctx.aliases.names]

    data = {
        "action": act.name,
        "cross_section": cs_name,
        "order": ctx.order,
        "mc_matrix": _matrix(R, "json"),
        "aliases": {n: expr_json(v) for n, v in aliases},
        "commutator": {"phi": expr_json(ctx.phi), "psi": expr_json(ctx.psi)} if ctx.p == 2 else {},
        "recurrence": [{"direction": i, "invariant": expr_json(s), "value": expr_json(v)} for i, s, v in rec],
        "syzygies": [{"slot": z.slot, "label": z.label, "expr": expr_json(z.expr)} for z in syz],
    }
    if fmt == "latex":
        lines = [f"% action {act.name}, cross-section {cs_name}", "R = " + _matrix_latex(R)]
        lines.append("\\begin{align*}")
        lines += [_eq(f"\\{n}", render(v, fmt), fmt) for n, v in aliases]
        if ctx.p == 2:
            lines.append(_eq("\\phi_{\\mathrm{comm}}", render(ctx.phi, fmt), fmt))
            lines.append(_eq("\\psi_{\\mathrm{comm}}", render(ctx.psi, fmt), fmt))
        lines += [_eq(f"\\mathcal{{D}}_{i} {render(s, fmt)}", render(v, fmt), fmt) for i, s, v in rec]
        lines += [f"\\Delta_{{{z.slot}}} &: {render(z.expr, fmt)} = 0 \\\\" for z in syz]
        lines.append("\\end{align*}")
    else:
        lines = [f"action {act.name}, cross-section {cs_name}, order {ctx.order}", "Maurer-Cartan matrix:"]
        lines.append(_matrix(R, "text"))
        if aliases:
            lines.append("aliases:")
            lines += [_eq(n, render(v), fmt) for n, v in aliases]
        if ctx.p == 2:
            lines.append("commutator invariants, [D2, D1] = phi*D1 + psi*D2:")
            lines += [_eq("phi", render(ctx.phi), fmt), _eq("psi", render(ctx.psi), fmt)]
        lines.append(f"recurrence relations up to order {nmax}:")
        lines += [_eq(f"D{i}({render(s)})", render(v), fmt) for i, s, v in rec]
        lines.append("syzygies:")
        lines += [f"  {z.label}: {render(z.expr)}" for z in syz] or ["  none"]
    _emit(out, data, fmt, "\n".join(lines))
    return 0


def cmd_generators(args, out) -> int:
    from mframe.frame import generating_sets

    act = Action(args.action)
    cs_name, ctx = act.frame(args.cross_section)
    g = generating_sets(ctx, seed=args.seed)
    fmt = args.format
    sets = {
        "order_n_plus_1": [DiffExpr.sym(s) for s in g.order_np1],
        "minimal_order": list(g.minimal_order) if g.minimal_order is not None else None,
        "maurer_cartan": list(g.maurer_cartan),
    }
    data = {"action": act.name, "cross_section": cs_name,
            "minimal_order_reason": g.minimal_order_reason}
    data.update({k: ([expr_json(e) for e in v] if v is not None else None) for k, v in sets.items()})
    lines = [f"action {act.name}, cross-section {cs_name}"]
    titles = {"order_n_plus_1": f"basic invariants of order <= {ctx.order + 1}",
              "minimal_order": "minimal order generators",
              "maurer_cartan": "Maurer-Cartan generators"}
    for k, v in sets.items():
        if v is None:
            lines.append(f"{titles[k]}: not available ({g.minimal_order_reason})")
        else:
            sep = ", "
            lines.append(f"{titles[k]} ({len(v)}): " + sep.join(render(e, fmt) for e in v))
    _emit(out, data, fmt, "\n".join(lines))
    return 0


def _script_text(args, act: Action, cs_name: str) -> str:
    from mframe.catalog import SUITES
    from mframe.elim import SCRIPT_NAMES, shipped_script

    name = args.script
    if name is None:
        for suite, (cid, cs) in SUITES.items():
            if cid == act.name and cs == cs_name:
                name = suite
        if name is None:
            raise CliError("no shipped script for this frame; pass --script <file>")
    if name in SCRIPT_NAMES:
        return shipped_script(name)
    if os.path.isfile(name):
        with open(name, encoding="utf-8") as fh:
            return fh.read()
    raise CliError(f"unknown script {name!r}: not shipped ({', '.join(SCRIPT_NAMES)}) and not a file")


def _write_trace(path: Optional[str], trace) -> None:
    if not path:
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(trace.to_json() + "\n" if path.endswith(".json") else trace.to_text())


def cmd_eliminate(args, out) -> int:
    from mframe.elim import ScriptError, run_script

    act = Action(args.action)
    cs_name, ctx = act.frame(args.cross_section)
    text = _script_text(args, act, cs_name)
    fmt = args.format
    try:
        res = run_script(text, ctx, seed=args.seed)
    except ScriptError as exc:
        raise CliError(f"elimination failed: {exc}") from None
    _write_trace(args.trace, res.trace)
    formulas = sorted(res.resolved.items(), key=lambda kv: str(kv[0]))
    data = {
        "action": act.name,
        "cross_section": cs_name,
        "formulas": [{"symbol": str(s), "value": expr_json(v),
                      "side_conditions": [expr_json(c) for c in res.side_conditions.get(s, ())]}
                     for s, v in formulas],
        "checks": [{"line": ln, "check": t, "ok": ok, "detail": info} for ln, t, ok, info in res.checks],
        "trace": [st.as_dict() for st in res.trace.steps],
    }
    lines = [f"action {act.name}, cross-section {cs_name}"]
    if fmt == "latex":
        lines.append("\\begin{align*}")
        lines += [_eq(render(DiffExpr.sym(s), fmt), render(v, fmt), fmt) for s, v in formulas]
        lines.append("\\end{align*}")
    else:
        lines.append("derived formulas:")
        lines += [_eq(render(DiffExpr.sym(s)), render(v), fmt) for s, v in formulas]
        conds = sorted({render(c) for s, _ in formulas for c in res.side_conditions.get(s, ())})
        if conds:
            lines.append("valid where:")
            lines += [f"  {c} != 0" for c in conds]
        lines.append("checks:")
        lines += [f"  {'ok  ' if ok else 'FAIL'} line {ln}: {t}" + (f" ({info})" if info else "")
                  for ln, t, ok, info in res.checks]
        lines.append("trace:")
        lines.append(res.trace.to_text().rstrip("\n"))
    _emit(out, data, fmt, "\n".join(lines))
    return 0 if res.ok else 1


def cmd_verify(args, out) -> int:
    from mframe.catalog.suite import run_suite

    if args.trace:
        from mframe.catalog.suite import _Suite

        suite = _Suite(args.suite, args.seed, args.trials)
        rep = suite.run()
        if suite.script is not None:
            _write_trace(args.trace, suite.script.trace)
    else:
        rep = run_suite(args.suite, seed=args.seed, trials=args.trials)
    good, bad = rep.counts()
    if args.format == "latex":
        rows = [f"\\texttt{{{c.check_id.replace('_', chr(92) + '_')}}} & {c.mode} & {'pass' if c.ok else 'FAIL'} \\\\"
                for c in rep.checks]
        text = "\\begin{tabular}{llc}\n" + "\n".join(rows) + "\n\\end{tabular}"
    else:
        lines = [f"suite {rep.suite} (seed {rep.seed})"]
        lines += [f"{'PASS' if c.ok else 'FAIL'}  {c.check_id:<10s} {c.mode:<12s} {c.detail}" for c in rep.checks]
        lines.append(f"{good} passed, {bad} failed")
        text = "\n".join(lines)
    _emit(out, rep.as_dict(), args.format, text)
    return 0 if rep.ok else 1


# argument parsing --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="text")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized trials")
    common.add_argument("--trace", metavar="PATH", help="write the elimination trace here (.json for JSON)")

    p = argparse.ArgumentParser(prog="mframe", description="Moving frames for surfaces u = f(x, y).")
    sub = p.add_subparsers(dest="command", required=True)

    def action_args(sp, cs=True):
        sp.add_argument("--action", required=True, help="catalog id or action file")
        if cs:
            sp.add_argument("--cross-section", dest="cross_section")

    sp = sub.add_parser("orbits", parents=[common], help="prolonged orbit dimensions")
    action_args(sp, cs=False)
    sp.add_argument("--max-order", type=int, default=4)
    sp.set_defaults(run=cmd_orbits)

    sp = sub.add_parser("frame", parents=[common], help="Maurer-Cartan matrix, recurrences, syzygies")
    action_args(sp)
    sp.add_argument("--order", type=int, help="highest order in the recurrence table")
    sp.set_defaults(run=cmd_frame)

    sp = sub.add_parser("generators", parents=[common], help="generating sets of invariants")
    action_args(sp)
    sp.set_defaults(run=cmd_generators)

    sp = sub.add_parser("eliminate", parents=[common], help="run an elimination script")
    action_args(sp)
    sp.add_argument("--script", help="shipped script name or script file")
    sp.set_defaults(run=cmd_eliminate)

    sp = sub.add_parser("verify", parents=[common], help="run a golden suite")
    sp.add_argument("--suite", required=True,
                    choices=("conformal-hyperbolic", "conformal-degenerate", "projective"))
    sp.add_argument("--trials", type=int, default=20, help="random points per equivalence check")
    sp.set_defaults(run=cmd_verify)
    return p


def _error(exc: BaseException, fmt: str, out, err) -> int:
    kind = type(exc).__name__
    if fmt == "json":
        payload = {"error": {"type": kind, "message": str(exc)}}
        for attr in ("line", "column"):
            if getattr(exc, attr, None):
                payload["error"][attr] = getattr(exc, attr)
        out.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        err.write(f"error: {exc}\n")
    return 2


def main(argv: Optional[List[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        return args.run(args, out)
    except (CliError, ParseError, AlgebraError, ValueError, KeyError, LookupError, OSError) as exc:
        return _error(exc, args.format, out, err)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
