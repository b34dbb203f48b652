"""Line-oriented action description files.

An action file has ``[section]`` headers and ``key = value`` lines::

    # Euclidean motions of surfaces
    [action]
    name = euclidean
    independent = x, y
    dependent = u
    generator = 1, 0, 0
    generator = -y, x, 0

    [cross-section standard]
    x = 0
    u[1,1] = 0

    [aliases standard]
    kappa = I[2,0]

Each ``generator`` line lists the coefficients of d/dx^i and then of
d/du^alpha, separated by commas.  Cross-section lines are ``Z = c`` with a
rational constant c.  Alias sections are optional.  ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from mframe.elim.ranking import _split_top
from mframe.frame import CrossSection
from mframe.jetspace import JetSpace, VectorFieldSpec

from .syntax import Env, ParseError, parse_expr


class ConfigError(ValueError):
    def __init__(self, message: str, line: int = 0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


@dataclass
class ActionConfig:
    independent: List[str] = field(default_factory=lambda: ["x", "y"])
    dependent: List[str] = field(default_factory=lambda: ["u"])
    generators: List[List[str]] = field(default_factory=list)
    cross_sections: Dict[str, List[Tuple[str, str]]] = field(default_factory=dict)
    aliases: Dict[str, Dict[str, str]] = field(default_factory=dict)
    name: str = "custom"
    lines: Dict[str, int] = field(default_factory=dict, repr=False)  # where things were read

    @staticmethod
    def parse(text: str) -> "ActionConfig":
        cfg = ActionConfig()
        section, arg = None, ""
        for n, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            m = re.fullmatch(r"\[\s*([a-z-]+)\s*([^\]]*?)\s*\]", line)
            if m:
                section, arg = m.group(1), m.group(2)
                if section not in ("action", "cross-section", "aliases"):
                    raise ConfigError(f"unknown section [{section}]", n)
                if section != "action" and not arg:
                    raise ConfigError(f"section [{section}] needs a name", n)
                if section == "cross-section":
                    if arg in cfg.cross_sections:
                        raise ConfigError(f"cross-section {arg!r} defined twice", n)
                    cfg.cross_sections[arg] = []
                elif section == "aliases":
                    cfg.aliases.setdefault(arg, {})
                continue
            if "=" not in line:
                raise ConfigError(f"expected 'key = value', got {line!r}", n)
            if section is None:
                raise ConfigError("text before the first [section]", n)
            key, value = (t.strip() for t in line.split("=", 1))
            if section == "action":
                cfg._action_key(key, value, n)
            elif section == "cross-section":
                cfg.cross_sections[arg].append((key, value))
                cfg.lines[f"cs:{arg}:{key}"] = n
            else:
                cfg.aliases[arg][key] = value
                cfg.lines[f"alias:{arg}:{key}"] = n
        cfg.validate()
        return cfg

    def _action_key(self, key: str, value: str, n: int) -> None:
        names = [v.strip() for v in value.split(",") if v.strip()]
        if key == "independent":
            self.independent = names
        elif key == "dependent":
            self.dependent = names
        elif key == "name":
            self.name = value
        elif key == "generator":
            self.generators.append([c.strip() for c in _split_top(value)])
            self.lines[f"gen:{len(self.generators)}"] = n
        else:
            raise ConfigError(f"unknown key {key!r} in [action]", n)

    @staticmethod
    def load(path: str) -> "ActionConfig":
        with open(path, encoding="utf-8") as fh:
            return ActionConfig.parse(fh.read())

    @property
    def space(self) -> JetSpace:
        return JetSpace(tuple(self.independent), tuple(self.dependent))

    @property
    def env(self) -> Env:
        return Env(independent=tuple(self.independent), dependent=tuple(self.dependent))

    def validate(self) -> None:
        if not self.generators:
            raise ConfigError("no generators given")
        width = len(self.independent) + len(self.dependent)
        for k, g in enumerate(self.generators, 1):
            if len(g) != width:
                raise ConfigError(f"generator {k} has {len(g)} coefficients, expected {width}",
                                  self.lines.get(f"gen:{k}", 0))

    def _expr(self, text: str, where: str, env=None):
        try:
            return parse_expr(text, env or self.env)
        except ParseError as exc:
            raise ConfigError(f"{text!r}: {exc}", self.lines.get(where, 0)) from None

    def build_generators(self) -> Tuple[VectorFieldSpec, ...]:
        p = len(self.independent)
        out = []
        for k, g in enumerate(self.generators, 1):
            cs = [self._expr(c, f"gen:{k}") for c in g]
            try:
                out.append(VectorFieldSpec(tuple(cs[:p]), tuple(cs[p:]), self.space, name=f"v{k}"))
            except ValueError as exc:
                raise ConfigError(str(exc), self.lines.get(f"gen:{k}", 0)) from None
        return tuple(out)

    def build_cross_section(self, name: str) -> CrossSection:
        if name not in self.cross_sections:
            raise ConfigError(f"no cross-section {name!r}; defined: {', '.join(self.cross_sections) or 'none'}")
        eqs = []
        for z, c in self.cross_sections[name]:
            where = f"cs:{name}:{z}"
            value = self._expr(c, where)
            if not value.is_constant():
                raise ConfigError(f"cross-section value {c!r} is not a constant", self.lines.get(where, 0))
            eqs.append((self._expr(z, where), value.constant_value()))
        return CrossSection(tuple(eqs), name, self.space)

    def build_aliases(self, name: str):
        table = self.aliases.get(name)
        if not table:
            return None
        return {k: self._expr(v, f"alias:{name}:{k}") for k, v in table.items()}
