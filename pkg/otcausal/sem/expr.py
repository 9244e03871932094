"""Mechanism expressions of structural equations.

Expressions use the duckdb SQL expression grammar, parsed with sqlglot and
evaluated column-wise with numpy:

* ``+ - * /``, unary minus, parentheses and numeric literals
* ``POWER(x, n)`` or ``x ^ n``
* ``LN(x)``, ``LOG(x)`` (natural log), ``LOG(b, x)``, ``EXP``, ``SQRT``, ``ABS``
* identifiers ``X1..Xd`` for variables, ``U`` for the node's own noise and
  ``V`` for the additive core inside a post-nonlinear map
"""

from __future__ import annotations

import re
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np
import sqlglot
from sqlglot import exp

from ..errors import ConfigError

_VARIABLE = re.compile(r"^X(\d+)$")
NOISE = "U"
CORE = "V"

_UNARY = {
    exp.Ln: np.log,
    exp.Exp: np.exp,
    exp.Sqrt: np.sqrt,
    exp.Abs: np.abs,
}


@dataclass(frozen=True)
class Mechanism:
    """A parsed expression; build it with :meth:`parse`."""

    source: str
    tree: exp.Expression = field(compare=False, repr=False)

    @classmethod
    def parse(cls, text: str) -> Mechanism:
        """Parse ``text``.

        Raises:
            ConfigError: On syntax errors or unsupported constructs
        """
        try:
            tree = sqlglot.parse_one(text, read="duckdb")
        except sqlglot.errors.ParseError as e:
            raise ConfigError(f"cannot parse expression {text!r}: {e}") from e
        mechanism = cls(text.strip(), tree)
        mechanism._check(tree)
        return mechanism

    def _check(self, node: exp.Expression) -> None:
        for sub in node.walk():
            if isinstance(sub, exp.Column):
                name = sub.name
                if name not in (NOISE, CORE) and not _VARIABLE.match(name):
                    raise ConfigError(f"unknown identifier {name!r} in {self.source!r}")
            elif isinstance(sub, (exp.Anonymous, exp.Func)) and type(sub) not in (*_UNARY, exp.Log, exp.Pow):
                raise ConfigError(f"unsupported function {sub.sql(dialect='duckdb')!r} in {self.source!r}")

    def names(self) -> set[str]:
        return {c.name for c in self.tree.find_all(exp.Column)}

    def variables(self) -> set[int]:
        """0-based indices of the ``X`` variables referenced."""
        out = set()
        for name in self.names():
            match = _VARIABLE.match(name)
            if match:
                out.add(int(match.group(1)) - 1)
        return out

    def uses_noise(self) -> bool:
        return NOISE in self.names()

    def uses_core(self) -> bool:
        return CORE in self.names()

    def evaluate(self, env: Mapping[str, np.ndarray]) -> np.ndarray:
        """Evaluate with identifiers bound by ``env`` (``"X1"``, ``"U"``, ...).

        Raises:
            ConfigError: If an identifier is unbound
        """
        with np.errstate(all="ignore"):
            return np.asarray(_evaluate(self.tree, env, self.source), dtype=float)

    def __str__(self) -> str:
        return self.source


def _evaluate(node: exp.Expression, env: Mapping[str, np.ndarray], source: str):
    if isinstance(node, exp.Paren):
        return _evaluate(node.this, env, source)
    if isinstance(node, exp.Literal):
        if node.is_string:
            raise ConfigError(f"string literal in {source!r}")
        return float(node.this)
    if isinstance(node, exp.Column):
        try:
            return env[node.name]
        except KeyError:
            raise ConfigError(f"identifier {node.name!r} is not bound in {source!r}") from None
    if isinstance(node, exp.Neg):
        return -_evaluate(node.this, env, source)
    if isinstance(node, exp.Add):
        return _evaluate(node.this, env, source) + _evaluate(node.expression, env, source)
    if isinstance(node, exp.Sub):
        return _evaluate(node.this, env, source) - _evaluate(node.expression, env, source)
    if isinstance(node, exp.Mul):
        return _evaluate(node.this, env, source) * _evaluate(node.expression, env, source)
    if isinstance(node, exp.Div):
        return np.divide(_evaluate(node.this, env, source), _evaluate(node.expression, env, source))
    if isinstance(node, exp.Pow):
        return np.power(_evaluate(node.this, env, source), _evaluate(node.expression, env, source))
    if isinstance(node, exp.Log):
        if node.expression is None:
            return np.log(_evaluate(node.this, env, source))
        return np.log(_evaluate(node.expression, env, source)) / np.log(_evaluate(node.this, env, source))
    for kind, fn in _UNARY.items():
        if isinstance(node, kind):
            return fn(_evaluate(node.this, env, source))
    raise ConfigError(f"unsupported construct {node.sql(dialect='duckdb')!r} in {source!r}")
