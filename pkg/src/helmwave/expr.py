"""Tiny arithmetic grammar for functions written in config files.

Accepted: numbers, ``pi``, variables ``x1..xn``, the operators
``+ - * / ^`` (``^`` is power; ``**`` also works) and the functions
``sin cos exp`` plus ``sqrt`` and ``besselj(order, z)``.  Anything else,
including attribute access and names outside this list, is rejected
before evaluation.
"""
from __future__ import annotations

import ast
import math
import re

import numpy as np
from scipy import special

from .exceptions import ConfigError

__all__ = ["compile_expression"]

_FUNCS = {
    "sin": (np.sin, 1),
    "cos": (np.cos, 1),
    "exp": (np.exp, 1),
    "sqrt": (np.sqrt, 1),
    "besselj": (special.jv, 2),
}
_BINOPS = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.divide,
    ast.Pow: np.power,
}
_VAR = re.compile(r"x([1-9][0-9]*)\Z")


def _validate(node, dimension, field):
    if isinstance(node, ast.Expression):
        return _validate(node.body, dimension, field)
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise ConfigError(f"unsupported literal {node.value!r}", field, "bad_value")
        return
    if isinstance(node, ast.Name):
        if node.id == "pi":
            return
        m = _VAR.match(node.id)
        if m is None:
            raise ConfigError(f"unknown name {node.id!r}", field, "bad_value")
        if int(m.group(1)) > dimension:
            raise ConfigError(f"{node.id} exceeds the dimension {dimension}", field, "bad_value")
        return
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        _validate(node.left, dimension, field)
        _validate(node.right, dimension, field)
        return
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
        _validate(node.operand, dimension, field)
        return
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS:
        _, arity = _FUNCS[node.func.id]
        if node.keywords or len(node.args) != arity:
            raise ConfigError(f"{node.func.id} takes {arity} argument(s)", field, "bad_value")
        for a in node.args:
            _validate(a, dimension, field)
        return
    raise ConfigError(f"unsupported syntax: {ast.dump(node)[:40]}", field, "bad_value")


def _eval(node, X):
    if isinstance(node, ast.Constant):
        return float(node.value)
    if isinstance(node, ast.Name):
        if node.id == "pi":
            return math.pi
        return X[:, int(node.id[1:]) - 1]
    if isinstance(node, ast.BinOp):
        return _BINOPS[type(node.op)](_eval(node.left, X), _eval(node.right, X))
    if isinstance(node, ast.UnaryOp):
        v = _eval(node.operand, X)
        return -v if isinstance(node.op, ast.USub) else v
    fn, _ = _FUNCS[node.func.id]
    return fn(*[_eval(a, X) for a in node.args])


def compile_expression(text: str, dimension: int, field: str = "expression"):
    """Return f(X) -> values for an (m, dimension) array of points."""
    if not isinstance(text, str) or not text.strip():
        raise ConfigError("expression must be a nonempty string", field, "bad_value")
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse expression: {exc.msg}", field, "bad_value") from None
    _validate(tree, dimension, field)
    body = tree.body

    def f(X):
        X = np.asarray(X, dtype=float).reshape(-1, dimension)
        with np.errstate(all="ignore"):
            out = np.asarray(_eval(body, X), dtype=float)
        return np.broadcast_to(out, (len(X),)).copy() if out.ndim == 0 else out

    f.source = text
    return f
