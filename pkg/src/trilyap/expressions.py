"""Tiny closed-form expression grammar for registry entries.

Custom psi operators, nonlinearities and coefficients are configured as
strings like ``"s*(1+abs(s))"`` rather than arbitrary code, so scenarios
stay serializable and deterministic.  The grammar is a whitelisted subset
of Python expressions over one variable:

    literals, + - * / **, unary -, abs(x), sign(x), sin(x), cos(x),
    exp(x), sqrt(x), and the variable name given at compile time.

Compiled callables accept floats and numpy arrays alike.
"""

from __future__ import annotations

import ast
import math
from typing import Callable, Union

import numpy as np

from .errors import ConfigError

Number = Union[float, np.ndarray]


def _sign(x: Number) -> Number:
    if isinstance(x, np.ndarray):
        return np.sign(x)
    return float((x > 0) - (x < 0))


def _dispatch(np_func, math_func):
    def call(x: Number) -> Number:
        if isinstance(x, np.ndarray):
            return np_func(x)
        return math_func(x)

    return call


_FUNCTIONS: dict[str, Callable[[Number], Number]] = {
    "abs": abs,
    "sign": _sign,
    "sin": _dispatch(np.sin, math.sin),
    "cos": _dispatch(np.cos, math.cos),
    "exp": _dispatch(np.exp, math.exp),
    "sqrt": _dispatch(np.sqrt, math.sqrt),
}

_BINOPS = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.Div: lambda a, b: a / b,
    ast.Pow: lambda a, b: a**b,
}


def compile_expression(expr: str, variable: str = "s") -> Callable[[Number], Number]:
    """Compile ``expr`` into a callable of one numeric argument.

    Raises ConfigError for anything outside the grammar, so malformed
    scenario files fail at load time rather than mid-run.
    """
    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse expression {expr!r}: {exc}") from exc

    def build(node: ast.AST) -> Callable[[Number], Number]:
        if isinstance(node, ast.Expression):
            return build(node.body)
        if isinstance(node, ast.Constant):
            if not isinstance(node.value, (int, float)):
                raise ConfigError(f"non-numeric literal in {expr!r}")
            value = float(node.value)
            return lambda x: value
        if isinstance(node, ast.Name):
            if node.id != variable:
                raise ConfigError(f"unknown name {node.id!r} in {expr!r}")
            return lambda x: x
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            inner = build(node.operand)
            if isinstance(node.op, ast.UAdd):
                return inner
            return lambda x: -inner(x)
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            op = _BINOPS[type(node.op)]
            left, right = build(node.left), build(node.right)
            return lambda x: op(left(x), right(x))
        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCTIONS:
                raise ConfigError(f"unsupported call in {expr!r}")
            if len(node.args) != 1 or node.keywords:
                raise ConfigError(f"functions take one positional argument: {expr!r}")
            func = _FUNCTIONS[node.func.id]
            arg = build(node.args[0])
            return lambda x: func(arg(x))
        raise ConfigError(f"unsupported syntax {type(node).__name__} in {expr!r}")

    return build(tree)
