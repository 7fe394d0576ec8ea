"""Tiny arithmetic expression language for coefficient files.

Grammar: numbers, ``x``, ``pi``, ``+ - * / ^`` (``^`` is power), parentheses and
the functions ``exp sin cos sqrt floor``.  Expressions are parsed with :mod:`ast`
and only the whitelisted node types are accepted; the result is compiled once
into a plain Python function of ``x``.
"""
from __future__ import annotations

import ast
import math

from .errors import ExpressionError

_FUNCS = {
    "exp": math.exp,
    "sin": math.sin,
    "cos": math.cos,
    "sqrt": math.sqrt,
    "floor": math.floor,
}
_CONSTS = {"pi": math.pi}
_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)
_UNARY = (ast.UAdd, ast.USub)


def _check(node: ast.AST) -> None:
    if isinstance(node, ast.Expression):
        _check(node.body)
    elif isinstance(node, ast.BinOp):
        if not isinstance(node.op, _BINOPS):
            raise ExpressionError(f"operator {type(node.op).__name__} not allowed")
        _check(node.left)
        _check(node.right)
    elif isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, _UNARY):
            raise ExpressionError(f"operator {type(node.op).__name__} not allowed")
        _check(node.operand)
    elif isinstance(node, ast.Call):
        if not (isinstance(node.func, ast.Name) and node.func.id in _FUNCS):
            raise ExpressionError("only exp, sin, cos, sqrt, floor may be called")
        if len(node.args) != 1 or node.keywords:
            raise ExpressionError(f"{node.func.id} takes exactly one argument")
        _check(node.args[0])
    elif isinstance(node, ast.Name):
        if node.id != "x" and node.id not in _CONSTS:
            raise ExpressionError(f"unknown name {node.id!r}")
    elif isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)) or isinstance(node.value, bool):
            raise ExpressionError(f"bad literal {node.value!r}")
    else:
        raise ExpressionError(f"syntax {type(node).__name__} not allowed")


def compile_lambda(body: str):
    """``lambda x: body`` in the restricted namespace; ``body`` must be validated."""
    env = {"__builtins__": {}, "float": float, **_FUNCS, **_CONSTS}
    return eval(f"lambda x: {body}", env)


class Expr:
    """A compiled expression in ``x``; callable and picklable.

    >>> Expr("2^floor(x)")(1.5)
    2.0
    """

    __slots__ = ("source", "_fn", "text")

    def __init__(self, source: str):
        self.source = str(source)
        text = self.source.replace("^", "**")
        try:
            tree = ast.parse(text, mode="eval")
        except SyntaxError as exc:
            raise ExpressionError(f"cannot parse {self.source!r}: {exc.msg}") from None
        _check(tree)
        self.text = text
        self._fn = compile_lambda(f"({text})")

    def __call__(self, x: float) -> float:
        return float(self._fn(x))

    def __reduce__(self):
        return (Expr, (self.source,))

    def __repr__(self) -> str:
        return f"Expr({self.source!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Expr) and other.source == self.source

    def __hash__(self) -> int:
        return hash(self.source)
