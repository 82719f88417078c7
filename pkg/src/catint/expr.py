"""Function specifications accepted on the command line.

Accepted forms:

* ``step:U,c1,...,cm`` a level-``U`` step function, ``m = 2**(U*n)``
* ``poly:c0,c1,...`` a polynomial in ``x1`` with ascending coefficients
* ``pl:U,v0,...,vm`` breakpoint values of a piecewise-linear function on
  ``[0, 1]``, ``m = 2**U`` and ``v0 = 0``
* an arithmetic expression in ``x1..xn`` using ``+ - * /``, ``**``,
  unary minus, numeric literals and ``pow``, ``sin``, ``cos``, ``exp``, ``abs``

Expressions are checked against this grammar before anything is evaluated.
On the rational backend literals are read exactly and the transcendental
functions are refused.
"""
from __future__ import annotations

import ast
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .errors import CatIntError, ParseError, UnsupportedConfiguration
from .scalars import Backend, parse_scalar
from .stepfn import StepFunction
from .targets import PiecewiseLinear

_VAR = re.compile(r"x([1-9][0-9]*)$")
_BINOPS = {ast.Add: "+", ast.Sub: "-", ast.Mult: "*", ast.Div: "/", ast.Pow: "**"}
_TRANSCENDENTAL = {"sin", "cos", "exp"}
_FUNCS = {"pow": 2, "sin": 1, "cos": 1, "exp": 1, "abs": 1}


@dataclass(frozen=True)
class FunctionSpec:
    kind: str  # "expr", "step", "poly" or "pl"
    text: str
    n: int
    sampler: Optional[Callable] = None
    step: Optional[StepFunction] = None
    coeffs: Optional[tuple] = None
    breakpoints: Optional[PiecewiseLinear] = None


def variables_in(text: str) -> int:
    """Highest variable index used in an expression (0 if none)."""
    found = [int(m) for m in re.findall(r"\bx([1-9][0-9]*)\b", text)]
    return max(found, default=0)


def _col(node) -> int:
    return getattr(node, "col_offset", 0) + 1


def compile_expression(text: str, n: int, backend: Backend = Backend.FLOAT) -> Callable:
    """Compile ``text`` to a function of ``n`` coordinates.

    On the float and complex backends the result accepts numpy arrays.
    """
    src = text.replace("−", "-")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"syntax error in {text!r}: {exc.msg}", exc.offset or len(src)) from None
    exact = backend is Backend.RATIONAL

    def build(node):
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
                raise ParseError(f"unsupported literal {node.value!r}", _col(node))
            if exact:
                value = Fraction(ast.get_source_segment(src, node))
            else:
                value = backend.coerce(node.value)
            return lambda xs: value
        if isinstance(node, ast.Name):
            m = _VAR.match(node.id)
            if not m:
                raise ParseError(f"unknown name {node.id!r}", _col(node))
            i = int(m.group(1)) - 1
            if i >= n:
                raise ParseError(f"variable {node.id} exceeds dimension {n}", _col(node))
            return lambda xs: xs[i]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            inner = build(node.operand)
            if isinstance(node.op, ast.USub):
                return lambda xs: -inner(xs)
            return inner
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            left, right = build(node.left), build(node.right)
            op = type(node.op)
            if op is ast.Add:
                return lambda xs: left(xs) + right(xs)
            if op is ast.Sub:
                return lambda xs: left(xs) - right(xs)
            if op is ast.Mult:
                return lambda xs: left(xs) * right(xs)
            if op is ast.Div:
                return lambda xs: left(xs) / right(xs)
            return _power(left, right, exact)
        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCS:
                name = getattr(node.func, "id", "?")
                raise ParseError(f"unknown function {name!r}", _col(node))
            name = node.func.id
            if node.keywords or len(node.args) != _FUNCS[name]:
                raise ParseError(f"{name} takes {_FUNCS[name]} positional argument(s)", _col(node))
            if exact and name in _TRANSCENDENTAL:
                raise UnsupportedConfiguration(f"{name} has no exact value on the rational backend")
            args = [build(a) for a in node.args]
            if name == "pow":
                return _power(args[0], args[1], exact)
            if name == "abs":
                return lambda xs: abs(args[0](xs)) if exact else np.abs(args[0](xs))
            fn = {"sin": np.sin, "cos": np.cos, "exp": np.exp}[name]
            return lambda xs: fn(args[0](xs))
        raise ParseError(f"unsupported syntax {type(node).__name__}", _col(node))

    body = build(tree.body)

    def g(*xs):
        if len(xs) != n:
            raise TypeError(f"expected {n} coordinates, got {len(xs)}")
        return body(xs)

    return g


def _power(base, expo, exact: bool):
    if not exact:
        return lambda xs: base(xs) ** expo(xs)

    def f(xs):
        e = expo(xs)
        if isinstance(e, Fraction) and e.denominator != 1:
            raise ValueError("fractional powers are not exact")
        return base(xs) ** int(e)

    return f


def _split_literal(body: str) -> list[str]:
    return [p.strip() for p in body.split(",") if p.strip()]


def parse_function(text: str, n: Optional[int] = None, backend: Backend = Backend.FLOAT) -> FunctionSpec:
    """Parse any accepted function form; ``n`` defaults to the variables used."""
    text = text.strip()
    if text.startswith("step:"):
        parts = _split_literal(text[5:])
        if len(parts) < 2:
            raise ParseError("step literal needs a level and coefficients", 6)
        try:
            u = int(parts[0])
        except ValueError:
            raise ParseError(f"bad level {parts[0]!r}", 6) from None
        n = n or 1
        vals = [parse_scalar(p, backend) for p in parts[1:]]
        if len(vals) != 2 ** (u * n):
            raise ParseError(f"level {u} in dimension {n} needs {2 ** (u * n)} coefficients, got {len(vals)}")
        return FunctionSpec("step", text, n, step=StepFunction(n, u, vals, backend))
    if text.startswith("poly:"):
        coeffs = tuple(parse_scalar(p, backend) for p in _split_literal(text[5:]))
        if not coeffs:
            raise ParseError("polynomial needs coefficients", 6)
        n = n or 1

        def sampler(*xs):
            acc = coeffs[-1] + 0 * xs[0]
            for c in reversed(coeffs[:-1]):
                acc = acc * xs[0] + c
            return acc

        return FunctionSpec("poly", text, n, sampler=sampler, coeffs=coeffs)
    if text.startswith("pl:"):
        parts = _split_literal(text[3:])
        try:
            u = int(parts[0])
        except (ValueError, IndexError):
            raise ParseError("breakpoint literal needs a level", 4) from None
        vals = [parse_scalar(p, backend) for p in parts[1:]]
        dtype = object if backend is Backend.RATIONAL else backend.dtype
        try:
            F = PiecewiseLinear(u, np.array(vals, dtype=dtype))
        except (CatIntError, ValueError) as exc:
            raise ParseError(f"bad breakpoint literal: {exc}") from None
        return FunctionSpec("pl", text, 1, breakpoints=F)
    used = variables_in(text)
    n = n or max(used, 1)
    return FunctionSpec("expr", text, n, sampler=compile_expression(text, n, backend))


__all__ = ["FunctionSpec", "compile_expression", "parse_function", "variables_in"]
