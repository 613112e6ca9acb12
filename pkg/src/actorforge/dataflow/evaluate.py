"""Expression evaluation over actor state; pure, never mutates its inputs."""
from __future__ import annotations

from ..dsl import ast
from ..values import Address, EvalError, check_uint


def default_value(t: ast.TypeExpr):
    if t.name == "map":
        return {}
    if t.name == "bool":
        return False
    if t.name == "address":
        return Address(0)
    return 0


def eval_expr(expr, state: dict, bindings: dict):
    if isinstance(expr, ast.IntLit):
        return expr.value
    if isinstance(expr, ast.AddrLit):
        return Address(expr.value)
    if isinstance(expr, ast.BoolLit):
        return expr.value
    if isinstance(expr, ast.Name):
        if expr.id in bindings:
            return bindings[expr.id]
        return state[expr.id]
    if isinstance(expr, ast.Index):
        table = eval_expr(expr.base, state, bindings)
        return table.get(eval_expr(expr.key, state, bindings), 0)
    if isinstance(expr, ast.Unary):
        return not eval_expr(expr.operand, state, bindings)
    if isinstance(expr, ast.Binary):
        op = expr.op
        left = eval_expr(expr.left, state, bindings)
        if op == "and":
            return bool(left) and bool(eval_expr(expr.right, state, bindings))
        if op == "or":
            return bool(left) or bool(eval_expr(expr.right, state, bindings))
        right = eval_expr(expr.right, state, bindings)
        if op == "+":
            return check_uint(left + right)
        if op == "-":
            return check_uint(left - right)
        if op == "*":
            return check_uint(left * right)
        if op == "/":
            if right == 0:
                raise EvalError("DivisionByZero", "division by zero")
            return left // right
        if op == "==":
            return left == right
        if op == "!=":
            return left != right
        if op == "<":
            return left < right
        if op == "<=":
            return left <= right
        if op == ">":
            return left > right
        if op == ">=":
            return left >= right
    raise EvalError("Internal", f"cannot evaluate {expr!r}")


def const_value(expr):
    return eval_expr(expr, {}, {})
