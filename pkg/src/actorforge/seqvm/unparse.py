"""Render contract ASTs back to dialect text."""
from __future__ import annotations

from ..values import WEI_PER_ETHER, Address
from . import ast as S

_PREC = {"||": 1, "&&": 2, "==": 3, "!=": 3, "<": 4, "<=": 4, ">": 4, ">=": 4,
         "+": 5, "-": 5, "*": 6, "/": 6}
_UNARY = 7


def _prec(e) -> int:
    if isinstance(e, S.BinOp):
        return _PREC[e.op]
    if isinstance(e, S.UnOp):
        return _UNARY
    return 9


def expr_text(e) -> str:
    if isinstance(e, S.Num):
        if e.unit == "ether" and e.value % WEI_PER_ETHER == 0:
            return f"{e.value // WEI_PER_ETHER} ether"
        return f"{e.value} wei" if e.unit == "wei" else str(e.value)
    if isinstance(e, S.AddrConst):
        return str(Address(e.value))
    if isinstance(e, S.BoolConst):
        return "true" if e.value else "false"
    if isinstance(e, S.Str):
        return f'"{e.value}"'
    if isinstance(e, S.Var):
        return e.name
    if isinstance(e, S.MsgField):
        return f"msg.{e.name}"
    if isinstance(e, S.This):
        return "this"
    if isinstance(e, S.Cast):
        return f"{e.target}({expr_text(e.operand)})"
    if isinstance(e, S.Member):
        return f"{_atom(e.base)}.{e.name}"
    if isinstance(e, S.IndexExpr):
        return f"{_atom(e.base)}[{expr_text(e.key)}]"
    if isinstance(e, S.Call):
        opts = f"{{value: {expr_text(e.value)}}}" if e.value is not None else ""
        return f"{expr_text(e.callee)}{opts}({', '.join(expr_text(a) for a in e.args)})"
    if isinstance(e, S.UnOp):
        inner = expr_text(e.operand)
        return f"{e.op}({inner})" if _prec(e.operand) < _UNARY else f"{e.op}{inner}"
    if isinstance(e, S.BinOp):
        p = _PREC[e.op]
        left = expr_text(e.left)
        right = expr_text(e.right)
        if _prec(e.left) < p:
            left = f"({left})"
        if _prec(e.right) <= p:
            right = f"({right})"
        return f"{left} {e.op} {right}"
    raise TypeError(f"cannot render {type(e).__name__}")


def _atom(e) -> str:
    text = expr_text(e)
    return f"({text})" if _prec(e) < 9 else text


def stmt_lines(st, indent: str = "") -> list:
    if isinstance(st, S.Require):
        msg = f', "{st.message}"' if st.message is not None else ""
        return [f"{indent}require({expr_text(st.cond)}{msg});"]
    if isinstance(st, S.Return):
        return [f"{indent}return;" if st.value is None else f"{indent}return {expr_text(st.value)};"]
    if isinstance(st, S.LocalDecl):
        init = f" = {expr_text(st.value)}" if st.value is not None else ""
        return [f"{indent}{st.var_type} {st.name}{init};"]
    if isinstance(st, S.AssignStmt):
        return [f"{indent}{expr_text(st.target)} = {expr_text(st.value)};"]
    if isinstance(st, S.ExprStmt):
        return [f"{indent}{expr_text(st.expr)};"]
    if isinstance(st, S.If):
        lines = [f"{indent}if ({expr_text(st.cond)}) {{"]
        for s in st.then:
            lines += stmt_lines(s, indent + "    ")
        if st.orelse:
            lines.append(f"{indent}}} else {{")
            for s in st.orelse:
                lines += stmt_lines(s, indent + "    ")
        lines.append(f"{indent}}}")
        return lines
    raise TypeError(f"cannot render {type(st).__name__}")
