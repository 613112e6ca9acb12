from __future__ import annotations

from . import ast

_WEI_PER_ETHER = 10**18


def unparse_expr(expr) -> str:
    if isinstance(expr, ast.IntLit):
        if expr.ether and expr.value % _WEI_PER_ETHER == 0:
            return f"{expr.value // _WEI_PER_ETHER} ether"
        return str(expr.value)
    if isinstance(expr, ast.AddrLit):
        return "0x" + format(expr.value, "040x")
    if isinstance(expr, ast.BoolLit):
        return "true" if expr.value else "false"
    if isinstance(expr, ast.Name):
        return expr.id
    if isinstance(expr, ast.Index):
        return f"{_operand(expr.base)}[{unparse_expr(expr.key)}]"
    if isinstance(expr, ast.Unary):
        return f"{expr.op} {_operand(expr.operand)}"
    if isinstance(expr, ast.Binary):
        return f"{_operand(expr.left)} {expr.op} {_operand(expr.right)}"
    raise TypeError(f"not an expression: {expr!r}")


def _operand(expr) -> str:
    text = unparse_expr(expr)
    if isinstance(expr, (ast.Binary, ast.Unary)):
        return f"({text})"
    return text


def unparse_stmt(stmt) -> str:
    if isinstance(stmt, ast.Assign):
        return f"do {unparse_expr(stmt.target)} = {unparse_expr(stmt.value)}"
    if isinstance(stmt, ast.Let):
        return f"let {stmt.name} = {unparse_expr(stmt.value)}"
    head = stmt.port + (f".{stmt.selector}" if stmt.selector else "")
    return f"emit {head}({', '.join(unparse_expr(a) for a in stmt.args)})"


def unparse(decl: ast.ActorDecl) -> str:
    lines = [f"actor {decl.name}"]
    for p in decl.inputs + decl.outputs:
        lines.append(f"  {p.direction} {p.name} : {p.token_type}")
    for v in decl.state_vars:
        init = f" = {unparse_expr(v.initializer)}" if v.initializer is not None else ""
        lines.append(f"  state {v.name} : {v.var_type}{init}")
    for a in decl.actions:
        head = f"  action {a.name}"
        if a.consumes:
            parts = [c.port + (f"[{', '.join(c.vars)}]" if c.vars else "") for c in a.consumes]
            head += " : " + ", ".join(parts)
        lines.append(head)
        for g in a.guards:
            lines.append(f"    guard {unparse_expr(g)}")
        for s in a.body:
            lines.append(f"    {unparse_stmt(s)}")
        lines.append("  end")
    if decl.schedule is not None:
        lines.append(f"  schedule {decl.schedule.initial}")
        for t in decl.schedule.transitions:
            lines.append(f"    {t.source} : {t.action} -> {t.target}")
        lines.append("  end")
    lines.append("end")
    return "\n".join(lines) + "\n"
