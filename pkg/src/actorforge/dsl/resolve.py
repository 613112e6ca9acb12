"""Name resolution and type checking for parsed actors."""
from __future__ import annotations

import copy

from ..diagnostics import Diagnostic, ResolveError
from ..values import UINT_MAX
from . import ast

_ARITH = ("+", "-", "*", "/")
_ORDER = ("<", "<=", ">", ">=")
_EQUALITY = ("==", "!=")
_LOGIC = ("and", "or")


class _Scope:
    """Flat name -> (binding kind, type) table; actors have no nesting."""

    def __init__(self, names=None):
        self.names = dict(names or {})

    def child(self):
        return _Scope(self.names)

    def bind(self, name, kind, typ):
        self.names[name] = (kind, typ)

    def get(self, name):
        return self.names.get(name)


class Resolver:
    def __init__(self, decl: ast.ActorDecl):
        self.decl = decl
        self.diagnostics: list[Diagnostic] = []

    def report(self, kind: str, message: str, span):
        self.diagnostics.append(Diagnostic(kind, message, span))

    def run(self):
        decl = self.decl
        actor_scope = _Scope()
        seen: dict[str, str] = {}

        for port in decl.inputs + decl.outputs:
            if port.name in seen:
                self.report("NameError", f"duplicate declaration of {port.name!r}", port.span)
            seen[port.name] = "port"
            if port.token_type not in ast.PORT_TYPES:
                self.report("TypeError", f"port {port.name!r} cannot carry {port.token_type}", port.span)
            actor_scope.bind(port.name, "port:" + port.direction, port.token_type)

        for var in decl.state_vars:
            if var.name in seen:
                self.report("NameError", f"duplicate declaration of {var.name!r}", var.span)
            seen[var.name] = "state"
            if var.var_type not in ast.SCALAR_TYPES and var.var_type != ast.BALANCE_MAP:
                self.report("TypeError", f"state variable {var.name!r} cannot have type {var.var_type}", var.span)
            if var.initializer is not None:
                if var.var_type.name == "map":
                    self.report("TypeError", f"map {var.name!r} cannot have an initializer", var.span)
                elif any(isinstance(e, ast.Name) for e in ast.walk_expr(var.initializer)):
                    self.report("TypeError", f"initializer of {var.name!r} is not a constant", var.span)
                else:
                    t = self.expr(var.initializer, _Scope())
                    self.expect_type(var.initializer, t, var.var_type)
            actor_scope.bind(var.name, "state", var.var_type)

        action_names = set()
        for action in decl.actions:
            if action.name in action_names:
                self.report("NameError", f"duplicate action {action.name!r}", action.span)
            action_names.add(action.name)
            self.action(action, actor_scope)

        if decl.schedule is not None:
            for t in decl.schedule.transitions:
                if t.action not in action_names:
                    self.report("NameError", f"schedule references unknown action {t.action!r}", t.span)

        if self.diagnostics:
            raise ResolveError(self.diagnostics)
        decl.resolved = True
        return decl

    # -- actions --------------------------------------------------------------

    def action(self, action: ast.ActionDecl, actor_scope: _Scope):
        scope = actor_scope.child()
        consumed = set()
        for c in action.consumes:
            entry = actor_scope.get(c.port)
            if entry is None or not entry[0].startswith("port"):
                self.report("NameError", f"unknown port {c.port!r}", c.span)
                continue
            kind, typ = entry
            if kind != "port:in":
                self.report("DirectionError", f"cannot read from output port {c.port!r}", c.span)
                continue
            if c.port in consumed:
                self.report("NameError", f"port {c.port!r} consumed twice", c.span)
            consumed.add(c.port)
            if typ.is_record:
                if c.vars:
                    self.report("TypeError", f"{typ} port {c.port!r} binds sender and value implicitly", c.span)
                bindings = list(ast.RECORD_FIELDS.items())
            else:
                if not c.vars:
                    self.report("TypeError", f"port {c.port!r} needs a token pattern", c.span)
                bindings = [(v, typ) for v in c.vars]
            for name, t in bindings:
                if scope.get(name) is not None:
                    self.report("NameError", f"pattern variable {name!r} shadows an existing name", c.span)
                scope.bind(name, "pattern", t)

        guard_scope = scope.child()
        for g in action.guards:
            t = self.expr(g, guard_scope)
            self.expect_type(g, t, ast.BOOL)

        for stmt in action.body:
            if isinstance(stmt, ast.Let):
                t = self.expr(stmt.value, scope)
                if scope.get(stmt.name) is not None:
                    self.report("NameError", f"local {stmt.name!r} shadows an existing name", stmt.span)
                scope.bind(stmt.name, "local", t)
            elif isinstance(stmt, ast.Assign):
                self.assign(stmt, scope)
            else:
                self.emit(stmt, scope)

    def assign(self, stmt: ast.Assign, scope: _Scope):
        target = stmt.target
        name = target.id if isinstance(target, ast.Name) else target.base.id
        entry = scope.get(name)
        value_t = self.expr(stmt.value, scope)
        if entry is None:
            self.report("NameError", f"unbound identifier {name!r}", target.span)
            return
        kind, typ = entry
        if kind == "port:in":
            self.report("DirectionError", f"cannot write to input port {name!r}", target.span)
            return
        if kind != "state":
            self.report("NameError", f"{name!r} is not a state variable", target.span)
            return
        if isinstance(target, ast.Name):
            target.binding, target.type = kind, typ
            if typ.name == "map":
                self.report("TypeError", f"cannot assign whole map {name!r}", target.span)
            else:
                self.expect_type(stmt.value, value_t, typ)
        else:
            target.base.binding, target.base.type = kind, typ
            if typ.name != "map":
                self.report("TypeError", f"{name!r} is not a map", target.span)
                return
            key_t = self.expr(target.key, scope)
            self.expect_type(target.key, key_t, typ.key)
            target.type = typ.value
            self.expect_type(stmt.value, value_t, typ.value)

    def emit(self, stmt: ast.Emit, scope: _Scope):
        arg_types = [self.expr(a, scope) for a in stmt.args]
        entry = scope.get(stmt.port)
        if entry is None or not entry[0].startswith("port"):
            self.report("NameError", f"unknown port {stmt.port!r}", stmt.span)
            return
        kind, typ = entry
        if kind != "port:out":
            self.report("DirectionError", f"cannot write to input port {stmt.port!r}", stmt.span)
            return
        if typ == ast.CALL:
            if stmt.selector is None:
                self.report("TypeError", f"call port {stmt.port!r} needs a function selector", stmt.span)
            expected = [ast.UINT]
        elif typ == ast.TRANSFER:
            expected = [ast.ADDRESS, ast.UINT]
        else:
            expected = [typ] * max(1, len(stmt.args))
        if typ != ast.CALL and stmt.selector is not None:
            self.report("TypeError", f"port {stmt.port!r} takes no selector", stmt.span)
        if len(stmt.args) != len(expected):
            self.report("TypeError", f"emit on {stmt.port!r} expects {len(expected)} value(s), got {len(stmt.args)}", stmt.span)
            return
        for arg, t, want in zip(stmt.args, arg_types, expected):
            self.expect_type(arg, t, want)

    # -- expressions ----------------------------------------------------------

    def expect_type(self, expr, actual, wanted):
        if actual is not None and actual != wanted:
            self.report("TypeError", f"expected {wanted}, found {actual}", expr.span)

    def expr(self, expr, scope: _Scope):
        """Return the type of ``expr`` (None once an error was reported)."""
        t = self._expr(expr, scope)
        expr.type = t
        return t

    def _expr(self, expr, scope):
        if isinstance(expr, ast.IntLit):
            if expr.value > UINT_MAX:
                self.report("TypeError", "integer literal exceeds uint256", expr.span)
            return ast.UINT
        if isinstance(expr, ast.AddrLit):
            if expr.value >= 2**160:
                self.report("TypeError", "address literal exceeds 20 bytes", expr.span)
            return ast.ADDRESS
        if isinstance(expr, ast.BoolLit):
            return ast.BOOL
        if isinstance(expr, ast.Name):
            entry = scope.get(expr.id)
            if entry is None:
                self.report("NameError", f"unbound identifier {expr.id!r}", expr.span)
                return None
            kind, typ = entry
            if kind.startswith("port"):
                self.report("DirectionError", f"port {expr.id!r} cannot be read inside an expression", expr.span)
                return None
            expr.binding = kind
            return typ
        if isinstance(expr, ast.Index):
            base_t = self.expr(expr.base, scope)
            key_t = self.expr(expr.key, scope)
            if base_t is None:
                return None
            if base_t.name != "map":
                self.report("TypeError", f"cannot index a value of type {base_t}", expr.span)
                return None
            self.expect_type(expr.key, key_t, base_t.key)
            return base_t.value
        if isinstance(expr, ast.Unary):
            t = self.expr(expr.operand, scope)
            self.expect_type(expr.operand, t, ast.BOOL)
            return ast.BOOL
        if isinstance(expr, ast.Binary):
            lt = self.expr(expr.left, scope)
            rt = self.expr(expr.right, scope)
            if expr.op in _ARITH or expr.op in _ORDER:
                self.expect_type(expr.left, lt, ast.UINT)
                self.expect_type(expr.right, rt, ast.UINT)
                return ast.UINT if expr.op in _ARITH else ast.BOOL
            if expr.op in _LOGIC:
                self.expect_type(expr.left, lt, ast.BOOL)
                self.expect_type(expr.right, rt, ast.BOOL)
                return ast.BOOL
            if lt is not None and rt is not None:
                if lt != rt:
                    self.report("TypeError", f"cannot compare {lt} with {rt}", expr.span)
                elif lt.name == "map":
                    self.report("TypeError", "maps are not comparable", expr.span)
            return ast.BOOL
        raise TypeError(f"unknown expression node {expr!r}")


def resolve(decl: ast.ActorDecl) -> ast.ActorDecl:
    """Return an annotated copy of ``decl``; raise ResolveError with all diagnostics."""
    return Resolver(copy.deepcopy(decl)).run()
