"""Recursive-descent parser for the contract dialect.

    source    := contract*
    contract  := 'contract' IDENT '{' member* '}'
    member    := type IDENT ('=' expr)? ';'
               | 'constructor' '(' params ')' modifier* block
               | 'fallback' '(' ')' modifier* block
               | 'function' IDENT '(' params ')' modifier* ('returns' '(' type ')')? block
    stmt      := 'require' '(' expr (',' STRING)? ')' ';'
               | 'if' '(' expr ')' block ('else' (block | if))?
               | 'return' expr? ';'
               | type IDENT ('=' expr)? ';'
               | expr ('=' expr)? ';'

Pragma lines are dropped by the lexer.
"""
from __future__ import annotations

from ..diagnostics import Diagnostic, ParseError, ResolveError
from ..dsl.parser import Parser
from ..values import WEI_PER_ETHER
from . import ast as S
from .lexer import tokenize

_MODIFIERS = ("public", "external", "internal", "payable", "view")
_TYPE_START = ("uint", "uint256", "address", "bool", "mapping")
# loosest first
_LEVELS = (("||",), ("&&",), ("==", "!="), ("<", "<=", ">", ">="), ("+", "-"), ("*", "/"))


class ContractParser(Parser):
    def parse_source(self) -> list:
        contracts = []
        while not self.at_end():
            contracts.append(self.contract())
        return contracts

    def contract(self) -> S.ContractDef:
        start = self.expect("contract")
        name = self.ident().text
        self.expect("{")
        state_vars, functions = [], []
        ctor = fallback = None
        while not self.at("}"):
            if self.at("function"):
                functions.append(self.function())
            elif self.at("constructor"):
                if ctor is not None:
                    raise ParseError.at(self.tok.span, "duplicate constructor")
                ctor = self.special("constructor")
            elif self.at("fallback"):
                if fallback is not None:
                    raise ParseError.at(self.tok.span, "duplicate fallback")
                fallback = self.special("fallback")
            elif self.tok.text in _TYPE_START:
                span = self.tok.span
                t = self.type()
                var = self.ident().text
                init = self.expr() if self.accept("=") else None
                self.expect(";")
                state_vars.append(S.StateVar(var, t, init, span))
            else:
                raise self.error(["'function'", "'constructor'", "'fallback'", "type", "'}'"])
        self.expect("}")
        return S.ContractDef(name, state_vars, functions, ctor, fallback, start.span)

    def type(self) -> S.SolType:
        tok = self.tok
        if self.accept("mapping"):
            self.expect("(")
            key = self.type()
            self.expect("=>")
            value = self.type()
            self.expect(")")
            return S.mapping(key, value)
        if tok.text in ("uint", "uint256"):
            self.advance()
            return S.UINT
        if tok.text in ("address", "bool"):
            self.advance()
            return S.SolType(tok.text)
        raise self.error(["type"])

    def params(self) -> list:
        self.expect("(")
        out = []
        if not self.at(")"):
            while True:
                t = self.type()
                out.append(S.Param(self.ident().text, t))
                if not self.accept(","):
                    break
        self.expect(")")
        return out

    def modifiers(self):
        mods = []
        while self.tok.kind == "keyword" and self.tok.text in _MODIFIERS:
            mods.append(self.advance().text)
        return mods

    def _make(self, name, kind, params, mods, body, returns, span) -> S.FunctionDef:
        vis = next((m for m in mods if m in ("public", "external", "internal")), "public")
        return S.FunctionDef(name, kind, params, body, "payable" in mods, "view" in mods, vis,
                             returns, span)

    def function(self) -> S.FunctionDef:
        start = self.expect("function")
        # `function fallback()` is an ordinary function named after a keyword
        if self.tok.kind not in ("ident", "keyword"):
            raise self.error(["identifier"])
        name = self.advance().text
        params = self.params()
        mods = self.modifiers()
        returns = None
        if self.accept("returns"):
            self.expect("(")
            returns = self.type()
            self.expect(")")
        return self._make(name, "function", params, mods, self.block(), returns, start.span)

    def special(self, kind: str) -> S.FunctionDef:
        start = self.advance()
        params = self.params()
        if kind == "fallback" and params:
            raise ParseError.at(start.span, "fallback takes no parameters")
        mods = self.modifiers()
        return self._make(kind, kind, params, mods, self.block(), None, start.span)

    # -- statements -------------------------------------------------------------

    def block(self) -> list:
        self.expect("{")
        body = []
        while not self.at("}"):
            body.append(self.statement())
        self.expect("}")
        return body

    def statement(self):
        tok = self.tok
        span = tok.span
        if self.accept("require"):
            self.expect("(")
            cond = self.expr()
            msg = None
            if self.accept(","):
                if self.tok.kind != "string":
                    raise self.error(["string"])
                msg = self.advance().value
            self.expect(")")
            self.expect(";")
            return S.Require(cond, msg, span)
        if self.at("if"):
            return self.if_stmt()
        if self.accept("return"):
            value = None if self.at(";") else self.expr()
            self.expect(";")
            return S.Return(value, span)
        # `address(x)` starts an expression, `address x` a declaration
        if tok.text in _TYPE_START and not (tok.text == "address" and self.peek().text == "("):
            t = self.type()
            name = self.ident().text
            value = self.expr() if self.accept("=") else None
            self.expect(";")
            return S.LocalDecl(t, name, value, span)
        target = self.expr()
        if self.accept("="):
            if not isinstance(target, (S.Var, S.IndexExpr)):
                raise ParseError.at(span, "invalid assignment target")
            value = self.expr()
            self.expect(";")
            return S.AssignStmt(target, value, span)
        self.expect(";")
        return S.ExprStmt(target, span)

    def if_stmt(self) -> S.If:
        span = self.expect("if").span
        self.expect("(")
        cond = self.expr()
        self.expect(")")
        then = self.block()
        orelse = []
        if self.accept("else"):
            orelse = [self.if_stmt()] if self.at("if") else self.block()
        return S.If(cond, then, orelse, span)

    # -- expressions ------------------------------------------------------------

    def expr(self, level: int = 0):
        if level == len(_LEVELS):
            return self.unary()
        left = self.expr(level + 1)
        while self.tok.kind == "punct" and self.tok.text in _LEVELS[level]:
            op = self.advance()
            right = self.expr(level + 1)
            left = S.BinOp(op.text, left, right, op.span)
        return left

    def unary(self):
        tok = self.tok
        if self.at("!") or self.at("-"):
            self.advance()
            return S.UnOp(tok.text, self.unary(), tok.span)
        return self.postfix(self.primary())

    def postfix(self, e):
        while True:
            tok = self.tok
            if self.accept("."):
                name = self.tok
                if name.kind not in ("ident", "keyword"):
                    raise self.error(["member name"])
                self.advance()
                e = S.Member(e, name.text, tok.span)
                value = None
                if self.at("{"):
                    self.advance()
                    opt = self.ident()
                    if opt.text != "value":
                        raise ParseError.at(opt.span, f"unknown call option {opt.text!r}")
                    self.expect(":")
                    value = self.expr()
                    self.expect("}")
                    if not self.at("("):
                        raise self.error(["'('"])
                if self.at("("):
                    e = S.Call(e, self.args(), value, tok.span)
            elif self.accept("["):
                key = self.expr()
                self.expect("]")
                e = S.IndexExpr(e, key, tok.span)
            elif self.at("("):
                raise ParseError.at(tok.span, "only member calls are supported")
            else:
                return e

    def args(self) -> list:
        self.expect("(")
        out = []
        if not self.at(")"):
            while True:
                out.append(self.expr())
                if not self.accept(","):
                    break
        self.expect(")")
        return out

    def primary(self):
        tok = self.tok
        if tok.kind == "int":
            self.advance()
            if self.accept("ether"):
                return S.Num(tok.value * WEI_PER_ETHER, "ether", tok.span)
            if self.accept("wei"):
                return S.Num(tok.value, "wei", tok.span)
            return S.Num(tok.value, "", tok.span)
        if tok.kind == "address":
            self.advance()
            return S.AddrConst(tok.value, tok.span)
        if tok.kind == "string":
            self.advance()
            return S.Str(tok.value, tok.span)
        if self.accept("true"):
            return S.BoolConst(True, tok.span)
        if self.accept("false"):
            return S.BoolConst(False, tok.span)
        if self.accept("this"):
            return S.This(tok.span)
        if self.accept("msg"):
            self.expect(".")
            field = self.ident()
            if field.text not in ("sender", "value"):
                raise ParseError.at(field.span, f"unknown msg field {field.text!r}")
            return S.MsgField(field.text, tok.span)
        if tok.text in ("address", "uint", "uint256", "bool") and self.peek().text == "(":
            t = self.type()
            self.expect("(")
            operand = self.expr()
            self.expect(")")
            return S.Cast(t, operand, tok.span)
        if tok.kind == "ident":
            self.advance()
            return S.Var(tok.text, tok.span)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        raise self.error(["expression"])


def _names_in(stmts, scope: set, contract: S.ContractDef, out: list):
    for st in stmts:
        for e in S.stmt_exprs(st):
            for sub in S.walk(e):
                if isinstance(sub, S.Var) and sub.name not in scope:
                    out.append(Diagnostic("NameError", f"unknown name {sub.name!r}", sub.span))
        if isinstance(st, S.LocalDecl):
            scope.add(st.name)
        elif isinstance(st, S.If):
            _names_in(st.then, set(scope), contract, out)
            _names_in(st.orelse, set(scope), contract, out)


def check_contract(c: S.ContractDef) -> list:
    """Name-level checks: unique members and no unbound identifiers."""
    out = []
    seen = set()
    for v in c.state_vars:
        if v.name in seen:
            out.append(Diagnostic("NameError", f"duplicate state variable {v.name!r}", v.span))
        seen.add(v.name)
    fnames = set()
    for f in c.functions:
        if f.name in fnames:
            out.append(Diagnostic("NameError", f"duplicate function {f.name!r}", f.span))
        fnames.add(f.name)
    storage = {v.name for v in c.state_vars}
    for f in [c.constructor, c.fallback, *c.functions]:
        if f is not None:
            _names_in(f.body, storage | {p.name for p in f.params}, c, out)
    return out


def parse_contracts(source: str, file: str = "<contract>") -> dict:
    """Parse and check every contract in ``source``; returns name -> ContractDef."""
    try:
        contracts = ContractParser(tokenize(source, file), file).parse_source()
    except RecursionError:
        raise ParseError.at(S.NO_SPAN, "expression nesting too deep") from None
    out = {}
    problems = []
    for c in contracts:
        if c.name in out:
            problems.append(Diagnostic("NameError", f"duplicate contract {c.name!r}", c.span))
        out[c.name] = c
        problems.extend(check_contract(c))
    if problems:
        raise ResolveError(problems)
    return out


def parse_contract(source: str, file: str = "<contract>", name: str | None = None) -> S.ContractDef:
    contracts = parse_contracts(source, file)
    if name is None:
        if len(contracts) != 1:
            raise ValueError(f"{file}: expected exactly one contract, found {len(contracts)}")
        return next(iter(contracts.values()))
    if name not in contracts:
        raise ValueError(f"{file}: no contract named {name!r}")
    return contracts[name]
