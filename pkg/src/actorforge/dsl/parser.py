"""LL(1) recursive-descent parser for the actor DSL.

Grammar summary::

    actor      := 'actor' IDENT member* 'end'
    member     := ('in' | 'out') IDENT ':' type
                | 'state' IDENT ':' type ('=' expr)?
                | action | schedule
    action     := 'action' IDENT (':' consume (',' consume)*)? clause* 'end'
    consume    := IDENT ('[' IDENT (',' IDENT)* ']')?
    clause     := 'guard' expr (',' expr)* | 'do' target '=' expr
                | 'let' IDENT '=' expr | 'emit' IDENT ('.' IDENT)? '(' args? ')'
    schedule   := 'schedule' IDENT (IDENT ':' IDENT '->' IDENT)* 'end'
"""
from __future__ import annotations

from ..diagnostics import Diagnostic, ParseError, SourceSpan
from . import ast
from .lexer import Token, tokenize

_CMP_OPS = ("==", "!=", "<", "<=", ">", ">=")
_WEI_PER_ETHER = 10**18


class Parser:
    def __init__(self, tokens: list[Token], file: str = "<input>"):
        self.tokens = list(tokens)
        self.pos = 0
        if self.tokens:
            last = self.tokens[-1].span
            eof_span = SourceSpan(last.file, last.line, last.column + last.length, 0)
        else:
            eof_span = SourceSpan(file, 1, 1, 0)
        self.tokens.append(Token("eof", "<eof>", eof_span))

    # -- token helpers --------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.kind in ("keyword", "punct") and self.tok.text == text

    def advance(self) -> Token:
        tok = self.tok
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def error(self, expected) -> ParseError:
        expected = sorted(set(expected))
        tok = self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        msg = f"expected {' or '.join(expected)}, found {found}"
        return ParseError([Diagnostic("ParseError", msg, tok.span)], expected)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error([repr(text)])
        return self.advance()

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.advance()
            return True
        return False

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            raise self.error(["identifier"])
        return self.advance()

    def at_end(self) -> bool:
        return self.tok.kind == "eof"

    # -- declarations ---------------------------------------------------------

    def actor(self) -> ast.ActorDecl:
        start = self.expect("actor").span
        decl = ast.ActorDecl(self.ident().text, span=start)
        while not self.at("end"):
            tok = self.tok
            if self.at("in") or self.at("out"):
                direction = self.advance().text
                name = self.ident().text
                self.expect(":")
                port = ast.PortDecl(name, direction, self.type_expr(), span=tok.span)
                (decl.inputs if direction == "in" else decl.outputs).append(port)
            elif self.at("state"):
                self.advance()
                name = self.ident().text
                self.expect(":")
                var_type = self.type_expr()
                init = self.expr() if self.accept("=") else None
                decl.state_vars.append(ast.StateVarDecl(name, var_type, init, span=tok.span))
            elif self.at("action"):
                decl.actions.append(self.action())
            elif self.at("schedule"):
                if decl.schedule is not None:
                    raise ParseError.at(tok.span, "actor already has a schedule")
                decl.schedule = self.schedule()
            else:
                raise self.error(["'in'", "'out'", "'state'", "'action'", "'schedule'", "'end'"])
        self.expect("end")
        return decl

    def type_expr(self) -> ast.TypeExpr:
        tok = self.tok
        if tok.kind == "ident" and tok.text == "map":
            self.advance()
            self.expect("(")
            key = self.type_expr()
            self.expect("->")
            value = self.type_expr()
            self.expect(")")
            return ast.TypeExpr("map", key, value)
        if tok.kind == "ident" and tok.text in ("uint", "address", "bool", "call", "transfer"):
            self.advance()
            return ast.TypeExpr(tok.text)
        raise self.error(["type"])

    def action(self) -> ast.ActionDecl:
        start = self.expect("action").span
        action = ast.ActionDecl(self.ident().text, span=start)
        if self.accept(":"):
            action.consumes.append(self.consume())
            while self.accept(","):
                action.consumes.append(self.consume())
        while not self.at("end"):
            tok = self.tok
            if self.accept("guard"):
                action.guards.append(self.expr())
                while self.accept(","):
                    action.guards.append(self.expr())
            elif self.accept("do"):
                target = self.target()
                self.expect("=")
                action.body.append(ast.Assign(target, self.expr(), span=tok.span))
            elif self.accept("let"):
                name = self.ident().text
                self.expect("=")
                action.body.append(ast.Let(name, self.expr(), span=tok.span))
            elif self.accept("emit"):
                port = self.ident().text
                selector = self.ident().text if self.accept(".") else None
                self.expect("(")
                args = self.args(")")
                action.body.append(ast.Emit(port, args, selector, span=tok.span))
            else:
                raise self.error(["'guard'", "'do'", "'let'", "'emit'", "'end'"])
        self.expect("end")
        return action

    def consume(self) -> ast.Consume:
        tok = self.ident()
        names = []
        if self.accept("["):
            names.append(self.ident().text)
            while self.accept(","):
                names.append(self.ident().text)
            self.expect("]")
        return ast.Consume(tok.text, names, span=tok.span)

    def target(self):
        tok = self.ident()
        name = ast.Name(tok.text, span=tok.span)
        if self.accept("["):
            key = self.expr()
            self.expect("]")
            return ast.Index(name, key, span=tok.span)
        return name

    def schedule(self) -> ast.FsmDecl:
        start = self.expect("schedule").span
        fsm = ast.FsmDecl(self.ident().text, span=start)
        while not self.at("end"):
            src = self.ident()
            self.expect(":")
            action = self.ident().text
            self.expect("->")
            fsm.transitions.append(ast.Transition(src.text, action, self.ident().text, span=src.span))
        self.expect("end")
        return fsm

    def args(self, close: str) -> list:
        args = []
        if not self.at(close):
            args.append(self.expr())
            while self.accept(","):
                args.append(self.expr())
        self.expect(close)
        return args

    # -- expressions ----------------------------------------------------------

    def expr(self):
        return self.or_expr()

    def or_expr(self):
        left = self.and_expr()
        while self.at("or"):
            span = self.advance().span
            left = ast.Binary("or", left, self.and_expr(), span=span)
        return left

    def and_expr(self):
        left = self.not_expr()
        while self.at("and"):
            span = self.advance().span
            left = ast.Binary("and", left, self.not_expr(), span=span)
        return left

    def not_expr(self):
        if self.at("not"):
            span = self.advance().span
            return ast.Unary("not", self.not_expr(), span=span)
        return self.cmp_expr()

    def cmp_expr(self):
        left = self.add_expr()
        if self.tok.kind == "punct" and self.tok.text in _CMP_OPS:
            tok = self.advance()
            left = ast.Binary(tok.text, left, self.add_expr(), span=tok.span)
        return left

    def add_expr(self):
        left = self.mul_expr()
        while self.at("+") or self.at("-"):
            tok = self.advance()
            left = ast.Binary(tok.text, left, self.mul_expr(), span=tok.span)
        return left

    def mul_expr(self):
        left = self.postfix()
        while self.at("*") or self.at("/"):
            tok = self.advance()
            left = ast.Binary(tok.text, left, self.postfix(), span=tok.span)
        return left

    def postfix(self):
        expr = self.primary()
        while self.at("["):
            span = self.advance().span
            key = self.expr()
            self.expect("]")
            expr = ast.Index(expr, key, span=span)
        return expr

    def primary(self):
        tok = self.tok
        if tok.kind == "int":
            self.advance()
            if self.accept("ether"):
                return ast.IntLit(tok.value * _WEI_PER_ETHER, ether=True, span=tok.span)
            return ast.IntLit(tok.value, span=tok.span)
        if tok.kind == "address":
            self.advance()
            return ast.AddrLit(tok.value, span=tok.span)
        if self.at("true") or self.at("false"):
            self.advance()
            return ast.BoolLit(tok.text == "true", span=tok.span)
        if tok.kind == "ident":
            self.advance()
            return ast.Name(tok.text, span=tok.span)
        if self.accept("("):
            inner = self.expr()
            self.expect(")")
            return inner
        raise self.error(["expression"])


def _guarded(fn):
    # deeply nested input must surface as a diagnostic, not a crash
    def wrapper(parser: Parser):
        try:
            return fn(parser)
        except RecursionError:
            raise ParseError.at(parser.tok.span, "expression nesting too deep") from None
    return wrapper


@_guarded
def _parse_actor_file(parser: Parser) -> ast.ActorDecl:
    decl = parser.actor()
    if not parser.at_end():
        raise parser.error(["end of input"])
    return decl


def parse_actor(tokens: list[Token], file: str = "<input>") -> ast.ActorDecl:
    return _parse_actor_file(Parser(tokens, file))


def parse_actor_source(source: str, file: str = "<input>") -> ast.ActorDecl:
    return parse_actor(tokenize(source, file), file)
