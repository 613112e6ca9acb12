"""Parsing and connection checking for ``.network`` files.

    network  := 'network' IDENT member* 'end'
    member   := 'instance' IDENT ':' IDENT ('from' STRING)? ('balance' expr)?
              | 'buffer' IDENT ':' IDENT '.' IDENT '->' IDENT '.' IDENT
              | 'initial' IDENT '=' (IDENT '(' args ')' | expr)
              | 'victim' IDENT
"""
from __future__ import annotations

from pathlib import Path

from ..diagnostics import ConnectError, Diagnostic, ParseError
from . import ast
from .lexer import tokenize
from .parser import Parser, parse_actor_source
from .resolve import resolve


class _NetworkParser(Parser):
    def network(self) -> ast.NetworkDecl:
        start = self.expect("network").span
        net = ast.NetworkDecl(self.ident().text, span=start)
        while not self.at("end"):
            tok = self.tok
            if self.accept("instance"):
                name = self.ident().text
                self.expect(":")
                actor = self.ident().text
                source = None
                balance = 0
                if self.accept("from"):
                    if self.tok.kind != "string":
                        raise self.error(["string"])
                    source = self.advance().value
                if self.accept("balance"):
                    bal = self.expr()
                    if not isinstance(bal, ast.IntLit):
                        raise ParseError.at(bal.span, "balance must be an integer literal")
                    balance = bal.value
                net.instances.append(ast.InstanceDecl(name, actor, source, balance, span=tok.span))
            elif self.accept("buffer"):
                name = self.ident().text
                self.expect(":")
                src = self.endpoint()
                self.expect("->")
                dst = self.endpoint()
                net.buffers.append(ast.BufferDecl(name, src, dst, span=tok.span))
            elif self.accept("initial"):
                buf = self.ident().text
                self.expect("=")
                if self.tok.kind == "ident" and self.peek().kind == "punct" and self.peek().text == "(":
                    head = self.advance().text
                    self.expect("(")
                    args = self.args(")")
                else:
                    head, args = None, [self.expr()]
                net.initial.append(ast.InitialToken(buf, head, args, span=tok.span))
            elif self.accept("victim"):
                net.victims.append(self.ident().text)
            else:
                raise self.error(["'instance'", "'buffer'", "'initial'", "'victim'", "'end'"])
        self.expect("end")
        if not self.at_end():
            raise self.error(["end of input"])
        return net

    def endpoint(self) -> tuple:
        inst = self.ident().text
        self.expect(".")
        return inst, self.ident().text


def _load_actor(inst: ast.InstanceDecl, actors: dict, base_dir: Path | None) -> ast.ActorDecl:
    if inst.source is not None:
        path = Path(inst.source)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConnectError.at(inst.span, f"cannot load actor source {inst.source!r}: {exc.strerror}")
        decl = resolve(parse_actor_source(text, str(path)))
        if decl.name != inst.actor:
            raise ConnectError.at(inst.span, f"{inst.source!r} declares actor {decl.name!r}, not {inst.actor!r}")
        return decl
    if inst.actor not in actors:
        raise ConnectError.at(inst.span, f"unknown actor {inst.actor!r}")
    decl = actors[inst.actor]
    return decl if decl.resolved else resolve(decl)


def check_network(net: ast.NetworkDecl, actors: dict | None = None, base_dir=None) -> ast.NetworkDecl:
    actors = dict(actors or {})
    base_dir = Path(base_dir) if base_dir is not None else None
    problems: list[Diagnostic] = []

    def fail(span, message):
        problems.append(Diagnostic("ConnectError", message, span))

    decls = {}
    for inst in net.instances:
        if inst.name in decls:
            fail(inst.span, f"duplicate instance {inst.name!r}")
            continue
        decls[inst.name] = _load_actor(inst, actors, base_dir)
    net.actors = decls

    def port_of(endpoint, direction, span):
        inst, port = endpoint
        if inst not in decls:
            fail(span, f"unknown instance {inst!r}")
            return None
        p = decls[inst].port(port)
        if p is None or p.direction != direction:
            kind = "output" if direction == "out" else "input"
            fail(span, f"dangling connection: {inst}.{port} is not an {kind} port")
            return None
        return p

    used_src, used_dst, names = set(), set(), set()
    buffer_types = {}
    for buf in net.buffers:
        if buf.name in names:
            fail(buf.span, f"duplicate buffer {buf.name!r}")
        names.add(buf.name)
        src = port_of(buf.src, "out", buf.span)
        dst = port_of(buf.dst, "in", buf.span)
        if buf.src in used_src:
            fail(buf.span, f"output {'.'.join(buf.src)} is already connected")
        if buf.dst in used_dst:
            fail(buf.span, f"fan-in to input {'.'.join(buf.dst)}")
        used_src.add(buf.src)
        used_dst.add(buf.dst)
        if src is not None and dst is not None:
            if src.token_type != dst.token_type:
                fail(buf.span, f"type mismatch: {src.token_type} -> {dst.token_type}")
            buffer_types[buf.name] = src.token_type

    for tok in net.initial:
        typ = buffer_types.get(tok.buffer)
        if typ is None:
            if tok.buffer not in names:
                fail(tok.span, f"unknown buffer {tok.buffer!r}")
            continue
        if typ == ast.CALL:
            ok = tok.head is not None and tok.head != "transfer" and len(tok.args) == 2
        elif typ == ast.TRANSFER:
            ok = tok.head == "transfer" and len(tok.args) == 3
        else:
            ok = tok.head is None
        if not ok:
            fail(tok.span, f"initial token does not match buffer type {typ}")

    for v in net.victims:
        if v not in decls:
            fail(net.span, f"unknown victim instance {v!r}")

    if problems:
        raise ConnectError(problems)
    return net


def parse_network(source: str, file: str = "<network>", actors: dict | None = None,
                  base_dir=None) -> ast.NetworkDecl:
    parser = _NetworkParser(tokenize(source, file), file)
    try:
        net = parser.network()
    except RecursionError:
        raise ParseError.at(parser.tok.span, "expression nesting too deep") from None
    if base_dir is None and not file.startswith("<"):
        base_dir = Path(file).parent
    return check_network(net, actors, base_dir)

