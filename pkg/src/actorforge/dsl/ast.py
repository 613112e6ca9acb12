"""Actor and network AST.

Spans and resolver annotations are excluded from equality so that two parses
of equivalent text compare structurally equal.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from ..diagnostics import NO_SPAN, SourceSpan


def _span():
    return field(default=NO_SPAN, compare=False, repr=False)


def _note():
    return field(default=None, compare=False, repr=False)


# -- types -------------------------------------------------------------------

@dataclass(frozen=True)
class TypeExpr:
    name: str  # uint, address, bool, call, transfer, map
    key: Optional["TypeExpr"] = None
    value: Optional["TypeExpr"] = None

    def __str__(self):
        if self.name == "map":
            return f"map({self.key} -> {self.value})"
        return self.name

    @property
    def is_record(self) -> bool:
        return self.name in ("call", "transfer")


UINT = TypeExpr("uint")
ADDRESS = TypeExpr("address")
BOOL = TypeExpr("bool")
CALL = TypeExpr("call")
TRANSFER = TypeExpr("transfer")
BALANCE_MAP = TypeExpr("map", ADDRESS, UINT)

SCALAR_TYPES = (UINT, ADDRESS, BOOL)
PORT_TYPES = (UINT, ADDRESS, BOOL, CALL, TRANSFER)
# fields bound by consuming one token from a record-typed port
RECORD_FIELDS = {"sender": ADDRESS, "value": UINT}


# -- expressions -------------------------------------------------------------

@dataclass
class IntLit:
    value: int
    ether: bool = field(default=False, compare=False)
    span: SourceSpan = _span()
    type: Optional[TypeExpr] = _note()


@dataclass
class AddrLit:
    value: int
    span: SourceSpan = _span()
    type: Optional[TypeExpr] = _note()


@dataclass
class BoolLit:
    value: bool
    span: SourceSpan = _span()
    type: Optional[TypeExpr] = _note()


@dataclass
class Name:
    id: str
    span: SourceSpan = _span()
    type: Optional[TypeExpr] = _note()
    binding: Optional[str] = _note()  # state, pattern, local, port


@dataclass
class Index:
    base: "Expr"
    key: "Expr"
    span: SourceSpan = _span()
    type: Optional[TypeExpr] = _note()


@dataclass
class Binary:
    op: str  # + - * / == != < <= > >= and or
    left: "Expr"
    right: "Expr"
    span: SourceSpan = _span()
    type: Optional[TypeExpr] = _note()


@dataclass
class Unary:
    op: str  # not
    operand: "Expr"
    span: SourceSpan = _span()
    type: Optional[TypeExpr] = _note()


Expr = Union[IntLit, AddrLit, BoolLit, Name, Index, Binary, Unary]


def walk_expr(expr: Expr):
    yield expr
    if isinstance(expr, Index):
        yield from walk_expr(expr.base)
        yield from walk_expr(expr.key)
    elif isinstance(expr, Binary):
        yield from walk_expr(expr.left)
        yield from walk_expr(expr.right)
    elif isinstance(expr, Unary):
        yield from walk_expr(expr.operand)


# -- statements --------------------------------------------------------------

@dataclass
class Assign:
    target: Union[Name, Index]
    value: Expr
    span: SourceSpan = _span()

    @property
    def var(self) -> str:
        return self.target.id if isinstance(self.target, Name) else self.target.base.id


@dataclass
class Let:
    name: str
    value: Expr
    span: SourceSpan = _span()


@dataclass
class Emit:
    port: str
    args: list
    selector: Optional[str] = None  # function name for call-typed ports
    span: SourceSpan = _span()


Stmt = Union[Assign, Let, Emit]


def stmt_exprs(stmt: Stmt):
    if isinstance(stmt, Assign):
        if isinstance(stmt.target, Index):
            yield stmt.target.key
        yield stmt.value
    elif isinstance(stmt, Let):
        yield stmt.value
    else:
        yield from stmt.args


# -- declarations ------------------------------------------------------------

@dataclass
class PortDecl:
    name: str
    direction: str  # in | out
    token_type: TypeExpr
    span: SourceSpan = _span()


@dataclass
class StateVarDecl:
    name: str
    var_type: TypeExpr
    initializer: Optional[Expr] = None
    span: SourceSpan = _span()


@dataclass
class Consume:
    port: str
    vars: list  # pattern variables; empty for record-typed ports
    span: SourceSpan = _span()

    @property
    def count(self) -> int:
        return len(self.vars) or 1


@dataclass
class ActionDecl:
    name: str
    consumes: list = field(default_factory=list)
    guards: list = field(default_factory=list)
    body: list = field(default_factory=list)
    span: SourceSpan = _span()

    @property
    def produces(self) -> list:
        return [s for s in self.body if isinstance(s, Emit)]


@dataclass
class Transition:
    source: str
    action: str
    target: str
    span: SourceSpan = _span()


@dataclass
class FsmDecl:
    initial: str
    transitions: list = field(default_factory=list)
    span: SourceSpan = _span()

    def enabled(self, state: str) -> list:
        return [t for t in self.transitions if t.source == state]


@dataclass
class ActorDecl:
    name: str
    inputs: list = field(default_factory=list)
    outputs: list = field(default_factory=list)
    state_vars: list = field(default_factory=list)
    actions: list = field(default_factory=list)
    schedule: Optional[FsmDecl] = None
    span: SourceSpan = _span()
    resolved: bool = field(default=False, compare=False, repr=False)

    def port(self, name: str) -> Optional[PortDecl]:
        for p in self.inputs + self.outputs:
            if p.name == name:
                return p
        return None

    def state_var(self, name: str) -> Optional[StateVarDecl]:
        for v in self.state_vars:
            if v.name == name:
                return v
        return None

    def action(self, name: str) -> Optional[ActionDecl]:
        for a in self.actions:
            if a.name == name:
                return a
        return None


# -- networks ----------------------------------------------------------------

@dataclass
class InstanceDecl:
    name: str
    actor: str
    source: Optional[str] = None
    balance: int = 0
    span: SourceSpan = _span()


@dataclass
class BufferDecl:
    name: str
    src: tuple  # (instance, port)
    dst: tuple
    span: SourceSpan = _span()


@dataclass
class InitialToken:
    buffer: str
    head: Optional[str]  # selector for call tokens, "transfer" for transfers, None for scalars
    args: list
    span: SourceSpan = _span()


@dataclass
class NetworkDecl:
    name: str
    instances: list = field(default_factory=list)
    buffers: list = field(default_factory=list)
    initial: list = field(default_factory=list)
    victims: list = field(default_factory=list)
    actors: dict = field(default_factory=dict, compare=False, repr=False)
    span: SourceSpan = _span()

    def instance(self, name: str) -> Optional[InstanceDecl]:
        for i in self.instances:
            if i.name == name:
                return i
        return None
