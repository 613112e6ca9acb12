"""AST of the contract dialect."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..diagnostics import NO_SPAN, SourceSpan


@dataclass(frozen=True)
class SolType:
    name: str  # uint, address, bool, mapping
    key: Optional["SolType"] = None
    value: Optional["SolType"] = None

    def __str__(self):
        if self.name == "mapping":
            return f"mapping({self.key} => {self.value})"
        return self.name


UINT = SolType("uint")
ADDRESS = SolType("address")
BOOL = SolType("bool")


def mapping(key: SolType, value: SolType) -> SolType:
    return SolType("mapping", key, value)


# -- expressions ---------------------------------------------------------------

@dataclass
class Num:
    value: int
    unit: str = ""  # "", "ether" or "wei"; kept for unparsing
    span: SourceSpan = field(default=NO_SPAN, compare=False)


@dataclass
class AddrConst:
    value: int
    span: SourceSpan = field(default=NO_SPAN, compare=False)


@dataclass
class BoolConst:
    value: bool
    span: SourceSpan = field(default=NO_SPAN, compare=False)


@dataclass
class Str:
    value: str
    span: SourceSpan = field(default=NO_SPAN, compare=False)


@dataclass
class Var:
    name: str
    span: SourceSpan = field(default=NO_SPAN, compare=False)


@dataclass
class MsgField:
    name: str  # sender | value
    span: SourceSpan = field(default=NO_SPAN, compare=False)


@dataclass
class This:
    span: SourceSpan = field(default=NO_SPAN, compare=False)


@dataclass
class Cast:
    """address(e): identity at runtime."""

    target: SolType
    operand: object
    span: SourceSpan = field(default=NO_SPAN, compare=False)


@dataclass
class Member:
    base: object
    name: str
    span: SourceSpan = field(default=NO_SPAN, compare=False)


@dataclass
class IndexExpr:
    base: object
    key: object
    span: SourceSpan = field(default=NO_SPAN, compare=False)


@dataclass
class Call:
    """``base.name{value: v}(args)``; ``callee`` is always a Member."""

    callee: Member
    args: list
    value: object = None
    span: SourceSpan = field(default=NO_SPAN, compare=False)

    @property
    def kind(self) -> str:
        if self.callee.name in ("transfer", "send", "call"):
            return self.callee.name
        return "function"


@dataclass
class BinOp:
    op: str
    left: object
    right: object
    span: SourceSpan = field(default=NO_SPAN, compare=False)


@dataclass
class UnOp:
    op: str  # ! or -
    operand: object
    span: SourceSpan = field(default=NO_SPAN, compare=False)


def children(expr) -> list:
    if isinstance(expr, (Cast, UnOp)):
        return [expr.operand]
    if isinstance(expr, Member):
        return [expr.base]
    if isinstance(expr, IndexExpr):
        return [expr.base, expr.key]
    if isinstance(expr, Call):
        out = [expr.callee.base, *expr.args]
        return out + [expr.value] if expr.value is not None else out
    if isinstance(expr, BinOp):
        return [expr.left, expr.right]
    return []


def walk(expr):
    yield expr
    for c in children(expr):
        yield from walk(c)


# -- statements ----------------------------------------------------------------

@dataclass
class Require:
    cond: object
    message: Optional[str] = None
    span: SourceSpan = field(default=NO_SPAN, compare=False)


@dataclass
class If:
    cond: object
    then: list
    orelse: list = field(default_factory=list)
    span: SourceSpan = field(default=NO_SPAN, compare=False)


@dataclass
class Return:
    value: object = None
    span: SourceSpan = field(default=NO_SPAN, compare=False)


@dataclass
class LocalDecl:
    var_type: SolType
    name: str
    value: object = None
    span: SourceSpan = field(default=NO_SPAN, compare=False)


@dataclass
class AssignStmt:
    target: object  # Var or IndexExpr
    value: object
    span: SourceSpan = field(default=NO_SPAN, compare=False)

    @property
    def var(self) -> str:
        t = self.target
        while isinstance(t, IndexExpr):
            t = t.base
        return t.name


@dataclass
class ExprStmt:
    expr: object
    span: SourceSpan = field(default=NO_SPAN, compare=False)


def stmt_exprs(stmt) -> list:
    """Expressions evaluated directly by a statement (not nested blocks)."""
    if isinstance(stmt, Require):
        return [stmt.cond]
    if isinstance(stmt, If):
        return [stmt.cond]
    if isinstance(stmt, Return):
        return [stmt.value] if stmt.value is not None else []
    if isinstance(stmt, LocalDecl):
        return [stmt.value] if stmt.value is not None else []
    if isinstance(stmt, AssignStmt):
        return [stmt.target, stmt.value]
    if isinstance(stmt, ExprStmt):
        return [stmt.expr]
    return []


def contains_call(stmt) -> bool:
    return any(isinstance(e, Call) for x in stmt_exprs(stmt) for e in walk(x))


# -- declarations --------------------------------------------------------------

@dataclass
class StateVar:
    name: str
    var_type: SolType
    init: object = None
    span: SourceSpan = field(default=NO_SPAN, compare=False)


@dataclass
class Param:
    name: str
    param_type: SolType


@dataclass
class FunctionDef:
    name: str  # "constructor" / "fallback" for the special ones
    kind: str  # function | constructor | fallback
    params: list
    body: list
    payable: bool = False
    view: bool = False
    visibility: str = "public"
    returns: Optional[SolType] = None
    span: SourceSpan = field(default=NO_SPAN, compare=False)

    @property
    def is_public(self) -> bool:
        return self.visibility in ("public", "external")


@dataclass
class ContractDef:
    name: str
    state_vars: list
    functions: list  # plain functions in source order
    constructor: Optional[FunctionDef] = None
    fallback: Optional[FunctionDef] = None
    span: SourceSpan = field(default=NO_SPAN, compare=False)

    def function(self, name: str) -> Optional[FunctionDef]:
        return next((f for f in self.functions if f.name == name), None)

    def state_var(self, name: str) -> Optional[StateVar]:
        return next((v for v in self.state_vars if v.name == name), None)

    @property
    def payable_functions(self) -> list:
        return [f for f in self.functions if f.payable]
