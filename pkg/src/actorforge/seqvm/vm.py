"""Sequential call semantics: nested frames, fallbacks on transfer, revert rollback."""
from __future__ import annotations

import copy
import json
import sys
import threading
from dataclasses import dataclass, field
from typing import Optional

from ..values import Address, EvalError, ZERO_ADDRESS, check_uint, to_json_value
from . import ast as S

DEFAULT_MAX_CALL_DEPTH = 1024
DEFAULT_BUDGET = 10**6


class DeployError(Exception):
    pass


class Revert(Exception):
    """Raised inside a frame; ``propagated`` marks a failure re-raised from a sub-call."""

    def __init__(self, reason: str, detail: Optional[str] = None, propagated: bool = False):
        super().__init__(reason if detail is None else f"{reason}: {detail}")
        self.reason = reason
        self.detail = detail
        self.propagated = propagated


class _ReturnSignal(Exception):
    def __init__(self, value):
        self.value = value


# -- world ---------------------------------------------------------------------

@dataclass
class Account:
    address: Address
    balance: int
    code: Optional[S.ContractDef] = None
    storage: dict = field(default_factory=dict)
    name: str = ""

    @property
    def is_contract(self) -> bool:
        return self.code is not None


@dataclass(frozen=True)
class CallFrame:
    caller: Address
    callee: Address
    function: Optional[str]  # None: plain transfer / fallback
    value: int
    depth: int

    def to_json(self) -> dict:
        return {"caller": str(self.caller), "callee": str(self.callee),
                "function": self.function or "fallback", "value": str(self.value),
                "depth": self.depth}


# -- trace events ----------------------------------------------------------------

@dataclass(frozen=True)
class CallEnter:
    frame: CallFrame

    def to_json(self) -> dict:
        return {"event": "CallEnter", "frame": self.frame.to_json()}


@dataclass(frozen=True)
class CallExit:
    frame: CallFrame
    outcome: str  # Success | Reverted(<reason>)

    @property
    def reverted(self) -> bool:
        return self.outcome != "Success"

    def to_json(self) -> dict:
        return {"event": "CallExit", "frame": self.frame.to_json(), "outcome": self.outcome}


@dataclass(frozen=True)
class Transfer:
    sender: Address
    to: Address
    amount: int

    def to_json(self) -> dict:
        return {"event": "Transfer", "from": str(self.sender), "to": str(self.to),
                "amount": str(self.amount)}


@dataclass(frozen=True)
class StorageWrite:
    address: Address
    var: str
    key: object
    old: object
    new: object

    def to_json(self) -> dict:
        return {"event": "StorageWrite", "address": str(self.address), "var": self.var,
                "key": to_json_value(self.key), "old": to_json_value(self.old),
                "new": to_json_value(self.new)}


@dataclass(frozen=True)
class RevertEvent:
    reason: str
    detail: Optional[str] = None
    address: Optional[Address] = None

    def to_json(self) -> dict:
        return {"event": "Revert", "reason": self.reason, "detail": self.detail,
                "address": to_json_value(self.address)}


def events_jsonl(events) -> str:
    return "".join(json.dumps(e.to_json()) + "\n" for e in events)


@dataclass(frozen=True)
class CallResult:
    ok: bool
    value: object = None
    reason: Optional[str] = None
    detail: Optional[str] = None

    def __str__(self):
        return "Success" if self.ok else f"Reverted({self.reason})"


def default_for(t: S.SolType):
    if t.name == "mapping":
        return {}
    if t.name == "bool":
        return False
    if t.name == "address":
        return ZERO_ADDRESS
    return 0


class World:
    def __init__(self, max_call_depth: int = DEFAULT_MAX_CALL_DEPTH, budget: int = DEFAULT_BUDGET):
        self.accounts: dict = {}
        self.names: dict = {}
        self.trace: list = []
        self.max_call_depth = max_call_depth
        self.budget = budget
        self.used = 0
        self.next_contract = 1
        self.next_wallet = 0xA001

    def emit(self, event):
        self.trace.append(event)

    def tick(self):
        self.used += 1
        if self.used > self.budget:
            raise Revert("OutOfBudget")

    def account(self, addr: Address) -> Account:
        acct = self.accounts.get(addr)
        if acct is None:
            if addr == ZERO_ADDRESS:
                raise Revert("InvalidAddress", "address 0x0 is reserved")
            acct = self.accounts[addr] = Account(addr, 0)
        return acct

    def balance_of(self, addr: Address) -> int:
        acct = self.accounts.get(addr)
        return acct.balance if acct is not None else 0

    def add_wallet(self, name: str, balance: int, address: Optional[Address] = None) -> Address:
        if address is None:
            while Address(self.next_wallet) in self.accounts:
                self.next_wallet += 1
            address = Address(self.next_wallet)
            self.next_wallet += 1
        if address == ZERO_ADDRESS or address in self.accounts:
            raise ValueError(f"address {address} unavailable for {name!r}")
        self.accounts[address] = Account(address, check_uint(balance), name=name)
        self.names[name] = address
        return address

    def move(self, src: Address, dst: Address, amount: int):
        if amount == 0:
            return
        payer = self.account(src)
        if payer.balance < amount:
            raise Revert("InsufficientBalance", f"{src} holds {payer.balance}, needs {amount}")
        payee = self.account(dst)
        payer.balance -= amount
        payee.balance += amount
        self.emit(Transfer(src, dst, amount))

    def snapshot(self):
        return {a: (acct.balance, copy.deepcopy(acct.storage)) for a, acct in self.accounts.items()}

    def restore(self, snap):
        for addr in list(self.accounts):
            if addr not in snap:
                del self.accounts[addr]
        for addr, (bal, storage) in snap.items():
            self.accounts[addr].balance = bal
            self.accounts[addr].storage = storage

    def total_balance(self) -> int:
        return sum(a.balance for a in self.accounts.values())

    def fingerprint(self) -> str:
        """Canonical text of every account; equal strings mean bit-identical worlds."""
        rows = []
        for addr in sorted(self.accounts):
            acct = self.accounts[addr]
            storage = {k: _canon(v) for k, v in sorted(acct.storage.items())}
            rows.append({"address": str(addr), "balance": str(acct.balance),
                         "code": acct.code.name if acct.code else None, "storage": storage})
        return json.dumps(rows, sort_keys=True)

    def name_of(self, addr: Address) -> str:
        for name, a in self.names.items():
            if a == addr:
                return name
        return str(addr)


def _canon(v):
    if isinstance(v, dict):
        return {str(k): _canon(x) for k, x in sorted(v.items())}
    return to_json_value(v)


# -- execution -------------------------------------------------------------------

def call(world: World, frame: CallFrame, args=()) -> CallResult:
    world.emit(CallEnter(frame))
    try:
        if frame.depth > world.max_call_depth:
            raise Revert("OutOfDepth", f"depth {frame.depth} exceeds {world.max_call_depth}")
        snap = world.snapshot()
        try:
            ret = _dispatch(world, frame, list(args))
        except Revert:
            world.restore(snap)
            raise
    except Revert as r:
        if not r.propagated:
            world.emit(RevertEvent(r.reason, r.detail, frame.callee))
        world.emit(CallExit(frame, f"Reverted({r.reason})"))
        return CallResult(False, None, r.reason, r.detail)
    world.emit(CallExit(frame, "Success"))
    return CallResult(True, ret)


def _dispatch(world: World, frame: CallFrame, args: list):
    callee = world.account(frame.callee)
    code = callee.code
    if code is None:
        if frame.function is not None:
            raise Revert("NoCode", f"{frame.callee} has no function {frame.function!r}")
        world.move(frame.caller, frame.callee, frame.value)
        return None
    if frame.function is None:
        fn = code.fallback
        if fn is None:
            raise Revert("NoFallback", f"{code.name} cannot receive plain transfers")
    else:
        fn = code.function(frame.function)
        if fn is None or not fn.is_public:
            raise Revert("NoSuchFunction", f"{code.name}.{frame.function}")
    if frame.value and not fn.payable:
        raise Revert("NotPayable", f"{code.name}.{fn.name}")
    if len(args) != len(fn.params):
        raise Revert("BadArguments", f"{fn.name} takes {len(fn.params)} argument(s)")
    world.move(frame.caller, frame.callee, frame.value)
    return _Exec(world, frame, callee, code).run(fn, args)


def init_storage(contract: S.ContractDef) -> dict:
    storage = {}
    for v in contract.state_vars:
        if v.init is None:
            storage[v.name] = default_for(v.var_type)
        else:
            storage[v.name] = _Exec(None, None, None, contract).eval(v.init)
    return storage


def deploy(world: World, contract: S.ContractDef, ctor_args=(), endowment: int = 0,
           deployer: Optional[Address] = None, name: str = "") -> Address:
    deployer = deployer if deployer is not None else ZERO_ADDRESS
    if endowment and world.balance_of(deployer) < endowment:
        raise DeployError(f"endowment {endowment} exceeds deployer balance "
                          f"{world.balance_of(deployer)}")
    addr = Address(world.next_contract)
    if addr in world.accounts:
        raise DeployError(f"address {addr} already in use")
    snap = world.snapshot()
    try:
        storage = init_storage(contract)
    except Revert as r:
        raise DeployError(f"{contract.name}: initializer failed: {r}") from None
    world.accounts[addr] = Account(addr, 0, contract, storage, name)
    world.next_contract += 1
    ctor = contract.constructor
    frame = CallFrame(deployer, addr, "constructor", endowment, 0)
    world.emit(CallEnter(frame))
    try:
        if endowment:
            world.move(deployer, addr, endowment)
        if ctor is not None:
            if len(ctor_args) != len(ctor.params):
                raise Revert("BadArguments", f"constructor takes {len(ctor.params)} argument(s)")
            _Exec(world, frame, world.accounts[addr], contract).run(ctor, list(ctor_args))
        elif ctor_args:
            raise Revert("BadArguments", "contract has no constructor")
    except Revert as r:
        world.restore(snap)
        world.next_contract -= 1
        world.emit(RevertEvent(r.reason, r.detail, addr))
        world.emit(CallExit(frame, f"Reverted({r.reason})"))
        raise DeployError(f"{contract.name} constructor reverted: {r}") from None
    world.emit(CallExit(frame, "Success"))
    if name:
        world.names[name] = addr
    return addr


class _Exec:
    """Executes one function body inside one frame."""

    def __init__(self, world, frame, account, contract):
        self.world = world
        self.frame = frame
        self.account = account
        self.contract = contract
        self.locals: dict = {}
        self.local_types: dict = {}

    def run(self, fn: S.FunctionDef, args: list):
        for p, a in zip(fn.params, args):
            self.locals[p.name] = a
            self.local_types[p.name] = p.param_type
        try:
            self.block(fn.body)
        except _ReturnSignal as r:
            return r.value
        return None

    def block(self, stmts):
        for st in stmts:
            self.stmt(st)

    def stmt(self, st):
        self.world.tick()
        if isinstance(st, S.Require):
            if not self._bool(self.eval(st.cond)):
                raise Revert("Require", st.message)
        elif isinstance(st, S.If):
            self.block(st.then if self._bool(self.eval(st.cond)) else st.orelse)
        elif isinstance(st, S.Return):
            raise _ReturnSignal(None if st.value is None else self.eval(st.value))
        elif isinstance(st, S.LocalDecl):
            value = default_for(st.var_type) if st.value is None else self.eval(st.value)
            self.locals[st.name] = value
            self.local_types[st.name] = st.var_type
        elif isinstance(st, S.AssignStmt):
            self.assign(st.target, self.eval(st.value))
        elif isinstance(st, S.ExprStmt):
            self.eval(st.expr)
        else:
            raise TypeError(f"unknown statement {type(st).__name__}")

    def assign(self, target, value):
        if isinstance(target, S.Var):
            if target.name in self.locals:
                self.locals[target.name] = value
                return
            storage = self.account.storage
            old = storage[target.name]
            if isinstance(old, dict):
                raise Revert("InvalidOperation", "cannot assign a whole mapping")
            storage[target.name] = value
            self.world.emit(StorageWrite(self.account.address, target.name, None, old, value))
            return
        # m[k1][k2]... = value
        keys = []
        base = target
        while isinstance(base, S.IndexExpr):
            keys.append(self.eval(base.key))
            base = base.base
        keys.reverse()
        if not isinstance(base, S.Var) or base.name in self.locals:
            raise Revert("InvalidOperation", "only storage mappings can be indexed")
        var_type = self.contract.state_var(base.name).var_type
        container = self.account.storage[base.name]
        for k in keys[:-1]:
            var_type = var_type.value
            container = container.setdefault(k, {})
        old = container.get(keys[-1], default_for(var_type.value))
        container[keys[-1]] = value
        key = keys[0] if len(keys) == 1 else tuple(keys)
        self.world.emit(StorageWrite(self.account.address, base.name, key, old, value))

    # -- expressions ------------------------------------------------------------

    @staticmethod
    def _bool(v) -> bool:
        if not isinstance(v, bool):
            raise Revert("InvalidOperation", f"expected bool, got {v!r}")
        return v

    @staticmethod
    def _uint(v) -> int:
        if isinstance(v, bool) or not isinstance(v, int):
            raise Revert("InvalidOperation", f"expected uint, got {v!r}")
        return v

    @staticmethod
    def _addr(v) -> Address:
        if not isinstance(v, Address):
            raise Revert("InvalidOperation", f"expected address, got {v!r}")
        return v

    def eval(self, e):
        if isinstance(e, S.Num):
            return e.value
        if isinstance(e, S.AddrConst):
            return Address(e.value)
        if isinstance(e, (S.BoolConst, S.Str)):
            return e.value
        if isinstance(e, S.Var):
            if e.name in self.locals:
                return self.locals[e.name]
            return self.account.storage[e.name]
        if isinstance(e, S.MsgField):
            return self.frame.caller if e.name == "sender" else self.frame.value
        if isinstance(e, S.This):
            return self.frame.callee
        if isinstance(e, S.Cast):
            v = self.eval(e.operand)
            if e.target.name == "address":
                return v if isinstance(v, Address) else Address(self._uint(v))
            if e.target.name == "uint":
                return v.value if isinstance(v, Address) else self._uint(v)
            return self._bool(v)
        if isinstance(e, S.Member):
            if e.name != "balance":
                raise Revert("InvalidOperation", f"unknown member {e.name!r}")
            return self.world.balance_of(self._addr(self.eval(e.base)))
        if isinstance(e, S.IndexExpr):
            return self._index(e)
        if isinstance(e, S.Call):
            return self._call(e)
        if isinstance(e, S.UnOp):
            v = self.eval(e.operand)
            if e.op == "!":
                return not self._bool(v)
            if self._uint(v):
                raise Revert("Overflow", "negation of a non-zero uint")
            return 0
        if isinstance(e, S.BinOp):
            return self._binop(e)
        raise TypeError(f"unknown expression {type(e).__name__}")

    def _index(self, e):
        keys = []
        base = e
        while isinstance(base, S.IndexExpr):
            keys.append(self.eval(base.key))
            base = base.base
        keys.reverse()
        if not isinstance(base, S.Var) or base.name in self.locals:
            raise Revert("InvalidOperation", "only storage mappings can be indexed")
        var_type = self.contract.state_var(base.name).var_type
        value = self.account.storage[base.name]
        for k in keys:
            if var_type.name != "mapping":
                raise Revert("InvalidOperation", f"{base.name} is not a mapping")
            value = value.get(k, default_for(var_type.value)) if isinstance(value, dict) else value
            var_type = var_type.value
        return value

    def _binop(self, e):
        op = e.op
        if op in ("&&", "||"):
            left = self._bool(self.eval(e.left))
            if (op == "&&" and not left) or (op == "||" and left):
                return left
            return self._bool(self.eval(e.right))
        a = self.eval(e.left)
        b = self.eval(e.right)
        if op == "==":
            return a == b
        if op == "!=":
            return a != b
        a = self._uint(a)
        b = self._uint(b)
        if op == "<":
            return a < b
        if op == "<=":
            return a <= b
        if op == ">":
            return a > b
        if op == ">=":
            return a >= b
        try:
            if op == "+":
                return check_uint(a + b)
            if op == "-":
                return check_uint(a - b)
            if op == "*":
                return check_uint(a * b)
            if b == 0:
                raise Revert("DivisionByZero")
            return a // b
        except EvalError as err:
            raise Revert(err.kind, str(err)) from None

    def _call(self, e: S.Call):
        target = self._addr(self.eval(e.callee.base))
        value = self._uint(self.eval(e.value)) if e.value is not None else 0
        args = [self.eval(a) for a in e.args]
        depth = self.frame.depth + 1
        me = self.frame.callee
        kind = e.kind
        if kind in ("transfer", "send"):
            if len(args) != 1:
                raise Revert("BadArguments", f"{kind} takes one amount")
            result = call(self.world, CallFrame(me, target, None, self._uint(args[0]), depth))
            if kind == "send":
                return result.ok
        elif kind == "call":
            fn = None
            if args:
                if not isinstance(args[0], str):
                    raise Revert("InvalidOperation", "call expects a function name string")
                fn = args[0] or None
                args = args[1:]
            return call(self.world, CallFrame(me, target, fn, value, depth), args).ok
        else:
            result = call(self.world, CallFrame(me, target, e.callee.name, value, depth), args)
        if not result.ok:
            raise Revert(result.reason, result.detail, propagated=True)
        return result.value


def run_deep(fn, *args, **kwargs):
    """Run ``fn`` on a thread with a large stack so deep re-entrancy cannot blow the C stack."""
    box = {}

    def target():
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, 200_000))
        try:
            box["value"] = fn(*args, **kwargs)
        except BaseException as exc:  # re-raised on the caller's thread
            box["error"] = exc
        finally:
            sys.setrecursionlimit(old)

    old_size = threading.stack_size()
    threading.stack_size(512 * 1024 * 1024)
    try:
        t = threading.Thread(target=target, name="seqvm")
        t.start()
    finally:
        threading.stack_size(old_size)
    t.join()
    if "error" in box:
        raise box["error"]
    return box.get("value")
