"""Atomic-firing execution of actor networks."""
from __future__ import annotations

import copy
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from ..dsl import ast
from ..values import Address, EvalError, state_digest
from .evaluate import const_value, default_value, eval_expr
from .tokens import CallToken, TransferToken, token_json, token_value

log = logging.getLogger(__name__)


class Buffer:
    """FIFO channel. ``capacity`` of None means unbounded."""

    def __init__(self, id: str, src=None, dst=None, capacity: Optional[int] = None):
        self.id = id
        self.src = src  # (instance, port) or None for an external source
        self.dst = dst
        self.capacity = capacity
        self.contents = deque()

    def __len__(self):
        return len(self.contents)

    def __repr__(self):
        return f"Buffer({self.id}, {list(self.contents)})"

    def peek(self, n: int) -> list:
        return [self.contents[i] for i in range(n)]

    def room(self) -> Optional[int]:
        return None if self.capacity is None else self.capacity - len(self.contents)

    def push(self, tok):
        if self.capacity is not None and len(self.contents) >= self.capacity:
            raise OverflowError(f"buffer {self.id} is full")
        self.contents.append(tok)

    def pop(self):
        return self.contents.popleft()


@dataclass
class ActorInstance:
    name: str
    decl: ast.ActorDecl
    address: Address
    state: dict
    native_balance: int = 0
    fsm_state: Optional[str] = None
    inputs: dict = field(default_factory=dict, repr=False)   # port -> Buffer
    outputs: dict = field(default_factory=dict, repr=False)

    @classmethod
    def create(cls, name, decl, address, native_balance=0):
        state = {}
        for var in decl.state_vars:
            if var.initializer is not None:
                state[var.name] = const_value(var.initializer)
            else:
                state[var.name] = default_value(var.var_type)
        fsm = decl.schedule.initial if decl.schedule is not None else None
        return cls(name, decl, address, state, native_balance, fsm)

    def snapshot(self) -> dict:
        snap = copy.deepcopy(self.state)
        snap["$balance"] = self.native_balance
        snap["$fsm"] = self.fsm_state
        return snap

    def digest(self) -> str:
        return state_digest(self.snapshot())


@dataclass
class FiringRecord:
    step: int
    actor: str
    action: str
    consumed: list  # [(buffer id, token)]
    state_before: str
    state_after: str
    produced: list
    before: dict = field(default=None, compare=False, repr=False)
    after: dict = field(default=None, compare=False, repr=False)

    def to_json(self) -> dict:
        return {
            "step": self.step,
            "actor": self.actor,
            "action": self.action,
            "consumed": [[b, token_json(t)] for b, t in self.consumed],
            "produced": [[b, token_json(t)] for b, t in self.produced],
            "state_before": self.state_before,
            "state_after": self.state_after,
        }


def _bind_inputs(instance, action, buffers):
    """Peek the tokens an action would consume; None if not enough or wrong selector."""
    bindings = {}
    taken = []
    for c in action.consumes:
        buf = buffers[c.port]
        if len(buf) < c.count:
            return None
        toks = buf.peek(c.count)
        if c.vars:
            bindings.update(zip(c.vars, toks))
        else:
            tok = toks[0]
            # a request names the action it is for, like a function selector
            if isinstance(tok, CallToken) and tok.fn != action.name:
                return None
            bindings["sender"] = tok.sender
            bindings["value"] = tok.value
        taken.append((buf, toks))
    return bindings, taken


def emit_count(emit: ast.Emit, port_type: ast.TypeExpr) -> int:
    """Tokens produced by one emit: a record port gets one token, a scalar port one per value."""
    if port_type.is_record:
        return 1
    return len(emit.args)


def production_counts(decl: ast.ActorDecl, action: ast.ActionDecl) -> dict:
    counts = {p.name: 0 for p in decl.outputs}
    for e in action.produces:
        counts[e.port] += emit_count(e, decl.port(e.port).token_type)
    return counts


def can_fire(instance: ActorInstance, action: ast.ActionDecl, input_buffers=None,
             output_buffers=None) -> bool:
    input_buffers = instance.inputs if input_buffers is None else input_buffers
    output_buffers = instance.outputs if output_buffers is None else output_buffers
    fsm = instance.decl.schedule
    if fsm is not None:
        if not any(t.action == action.name for t in fsm.enabled(instance.fsm_state)):
            return False
    bound = _bind_inputs(instance, action, input_buffers)
    if bound is None:
        return False
    bindings, _ = bound
    for port, n in production_counts(instance.decl, action).items():
        room = output_buffers[port].room() if port in output_buffers else None
        if room is not None and room < n:
            return False
    try:
        return all(eval_expr(g, instance.state, bindings) for g in action.guards)
    except EvalError as exc:
        log.warning("%s.%s: guard raised %s; treated as not fireable", instance.name, action.name, exc)
        return False


def evaluate_action(decl: ast.ActorDecl, action: ast.ActionDecl, state: dict, bindings: dict,
                    self_address: Address):
    """Pure body evaluation: returns (new state, [(port, token)]) without touching ``state``.

    Statements run in order on a private copy. Emission values read the
    firing's input state, whatever their position in the body.
    """
    private = copy.deepcopy(state)
    env = dict(bindings)
    pending = []
    for stmt in action.body:
        if isinstance(stmt, ast.Let):
            env[stmt.name] = eval_expr(stmt.value, private, env)
        elif isinstance(stmt, ast.Assign):
            value = eval_expr(stmt.value, private, env)
            if isinstance(stmt.target, ast.Name):
                private[stmt.target.id] = value
            else:
                key = eval_expr(stmt.target.key, private, env)
                private[stmt.target.base.id][key] = value
        else:
            values = [eval_expr(a, state, env) for a in stmt.args]
            port_type = decl.port(stmt.port).token_type
            if port_type == ast.CALL:
                pending.append((stmt.port, CallToken(self_address, stmt.selector, values[0])))
            elif port_type == ast.TRANSFER:
                pending.append((stmt.port, TransferToken(self_address, values[0], values[1])))
            else:
                pending.extend((stmt.port, v) for v in values)
    return private, pending


def fire(instance: ActorInstance, action: ast.ActionDecl, input_buffers=None,
         output_buffers=None, step: int = 0) -> FiringRecord:
    """Consume, compute, commit, then produce. On EvalError nothing changes."""
    input_buffers = instance.inputs if input_buffers is None else input_buffers
    output_buffers = instance.outputs if output_buffers is None else output_buffers
    bound = _bind_inputs(instance, action, input_buffers)
    if bound is None:
        raise EvalError("NotFireable", f"{instance.name}.{action.name} lacks input tokens")
    bindings, taken = bound
    credit = sum(token_value(t) for _, toks in taken for t in toks)
    new_state, pending = evaluate_action(instance.decl, action, instance.state, bindings,
                                         instance.address)
    debit = sum(token_value(t) for _, t in pending)
    balance = instance.native_balance + credit
    if debit > balance:
        raise EvalError("InsufficientBalance",
                        f"{instance.name} holds {balance} wei but emits {debit}")
    for port, n in production_counts(instance.decl, action).items():
        room = output_buffers[port].room()
        if room is not None and room < n:
            raise EvalError("BufferFull", f"{instance.name}.{port} has no room")

    before = instance.snapshot()
    consumed = []
    for buf, toks in taken:
        for _ in toks:
            consumed.append((buf.id, buf.pop()))
    instance.state = new_state
    instance.native_balance = balance - debit
    if instance.decl.schedule is not None:
        for t in instance.decl.schedule.enabled(instance.fsm_state):
            if t.action == action.name:
                instance.fsm_state = t.target
                break
    after = instance.snapshot()
    # only now do the outputs become visible to other actors
    produced = []
    for port, tok in pending:
        buf = output_buffers[port]
        buf.push(tok)
        produced.append((buf.id, tok))
    return FiringRecord(step, instance.name, action.name, consumed, state_digest(before),
                        state_digest(after), produced, before, after)


class RoundRobin:
    """Visit instances cyclically in declaration order, starting after the last one fired."""

    def __init__(self):
        self.next = 0

    def select(self, network: "Network"):
        n = len(network.instances)
        for i in range(n):
            idx = (self.next + i) % n
            inst = network.instances[idx]
            for action in inst.decl.actions:
                if can_fire(inst, action):
                    self.next = (idx + 1) % n
                    return inst, action
        return None


class FirstFireable:
    """Always prefer the earliest-declared instance."""

    def select(self, network: "Network"):
        for inst in network.instances:
            for action in inst.decl.actions:
                if can_fire(inst, action):
                    return inst, action
        return None


class Network:
    def __init__(self, decl: ast.NetworkDecl, buffer_cap: Optional[int] = None, policy=None):
        self.decl = decl
        self.instances: list[ActorInstance] = []
        self.buffers: dict[str, Buffer] = {}
        self.policy = policy or RoundRobin()
        self.steps = 0
        for i, idecl in enumerate(decl.instances):
            actor = decl.actors[idecl.name]
            self.instances.append(ActorInstance.create(idecl.name, actor, Address(i + 1), idecl.balance))
        by_name = {inst.name: inst for inst in self.instances}
        for b in decl.buffers:
            buf = Buffer(b.name, b.src, b.dst, buffer_cap)
            self.buffers[b.name] = buf
            by_name[b.src[0]].outputs[b.src[1]] = buf
            by_name[b.dst[0]].inputs[b.dst[1]] = buf
        # unconnected ports talk to the outside world through implicit buffers
        for inst in self.instances:
            for port in inst.decl.inputs:
                if port.name not in inst.inputs:
                    buf = Buffer(f"{inst.name}.{port.name}", None, (inst.name, port.name), buffer_cap)
                    self.buffers[buf.id] = buf
                    inst.inputs[port.name] = buf
            for port in inst.decl.outputs:
                if port.name not in inst.outputs:
                    buf = Buffer(f"{inst.name}.{port.name}", (inst.name, port.name), None, buffer_cap)
                    self.buffers[buf.id] = buf
                    inst.outputs[port.name] = buf
        for tok in decl.initial:
            values = [const_value(a) for a in tok.args]
            if tok.head is None:
                item = values[0]
            elif tok.head == "transfer":
                item = TransferToken(*values)
            else:
                item = CallToken(values[0], tok.head, values[1])
            self.buffers[tok.buffer].push(item)

    @classmethod
    def isolated(cls, actor: ast.ActorDecl, balance: int = 0, buffer_cap=None, policy=None):
        decl = ast.NetworkDecl(actor.name, [ast.InstanceDecl(actor.name, actor.name, None, balance)])
        decl.actors = {actor.name: actor}
        return cls(decl, buffer_cap, policy)

    def instance(self, name: str) -> ActorInstance:
        for inst in self.instances:
            if inst.name == name:
                return inst
        raise KeyError(name)

    def address_of(self, name: str) -> Address:
        return self.instance(name).address

    @property
    def victims(self) -> list:
        return [self.address_of(v) for v in self.decl.victims]

    def in_flight_value(self) -> int:
        return sum(token_value(t) for b in self.buffers.values() for t in b.contents)

    def total_value(self) -> int:
        return sum(i.native_balance for i in self.instances) + self.in_flight_value()

    def fireable(self) -> bool:
        return any(can_fire(i, a) for i in self.instances for a in i.decl.actions)


def step_network(network: Network, policy=None) -> Optional[FiringRecord]:
    choice = (policy or network.policy).select(network)
    if choice is None:
        return None
    inst, action = choice
    record = fire(inst, action, step=network.steps)
    network.steps += 1
    return record


@dataclass
class Trace:
    records: list
    limit_exceeded: bool = False

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def __getitem__(self, i):
        return self.records[i]

    def jsonl(self) -> str:
        import json

        lines = [json.dumps(r.to_json()) for r in self.records]
        if self.limit_exceeded:
            lines.append(json.dumps({"terminator": "StepLimitExceeded", "steps": len(self.records)}))
        return "".join(line + "\n" for line in lines)


def run_until_quiescent(network: Network, policy=None, max_steps: int = 10_000) -> Trace:
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    records = []
    while len(records) < max_steps:
        rec = step_network(network, policy)
        if rec is None:
            return Trace(records)
        records.append(rec)
    return Trace(records, limit_exceeded=network.fireable())
