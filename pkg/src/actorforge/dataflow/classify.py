"""Static / cyclo-static / dynamic classification of actors by token rates."""
from __future__ import annotations

import enum
from dataclasses import dataclass

from ..dsl import ast
from .runtime import FirstFireable, Network, production_counts, step_network
from .tokens import token_from_json


class ActorClass(enum.Enum):
    STATIC = "Static"
    CYCLO_STATIC = "CycloStatic"
    DYNAMIC = "Dynamic"

    def __str__(self):
        return self.value


# (consumption per input port, production per output port)
RateVector = tuple


def format_vector(vec: RateVector) -> str:
    cons, prod = vec
    return f"({','.join(map(str, cons))};{','.join(map(str, prod))})"


@dataclass(frozen=True)
class RateSignature:
    kind: str  # constant | cyclic | unknown
    vectors: tuple = ()

    @property
    def period(self) -> int:
        return len(self.vectors)

    def __str__(self):
        if self.kind == "constant":
            return format_vector(self.vectors[0]) if self.vectors else "()"
        if self.kind == "cyclic":
            return f"period={self.period} [{' '.join(format_vector(v) for v in self.vectors)}]"
        return "unknown"


def rate_vector(decl: ast.ActorDecl, action: ast.ActionDecl) -> RateVector:
    cons = {p.name: 0 for p in decl.inputs}
    for c in action.consumes:
        cons[c.port] += c.count
    prod = production_counts(decl, action)
    return tuple(cons[p.name] for p in decl.inputs), tuple(prod[p.name] for p in decl.outputs)


def _inspects_data(decl: ast.ActorDecl, action: ast.ActionDecl) -> bool:
    """True if eligibility depends on token values or state."""
    for c in action.consumes:
        if decl.port(c.port).token_type == ast.CALL:
            return True  # the request's selector is a token value
    for g in action.guards:
        if any(isinstance(e, ast.Name) for e in ast.walk_expr(g)):
            return True
    return False


def minimal_period(seq: list) -> int:
    n = len(seq)
    for p in range(1, n + 1):
        if n % p == 0 and all(seq[i] == seq[i % p] for i in range(n)):
            return p
    return n


def _fsm_cycle(decl: ast.ActorDecl):
    """Rate sequence along the FSM if it is a single deterministic cycle through the initial state."""
    fsm = decl.schedule
    state = fsm.initial
    seen = []
    seq = []
    while state not in seen:
        seen.append(state)
        out = fsm.enabled(state)
        if not out:
            return None
        vectors = {rate_vector(decl, decl.action(t.action)) for t in out}
        targets = {t.target for t in out}
        if len(vectors) != 1 or len(targets) != 1:
            return None
        seq.append(vectors.pop())
        state = targets.pop()
    if state != fsm.initial:
        return None  # transient prefix before the cycle
    return seq


def classify_actor(decl: ast.ActorDecl):
    """Return ``(ActorClass, RateSignature)``."""
    if any(_inspects_data(decl, a) for a in decl.actions):
        return ActorClass.DYNAMIC, RateSignature("unknown")
    vectors = {rate_vector(decl, a) for a in decl.actions}
    if len(vectors) <= 1:
        return ActorClass.STATIC, RateSignature("constant", tuple(vectors))
    if decl.schedule is not None:
        seq = _fsm_cycle(decl)
        if seq is not None:
            p = minimal_period(seq)
            if p == 1:
                return ActorClass.STATIC, RateSignature("constant", (seq[0],))
            return ActorClass.CYCLO_STATIC, RateSignature("cyclic", tuple(seq[:p]))
    return ActorClass.DYNAMIC, RateSignature("unknown")


def load_script(decl: ast.ActorDecl, script: list) -> list:
    """Decode a JSON input script into (port, token) pairs."""
    items = []
    for desc in script:
        port = decl.port(desc["port"])
        if port is None or port.direction != "in":
            raise ValueError(f"script names unknown input port {desc['port']!r}")
        items.append((port.name, token_from_json(desc, port.token_type.name)))
    return items


def simulate_rates(decl: ast.ActorDecl, input_script: list, n_firings: int, balance: int = 0) -> list:
    """Fire the actor alone against scripted inputs and record each firing's rate vector.

    Stops early when the actor can no longer fire.
    """
    if n_firings < 1:
        raise ValueError("n_firings must be >= 1")
    net = Network.isolated(decl, balance=balance, policy=FirstFireable())
    inst = net.instances[0]
    for port, tok in load_script(decl, input_script):
        inst.inputs[port].push(tok)
    in_ids = [inst.inputs[p.name].id for p in decl.inputs]
    out_ids = [inst.outputs[p.name].id for p in decl.outputs]
    observed = []
    for _ in range(n_firings):
        rec = step_network(net)
        if rec is None:
            break
        cons = tuple(sum(1 for b, _ in rec.consumed if b == i) for i in in_ids)
        prod = tuple(sum(1 for b, _ in rec.produced if b == o) for o in out_ids)
        observed.append((cons, prod))
    return observed


def rates_consistent(cls: ActorClass, sig: RateSignature, observed: list) -> bool:
    if cls is ActorClass.STATIC:
        return all(v == observed[0] for v in observed) and (
            not observed or not sig.vectors or observed[0] == sig.vectors[0])
    if cls is ActorClass.CYCLO_STATIC:
        p = sig.period
        return all(v == sig.vectors[i % p] for i, v in enumerate(observed))
    return True
