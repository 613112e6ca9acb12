"""Drain accounting over sequential traces."""
from __future__ import annotations

from .vm import CallEnter, CallExit, Transfer


def committed_transfers(trace) -> list:
    """Transfer events that survive: those inside reverted frames are dropped."""
    stack = [[]]
    for ev in trace:
        if isinstance(ev, CallEnter):
            stack.append([])
        elif isinstance(ev, CallExit):
            done = stack.pop() if len(stack) > 1 else []
            if not ev.reverted:
                stack[-1].extend(done)
        elif isinstance(ev, Transfer):
            stack[-1].append(ev)
    out = []
    for pending in stack:  # an unterminated trace keeps what it has
        out.extend(pending)
    return out


def value_flows(trace, victims) -> dict:
    """Per counterparty: [paid out by victims, paid in to victims]."""
    victims = set(victims)
    flows: dict = {}
    for t in committed_transfers(trace):
        if t.sender in victims and t.to not in victims:
            flows.setdefault(t.to, [0, 0])[0] += t.amount
        elif t.to in victims and t.sender not in victims:
            flows.setdefault(t.sender, [0, 0])[1] += t.amount
    return flows


def victim_loss(trace, victims) -> int:
    """Value extracted from the victims beyond each counterparty's own contributions."""
    return sum(max(0, out - inn) for out, inn in value_flows(trace, victims).values())


def max_depth(trace) -> int:
    """Deepest CallEnter/CallExit nesting in the trace."""
    depth = best = 0
    for ev in trace:
        if isinstance(ev, CallEnter):
            depth += 1
            best = max(best, depth)
        elif isinstance(ev, CallExit):
            depth -= 1
    return best


def well_bracketed(trace) -> bool:
    stack = []
    for ev in trace:
        if isinstance(ev, CallEnter):
            stack.append(ev.frame)
        elif isinstance(ev, CallExit):
            if not stack or stack.pop() != ev.frame:
                return False
    return not stack
