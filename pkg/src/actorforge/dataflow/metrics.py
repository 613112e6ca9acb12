"""Value accounting over firing traces."""
from __future__ import annotations

from .tokens import CallToken, TransferToken


def _dst_address(network, buffer_id):
    dst = network.buffers[buffer_id].dst
    return network.address_of(dst[0]) if dst is not None else None


def value_flows(records, network, victims=None) -> dict:
    """Per counterparty address: [value paid out by victims, value paid in to victims]."""
    victims = set(network.decl.victims if victims is None else victims)
    flows: dict = {}
    for rec in records:
        if rec.actor not in victims:
            continue
        for _, tok in rec.consumed:
            if isinstance(tok, (CallToken, TransferToken)) and tok.value:
                flows.setdefault(tok.sender, [0, 0])[1] += tok.value
        for buf, tok in rec.produced:
            if isinstance(tok, TransferToken):
                flows.setdefault(tok.to, [0, 0])[0] += tok.value
            elif isinstance(tok, CallToken) and tok.value:
                flows.setdefault(_dst_address(network, buf), [0, 0])[0] += tok.value
    return flows


def victim_loss(records, network, victims=None) -> int:
    return sum(max(0, out - inn) for out, inn in value_flows(records, network, victims).values())


def cumulative_flows(records, network, party: str) -> list:
    """(received, deposited) by ``party`` after each firing of the trace."""
    addr = network.address_of(party)
    received = deposited = 0
    out = []
    for rec in records:
        for buf, tok in rec.produced:
            if isinstance(tok, TransferToken) and tok.to == addr:
                received += tok.value
            elif isinstance(tok, CallToken) and rec.actor == party:
                deposited += tok.value
        out.append((received, deposited))
    return out
