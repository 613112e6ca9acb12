from __future__ import annotations

from dataclasses import dataclass

from ..values import Address, to_json_value


@dataclass(frozen=True)
class CallToken:
    """A request for one action of the receiving actor (msg.sender / msg.value)."""

    sender: Address
    fn: str
    value: int

    def canonical(self) -> str:
        return f"call({self.sender},{self.fn},{self.value})"

    def to_json(self) -> dict:
        return {"kind": "call", "sender": str(self.sender), "fn": self.fn, "value": str(self.value)}


@dataclass(frozen=True)
class TransferToken:
    """Ether in flight; the runtime credits whoever consumes it."""

    sender: Address
    to: Address
    value: int

    def canonical(self) -> str:
        return f"transfer({self.sender},{self.to},{self.value})"

    def to_json(self) -> dict:
        return {"kind": "transfer", "sender": str(self.sender), "to": str(self.to),
                "value": str(self.value)}


def token_value(tok) -> int:
    """Native currency carried by a token (0 for plain data tokens)."""
    if isinstance(tok, (CallToken, TransferToken)):
        return tok.value
    return 0


def token_json(tok):
    return to_json_value(tok)


def token_from_json(desc: dict, port_type: str):
    """Decode one input-script descriptor for a port of the given type name."""
    from ..values import parse_wei

    if port_type == "call":
        return CallToken(Address.parse(desc["sender"]), desc["fn"], parse_wei(desc.get("value", "0")))
    if port_type == "transfer":
        return TransferToken(Address.parse(desc["sender"]), Address.parse(desc["to"]),
                             parse_wei(desc["value"]))
    raw = desc["value"]
    if port_type == "bool":
        if not isinstance(raw, bool):
            raise ValueError(f"expected boolean token, got {raw!r}")
        return raw
    if port_type == "address":
        return Address.parse(raw)
    return parse_wei(raw)

