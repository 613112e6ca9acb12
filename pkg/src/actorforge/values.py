"""Runtime values shared by both execution models."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

WEI_PER_ETHER = 10**18
UINT_MAX = 2**256 - 1
ADDRESS_BITS = 160


class EvalError(Exception):
    """Arithmetic or evaluation failure inside an expression."""

    def __init__(self, kind: str, message: str = ""):
        super().__init__(f"{kind}: {message}" if message else kind)
        self.kind = kind


@dataclass(frozen=True, order=True)
class Address:
    value: int

    def __post_init__(self):
        if not 0 <= self.value < 2**ADDRESS_BITS:
            raise ValueError(f"address out of range: {self.value:#x}")

    def __str__(self):
        return "0x" + format(self.value, "040x")

    __repr__ = __str__

    @classmethod
    def parse(cls, text: str) -> "Address":
        if not text.lower().startswith("0x"):
            raise ValueError(f"not an address: {text!r}")
        return cls(int(text, 16))


ZERO_ADDRESS = Address(0)


def check_uint(value: int) -> int:
    if value < 0 or value > UINT_MAX:
        raise EvalError("Overflow", f"{value} does not fit in uint256")
    return value


def format_ether(wei: int) -> str:
    """Render an exact wei amount in ether, e.g. ``6 ether`` or ``0.5 ether``."""
    amount = Fraction(wei, WEI_PER_ETHER)
    if amount.denominator == 1:
        return f"{amount.numerator} ether"
    whole, rest = divmod(wei, WEI_PER_ETHER)
    frac = str(rest).rjust(18, "0").rstrip("0")
    return f"{whole}.{frac} ether"


def parse_wei(text) -> int:
    """Amounts in scenario files are decimal wei strings; ints pass through."""
    if isinstance(text, bool):
        raise ValueError("boolean is not an amount")
    if isinstance(text, int):
        return check_uint(text)
    text = str(text).strip()
    if text.endswith("ether"):
        return check_uint(int(Fraction(text[:-5].strip()) * WEI_PER_ETHER))
    return check_uint(int(text))


FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


def fnv1a64(data: bytes) -> int:
    h = FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def canonical(value) -> str:
    """Deterministic text form of a runtime value (maps drop zero entries)."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Address):
        return str(value)
    if isinstance(value, dict):
        items = sorted((k, v) for k, v in value.items() if v not in (0, False))
        return "{" + ",".join(f"{canonical(k)}:{canonical(v)}" for k, v in items) + "}"
    if value is None:
        return "null"
    if isinstance(value, str):
        return value
    if hasattr(value, "canonical"):
        return value.canonical()
    raise TypeError(f"no canonical form for {type(value).__name__}")


def state_digest(state: dict) -> str:
    text = ";".join(f"{k}={canonical(state[k])}" for k in sorted(state))
    return format(fnv1a64(text.encode()), "016x")


def to_json_value(value):
    if isinstance(value, bool):
        return value
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Address):
        return str(value)
    if value is None:
        return None
    if hasattr(value, "to_json"):
        return value.to_json()
    raise TypeError(f"cannot serialize {type(value).__name__}")
