"""JSON scenarios: accounts, deployments and an ordered list of external calls."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ..values import Address, parse_wei
from . import metrics
from .parser import parse_contract
from .vm import (DEFAULT_MAX_CALL_DEPTH, CallFrame, CallResult, World, call, deploy,
                 events_jsonl, run_deep)


class ScenarioError(ValueError):
    pass


@dataclass
class Scenario:
    accounts: list
    deployments: list
    steps: list
    victims: list = field(default_factory=list)
    max_call_depth: int = DEFAULT_MAX_CALL_DEPTH
    base_dir: Path = Path(".")
    name: str = "<scenario>"


def _require(cond, msg):
    if not cond:
        raise ScenarioError(msg)


def parse_scenario(data: dict, base_dir=".", name: str = "<scenario>") -> Scenario:
    _require(isinstance(data, dict), "scenario must be a JSON object")
    unknown = set(data) - {"accounts", "deployments", "steps", "victims", "max_call_depth",
                           "description"}
    _require(not unknown, f"unknown scenario fields: {sorted(unknown)}")
    accounts = data.get("accounts", [])
    deployments = data.get("deployments", [])
    steps = data.get("steps", [])
    victims = data.get("victims", [])
    declared = set()
    for a in accounts:
        _require("name" in a, "account without a name")
        _require(a["name"] not in declared, f"duplicate name {a['name']!r}")
        declared.add(a["name"])
    for d in deployments:
        for key in ("name", "source", "contract"):
            _require(key in d, f"deployment missing {key!r}")
        _require(d["name"] not in declared, f"duplicate name {d['name']!r}")
        if "from" in d:
            _require(d["from"] in declared, f"deployment {d['name']!r}: unknown deployer {d['from']!r}")
        for arg in d.get("args", []):
            if isinstance(arg, str) and arg.startswith("@"):
                _require(arg[1:] in declared, f"deployment {d['name']!r}: {arg} used before declared")
        declared.add(d["name"])
    for i, s in enumerate(steps):
        _require("from" in s and "to" in s, f"step {i} needs 'from' and 'to'")
        for ref in (s["from"], s["to"]):
            _require(ref in declared or ref.startswith("0x"), f"step {i}: unknown account {ref!r}")
        for arg in s.get("args", []):
            if isinstance(arg, str) and arg.startswith("@"):
                _require(arg[1:] in declared, f"step {i}: unknown reference {arg}")
    for v in victims:
        _require(v in declared, f"unknown victim {v!r}")
    depth = data.get("max_call_depth", DEFAULT_MAX_CALL_DEPTH)
    _require(isinstance(depth, int) and depth >= 0, "max_call_depth must be a non-negative integer")
    return Scenario(accounts, deployments, steps, victims, depth, Path(base_dir), name)


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: invalid JSON: {exc}") from None
    return parse_scenario(data, path.parent, path.name)


def _ref(world: World, ref: str) -> Address:
    if ref.startswith("0x"):
        return Address.parse(ref)
    return world.names[ref]


def _arg(world: World, raw):
    if isinstance(raw, bool):
        return raw
    if isinstance(raw, str) and raw.startswith("@"):
        return world.names[raw[1:]]
    if isinstance(raw, str) and raw.startswith("0x"):
        return Address.parse(raw)
    return parse_wei(raw)


def prepare_world(scenario: Scenario, overrides: Optional[dict] = None,
                  max_call_depth: Optional[int] = None) -> World:
    """Create accounts and run deployments.  ``overrides`` maps deployment name -> ContractDef."""
    overrides = overrides or {}
    depth = scenario.max_call_depth if max_call_depth is None else max_call_depth
    world = World(max_call_depth=depth)
    for a in scenario.accounts:
        addr = Address.parse(a["address"]) if "address" in a else None
        world.add_wallet(a["name"], parse_wei(a.get("balance", "0")), addr)
    for d in scenario.deployments:
        contract = overrides.get(d["name"])
        if contract is None:
            path = scenario.base_dir / d["source"]
            contract = parse_contract(path.read_text(), str(path), d["contract"])
        deployer = world.names.get(d.get("from")) if d.get("from") else None
        args = [_arg(world, x) for x in d.get("args", [])]
        deploy(world, contract, args, parse_wei(d.get("endowment", "0")), deployer, d["name"])
    return world


def execute_step(world: World, step: dict) -> CallResult:
    frame = CallFrame(_ref(world, step["from"]), _ref(world, step["to"]), step.get("function"),
                      parse_wei(step.get("value", "0")), 0)
    return call(world, frame, [_arg(world, x) for x in step.get("args", [])])


@dataclass
class ScenarioResult:
    world: World
    results: list
    victims: list  # addresses

    @property
    def trace(self) -> list:
        return self.world.trace

    def jsonl(self) -> str:
        return events_jsonl(self.world.trace)

    def victim_loss(self) -> int:
        return metrics.victim_loss(self.world.trace, self.victims)

    def value_flows(self) -> dict:
        return metrics.value_flows(self.world.trace, self.victims)


def _run(scenario, overrides, max_call_depth):
    world = prepare_world(scenario, overrides, max_call_depth)
    world.trace.clear()  # deployment events are setup, not part of the run
    results = [execute_step(world, s) for s in scenario.steps]
    return ScenarioResult(world, results, [world.names[v] for v in scenario.victims])


def run_scenario(scenario: Scenario, overrides: Optional[dict] = None,
                 max_call_depth: Optional[int] = None) -> ScenarioResult:
    """Execute every step in order; reverts are recorded, never fatal."""
    return run_deep(_run, scenario, overrides, max_call_depth)
