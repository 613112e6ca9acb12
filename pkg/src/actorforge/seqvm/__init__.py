"""Sequential contract VM: the execution model in which the reentrancy drain happens."""
from .ast import ContractDef, FunctionDef
from .metrics import max_depth, value_flows, victim_loss, well_bracketed
from .parser import check_contract, parse_contract, parse_contracts
from .scenario import (Scenario, ScenarioError, ScenarioResult, execute_step, load_scenario,
                       parse_scenario, prepare_world, run_scenario)
from .vm import (Account, CallEnter, CallExit, CallFrame, CallResult, DeployError, RevertEvent,
                 StorageWrite, Transfer, World, call, deploy, events_jsonl, run_deep)

__all__ = [
    "ContractDef", "FunctionDef", "max_depth", "value_flows", "victim_loss", "well_bracketed",
    "check_contract", "parse_contract", "parse_contracts", "Scenario", "ScenarioError",
    "ScenarioResult", "execute_step", "load_scenario", "parse_scenario", "prepare_world",
    "run_scenario", "Account", "CallEnter", "CallExit", "CallFrame", "CallResult", "DeployError",
    "RevertEvent", "StorageWrite", "Transfer", "World", "call", "deploy", "events_jsonl", "run_deep",
]
