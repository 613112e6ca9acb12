"""The four-way DAO attack comparison."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .values import WEI_PER_ETHER

FIXTURES = Path(__file__).parent / "fixtures"


@dataclass(frozen=True)
class DemoRow:
    name: str
    model: str
    victim_loss: int
    expected: int

    @property
    def ok(self) -> bool:
        return self.victim_loss == self.expected


def attack_demo(fixtures=FIXTURES) -> list:
    """Run the attack against the vulnerable, reordered and generated contracts and the dataflow network."""
    from .codegen import generate_contract
    from .dataflow import Network, run_until_quiescent, victim_loss
    from .dsl import load_actor, load_network
    from .seqvm import load_scenario, parse_contract, run_scenario

    fixtures = Path(fixtures)
    scenario = load_scenario(fixtures / "dao_attack.scenario")

    def seq(override=None):
        overrides = {"dao": override} if override is not None else None
        return run_scenario(scenario, overrides=overrides).victim_loss()

    fixed_path = fixtures / "dao_fixed.sol.txt"
    fixed = parse_contract(fixed_path.read_text(), str(fixed_path), "DAO")
    dao = load_actor(fixtures / "dao.actor")
    generated = parse_contract(generate_contract(dao), "dao_generated.sol.txt", dao.name)
    net = Network(load_network(fixtures / "dao_attacker.network"))
    trace = run_until_quiescent(net)
    return [
        DemoRow("vulnerable", "sequential", seq(), 6 * WEI_PER_ETHER),
        DemoRow("reordered-fix", "sequential", seq(fixed), 0),
        DemoRow("generated-mutex", "sequential", seq(generated), 0),
        DemoRow("dataflow", "dataflow", victim_loss(trace, net), 0),
    ]
