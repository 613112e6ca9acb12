import pytest
from hypothesis import HealthCheck, given, settings

from actorforge.diagnostics import ParseError, ResolveError
from actorforge.seqvm import (CallEnter, CallExit, CallFrame, DeployError, RevertEvent, ScenarioError, StorageWrite,
                              Transfer, World, call, deploy, execute_step, load_scenario,
                              max_depth, parse_contract, parse_scenario, prepare_world,
                              run_scenario, victim_loss, well_bracketed)
from actorforge.seqvm.unparse import expr_text
from actorforge.values import Address
from conftest import FIXTURES
from scenario_gen import scenarios

E = 10**18


def contract(fixtures, name, cname=None):
    path = fixtures / name
    return parse_contract(path.read_text(), str(path), cname)


def dao_world(fixtures, source="dao_vulnerable.sol.txt"):
    world = World()
    a = world.add_wallet("userA", 5 * E)
    dao = deploy(world, contract(fixtures, source), name="dao")
    return world, a, dao


def test_deploy_addresses_are_sequential(fixtures):
    world, a, dao = dao_world(fixtures)
    assert dao == Address(1)
    assert world.accounts[dao].storage == {"balances": {}}
    att = deploy(world, contract(fixtures, "attacker.sol.txt"), [dao], name="attacker")
    assert att == Address(2)
    assert world.accounts[att].storage["dao"] == dao
    assert str(a) == "0x" + "0" * 36 + "a001"


def test_endowment_beyond_balance(fixtures):
    world = World()
    w = world.add_wallet("poor", 1)
    with pytest.raises(DeployError):
        deploy(world, contract(fixtures, "dao_vulnerable.sol.txt"), endowment=2, deployer=w)


def test_constructor_revert_is_deploy_error():
    c = parse_contract("contract C { constructor() public { require(false); } }")
    world = World()
    before = world.fingerprint()
    with pytest.raises(DeployError):
        deploy(world, c)
    assert world.fingerprint() == before
    assert deploy(world, parse_contract("contract D { }")) == Address(1)


def test_deposit_updates_balance_and_storage(fixtures):
    world, a, dao = dao_world(fixtures)
    r = call(world, CallFrame(a, dao, "deposit", 3 * E, 0))
    assert r.ok
    assert world.accounts[dao].storage["balances"][a] == 3 * E
    assert world.balance_of(dao) == 3 * E


def test_small_deposit_reverts_on_require(fixtures):
    world, a, dao = dao_world(fixtures)
    before = world.fingerprint()
    r = call(world, CallFrame(a, dao, "deposit", E // 2, 0))
    assert (r.ok, r.reason) == (False, "Require")
    assert world.fingerprint() == before


def test_withdraw_without_balance_leaves_world_unchanged(fixtures):
    world, a, dao = dao_world(fixtures)
    before = world.fingerprint()
    r = call(world, CallFrame(a, dao, "withdraw", 0, 0))
    assert r.reason == "Require"
    assert world.fingerprint() == before


def test_view_returns_value(fixtures):
    world, a, dao = dao_world(fixtures)
    call(world, CallFrame(a, dao, "deposit", 2 * E, 0))
    assert call(world, CallFrame(a, dao, "daoBalance", 0, 0)).value == 2 * E


@pytest.mark.parametrize("fn,value,reason", [
    ("missing", 0, "NoSuchFunction"),
    ("withdraw", 1, "NotPayable"),
    ("deposit", 100 * E, "InsufficientBalance"),
    (None, 1, "NoFallback"),
])
def test_dispatch_failures(fixtures, fn, value, reason):
    world, a, dao = dao_world(fixtures)
    assert call(world, CallFrame(a, dao, fn, value, 0)).reason == reason


def test_overflow_and_depth():
    c = parse_contract("""
        contract C {
            uint x;
            function big() public { x = 2; x = x - 3; }
            function again() public { this.again(); }
        }""")
    world = World(max_call_depth=10)
    w = world.add_wallet("w", 0)
    addr = deploy(world, c)
    assert call(world, CallFrame(w, addr, "big", 0, 0)).reason == "Overflow"
    r = call(world, CallFrame(w, addr, "again", 0, 0))
    assert r.reason == "OutOfDepth"
    assert well_bracketed(world.trace)


def test_statement_budget():
    c = parse_contract("contract C { function f() public { this.f(); } }")
    world = World(max_call_depth=10**6, budget=500)
    w = world.add_wallet("w", 0)
    addr = deploy(world, c)
    from actorforge.seqvm import run_deep
    assert run_deep(call, world, CallFrame(w, addr, "f", 0, 0)).reason == "OutOfBudget"


def test_vulnerable_scenario(fixtures):
    result = run_scenario(load_scenario(fixtures / "dao_attack.scenario"))
    world = result.world
    dao, att = world.names["dao"], world.names["attacker"]
    assert all(r.ok for r in result.results)
    assert world.balance_of(dao) == 0
    assert result.victim_loss() == 6 * E
    assert result.value_flows()[att] == [7 * E, 1 * E]
    out_of_dao = [e for e in result.trace if isinstance(e, Transfer) and e.sender == dao]
    assert len(out_of_dao) == 7
    assert well_bracketed(result.trace)
    assert world.total_balance() == 7 * E


def test_storage_at_drain_time_and_deferred_write(fixtures):
    result = run_scenario(load_scenario(fixtures / "dao_attack.scenario"))
    world = result.world
    dao, att = world.names["dao"], world.names["attacker"]
    a, b = world.names["userA"], world.names["userB"]
    transfers = 0
    drained_at = None
    for i, e in enumerate(result.trace):
        if isinstance(e, Transfer) and e.sender == dao:
            transfers += 1
            if transfers == 7:
                drained_at = i
    writes = [(i, e) for i, e in enumerate(result.trace)
              if isinstance(e, StorageWrite) and e.address == dao and e.key == att]
    # deposit write, then seven deferred resets, all after the last payout
    assert writes[0][1].new == E
    resets = [(i, e) for i, e in writes[1:]]
    assert len(resets) == 7 and all(i > drained_at for i, _ in resets)
    assert resets[0][1].old == E
    storage = world.accounts[dao].storage["balances"]
    assert storage[a] == 3 * E and storage[b] == 3 * E and storage[att] == 0


def test_bracket_depth_matches_reentries(fixtures):
    result = run_scenario(load_scenario(fixtures / "dao_attack.scenario"))
    dao = result.world.names["dao"]
    # frames entered while the DAO already had a live frame on the deepest path
    deepest = max_depth(result.trace)
    stack, best = [], 0
    for e in result.trace:
        if isinstance(e, CallEnter):
            stack.append(e.frame)
            if len(stack) == deepest:
                first = next(i for i, f in enumerate(stack) if f.callee == dao)
                best = len(stack) - first - 1
        elif isinstance(e, CallExit):
            stack.pop()
    assert deepest >= 3
    assert deepest == best + 2 == 15


def test_drain_is_monotone_in_depth_cap(fixtures):
    s = load_scenario(fixtures / "dao_attack.scenario")
    losses = [run_scenario(s, max_call_depth=d).victim_loss() for d in range(0, 32)]
    assert losses == sorted(losses)
    assert losses[0] == 0 and losses[-1] == 6 * E
    assert run_scenario(s, max_call_depth=6).victim_loss() < 6 * E


def test_fixed_scenario(fixtures):
    result = run_scenario(load_scenario(fixtures / "dao_attack_fixed.scenario"))
    world = result.world
    assert result.victim_loss() == 0
    assert world.balance_of(world.names["dao"]) == 6 * E
    assert result.value_flows()[world.names["attacker"]] == [E, E]
    reverts = [e for e in result.trace if isinstance(e, RevertEvent)]
    assert [r.reason for r in reverts] == ["Require"]


def test_generated_scenario(fixtures):
    result = run_scenario(load_scenario(fixtures / "dao_attack_generated.scenario"))
    assert result.victim_loss() == 0
    assert result.world.balance_of(result.world.names["dao"]) == 6 * E
    assert [e.reason for e in result.trace if isinstance(e, RevertEvent)] == ["Require"]


def test_empty_scenario(fixtures):
    result = run_scenario(load_scenario(fixtures / "empty.scenario"))
    assert result.trace == [] and result.jsonl() == ""
    assert victim_loss([], []) == 0


def test_traces_are_byte_identical(fixtures):
    s = load_scenario(fixtures / "dao_attack.scenario")
    assert run_scenario(s).jsonl() == run_scenario(s).jsonl()


def test_scenario_validation(fixtures):
    with pytest.raises(ScenarioError):
        parse_scenario({"accounts": [], "deployments": [], "steps": [{"from": "x", "to": "y"}]})
    with pytest.raises(ScenarioError):
        parse_scenario({"deployments": [{"name": "a", "source": "s", "contract": "C",
                                         "args": ["@later"]}]})
    with pytest.raises(ScenarioError):
        parse_scenario({"victims": ["ghost"]})


def test_parser_errors():
    with pytest.raises(ParseError):
        parse_contract("contract C { function f() public { x = ; } }")
    with pytest.raises(ResolveError):
        parse_contract("contract C { function f() public { y = 1; } }")
    with pytest.raises(ResolveError):
        parse_contract("contract C { function f() public { } function f() public { } }")


def test_expression_rendering_round_trip():
    src = "contract C { uint x; function f() public { require(!(x > 1) && (x + 1) * 2 == 4 || x == 0); } }"
    cond = parse_contract(src).functions[0].body[0].cond
    text = expr_text(cond)
    again = parse_contract(src.replace("!(x > 1) && (x + 1) * 2 == 4 || x == 0", text))
    assert expr_text(again.functions[0].body[0].cond) == text


@settings(max_examples=120, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(scenarios(FIXTURES))
def test_reverted_top_level_steps_roll_back(scenario):
    world = prepare_world(scenario)
    total = world.total_balance()
    for step in scenario.steps:
        before = world.fingerprint()
        result = execute_step(world, step)
        if not result.ok:
            assert world.fingerprint() == before
        assert world.total_balance() == total
    assert well_bracketed(world.trace)
