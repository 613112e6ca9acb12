import pytest

from actorforge.dataflow import (CallToken, FirstFireable, Network, TransferToken, can_fire,
                                 cumulative_flows, evaluate_action, fire, run_until_quiescent,
                                 step_network, victim_loss)
from actorforge.dsl import load_actor, load_network, parse_actor_source, resolve
from actorforge.values import Address, EvalError

E = 10**18
USER_A = Address(0xA001)


def dao(fixtures):
    return load_actor(fixtures / "dao.actor")


def isolated(decl, balance=0, cap=None):
    net = Network.isolated(decl, balance=balance, buffer_cap=cap, policy=FirstFireable())
    return net, net.instances[0]


def test_deposit_then_withdraw_pays_full_balance(fixtures):
    net, inst = isolated(dao(fixtures))
    inst.inputs["req"].push(CallToken(USER_A, "deposit", 3 * E))
    inst.inputs["req"].push(CallToken(USER_A, "withdraw", 0))
    run_until_quiescent(net)
    assert list(inst.outputs["pay"].contents) == [TransferToken(inst.address, USER_A, 3 * E)]
    assert inst.state["balances"][USER_A] == 0
    assert inst.native_balance == 0


def test_emission_order_does_not_matter(fixtures):
    results = []
    for name in ("dao", "dao_swapped"):
        net, inst = isolated(load_actor(fixtures / f"{name}.actor"))
        inst.inputs["req"].push(CallToken(USER_A, "deposit", 2 * E))
        inst.inputs["req"].push(CallToken(USER_A, "withdraw", 0))
        trace = run_until_quiescent(net)
        results.append((trace.jsonl(), list(inst.outputs["pay"].contents)))
    assert results[0] == results[1]


def test_guard_blocks_small_deposit(fixtures):
    net, inst = isolated(dao(fixtures))
    inst.inputs["req"].push(CallToken(USER_A, "deposit", E // 2))
    assert step_network(net) is None
    assert len(inst.inputs["req"]) == 1


def test_selector_routes_to_matching_action(fixtures):
    d = dao(fixtures)
    net, inst = isolated(d)
    inst.inputs["req"].push(CallToken(USER_A, "withdraw", 0))
    assert not can_fire(inst, d.action("deposit"))
    assert not can_fire(inst, d.action("withdraw"))  # no balance yet


def test_firing_is_transactional_on_overflow():
    decl = resolve(parse_actor_source(
        "actor Acc in a : uint out b : uint state t : uint "
        "action add : a[x] do t = t + x emit b(x) end end"))
    net, inst = isolated(decl)
    inst.state["t"] = 2**256 - 1
    inst.inputs["a"].push(5)
    before = inst.snapshot()
    with pytest.raises(EvalError) as e:
        fire(inst, decl.action("add"))
    assert e.value.kind == "Overflow"
    assert inst.snapshot() == before
    assert len(inst.inputs["a"]) == 1
    assert len(inst.outputs["b"]) == 0


def test_insufficient_balance_is_an_eval_error(fixtures):
    d = dao(fixtures)
    net, inst = isolated(d)
    inst.state["balances"][USER_A] = 5 * E  # claims more than the actor holds
    inst.inputs["req"].push(CallToken(USER_A, "withdraw", 0))
    with pytest.raises(EvalError) as e:
        fire(inst, d.action("withdraw"))
    assert e.value.kind == "InsufficientBalance"
    assert len(inst.inputs["req"]) == 1


def test_evaluate_action_is_pure(fixtures):
    d = dao(fixtures)
    state = {"balances": {USER_A: 3 * E}}
    new, pending = evaluate_action(d, d.action("withdraw"), state,
                                   {"sender": USER_A, "value": 0}, Address(1))
    assert state == {"balances": {USER_A: 3 * E}}
    assert new["balances"][USER_A] == 0
    assert pending == [("pay", TransferToken(Address(1), USER_A, 3 * E))]


def test_buffer_capacity_blocks_producer():
    decl = resolve(parse_actor_source(
        "actor Copy in a : uint out b : uint action c : a[x] emit b(x) end end"))
    net, inst = isolated(decl, cap=1)
    inst.inputs["a"].capacity = None  # only the output is bounded here
    inst.inputs["a"].push(1)
    inst.inputs["a"].push(2)
    run_until_quiescent(net)
    assert list(inst.outputs["b"].contents) == [1]
    assert len(inst.inputs["a"]) == 1


def test_fifo_order_preserved():
    decl = resolve(parse_actor_source(
        "actor Copy in a : uint out b : uint action c : a[x] emit b(x) end end"))
    net, inst = isolated(decl)
    for v in range(10):
        inst.inputs["a"].push(v)
    run_until_quiescent(net)
    assert list(inst.outputs["b"].contents) == list(range(10))


def test_dao_network_quiesces_without_drain(fixtures):
    net = Network(load_network(fixtures / "dao_attacker.network"))
    total = net.total_value()
    trace = run_until_quiescent(net)
    assert not trace.limit_exceeded
    assert (trace[0].actor, trace[0].action) == ("dao", "deposit")
    assert victim_loss(trace, net) == 0
    assert net.instance("dao").native_balance == 7 * E - E
    assert net.total_value() == total
    for received, deposited in cumulative_flows(trace, net, "attacker"):
        assert received <= deposited


def test_network_runs_are_deterministic(fixtures):
    a = run_until_quiescent(Network(load_network(fixtures / "dao_attacker.network"))).jsonl()
    b = run_until_quiescent(Network(load_network(fixtures / "dao_attacker.network"))).jsonl()
    assert a == b


def test_step_limit_terminator():
    decl = resolve(parse_actor_source(
        "actor Tick out o : uint state n : uint action t do n = n + 1 emit o(n) end end"))
    net, _ = isolated(decl)
    trace = run_until_quiescent(net, max_steps=5)
    assert trace.limit_exceeded
    assert trace.jsonl().strip().splitlines()[-1] == '{"terminator": "StepLimitExceeded", "steps": 5}'


def test_record_json_field_order(fixtures):
    net = Network(load_network(fixtures / "dao_attacker.network"))
    rec = step_network(net)
    assert list(rec.to_json()) == ["step", "actor", "action", "consumed", "produced",
                                   "state_before", "state_after"]
