import pytest

from actorforge.dataflow import ActorClass, classify_actor, rates_consistent, simulate_rates
from actorforge.dataflow.classify import minimal_period
from actorforge.dsl import load_actor, parse_actor_source, resolve


def cls_of(fixtures, name):
    return classify_actor(load_actor(fixtures / f"{name}.actor"))


def test_fixture_classes(fixtures):
    assert cls_of(fixtures, "dao")[0] is ActorClass.DYNAMIC
    c, sig = cls_of(fixtures, "copy")
    assert (c, str(sig)) == (ActorClass.STATIC, "(1;1)")
    c, sig = cls_of(fixtures, "alt")
    assert c is ActorClass.CYCLO_STATIC and sig.period == 2
    assert str(sig) == "period=2 [(2;1) (1;1)]"
    assert cls_of(fixtures, "empty")[0] is ActorClass.STATIC


def test_guard_on_state_is_dynamic():
    decl = resolve(parse_actor_source(
        "actor G in a : uint out b : uint state on : bool action f : a[x] guard on emit b(x) end end"))
    assert classify_actor(decl)[0] is ActorClass.DYNAMIC


def test_fsm_with_equal_rates_collapses_to_static():
    decl = resolve(parse_actor_source(
        "actor T in a : uint out b : uint "
        "action p : a[x] emit b(x) end action q : a[x] emit b(x) end "
        "schedule s s : p -> t t : q -> s end end"))
    c, sig = classify_actor(decl)
    assert c is ActorClass.STATIC and str(sig) == "(1;1)"


def test_transient_fsm_prefix_is_dynamic():
    decl = resolve(parse_actor_source(
        "actor T in a : uint out b : uint "
        "action p : a[x, y] emit b(x) end action q : a[x] emit b(x) end "
        "schedule s s : p -> t t : q -> t end end"))
    assert classify_actor(decl)[0] is ActorClass.DYNAMIC


def test_minimal_period():
    assert minimal_period([1, 2, 1, 2]) == 2
    assert minimal_period([1, 1, 1]) == 1
    assert minimal_period([1, 2, 3]) == 3


def test_simulated_rates_match_alt(fixtures):
    alt = load_actor(fixtures / "alt.actor")
    obs = simulate_rates(alt, [{"port": "a", "value": str(i)} for i in range(40)], 20)
    assert len(obs) == 20
    assert rates_consistent(*classify_actor(alt), obs)


def test_simulate_rejects_bad_script(fixtures):
    with pytest.raises(ValueError):
        simulate_rates(load_actor(fixtures / "copy.actor"), [{"port": "b", "value": "1"}], 3)
