import pytest

from actorforge.diagnostics import ResolveError
from actorforge.dsl import load_actor, parse_actor_source, resolve


def kinds(src):
    with pytest.raises(ResolveError) as e:
        resolve(parse_actor_source(src))
    return e.value.kinds()


def test_fixtures_resolve(fixtures):
    for name in ["dao", "dao_swapped", "attacker", "copy", "alt", "empty", "ambiguous_emit"]:
        assert load_actor(fixtures / f"{name}.actor").resolved


def test_unbound_guard_name(fixtures):
    with pytest.raises(ResolveError) as e:
        load_actor(fixtures / "unbound_guard.actor")
    assert e.value.kinds() == ["NameError"]
    assert "amount" in str(e.value)


def test_resolve_does_not_mutate_input():
    decl = parse_actor_source("actor A in a : uint out b : uint action c : a[x] emit b(x) end end")
    resolve(decl)
    assert not decl.resolved


def test_duplicate_names():
    assert kinds("actor A in a : uint state a : uint end") == ["NameError"]
    assert "NameError" in kinds("actor A action f end action f end end")


def test_direction_errors():
    assert kinds("actor A out o : uint action f : o[x] end end") == ["DirectionError"]
    assert kinds("actor A in i : uint action f emit i(1) end end") == ["DirectionError"]
    assert kinds("actor A in i : uint action f do i = 1 end end") == ["DirectionError"]


def test_type_errors():
    assert kinds("actor A state x : uint action f do x = true end end") == ["TypeError"]
    assert kinds("actor A state x : uint action f guard x end end") == ["TypeError"]
    assert kinds("actor A state m : map(address -> uint) action f do m = 0 end end") == ["TypeError"]


def test_emit_shapes():
    assert "TypeError" in kinds("actor A out p : transfer action f emit p(1) end end")
    assert kinds("actor A out c : call action f emit c(1) end end") == ["TypeError"]


def test_record_port_binds_sender_and_value():
    decl = resolve(parse_actor_source(
        "actor A in r : call state t : uint action f : r do t = t + value end end"))
    assert decl.resolved


def test_schedule_must_name_actions():
    assert kinds("actor A action f end schedule s s : g -> s end end") == ["NameError"]


def test_all_problems_reported_together():
    ks = kinds("actor A state x : uint action f do x = true do y = 1 end end")
    assert sorted(ks) == ["NameError", "TypeError"]
