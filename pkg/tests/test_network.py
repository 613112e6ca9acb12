import pytest

from actorforge.diagnostics import ConnectError
from actorforge.dsl import load_network, parse_actor_source, parse_network, resolve

COPY = resolve(parse_actor_source("actor Copy in a : uint out b : uint action c : a[x] emit b(x) end end"))
FLAG = resolve(parse_actor_source("actor Flag in a : bool out b : bool action c : a[x] emit b(x) end end"))
ACTORS = {"Copy": COPY, "Flag": FLAG}


def errors(src):
    with pytest.raises(ConnectError) as e:
        parse_network(src, actors=ACTORS)
    return [d.message for d in e.value.diagnostics]


def test_fixture_network(fixtures):
    net = load_network(fixtures / "dao_attacker.network")
    assert [i.name for i in net.instances] == ["dao", "attacker"]
    assert net.victims == ["dao"]
    assert set(net.actors) == {"dao", "attacker"}
    assert len(net.initial) == 2


def test_chain_connects():
    net = parse_network("network N instance p : Copy instance q : Copy buffer x : p.b -> q.a end",
                        actors=ACTORS)
    assert net.buffers[0].src == ("p", "b")


def test_dangling_port():
    msgs = errors("network N instance p : Copy instance q : Copy buffer x : p.zz -> q.a end")
    assert any("dangling" in m for m in msgs)


def test_fan_out_and_fan_in():
    msgs = errors("network N instance p : Copy instance q : Copy instance r : Copy "
                  "buffer x : p.b -> q.a buffer y : p.b -> r.a buffer z : r.b -> q.a end")
    assert any("already connected" in m for m in msgs)
    assert any("fan-in" in m for m in msgs)


def test_type_mismatch():
    msgs = errors("network N instance p : Copy instance f : Flag buffer x : p.b -> f.a end")
    assert any("type mismatch" in m for m in msgs)


def test_initial_token_shape_and_unknown_victim():
    msgs = errors("network N instance p : Copy instance q : Copy buffer x : p.b -> q.a "
                  "initial x = transfer(0x01, 0x02, 1) victim nobody end")
    assert any("initial token" in m for m in msgs)
    assert any("unknown victim" in m for m in msgs)
