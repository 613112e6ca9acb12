import pytest

from actorforge.values import (Address, EvalError, UINT_MAX, ZERO_ADDRESS, canonical, check_uint,
                               fnv1a64, format_ether, parse_wei, state_digest)


@pytest.mark.parametrize("data,expected", [
    (b"", 0xCBF29CE484222325),
    (b"a", 0xAF63DC4C8601EC8C),
    (b"foobar", 0x85944171F73967E8),
])
def test_fnv1a64_reference_vectors(data, expected):
    assert fnv1a64(data) == expected


def test_format_ether_exact():
    assert format_ether(6 * 10**18) == "6 ether"
    assert format_ether(5 * 10**17) == "0.5 ether"
    assert format_ether(0) == "0 ether"
    assert format_ether(1) == "0.000000000000000001 ether"


def test_parse_wei_forms():
    assert parse_wei("3000000000000000000") == 3 * 10**18
    assert parse_wei("0.5 ether") == 5 * 10**17
    assert parse_wei(7) == 7
    with pytest.raises(ValueError):
        parse_wei(True)
    with pytest.raises(EvalError):
        parse_wei(str(UINT_MAX + 1))


def test_check_uint_bounds():
    assert check_uint(UINT_MAX) == UINT_MAX
    with pytest.raises(EvalError) as e:
        check_uint(-1)
    assert e.value.kind == "Overflow"


def test_address_rendering_and_parse():
    a = Address(0xA001)
    assert str(a) == "0x" + "0" * 36 + "a001"
    assert Address.parse(str(a)) == a
    assert str(ZERO_ADDRESS) == "0x" + "0" * 40


def test_state_digest_ignores_zero_map_entries():
    a = {"m": {Address(1): 0, Address(2): 5}, "x": 1}
    b = {"x": 1, "m": {Address(2): 5}}
    assert state_digest(a) == state_digest(b)
    assert len(state_digest(a)) == 16
    assert canonical(True) == "true"
