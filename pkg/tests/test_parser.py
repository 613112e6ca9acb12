import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from actorforge.diagnostics import ParseError
from actorforge.dsl import ast, load_actor, parse_actor_source, tokenize, unparse
from actorforge.dsl.parser import Parser
from actorforge.dsl.unparse import unparse_expr

CLEAN = ["dao", "dao_swapped", "attacker", "copy", "alt", "empty", "ambiguous_emit"]


@pytest.mark.parametrize("name", CLEAN)
def test_fixture_round_trip(fixtures, name):
    decl = load_actor(fixtures / f"{name}.actor", resolved=False)
    again = parse_actor_source(unparse(decl), "again.actor")
    assert again == decl
    assert unparse(again) == unparse(decl)


def test_dao_structure(fixtures):
    decl = load_actor(fixtures / "dao.actor", resolved=False)
    assert decl.name == "Dao"
    assert [a.name for a in decl.actions] == ["deposit", "withdraw"]
    withdraw = decl.action("withdraw")
    assert isinstance(withdraw.body[0], ast.Emit)
    assert isinstance(withdraw.body[1], ast.Assign)
    assert decl.port("req").token_type == ast.CALL


def test_bad_syntax_span(fixtures):
    with pytest.raises(ParseError) as e:
        load_actor(fixtures / "bad_syntax.actor", resolved=False)
    assert (e.value.span.line, e.value.span.column) == (5, 3)
    assert "expected" in str(e.value)


def test_ether_literal_scales():
    decl = parse_actor_source("actor A state x : uint = 2 ether end")
    assert decl.state_vars[0].initializer.value == 2 * 10**18


def test_comparison_is_non_associative():
    with pytest.raises(ParseError):
        parse_actor_source("actor A state b : bool = 1 < 2 < 3 end")


def test_deep_nesting_is_a_parse_error():
    with pytest.raises(ParseError):
        parse_actor_source("actor A state x : uint = " + "(" * 5000 + "1" + ")" * 5000 + " end")


def _parse_expr(text):
    p = Parser(tokenize(text))
    e = p.expr()
    assert p.at_end()
    return e


names = st.sampled_from(["a", "b", "bal", "sender"])
leaves = st.one_of(
    st.integers(0, 10**30).map(ast.IntLit),
    st.booleans().map(ast.BoolLit),
    names.map(ast.Name),
)


def _extend(children):
    return st.one_of(
        st.tuples(st.sampled_from(["+", "-", "*", "/", "==", "!=", "<", ">=", "and", "or"]),
                  children, children).map(lambda t: ast.Binary(*t)),
        children.map(lambda c: ast.Unary("not", c)),
        st.tuples(names.map(ast.Name), children).map(lambda t: ast.Index(*t)),
    )


exprs = st.recursive(leaves, _extend, max_leaves=12)


@settings(max_examples=200, deadline=None)
@given(exprs)
def test_expression_unparse_round_trip(e):
    assert _parse_expr(unparse_expr(e)) == e
