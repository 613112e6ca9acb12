import pytest

from actorforge.diagnostics import LexError
from actorforge.dsl import tokenize


def test_keywords_identifiers_and_numbers():
    toks = tokenize("actor Dao 1_000 0xA001 -> // note\n")
    assert [(t.kind, t.text) for t in toks] == [
        ("keyword", "actor"), ("ident", "Dao"), ("int", "1_000"), ("address", "0xA001"),
        ("punct", "->")]
    assert toks[2].value == 1000
    assert toks[3].value == 0xA001


def test_spans_track_lines_and_columns():
    toks = tokenize("actor\n  X end", "f.actor")
    assert (toks[1].span.line, toks[1].span.column) == (2, 3)
    assert str(toks[2].span) == "f.actor:2:5"


def test_unknown_character_column():
    with pytest.raises(LexError) as e:
        tokenize("1_000 @")
    assert e.value.span.column == 7


@pytest.mark.parametrize("src", ['"abc', "12abc", "0x12g"])
def test_malformed_input(src):
    with pytest.raises(LexError):
        tokenize(src)


def test_empty_source():
    assert tokenize("") == []


def test_token_repr():
    assert repr(tokenize("actor")[0]) == "Keyword(actor)"
