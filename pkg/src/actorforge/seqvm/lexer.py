"""Tokenizer for the contract dialect (a small Solidity-like subset)."""
from __future__ import annotations

import re

from ..diagnostics import LexError, SourceSpan
from ..dsl.lexer import Token

KEYWORDS = frozenset({
    "contract", "function", "constructor", "fallback", "public", "external", "internal",
    "payable", "view", "returns", "return", "require", "if", "else", "mapping", "uint",
    "uint256", "address", "bool", "true", "false", "ether", "wei", "msg", "this",
})

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*)
  | (?P<pragma>pragma\b[^;\n]*;)
  | (?P<hex>0[xX][0-9a-fA-F]+)
  | (?P<int>[0-9](?:_?[0-9])*)
  | (?P<ident>[A-Za-z_$][A-Za-z0-9_$]*)
  | (?P<punct>=>|==|!=|<=|>=|&&|\|\||[<>=+\-*/!(){}\[\],;:.])
""", re.VERBOSE)


def tokenize(source: str, file: str = "<contract>") -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    line = 1
    line_start = 0
    n = len(source)
    while pos < n:
        col = pos - line_start + 1
        if source[pos] == '"':
            end = pos + 1
            while end < n and source[end] not in '"\n':
                end += 1
            if end >= n or source[end] != '"':
                raise LexError.at(SourceSpan(file, line, col, end - pos), "unterminated string literal")
            text = source[pos:end + 1]
            tokens.append(Token("string", text, SourceSpan(file, line, col, len(text)), text[1:-1]))
            pos = end + 1
            continue
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise LexError.at(SourceSpan(file, line, col, 1), f"unexpected character {source[pos]!r}")
        kind = m.lastgroup
        text = m.group()
        span = SourceSpan(file, line, col, len(text))
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind in ("hex", "int"):
            end = m.end()
            if end < n and (source[end].isalnum() or source[end] == "_"):
                raise LexError.at(SourceSpan(file, line, col, end - pos + 1), "malformed number literal")
            if kind == "hex":
                tokens.append(Token("address", text, span, int(text, 16)))
            else:
                tokens.append(Token("int", text, span, int(text.replace("_", ""))))
        elif kind == "ident":
            tokens.append(Token("keyword" if text in KEYWORDS else "ident", text, span))
        elif kind == "punct":
            tokens.append(Token("punct", text, span))
        pos = m.end()
    return tokens
