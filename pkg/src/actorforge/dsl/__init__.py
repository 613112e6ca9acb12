"""Frontend for the dataflow smart-contract DSL."""
from .ast import ActionDecl, ActorDecl, NetworkDecl, PortDecl, StateVarDecl, TypeExpr
from .lexer import Token, tokenize
from .network import parse_network
from .parser import parse_actor, parse_actor_source
from .resolve import resolve
from .unparse import unparse


def load_actor(path, resolved: bool = True) -> ActorDecl:
    """Parse (and by default resolve) an ``.actor`` file."""
    from pathlib import Path

    text = Path(path).read_text(encoding="utf-8")
    decl = parse_actor_source(text, str(path))
    return resolve(decl) if resolved else decl


def load_network(path) -> NetworkDecl:
    from pathlib import Path

    path = Path(path)
    return parse_network(path.read_text(encoding="utf-8"), str(path))


__all__ = [
    "ActionDecl", "ActorDecl", "NetworkDecl", "PortDecl", "StateVarDecl", "TypeExpr",
    "Token", "tokenize", "parse_actor", "parse_actor_source", "parse_network",
    "resolve", "unparse", "load_actor", "load_network",
]
