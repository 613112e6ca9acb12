"""Command line entry point: parse, check, classify, compile, simulate, attack-demo."""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .diagnostics import DiagnosticError

EXIT_OK, EXIT_DIAG, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
DEFAULT_MAX_STEPS = 10_000


class UsageError(Exception):
    pass


def _emit_json(obj: dict):
    print(json.dumps({"version": __version__, **obj}, indent=2))


def _read_path(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"no such file: {path}")
    return p


def _kind(path: Path) -> str:
    name = path.name
    if name.endswith(".actor"):
        return "actor"
    if name.endswith(".network"):
        return "network"
    if name.endswith(".scenario"):
        return "scenario"
    if name.endswith(".sol.txt") or name.endswith(".sol"):
        return "contract"
    raise UsageError(f"unrecognised file type: {name}")


def _report_diagnostics(exc: DiagnosticError, args) -> int:
    if args.json:
        _emit_json({"ok": False, "diagnostics": [d.to_json() for d in exc.diagnostics]})
    else:
        for d in exc.diagnostics:
            print(d.render(), file=sys.stderr)
    return EXIT_DIAG


# -- parse / check ---------------------------------------------------------------

def _actor_summary(decl) -> dict:
    from .dsl.unparse import unparse_expr, unparse_stmt

    return {
        "kind": "actor", "name": decl.name,
        "inputs": [{"name": p.name, "type": str(p.token_type)} for p in decl.inputs],
        "outputs": [{"name": p.name, "type": str(p.token_type)} for p in decl.outputs],
        "state": [{"name": v.name, "type": str(v.var_type)} for v in decl.state_vars],
        "actions": [{
            "name": a.name,
            "consumes": [{"port": c.port, "vars": list(c.vars)} for c in a.consumes],
            "guards": [unparse_expr(g) for g in a.guards],
            "body": [unparse_stmt(s) for s in a.body],
        } for a in decl.actions],
        "schedule": None if decl.schedule is None else {
            "initial": decl.schedule.initial,
            "transitions": [[t.source, t.action, t.target] for t in decl.schedule.transitions],
        },
    }


def _network_summary(net) -> dict:
    return {
        "kind": "network", "name": net.name,
        "instances": [{"name": i.name, "actor": i.actor, "balance": str(i.balance)}
                      for i in net.instances],
        "buffers": [{"name": b.name, "src": ".".join(b.src), "dst": ".".join(b.dst)}
                    for b in net.buffers],
        "victims": list(net.victims),
    }


def _contract_summary(c) -> dict:
    return {
        "kind": "contract", "name": c.name,
        "state": [{"name": v.name, "type": str(v.var_type)} for v in c.state_vars],
        "functions": [{"name": f.name, "params": len(f.params), "payable": f.payable,
                       "view": f.view, "statements": len(f.body)} for f in c.functions],
        "fallback": c.fallback is not None,
    }


def _load_any(path: Path, resolved: bool):
    from .dsl import load_network, parse_actor_source, resolve
    from .seqvm import parse_contracts

    kind = _kind(path)
    text = path.read_text(encoding="utf-8")
    if kind == "actor":
        decl = parse_actor_source(text, str(path))
        return kind, resolve(decl) if resolved else decl
    if kind == "network":
        return kind, load_network(path)
    if kind == "contract":
        return kind, list(parse_contracts(text, str(path)).values())
    raise UsageError(f"{path.name}: expected an .actor, .network or contract file")


def cmd_parse(args) -> int:
    path = _read_path(args.path)
    kind, obj = _load_any(path, resolved=False)
    if kind == "actor":
        summary = _actor_summary(obj)
        line = (f"actor {obj.name}: {len(obj.inputs)} input(s), {len(obj.outputs)} output(s), "
                f"{len(obj.state_vars)} state var(s), {len(obj.actions)} action(s)")
    elif kind == "network":
        summary = _network_summary(obj)
        line = f"network {obj.name}: {len(obj.instances)} instance(s), {len(obj.buffers)} buffer(s)"
    else:
        summary = {"kind": "contracts", "contracts": [_contract_summary(c) for c in obj]}
        line = "\n".join(f"contract {c.name}: {len(c.functions)} function(s)" for c in obj)
    if args.json:
        _emit_json({"ok": True, **summary})
    else:
        print(line)
    return EXIT_OK


def cmd_check(args) -> int:
    from .analyzer import check_with_mutex_awareness, errors

    path = _read_path(args.path)
    kind, obj = _load_any(path, resolved=True)
    if kind != "contract":
        if args.json:
            _emit_json({"ok": True, "diagnostics": []})
        else:
            print(f"{path}: ok")
        return EXIT_OK
    findings = [f for c in obj for f in check_with_mutex_awareness(c)]
    bad = errors(findings)
    if args.json:
        _emit_json({"ok": not bad, "findings": [f.to_json() for f in findings]})
    else:
        for f in findings:
            print(f.render())
        if not findings:
            print(f"{path}: ok")
    return EXIT_DIAG if bad else EXIT_OK


def cmd_classify(args) -> int:
    from .dataflow import classify_actor
    from .dsl import load_actor

    path = _read_path(args.path)
    if _kind(path) != "actor":
        raise UsageError("classify expects an .actor file")
    decl = load_actor(path)
    cls, sig = classify_actor(decl)
    if args.json:
        _emit_json({"actor": decl.name, "class": cls.value, "signature": str(sig),
                    "period": sig.period if sig.kind == "cyclic" else None})
    else:
        print(f"{decl.name}: {cls.value}" + ("" if sig.kind == "unknown" else f" {sig}"))
    return EXIT_OK


def cmd_compile(args) -> int:
    from .codegen import generate_contract, output_name, roundtrip_check
    from .dsl import load_actor

    path = _read_path(args.path)
    out_dir = Path(args.out)
    if not out_dir.is_dir():
        raise UsageError(f"output directory does not exist: {args.out}")
    if _kind(path) != "actor":
        raise UsageError("compile expects an .actor file")
    decl = load_actor(path)
    text = generate_contract(decl)
    target = out_dir / output_name(decl)
    target.write_text(text, encoding="utf-8")
    report = roundtrip_check(decl, text)
    if args.json:
        _emit_json({"ok": report.ok, "output": str(target), "report": report.to_json()})
    else:
        print(f"wrote {target}")
        for line in report.lines():
            print(line)
    return EXIT_OK if report.ok else EXIT_DIAG


# -- simulate ---------------------------------------------------------------------

def _max_steps(args) -> int:
    if args.max_steps is not None:
        return args.max_steps
    env = os.environ.get("ACTORFORGE_MAX_STEPS")
    if env is None:
        return DEFAULT_MAX_STEPS
    try:
        value = int(env)
    except ValueError:
        raise UsageError(f"ACTORFORGE_MAX_STEPS must be an integer, got {env!r}") from None
    if value < 0:
        raise UsageError("ACTORFORGE_MAX_STEPS must be non-negative")
    return value


def _simulate_sequential(path: Path, args) -> int:
    from .seqvm import load_scenario, run_scenario
    from .values import format_ether

    scenario = load_scenario(path)
    result = run_scenario(scenario, max_call_depth=args.max_call_depth)
    world = result.world
    if args.trace:
        Path(args.trace).write_text(result.jsonl(), encoding="utf-8")
    loss = result.victim_loss() if scenario.victims else None
    balances = {name: world.balance_of(addr) for name, addr in world.names.items()}
    if args.json:
        _emit_json({"model": "sequential", "steps": [str(r) for r in result.results],
                    "balances": {k: str(v) for k, v in balances.items()},
                    "victim_loss": None if loss is None else str(loss),
                    "events": len(result.trace)})
    else:
        print(f"steps: {len(result.results)}, events: {len(result.trace)}")
        for i, r in enumerate(result.results):
            print(f"step {i}: {r}")
        for name, bal in balances.items():
            print(f"{name}: {format_ether(bal)}")
        if loss is not None:
            print(f"victim_loss={format_ether(loss)}")
    return EXIT_OK


def _simulate_dataflow(path: Path, args) -> int:
    from .dataflow import Network, run_until_quiescent, victim_loss
    from .dsl import load_network
    from .values import format_ether

    net = Network(load_network(path), buffer_cap=args.buffer_cap)
    trace = run_until_quiescent(net, max_steps=_max_steps(args))
    if args.trace:
        Path(args.trace).write_text(trace.jsonl(), encoding="utf-8")
    loss = victim_loss(trace, net) if net.decl.victims else None
    balances = {i.name: i.native_balance for i in net.instances}
    if args.json:
        _emit_json({"model": "dataflow", "firings": len(trace),
                    "terminator": "StepLimitExceeded" if trace.limit_exceeded else "Quiescent",
                    "balances": {k: str(v) for k, v in balances.items()},
                    "in_flight": str(net.in_flight_value()),
                    "victim_loss": None if loss is None else str(loss)})
    else:
        print(f"firings: {len(trace)}")
        for name, bal in balances.items():
            print(f"{name}: {format_ether(bal)}")
        print(f"in flight: {format_ether(net.in_flight_value())}")
        if loss is not None:
            print(f"victim_loss={format_ether(loss)}")
        if trace.limit_exceeded:
            print(f"StepLimitExceeded: network still fireable after {len(trace)} firings",
                  file=sys.stderr)
    return EXIT_DIAG if trace.limit_exceeded else EXIT_OK


def cmd_simulate(args) -> int:
    path = _read_path(args.path)
    kind = _kind(path)
    model = args.model or ("dataflow" if kind == "network" else "sequential")
    if model == "sequential":
        if kind != "scenario":
            raise UsageError("the sequential model expects a .scenario file")
        return _simulate_sequential(path, args)
    if kind != "network":
        raise UsageError("the dataflow model expects a .network file")
    return _simulate_dataflow(path, args)


def cmd_attack_demo(args) -> int:
    from .demo import FIXTURES, attack_demo
    from .values import format_ether

    fixtures = Path(args.fixtures) if args.fixtures else FIXTURES
    if not fixtures.is_dir():
        raise UsageError(f"fixture directory does not exist: {fixtures}")
    rows = attack_demo(fixtures)
    ok = all(r.ok for r in rows)
    if args.json:
        _emit_json({"ok": ok, "rows": [{"name": r.name, "model": r.model,
                                        "victim_loss": str(r.victim_loss),
                                        "expected": str(r.expected), "ok": r.ok} for r in rows]})
    else:
        for r in rows:
            print(f"{r.name}: {format_ether(r.victim_loss)} drained "
                  f"(expected {format_ether(r.expected)}) {'OK' if r.ok else 'MISMATCH'}")
    return EXIT_OK if ok else EXIT_DIAG


# -- wiring ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="machine-readable output")
    parser = argparse.ArgumentParser(prog="actorforge", parents=[common],
                                     description="Dataflow actors, contract generation and reentrancy tooling.")
    parser.add_argument("--version", action="version", version=f"actorforge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", parents=[common], help="parse a source file and summarise it")
    p.add_argument("path")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("check", parents=[common],
                       help="resolve an actor/network, or run the reentrancy analyzer on a contract")
    p.add_argument("path")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("classify", parents=[common], help="static / cyclo-static / dynamic class")
    p.add_argument("path")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("compile", parents=[common], help="generate a lock-guarded contract")
    p.add_argument("path")
    p.add_argument("--out", default=".", help="output directory (must exist)")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("simulate", parents=[common], help="run a scenario or a network")
    p.add_argument("path")
    p.add_argument("--model", choices=["sequential", "dataflow"])
    p.add_argument("--max-steps", type=int, help="dataflow firing budget")
    p.add_argument("--max-call-depth", type=int, help="sequential call depth cap")
    p.add_argument("--buffer-cap", type=int, help="dataflow buffer capacity")
    p.add_argument("--trace", help="write the JSONL trace here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("attack-demo", parents=[common], help="four-way DAO attack comparison")
    p.add_argument("--fixtures", help="directory holding the demo fixtures")
    p.set_defaults(func=cmd_attack_demo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "json"):
        args.json = False
    for opt in ("max_steps", "max_call_depth", "buffer_cap"):
        v = getattr(args, opt, None)
        if v is not None and v < 0:
            parser.error(f"--{opt.replace('_', '-')} must be non-negative")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"actorforge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DiagnosticError as exc:
        return _report_diagnostics(exc, args)
    except Exception as exc:  # noqa: BLE001 - classify below, else internal
        from .seqvm import DeployError, ScenarioError

        if isinstance(exc, (ScenarioError, DeployError, KeyError, ValueError)):
            print(f"actorforge: {type(exc).__name__}: {exc}", file=sys.stderr)
            return EXIT_DIAG
        print(f"actorforge: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
