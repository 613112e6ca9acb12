"""Actor -> contract translation with canonical statement order and a uniform lock."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import __version__
from .analyzer import check_with_mutex_awareness, errors, verify_generated
from .diagnostics import DiagnosticError
from .dsl import ast as A
from .seqvm import ast as S
from .seqvm.unparse import expr_text, stmt_lines

LOCK = "__locked"
FSM_VAR = "__fsm"
HEADER = f"// generated by actorforge {__version__} -- do not edit"
_OPS = {"and": "&&", "or": "||"}


class PlanError(DiagnosticError):
    kind = "PlanError"


@dataclass
class EmitPlan:
    action: str
    params: list
    payable: bool
    requires: list  # contract-dialect conditions: guards, then the schedule check
    captures: list  # LocalDecl of __pre_<n>
    updates: list  # assignments and lets in source order, then the schedule step
    emissions: list  # external sends in source order
    lock: str = LOCK

    def statements(self) -> list:
        body = [S.Require(S.UnOp("!", S.Var(self.lock))),
                S.AssignStmt(S.Var(self.lock), S.BoolConst(True))]
        body += [S.Require(c) for c in self.requires]
        body += self.captures + self.updates + self.emissions
        body.append(S.AssignStmt(S.Var(self.lock), S.BoolConst(False)))
        return body


def sol_type(t: A.TypeExpr) -> S.SolType:
    if t.name == "map":
        return S.mapping(sol_type(t.key), sol_type(t.value))
    return S.SolType(t.name)


def _record_vars(decl: A.ActorDecl, action: A.ActionDecl) -> set:
    if any(decl.port(c.port).token_type.is_record for c in action.consumes):
        return set(A.RECORD_FIELDS)
    return set()


def translate(e, record_vars: set = frozenset()):
    if isinstance(e, A.IntLit):
        return S.Num(e.value, "ether" if e.ether else "")
    if isinstance(e, A.AddrLit):
        return S.AddrConst(e.value)
    if isinstance(e, A.BoolLit):
        return S.BoolConst(e.value)
    if isinstance(e, A.Name):
        if e.binding == "pattern" and e.id in record_vars:
            return S.MsgField(e.id)
        return S.Var(e.id)
    if isinstance(e, A.Index):
        return S.IndexExpr(translate(e.base, record_vars), translate(e.key, record_vars))
    if isinstance(e, A.Binary):
        return S.BinOp(_OPS.get(e.op, e.op), translate(e.left, record_vars),
                       translate(e.right, record_vars))
    if isinstance(e, A.Unary):
        return S.UnOp("!", translate(e.operand, record_vars))
    raise TypeError(f"cannot translate {type(e).__name__}")


def guard_texts(decl: A.ActorDecl, action: A.ActionDecl) -> list:
    rv = _record_vars(decl, action)
    return [(g, expr_text(translate(g, rv))) for g in action.guards]


def _state_reads(e) -> set:
    return {n.id for n in A.walk_expr(e) if isinstance(n, A.Name) and n.binding == "state"}


def fsm_states(decl: A.ActorDecl) -> list:
    states = [decl.schedule.initial]
    for t in decl.schedule.transitions:
        for s in (t.source, t.target):
            if s not in states:
                states.append(s)
    return states


def _fsm_parts(decl: A.ActorDecl, action: A.ActionDecl):
    states = fsm_states(decl)
    trans = [t for t in decl.schedule.transitions if t.action == action.name]
    fsm = S.Var(FSM_VAR)
    if not trans:
        return S.BoolConst(False), []
    conds = [S.BinOp("==", fsm, S.Num(states.index(t.source))) for t in trans]
    cond = conds[0]
    for c in conds[1:]:
        cond = S.BinOp("||", cond, c)
    if len({t.target for t in trans}) == 1:
        return cond, [S.AssignStmt(fsm, S.Num(states.index(trans[0].target)))]
    chain: list = []
    for t in reversed(trans):
        step = S.If(S.BinOp("==", fsm, S.Num(states.index(t.source))),
                    [S.AssignStmt(fsm, S.Num(states.index(t.target)))], chain)
        chain = [step]
    return cond, chain


def plan_action(decl: A.ActorDecl, action: A.ActionDecl) -> EmitPlan:
    """Partition a resolved action into requires, captures, updates and sends.

    Emissions read the firing's input state, so an emitted expression over a
    state variable written anywhere in the body is captured before the updates.
    A read sandwiched between writes of the same variable is refused.
    """
    if not decl.resolved:
        raise ValueError("plan_action needs a resolved actor")
    rv = _record_vars(decl, action)
    params = []
    for c in action.consumes:
        port = decl.port(c.port)
        if not port.token_type.is_record:
            params += [S.Param(v, sol_type(port.token_type)) for v in c.vars]
    writes = [(i, st.var) for i, st in enumerate(action.body) if isinstance(st, A.Assign)]
    requires = [translate(g, rv) for g in action.guards]
    captures, updates, emissions = [], [], []
    for i, st in enumerate(action.body):
        if isinstance(st, A.Assign):
            updates.append(S.AssignStmt(translate(st.target, rv), translate(st.value, rv)))
        elif isinstance(st, A.Let):
            updates.append(S.LocalDecl(sol_type(st.value.type), st.name, translate(st.value, rv)))
        elif isinstance(st, A.Emit):
            args = []
            for arg in st.args:
                reads = _state_reads(arg)
                before = {v for j, v in writes if j < i and v in reads}
                after = {v for j, v in writes if j > i and v in reads}
                if before & after:
                    v = sorted(before & after)[0]
                    raise PlanError.at(
                        st.span, f"emission on '{st.port}' in action '{action.name}' reads "
                        f"'{v}' between two writes to it; write the intended value to a let first")
                sol = translate(arg, rv)
                if before | after:
                    name = f"__pre_{len(captures)}"
                    captures.append(S.LocalDecl(sol_type(arg.type), name, sol))
                    sol = S.Var(name)
                args.append(sol)
            emissions += _sends(decl.port(st.port), st, args)
    if decl.schedule is not None:
        cond, step = _fsm_parts(decl, action)
        requires.append(cond)
        updates += step
    payable = bool(rv)
    return EmitPlan(action.name, params, payable, requires, captures, updates, emissions)


def _sends(port: A.PortDecl, st: A.Emit, args: list) -> list:
    if port.token_type == A.TRANSFER:
        to, amount = args
        return [S.ExprStmt(S.Call(S.Member(to, "transfer"), [amount]))]
    if port.token_type == A.CALL:
        return [S.ExprStmt(S.Call(S.Member(S.Var(port.name), st.selector), [], args[0]))]
    return [S.ExprStmt(S.Call(S.Member(S.Var(port.name), "push"), [a])) for a in args]


def _address_ports(decl: A.ActorDecl) -> list:
    return [p for p in decl.outputs if p.token_type != A.TRANSFER]


def generate_contract(decl: A.ActorDecl) -> str:
    """Deterministic contract text for a resolved actor (raises PlanError)."""
    plans = [plan_action(decl, a) for a in decl.actions]
    ind = "    "
    lines = [HEADER, "", f"contract {decl.name} {{", f"{ind}bool {LOCK};"]
    if decl.schedule is not None:
        lines.append(f"{ind}uint {FSM_VAR};")
    for v in decl.state_vars:
        init = ""
        if v.initializer is not None:
            init = f" = {expr_text(translate(v.initializer))}"
        lines.append(f"{ind}{sol_type(v.var_type)} {v.name}{init};")
    ports = _address_ports(decl)
    for p in ports:
        lines.append(f"{ind}address {p.name};")
    if ports:
        params = ", ".join(f"address _{p.name}" for p in ports)
        lines += ["", f"{ind}constructor({params}) public {{"]
        lines += [f"{ind}{ind}{p.name} = _{p.name};" for p in ports]
        lines.append(f"{ind}}}")
    for plan in plans:
        params = ", ".join(f"{p.param_type} {p.name}" for p in plan.params)
        mods = "public payable" if plan.payable else "public"
        lines += ["", f"{ind}function {plan.action}({params}) {mods} {{"]
        for st in plan.statements():
            lines += stmt_lines(st, ind * 2)
        lines.append(f"{ind}}}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def output_name(decl: A.ActorDecl) -> str:
    return f"{decl.name.lower()}_generated.sol.txt"


# -- round trip ----------------------------------------------------------------

@dataclass
class RoundtripReport:
    actor: str
    parsed: bool = False
    parse_error: Optional[str] = None
    verify: list = field(default_factory=list)  # Findings; empty is Pass
    analyzer_errors: list = field(default_factory=list)
    scenarios: list = field(default_factory=list)  # (name, victim_loss) pairs
    skipped: Optional[str] = None

    @property
    def ok(self) -> bool:
        return (self.parsed and not self.verify and not self.analyzer_errors
                and all(loss == 0 for _, loss in self.scenarios))

    def lines(self) -> list:
        out = [f"parse: {'Pass' if self.parsed else 'Fail: ' + str(self.parse_error)}"]
        if self.parsed:
            out.append("verify: Pass" if not self.verify else f"verify: {len(self.verify)} finding(s)")
            out += [f"  {f.render()}" for f in self.verify]
            out.append(f"analyzer: {len(self.analyzer_errors)} error(s)")
        for name, loss in self.scenarios:
            out.append(f"scenario {name}: victim_loss={loss}")
        if self.skipped:
            out.append(f"scenarios: none ({self.skipped})")
        return out

    def to_json(self) -> dict:
        return {"actor": self.actor, "ok": self.ok, "parsed": self.parsed,
                "parse_error": self.parse_error, "verify": [f.to_json() for f in self.verify],
                "analyzer_errors": [f.to_json() for f in self.analyzer_errors],
                "scenarios": [{"name": n, "victim_loss": str(v)} for n, v in self.scenarios],
                "skipped": self.skipped}


def _attack_applicable(c: S.ContractDef) -> bool:
    dep = c.function("deposit")
    wd = c.function("withdraw")
    return dep is not None and dep.payable and not dep.params and wd is not None and not wd.params


def roundtrip_check(decl: A.ActorDecl, text: Optional[str] = None, scenarios=None) -> RoundtripReport:
    """Parse the generated text back, verify its structure and replay adversarial scenarios.

    Scenarios only apply to contracts exposing the deposit/withdraw interface
    the bundled attacker targets; the generated contract stands in for ``dao``.
    """
    from .seqvm import load_scenario, parse_contract, run_scenario

    report = RoundtripReport(decl.name)
    if text is None:
        text = generate_contract(decl)
    try:
        c = parse_contract(text, output_name(decl), decl.name)
    except (DiagnosticError, ValueError) as exc:
        report.parse_error = str(exc)
        return report
    report.parsed = True
    report.verify = verify_generated(decl, c)
    report.analyzer_errors = errors(check_with_mutex_awareness(c))
    if scenarios is None:
        fixtures = Path(__file__).parent / "fixtures"
        scenarios = [fixtures / "dao_attack.scenario"]
    if not c.payable_functions:
        report.skipped = "no payable functions"
    elif not _attack_applicable(c):
        report.skipped = "contract does not expose deposit()/withdraw()"
    else:
        for path in scenarios:
            result = run_scenario(load_scenario(path), overrides={"dao": c})
            report.scenarios.append((Path(path).name, result.victim_loss()))
    return report
