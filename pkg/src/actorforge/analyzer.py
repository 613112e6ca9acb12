"""Reentrancy checks on contract ASTs: check-effects-interactions and its mutex-aware refinement."""
from __future__ import annotations

import json
from dataclasses import dataclass

from .diagnostics import SourceSpan
from .seqvm import ast as S
from .seqvm.unparse import expr_text

RULE_CEI = "CEI001"


@dataclass(frozen=True)
class Finding:
    rule_id: str
    function: str
    span: SourceSpan
    severity: str  # Error | Warning | Info
    classification: str  # TruePositiveCandidate | SuppressedByMutex
    message: str
    index: int = 0  # statement index in pre-order within the function

    def render(self) -> str:
        return f"{self.span}: {self.rule_id} {self.severity}: {self.message}"

    def to_json(self) -> dict:
        return {"rule_id": self.rule_id, "function": self.function, "file": self.span.file,
                "line": self.span.line, "column": self.span.column, "severity": self.severity,
                "classification": self.classification, "message": self.message}


def findings_json(findings) -> str:
    return json.dumps([f.to_json() for f in findings], indent=2)


def _all_functions(c: S.ContractDef) -> list:
    fns = [c.constructor] if c.constructor is not None else []
    fns += list(c.functions)
    if c.fallback is not None:
        fns.append(c.fallback)
    return fns


def _storage_write(stmt, storage: set, shadowed: set) -> bool:
    return (isinstance(stmt, S.AssignStmt) and stmt.var in storage and stmt.var not in shadowed)


def _interaction(stmt) -> bool:
    """An external call or value transfer evaluated directly by ``stmt``."""
    return S.contains_call(stmt)


def _scan(stmts, storage, shadowed, after: bool, counter: list, out: list) -> bool:
    """May-analysis along every path; returns whether an interaction may have happened."""
    for st in stmts:
        idx = counter[0]
        counter[0] += 1
        if isinstance(st, S.LocalDecl):
            shadowed.add(st.name)
        hit = _interaction(st)
        if isinstance(st, S.If):
            t = _scan(st.then, storage, set(shadowed), after or hit, counter, out)
            e = _scan(st.orelse, storage, set(shadowed), after or hit, counter, out)
            after = after or hit or t or e
            continue
        # in `x = target.call(...)` the write lands after the call returns
        if _storage_write(st, storage, shadowed) and (after or hit):
            out.append((idx, st))
        after = after or hit
    return after


def interaction_points(fn: S.FunctionDef) -> list:
    """Pre-order indexes of statements that perform an external call or transfer."""
    out = []

    def visit(stmts, counter):
        for st in stmts:
            if _interaction(st):
                out.append(counter[0])
            counter[0] += 1
            if isinstance(st, S.If):
                visit(st.then, counter)
                visit(st.orelse, counter)

    visit(fn.body, [0])
    return out


def check_effects_after_interaction(c: S.ContractDef) -> list:
    """One Error per storage write that may follow an interaction in its function."""
    storage = {v.name for v in c.state_vars}
    findings = []
    for fn in _all_functions(c):
        hits = []
        _scan(fn.body, storage, {p.name for p in fn.params}, False, [0], hits)
        for idx, st in hits:
            findings.append(Finding(
                RULE_CEI, fn.name, st.span, "Error", "TruePositiveCandidate",
                f"storage write to '{st.var}' after an external interaction in {fn.name}()", idx))
    return findings


# -- mutex recognition ---------------------------------------------------------

def _assigns_const(stmt, value: bool):
    if (isinstance(stmt, S.AssignStmt) and isinstance(stmt.target, S.Var)
            and isinstance(stmt.value, S.BoolConst) and stmt.value.value is value):
        return stmt.target.name
    return None


def _lock_of(fn: S.FunctionDef, bool_vars: set):
    """Lock variable bracketing ``fn``, or None.

    Shape: first statement ``require(!L)``, ``L = true`` before any interaction,
    last statement ``L = false``; L a bool storage variable.
    """
    body = fn.body
    if len(body) < 3:
        return None
    first = body[0]
    if not (isinstance(first, S.Require) and isinstance(first.cond, S.UnOp) and first.cond.op == "!"
            and isinstance(first.cond.operand, S.Var)):
        return None
    lock = first.cond.operand.name
    if lock not in bool_vars or _assigns_const(body[-1], False) != lock:
        return None
    for st in body[1:]:
        if _assigns_const(st, True) == lock:
            return lock
        if _interaction(st) or isinstance(st, S.If):
            return None
    return None


def _mutating(fn: S.FunctionDef, storage: set) -> bool:
    if fn.view:
        return False
    if fn.payable:
        return True

    def visit(stmts):
        for st in stmts:
            if _interaction(st) or (isinstance(st, S.AssignStmt) and st.var in storage):
                return True
            if isinstance(st, S.If) and (visit(st.then) or visit(st.orelse)):
                return True
        return False

    return visit(fn.body)


def contract_lock(c: S.ContractDef):
    """The lock variable if every public state-mutating entry point carries it, else None."""
    storage = {v.name for v in c.state_vars}
    bool_vars = {v.name for v in c.state_vars if v.var_type == S.BOOL}
    entry = [f for f in c.functions if f.is_public]
    if c.fallback is not None:
        entry.append(c.fallback)
    entry = [f for f in entry if _mutating(f, storage)]
    locks = {_lock_of(f, bool_vars) for f in entry}
    if len(locks) != 1 or None in locks:
        return None
    return locks.pop()


def check_with_mutex_awareness(c: S.ContractDef) -> list:
    naive = check_effects_after_interaction(c)
    lock = contract_lock(c)
    if lock is None:
        return naive
    bool_vars = {v.name for v in c.state_vars if v.var_type == S.BOOL}
    locked = {f.name for f in _all_functions(c) if _lock_of(f, bool_vars) == lock}
    out = []
    for f in naive:
        if f.function in locked:
            f = Finding(f.rule_id, f.function, f.span, "Info", "SuppressedByMutex",
                        f"{f.message} (guarded by lock '{lock}')", f.index)
        out.append(f)
    return out


def errors(findings) -> list:
    return [f for f in findings if f.severity == "Error"]


# -- generated-contract verification ---------------------------------------------

def verify_generated(decl, c: S.ContractDef, lock: str = "__locked") -> list:
    """Structural checks on a contract generated from ``decl``; an empty list means Pass.

    (a) one public function per action, (b) every guard is required before any
    non-lock storage write, (c) sends follow the last non-lock write unless the
    lock pattern holds, (d) lock acquired first and released last.
    """
    from .codegen import guard_texts  # codegen imports this module

    findings = []
    storage = {v.name for v in c.state_vars}
    bool_vars = {v.name for v in c.state_vars if v.var_type == S.BOOL}
    actions = [a.name for a in decl.actions]

    def add(rule, fn, span, msg):
        findings.append(Finding(f"VG-{rule}", fn, span, "Error", "TruePositiveCandidate", msg))

    names = [f.name for f in c.functions]
    for a in actions:
        f = c.function(a)
        if f is None or not f.is_public:
            add("a", a, c.span, f"no public function for action '{a}'")
    for n in names:
        if n not in actions:
            add("a", n, c.function(n).span, f"function '{n}' does not correspond to an action")

    for action in decl.actions:
        fn = c.function(action.name)
        if fn is None:
            continue
        body = fn.body
        has_lock = _lock_of(fn, bool_vars) == lock
        # (d) lock bracketing
        acquire_ok = (len(body) >= 2 and isinstance(body[0], S.Require)
                      and expr_text(body[0].cond) == f"!{lock}"
                      and _assigns_const(body[1], True) == lock)
        if not acquire_ok:
            add("d", fn.name, fn.span, f"{fn.name}(): lock acquire is not the first statement")
        if not body or _assigns_const(body[-1], False) != lock:
            add("d", fn.name, fn.span, f"{fn.name}(): lock release is not the last statement")
        for i, st in enumerate(body):
            if _assigns_const(st, False) == lock and i != len(body) - 1:
                add("d", fn.name, st.span, f"{fn.name}(): lock released before the end")
        # (b) guards as requires ahead of writes
        seen = set()
        for st in body:
            if isinstance(st, S.AssignStmt) and st.var in storage and st.var != lock:
                break
            if isinstance(st, S.Require):
                seen.add(expr_text(st.cond))
        for g, text in guard_texts(decl, action):
            if text not in seen:
                add("b", fn.name, fn.span,
                    f"{fn.name}(): guard '{text}' is not required before the first storage write")
        # (c) sends after the last non-lock write
        last_write = max((i for i, st in enumerate(body) if isinstance(st, S.AssignStmt)
                          and st.var in storage and st.var != lock), default=-1)
        first_send = min((i for i, st in enumerate(body) if _interaction(st)), default=len(body))
        if first_send < last_write and not has_lock:
            add("c", fn.name, body[first_send].span,
                f"{fn.name}(): external send precedes a storage write without a lock")
    return findings
