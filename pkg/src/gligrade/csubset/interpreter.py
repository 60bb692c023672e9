"""Tree-walking interpreter with step accounting and per-loop traces.

Cost model: each loop guard evaluation, each assignment (declaration
initializers included) and each printf/scanf call costs one step; exceeding
the budget aborts the run, signalling probable non-termination.  Storage is
allocated up front and zeroed, so reads of not-yet-initialized variables are
deterministic.

Whenever a loop guard is evaluated, the values of all scalars declared at or
before that guard are snapshotted; the snapshots of one loop form its trace
(snapshot 0 before the first test, last snapshot at exit).
"""

from __future__ import annotations

from dataclasses import dataclass

from ..gli import LoopTrace
from .nodes import (
    Assign,
    Block,
    CBin,
    CExpr,
    CIndex,
    CLit,
    CUnary,
    CVar,
    Decl,
    For,
    If,
    Printf,
    Program,
    Return,
    Scanf,
    Stmt,
    While,
)

DEFAULT_STEP_BUDGET = 1_000_000

DIV_BY_ZERO = "div-by-zero"
ARRAY_OUT_OF_BOUNDS = "array-out-of-bounds"
SCANF_EXHAUSTED = "scanf-exhausted"


class CRuntimeError(Exception):
    def __init__(self, kind: str, line: int):
        super().__init__(f"{kind} at line {line}")
        self.code = "RUNTIME_ERROR"
        self.kind = kind
        self.line = line


class StepBudgetExceeded(Exception):
    def __init__(self, budget: int):
        super().__init__(f"step budget of {budget} exceeded")
        self.code = "STEP_BUDGET_EXCEEDED"
        self.budget = budget


@dataclass(frozen=True)
class ExecutionResult:
    stdout: str
    exit_code: int
    steps: int
    traces: dict[int, LoopTrace]


class _Return(Exception):
    def __init__(self, value: int):
        self.value = value


class _Machine:
    def __init__(self, program: Program, stdin: str, budget: int):
        self.budget = budget
        self.steps = 0
        self.out: list[str] = []
        self.tokens = stdin.split()
        self.next_token = 0
        self.scalars: dict[str, int] = {}
        self.arrays: dict[str, list[int]] = {}
        for name, size in program.declarations.items():
            if size is None:
                self.scalars[name] = 0
            else:
                self.arrays[name] = [0] * size
        self.raw_traces: dict[int, list[dict[str, int]]] = {}

    def charge(self):
        self.steps += 1
        if self.steps > self.budget:
            raise StepBudgetExceeded(self.budget)

    # --- statements ---

    def run(self, stmt: Stmt):
        if isinstance(stmt, Block):
            for s in stmt.stmts:
                self.run(s)
        elif isinstance(stmt, Decl):
            if stmt.init is not None:
                self.charge()
                self.scalars[stmt.name] = self.eval(stmt.init)
        elif isinstance(stmt, Assign):
            value = self.eval(stmt.expr)
            self.charge()
            if isinstance(stmt.target, CVar):
                self.scalars[stmt.target.name] = value
            else:
                arr = self.arrays[stmt.target.name]
                idx = self.eval(stmt.target.index)
                if not (0 <= idx < len(arr)):
                    raise CRuntimeError(ARRAY_OUT_OF_BOUNDS, stmt.line)
                arr[idx] = value
        elif isinstance(stmt, If):
            if self.eval(stmt.cond) != 0:
                self.run(stmt.then)
            elif stmt.orelse is not None:
                self.run(stmt.orelse)
        elif isinstance(stmt, While):
            while self.guard(stmt):
                self.run(stmt.body)
        elif isinstance(stmt, For):
            if stmt.init is not None:
                self.run(stmt.init)
            while self.guard(stmt):
                self.run(stmt.body)
                if stmt.step is not None:
                    self.run(stmt.step)
        elif isinstance(stmt, Printf):
            self.charge()
            args = iter(stmt.args)
            for seg in stmt.segments:
                self.out.append(str(self.eval(next(args))) if seg is None else seg)
        elif isinstance(stmt, Scanf):
            self.charge()
            if self.next_token >= len(self.tokens):
                raise CRuntimeError(SCANF_EXHAUSTED, stmt.line)
            token = self.tokens[self.next_token]
            self.next_token += 1
            try:
                self.scalars[stmt.name] = int(token)
            except ValueError:
                raise CRuntimeError(SCANF_EXHAUSTED, stmt.line) from None
        elif isinstance(stmt, Return):
            raise _Return(0 if stmt.expr is None else self.eval(stmt.expr))
        else:
            raise TypeError(f"unknown statement {stmt!r}")

    def guard(self, loop: While | For) -> bool:
        self.charge()
        snapshot = {name: self.scalars[name] for name in loop.snapshot_vars}
        self.raw_traces.setdefault(loop.loop_id, []).append(snapshot)
        return self.eval(loop.cond) != 0

    # --- expressions ---

    def eval(self, e: CExpr) -> int:
        if isinstance(e, CLit):
            return e.value
        if isinstance(e, CVar):
            return self.scalars[e.name]
        if isinstance(e, CIndex):
            arr = self.arrays[e.name]
            idx = self.eval(e.index)
            if not (0 <= idx < len(arr)):
                raise CRuntimeError(ARRAY_OUT_OF_BOUNDS, e.line)
            return arr[idx]
        if isinstance(e, CUnary):
            if e.op == "-":
                return -self.eval(e.operand)
            return 1 if self.eval(e.operand) == 0 else 0
        if isinstance(e, CBin):
            if e.op == "&&":
                return 1 if self.eval(e.left) != 0 and self.eval(e.right) != 0 else 0
            if e.op == "||":
                return 1 if self.eval(e.left) != 0 or self.eval(e.right) != 0 else 0
            lv = self.eval(e.left)
            rv = self.eval(e.right)
            if e.op == "+":
                return lv + rv
            if e.op == "-":
                return lv - rv
            if e.op == "*":
                return lv * rv
            if e.op in ("/", "%"):
                if rv == 0:
                    raise CRuntimeError(DIV_BY_ZERO, e.line)
                q = abs(lv) // abs(rv)
                q = q if (lv >= 0) == (rv >= 0) else -q
                return q if e.op == "/" else lv - q * rv
            if e.op == "<":
                return 1 if lv < rv else 0
            if e.op == "<=":
                return 1 if lv <= rv else 0
            if e.op == ">":
                return 1 if lv > rv else 0
            if e.op == ">=":
                return 1 if lv >= rv else 0
            if e.op == "==":
                return 1 if lv == rv else 0
            if e.op == "!=":
                return 1 if lv != rv else 0
        raise TypeError(f"unknown expression {e!r}")


def interpret(program: Program, stdin: str, budget: int = DEFAULT_STEP_BUDGET) -> ExecutionResult:
    """Run a program deterministically; raises CRuntimeError on div-by-zero,
    out-of-bounds access or exhausted input, StepBudgetExceeded on a blown
    budget."""
    if budget <= 0:
        raise ValueError("budget must be positive")
    machine = _Machine(program, stdin, budget)
    exit_code = 0
    try:
        machine.run(program.body)
    except _Return as ret:
        exit_code = ret.value
    traces = {
        loop_id: LoopTrace(tuple(snaps)) for loop_id, snaps in machine.raw_traces.items()
    }
    return ExecutionResult(
        stdout="".join(machine.out),
        exit_code=exit_code,
        steps=machine.steps,
        traces=traces,
    )


def normalize_output(text: str) -> list[str]:
    """Per-line trailing-whitespace normalization used by test comparison."""
    lines = [line.rstrip() for line in text.splitlines()]
    while lines and lines[-1] == "":
        lines.pop()
    return lines


@dataclass(frozen=True)
class CaseResult:
    status: str  # "pass" | "fail" | "error"
    expected: str
    actual: str | None = None
    detail: str | None = None
    execution: ExecutionResult | None = None


def run_tests(program: Program, cases, budget: int = DEFAULT_STEP_BUDGET) -> list[CaseResult]:
    """Execute every case (no short-circuit); compare outputs exactly after
    trailing-whitespace normalization per line."""
    results: list[CaseResult] = []
    for case in cases:
        try:
            execution = interpret(program, case.stdin, budget)
        except (CRuntimeError, StepBudgetExceeded) as err:
            results.append(
                CaseResult(status="error", expected=case.expected_stdout, detail=str(err))
            )
            continue
        ok = normalize_output(execution.stdout) == normalize_output(case.expected_stdout)
        results.append(
            CaseResult(
                status="pass" if ok else "fail",
                expected=case.expected_stdout,
                actual=execution.stdout,
                execution=execution,
            )
        )
    return results
