"""AST for the C subset. Every node carries the source line it started on."""

from __future__ import annotations

from dataclasses import dataclass, field


# --- expressions -----------------------------------------------------------


@dataclass(frozen=True)
class CLit:
    value: int
    line: int = 0


@dataclass(frozen=True)
class CVar:
    name: str
    line: int = 0


@dataclass(frozen=True)
class CIndex:
    name: str
    index: "CExpr"
    line: int = 0


@dataclass(frozen=True)
class CUnary:
    op: str  # "-" or "!"
    operand: "CExpr"
    line: int = 0


@dataclass(frozen=True)
class CBin:
    op: str  # * / % + - < <= > >= == != && ||
    left: "CExpr"
    right: "CExpr"
    line: int = 0


CExpr = CLit | CVar | CIndex | CUnary | CBin


# --- statements ------------------------------------------------------------


@dataclass(frozen=True)
class Decl:
    name: str
    size: int | None  # None for scalars, else array length
    init: CExpr | None
    line: int


@dataclass(frozen=True)
class Assign:
    target: CVar | CIndex
    expr: CExpr
    line: int


@dataclass(frozen=True)
class If:
    cond: CExpr
    then: "Stmt"
    orelse: "Stmt | None"
    line: int


@dataclass(frozen=True)
class While:
    cond: CExpr
    body: "Stmt"
    line: int
    loop_id: int
    snapshot_vars: tuple[str, ...]  # scalars declared at or before the guard


@dataclass(frozen=True)
class For:
    init: "Stmt | None"  # Decl or Assign
    cond: CExpr
    step: "Stmt | None"
    body: "Stmt"
    line: int
    loop_id: int
    snapshot_vars: tuple[str, ...]


@dataclass(frozen=True)
class Printf:
    segments: tuple[str | None, ...]  # None marks a %d slot
    args: tuple[CExpr, ...]
    line: int


@dataclass(frozen=True)
class Scanf:
    name: str
    line: int


@dataclass(frozen=True)
class Return:
    expr: CExpr | None
    line: int


@dataclass(frozen=True)
class Block:
    stmts: tuple["Stmt", ...]
    line: int = 0


Stmt = Decl | Assign | If | While | For | Printf | Scanf | Return | Block


@dataclass(frozen=True)
class Program:
    body: Block
    # declaration order; values are None for scalars, array length otherwise
    declarations: dict[str, int | None] = field(default_factory=dict)
    loop_count: int = 0

    def scalar_names(self) -> list[str]:
        return [n for n, size in self.declarations.items() if size is None]
