"""Bridge from C expressions to the drawing expression language.

Used to compare a program's loop guard with conditions derived from the
drawing.  C conditions are int-valued; the drawing language is typed, so a
bare arithmetic condition becomes `expr != 0` and `!e` becomes `not <cond>`.
Array subscripts (and comparisons nested inside arithmetic) have no drawing
counterpart and refuse to convert.
"""

from __future__ import annotations

from ..expressions import BinOp, Expression, Lit, Not, Var
from .nodes import CBin, CExpr, CIndex, CLit, CUnary, CVar

_CMP = {"<": "<", "<=": "<=", ">": ">", ">=": ">=", "==": "=", "!=": "!="}
_ARITH = ("+", "-", "*", "/", "%")


class UnconvertibleGuard(ValueError):
    def __init__(self, detail: str):
        super().__init__(detail)
        self.code = "UNCONVERTIBLE_GUARD"
        self.detail = detail


def guard_to_expression(e: CExpr) -> Expression:
    """C condition -> boolean drawing expression."""
    if isinstance(e, CBin):
        if e.op in _CMP:
            return BinOp(_CMP[e.op], _as_int(e.left), _as_int(e.right))
        if e.op == "&&":
            return BinOp("and", guard_to_expression(e.left), guard_to_expression(e.right))
        if e.op == "||":
            return BinOp("or", guard_to_expression(e.left), guard_to_expression(e.right))
    if isinstance(e, CUnary) and e.op == "!":
        return Not(guard_to_expression(e.operand))
    return BinOp("!=", _as_int(e), Lit(0))


def _as_int(e: CExpr) -> Expression:
    if isinstance(e, CLit):
        return Lit(e.value)
    if isinstance(e, CVar):
        return Var(e.name)
    if isinstance(e, CUnary) and e.op == "-":
        return BinOp("-", Lit(0), _as_int(e.operand))
    if isinstance(e, CBin) and e.op in _ARITH:
        return BinOp(e.op, _as_int(e.left), _as_int(e.right))
    if isinstance(e, CIndex):
        raise UnconvertibleGuard(f"array access {e.name}[...] has no drawing form")
    raise UnconvertibleGuard(f"cannot express {type(e).__name__} as drawing arithmetic")
