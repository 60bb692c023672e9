"""The small integer/boolean expression language used throughout the platform.

This is the content language of the red drawing boxes, of movable-bar
positions, of loop guards and of variant functions.

Grammar (loosest binding first):

    or_expr    :: and_expr (('or' | '||') and_expr)*
    and_expr   :: cmp_expr (('and' | '&&') cmp_expr)*
    cmp_expr   :: add_expr (('<' | '<=' | '>' | '>=' | '=' | '==' | '!=') add_expr)*
    add_expr   :: mul_expr (('+' | '-') mul_expr)*
    mul_expr   :: unary (('*' | '/' | '%' | 'mod') unary)*
    unary      :: ('not' | '!') unary | '-' NUMBER | primary
    primary    :: NUMBER | IDENT | 'true' | 'false' | '(' or_expr ')'

Binary operators associate to the left.  Runs of operator characters are
lexed greedily, so "2 ** 3" fails at the "**" cluster rather than parsing.
Empty or whitespace-only input denotes the distinguished Blank value.

Arithmetic is exact over signed 64-bit integers; any intermediate result
outside that range is an OVERFLOW error, never a silent wrap.  Division and
modulo truncate toward zero (the remainder takes the dividend's sign) so
drawing expressions agree with the code interpreter.
"""

from __future__ import annotations

from dataclasses import dataclass

INT_MIN = -(2**63)
INT_MAX = 2**63 - 1

# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------


class Expression:
    """Base class for expression nodes. All nodes are immutable values."""

    __slots__ = ()


@dataclass(frozen=True)
class Lit(Expression):
    value: int


@dataclass(frozen=True)
class BoolLit(Expression):
    """Boolean constant. Produced by parsing 'true'/'false' and by folding."""

    value: bool


@dataclass(frozen=True)
class Var(Expression):
    name: str


@dataclass(frozen=True)
class BinOp(Expression):
    op: str  # one of + - * / % < <= > >= = != and or
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Not(Expression):
    operand: Expression


class _Blank(Expression):
    """The distinguished empty-box value. A leaf: never inside a composite."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Blank"


BLANK = _Blank()

ARITH_OPS = ("+", "-", "*", "/", "%")
CMP_OPS = ("<", "<=", ">", ">=", "=", "!=")
LOGIC_OPS = ("and", "or")


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------


class ExpressionSyntaxError(ValueError):
    """Malformed expression text. `offset` is the character position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.code = "SYNTAX_ERROR"
        self.offset = offset
        self.reason = message


class EvalError(Exception):
    """Evaluation failure; `code` is one of the machine-readable codes below."""

    def __init__(self, code: str, detail: str = ""):
        super().__init__(f"{code}{f'({detail})' if detail else ''}")
        self.code = code
        self.detail = detail


UNBOUND_VARIABLE = "UNBOUND_VARIABLE"
DIV_BY_ZERO = "DIV_BY_ZERO"
TYPE_MISMATCH = "TYPE_MISMATCH"
BLANK_EVAL = "BLANK_EVAL"
OVERFLOW = "OVERFLOW"


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

_OP_CHARS = set("+-*/%<>=!&|")
_KNOWN_OPS = {
    "+", "-", "*", "/", "%",
    "<", "<=", ">", ">=", "=", "==", "!=",
    "&&", "||", "!",
}
_KEYWORDS = {"and", "or", "not", "mod", "true", "false"}


@dataclass(frozen=True)
class _Token:
    kind: str  # "num" | "ident" | "op" | "kw" | "lparen" | "rparen" | "end"
    text: str
    offset: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        start = i
        if c.isdigit():
            while i < n and text[i].isdigit():
                i += 1
            tokens.append(_Token("num", text[start:i], start))
        elif c.isalpha() or c == "_":
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
            word = text[start:i]
            kind = "kw" if word in _KEYWORDS else "ident"
            tokens.append(_Token(kind, word, start))
        elif c == "(":
            tokens.append(_Token("lparen", c, start))
            i += 1
        elif c == ")":
            tokens.append(_Token("rparen", c, start))
            i += 1
        elif c in _OP_CHARS:
            while i < n and text[i] in _OP_CHARS:
                i += 1
            cluster = text[start:i]
            if cluster not in _KNOWN_OPS:
                raise ExpressionSyntaxError(f"unknown operator {cluster!r}", start)
            tokens.append(_Token("op", cluster, start))
        else:
            raise ExpressionSyntaxError(f"unexpected character {c!r}", start)
    tokens.append(_Token("end", "", n))
    return tokens


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_OP_SPELLING = {"==": "=", "&&": "and", "||": "or", "!": "not", "mod": "%"}


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def cur(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.cur
        self.pos += 1
        return tok

    def at_op(self, *ops: str) -> bool:
        t = self.cur
        name = _OP_SPELLING.get(t.text, t.text)
        return (t.kind in ("op", "kw")) and name in ops

    def fail(self, expected: str):
        t = self.cur
        got = repr(t.text) if t.kind != "end" else "end of input"
        raise ExpressionSyntaxError(f"expected {expected}, got {got}", t.offset)

    def parse(self) -> Expression:
        e = self.or_expr()
        if self.cur.kind != "end":
            self.fail("end of input")
        return e

    def or_expr(self) -> Expression:
        left = self.and_expr()
        while self.at_op("or"):
            self.advance()
            left = BinOp("or", left, self.and_expr())
        return left

    def and_expr(self) -> Expression:
        left = self.cmp_expr()
        while self.at_op("and"):
            self.advance()
            left = BinOp("and", left, self.cmp_expr())
        return left

    def cmp_expr(self) -> Expression:
        left = self.add_expr()
        while self.at_op(*CMP_OPS):
            tok = self.advance()
            left = BinOp(_OP_SPELLING.get(tok.text, tok.text), left, self.add_expr())
        return left

    def add_expr(self) -> Expression:
        left = self.mul_expr()
        while self.at_op("+", "-"):
            op = self.advance().text
            left = BinOp(op, left, self.mul_expr())
        return left

    def mul_expr(self) -> Expression:
        left = self.unary()
        while self.at_op("*", "/", "%"):
            op = _OP_SPELLING.get(self.cur.text, self.cur.text)
            self.advance()
            left = BinOp(op, left, self.unary())
        return left

    def unary(self) -> Expression:
        if self.at_op("not"):
            self.advance()
            return Not(self.unary())
        if self.cur.kind == "op" and self.cur.text == "-":
            # A minus in operand position introduces a negative literal only.
            minus = self.advance()
            if self.cur.kind != "num":
                raise ExpressionSyntaxError("expected number after unary '-'", minus.offset)
            tok = self.advance()
            return self._lit(-int(tok.text), tok.offset)
        return self.primary()

    def primary(self) -> Expression:
        t = self.cur
        if t.kind == "num":
            self.advance()
            return self._lit(int(t.text), t.offset)
        if t.kind == "ident":
            self.advance()
            return Var(t.text)
        if t.kind == "kw" and t.text in ("true", "false"):
            self.advance()
            return BoolLit(t.text == "true")
        if t.kind == "lparen":
            self.advance()
            e = self.or_expr()
            if self.cur.kind != "rparen":
                self.fail("')'")
            self.advance()
            return e
        self.fail("an operand")

    @staticmethod
    def _lit(value: int, offset: int) -> Lit:
        if not (INT_MIN <= value <= INT_MAX):
            raise ExpressionSyntaxError("integer literal out of 64-bit range", offset)
        return Lit(value)


def parse_expression(text: str) -> Expression:
    """Parse expression text into an AST; blank text parses to BLANK."""
    if text.strip() == "":
        return BLANK
    return _Parser(_tokenize(text)).parse()


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def _check_range(v: int) -> int:
    if not (INT_MIN <= v <= INT_MAX):
        raise EvalError(OVERFLOW)
    return v


def _want_int(v: int | bool) -> int:
    if isinstance(v, bool):
        raise EvalError(TYPE_MISMATCH, "expected integer, got boolean")
    return v


def _want_bool(v: int | bool) -> bool:
    if not isinstance(v, bool):
        raise EvalError(TYPE_MISMATCH, "expected boolean, got integer")
    return v


def trunc_div(a: int, b: int) -> int:
    """C-style division: truncate toward zero."""
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def eval_expression(e: Expression, env: dict[str, int]) -> int | bool:
    """Evaluate `e` under `env`.

    Total over the declared error space: every input yields an int, a bool,
    or raises an EvalError with one of the listed codes.  `and`/`or`
    short-circuit, so an error in the right operand is not raised when the
    left operand decides the result.
    """
    if e is BLANK:
        raise EvalError(BLANK_EVAL)
    if isinstance(e, Lit):
        return e.value
    if isinstance(e, BoolLit):
        return e.value
    if isinstance(e, Var):
        if e.name not in env:
            raise EvalError(UNBOUND_VARIABLE, e.name)
        return env[e.name]
    if isinstance(e, Not):
        return not _want_bool(eval_expression(e.operand, env))
    if isinstance(e, BinOp):
        if e.op in ("and", "or"):
            left = _want_bool(eval_expression(e.left, env))
            if e.op == "and" and not left:
                return False
            if e.op == "or" and left:
                return True
            return _want_bool(eval_expression(e.right, env))
        lv = _want_int(eval_expression(e.left, env))
        rv = _want_int(eval_expression(e.right, env))
        if e.op == "+":
            return _check_range(lv + rv)
        if e.op == "-":
            return _check_range(lv - rv)
        if e.op == "*":
            return _check_range(lv * rv)
        if e.op in ("/", "%"):
            if rv == 0:
                raise EvalError(DIV_BY_ZERO)
            q = trunc_div(lv, rv)
            if e.op == "/":
                return _check_range(q)
            return _check_range(lv - q * rv)
        if e.op == "<":
            return lv < rv
        if e.op == "<=":
            return lv <= rv
        if e.op == ">":
            return lv > rv
        if e.op == ">=":
            return lv >= rv
        if e.op == "=":
            return lv == rv
        if e.op == "!=":
            return lv != rv
    raise EvalError(TYPE_MISMATCH, f"unknown node {e!r}")


# ---------------------------------------------------------------------------
# Pretty printing and structural helpers
# ---------------------------------------------------------------------------

# Binding strength; higher binds tighter. Mirrors the parser.
_PREC = {
    "or": 1,
    "and": 2,
    "<": 3, "<=": 3, ">": 3, ">=": 3, "=": 3, "!=": 3,
    "+": 4, "-": 4,
    "*": 5, "/": 5, "%": 5,
}
_UNARY_PREC = 6


def pretty(e: Expression) -> str:
    """Canonical text form; parse_expression(pretty(e)) == e for all ASTs."""
    return _pretty(e, 0)


def _pretty(e: Expression, parent_prec: int) -> str:
    if e is BLANK:
        return ""
    if isinstance(e, Lit):
        return str(e.value)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Not):
        inner = _pretty(e.operand, _UNARY_PREC)
        text = f"not {inner}"
        return f"({text})" if parent_prec >= _UNARY_PREC else text
    if isinstance(e, BinOp):
        prec = _PREC[e.op]
        # Left-associative: the right child needs parens at equal precedence.
        left = _pretty(e.left, prec - 1)
        right = _pretty(e.right, prec)
        text = f"{left} {e.op} {right}"
        return f"({text})" if parent_prec >= prec else text
    raise TypeError(f"not an expression node: {e!r}")


def free_vars(e: Expression) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Not):
        return free_vars(e.operand)
    if isinstance(e, BinOp):
        return free_vars(e.left) | free_vars(e.right)
    return set()


def is_constant(e: Expression) -> bool:
    return e is not BLANK and not free_vars(e)


def constant_value(e: Expression) -> int | bool | None:
    """Value of a closed expression, or None if it is open or errors out."""
    if e is BLANK or free_vars(e):
        return None
    try:
        return eval_expression(e, {})
    except EvalError:
        return None


def returns_bool(e: Expression) -> bool:
    """Static type of a node: comparisons, logic and bool literals are boolean,
    everything else (literals, variables, arithmetic) is integer."""
    if isinstance(e, (BoolLit, Not)):
        return True
    return isinstance(e, BinOp) and e.op in CMP_OPS + LOGIC_OPS


def normalize(e: Expression) -> Expression:
    """Fold closed subtrees to their value and drop double negations.

    Subtrees whose evaluation errors (division by zero, overflow) are kept
    as written.  Double negation is stripped only over boolean operands;
    over an integer operand the original expression (an always-failing one)
    is preserved.
    """
    if e is BLANK or isinstance(e, (Lit, BoolLit, Var)):
        return e
    if isinstance(e, Not):
        inner = normalize(e.operand)
        if isinstance(inner, Not) and returns_bool(inner.operand):
            return inner.operand
        if isinstance(inner, BoolLit):
            return BoolLit(not inner.value)
        return Not(inner)
    if isinstance(e, BinOp):
        folded = BinOp(e.op, normalize(e.left), normalize(e.right))
        if not free_vars(folded):
            try:
                v = eval_expression(folded, {})
            except EvalError:
                return folded
            return BoolLit(v) if isinstance(v, bool) else Lit(v)
        return folded
    raise TypeError(f"not an expression node: {e!r}")
