"""Recursive-descent parser for the C subset, with declare-before-use analysis.

Variables must be declared before any use; violations surface at parse time,
standing in for the compile step of a real toolchain.  Loops are numbered in
textual order (loop id 1..k) and each loop node records which scalars were
declared at its guard, which fixes the variable set of its execution trace.
"""

from __future__ import annotations

from dataclasses import dataclass

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


class CSyntaxError(ValueError):
    def __init__(self, line: int, col: int, expected: str):
        super().__init__(f"line {line}, col {col}: expected {expected}")
        self.code = "SYNTAX_ERROR"
        self.line = line
        self.col = col
        self.expected = expected


class UndeclaredVariable(ValueError):
    def __init__(self, name: str, line: int):
        super().__init__(f"line {line}: variable {name!r} used before declaration")
        self.code = "UNDECLARED_VARIABLE"
        self.name = name
        self.line = line


_KEYWORDS = {"int", "void", "main", "if", "else", "while", "for", "return", "printf", "scanf"}

_PUNCT2 = {"==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=", "*=", "/=", "%="}
_PUNCT1 = set("+-*/%<>=!&(){}[];,")


@dataclass(frozen=True)
class _Tok:
    kind: str  # "ident" | "kw" | "num" | "str" | "punct" | "end"
    text: str
    line: int
    col: int


def _lex(source: str) -> list[_Tok]:
    toks: list[_Tok] = []
    line, col = 1, 1
    i, n = 0, len(source)

    def bump(count=1):
        nonlocal i, line, col
        for _ in range(count):
            if i < n and source[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        c = source[i]
        if c.isspace():
            bump()
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                bump()
            continue
        if source.startswith("/*", i):
            start_line, start_col = line, col
            bump(2)
            while i < n and not source.startswith("*/", i):
                bump()
            if i >= n:
                raise CSyntaxError(start_line, start_col, "closing */")
            bump(2)
            continue
        tline, tcol = line, col
        if c.isdigit():
            start = i
            while i < n and source[i].isdigit():
                bump()
            toks.append(_Tok("num", source[start:i], tline, tcol))
            continue
        if c.isalpha() or c == "_":
            start = i
            while i < n and (source[i].isalnum() or source[i] == "_"):
                bump()
            word = source[start:i]
            toks.append(_Tok("kw" if word in _KEYWORDS else "ident", word, tline, tcol))
            continue
        if c == '"':
            bump()
            chars: list[str] = []
            while i < n and source[i] != '"':
                if source[i] == "\\":
                    bump()
                    if i >= n:
                        break
                    esc = source[i]
                    chars.append({"n": "\n", "t": "\t", "\\": "\\", '"': '"', "0": "\0"}.get(esc, esc))
                    bump()
                else:
                    chars.append(source[i])
                    bump()
            if i >= n:
                raise CSyntaxError(tline, tcol, 'closing "')
            bump()
            toks.append(_Tok("str", "".join(chars), tline, tcol))
            continue
        if source[i : i + 2] in _PUNCT2:
            toks.append(_Tok("punct", source[i : i + 2], tline, tcol))
            bump(2)
            continue
        if c in _PUNCT1:
            toks.append(_Tok("punct", c, tline, tcol))
            bump()
            continue
        raise CSyntaxError(tline, tcol, f"a token (found {c!r})")
    toks.append(_Tok("end", "", line, col))
    return toks


class _Parser:
    def __init__(self, tokens: list[_Tok]):
        self.toks = tokens
        self.pos = 0
        self.declarations: dict[str, int | None] = {}
        self.loop_counter = 0

    @property
    def cur(self) -> _Tok:
        return self.toks[self.pos]

    def advance(self) -> _Tok:
        t = self.cur
        self.pos += 1
        return t

    def at(self, text: str) -> bool:
        return self.cur.text == text and self.cur.kind in ("punct", "kw")

    def expect(self, text: str) -> _Tok:
        if not self.at(text):
            raise CSyntaxError(self.cur.line, self.cur.col, f"{text!r}")
        return self.advance()

    def expect_ident(self) -> _Tok:
        if self.cur.kind != "ident":
            raise CSyntaxError(self.cur.line, self.cur.col, "an identifier")
        return self.advance()

    # --- program structure ---

    def program(self) -> Program:
        self.expect("int")
        self.expect("main")
        self.expect("(")
        if self.at("void"):
            self.advance()
        self.expect(")")
        body = self.block()
        if self.cur.kind != "end":
            raise CSyntaxError(self.cur.line, self.cur.col, "end of file")
        return Program(body=body, declarations=self.declarations, loop_count=self.loop_counter)

    def block(self) -> Block:
        start = self.expect("{")
        stmts: list[Stmt] = []
        while not self.at("}"):
            if self.cur.kind == "end":
                raise CSyntaxError(self.cur.line, self.cur.col, "'}'")
            stmts.append(self.statement())
        self.expect("}")
        return Block(tuple(stmts), start.line)

    def statement(self) -> Stmt:
        if self.at("{"):
            return self.block()
        if self.at(";"):
            tok = self.advance()
            return Block((), tok.line)
        if self.at("int"):
            decls = self.declaration_list()
            self.expect(";")
            return decls
        if self.at("if"):
            return self.if_statement()
        if self.at("while"):
            return self.while_statement()
        if self.at("for"):
            return self.for_statement()
        if self.at("printf"):
            stmt = self.printf_statement()
            self.expect(";")
            return stmt
        if self.at("scanf"):
            stmt = self.scanf_statement()
            self.expect(";")
            return stmt
        if self.at("return"):
            tok = self.advance()
            expr = None if self.at(";") else self.expression()
            self.expect(";")
            return Return(expr, tok.line)
        stmt = self.assignment()
        self.expect(";")
        return stmt

    def declaration_list(self) -> Stmt:
        tok = self.expect("int")
        decls = [self.declarator(tok.line)]
        while self.at(","):
            self.advance()
            decls.append(self.declarator(tok.line))
        return decls[0] if len(decls) == 1 else Block(tuple(decls), tok.line)

    def declarator(self, line: int) -> Decl:
        name_tok = self.expect_ident()
        name = name_tok.text
        if name in self.declarations:
            raise CSyntaxError(name_tok.line, name_tok.col, f"fresh name ({name!r} already declared)")
        size = None
        init = None
        if self.at("["):
            self.advance()
            if self.cur.kind != "num":
                raise CSyntaxError(self.cur.line, self.cur.col, "an array size literal")
            size = int(self.advance().text)
            if size <= 0:
                raise CSyntaxError(name_tok.line, name_tok.col, "a positive array size")
            self.expect("]")
        elif self.at("="):
            self.advance()
            init = self.expression()
        self.declarations[name] = size
        return Decl(name, size, init, name_tok.line)

    def if_statement(self) -> If:
        tok = self.expect("if")
        self.expect("(")
        cond = self.expression()
        self.expect(")")
        then = self.statement()
        orelse = None
        if self.at("else"):
            self.advance()
            orelse = self.statement()
        return If(cond, then, orelse, tok.line)

    def _snapshot_vars(self) -> tuple[str, ...]:
        return tuple(n for n, size in self.declarations.items() if size is None)

    def while_statement(self) -> While:
        tok = self.expect("while")
        self.loop_counter += 1
        loop_id = self.loop_counter
        snapshot = self._snapshot_vars()
        self.expect("(")
        cond = self.expression()
        self.expect(")")
        body = self.statement()
        return While(cond, body, tok.line, loop_id, snapshot)

    def for_statement(self) -> For:
        tok = self.expect("for")
        self.loop_counter += 1
        loop_id = self.loop_counter
        self.expect("(")
        init: Stmt | None = None
        if not self.at(";"):
            if self.at("int"):
                init = self.declaration_list()
            else:
                init = self.assignment()
        self.expect(";")
        snapshot = self._snapshot_vars()  # after the init clause declares
        cond = self.expression()
        self.expect(";")
        step = None if self.at(")") else self.assignment()
        self.expect(")")
        body = self.statement()
        return For(init, cond, step, body, tok.line, loop_id, snapshot)

    def printf_statement(self) -> Printf:
        tok = self.expect("printf")
        self.expect("(")
        if self.cur.kind != "str":
            raise CSyntaxError(self.cur.line, self.cur.col, "a format string")
        fmt = self.advance().text
        segments = _split_format(fmt, tok.line)
        args: list[CExpr] = []
        while self.at(","):
            self.advance()
            args.append(self.expression())
        self.expect(")")
        slots = sum(1 for s in segments if s is None)
        if slots != len(args):
            raise CSyntaxError(
                tok.line, tok.col, f"{slots} argument(s) for {slots} %d slot(s), got {len(args)}"
            )
        return Printf(tuple(segments), tuple(args), tok.line)

    def scanf_statement(self) -> Scanf:
        tok = self.expect("scanf")
        self.expect("(")
        if self.cur.kind != "str" or self.advance().text != "%d":
            raise CSyntaxError(tok.line, tok.col, 'scanf format "%d"')
        self.expect(",")
        self.expect("&")
        name_tok = self.expect_ident()
        self._check_declared_scalar(name_tok)
        self.expect(")")
        return Scanf(name_tok.text, tok.line)

    def assignment(self) -> Assign:
        # also covers the ++/--/compound-assignment sugar
        if self.at("++") or self.at("--"):
            op = self.advance()
            name_tok = self.expect_ident()
            self._check_declared_scalar(name_tok)
            var = CVar(name_tok.text, name_tok.line)
            delta = CBin("+" if op.text == "++" else "-", var, CLit(1), op.line)
            return Assign(var, delta, op.line)
        name_tok = self.expect_ident()
        self._check_declared(name_tok)
        target: CVar | CIndex = CVar(name_tok.text, name_tok.line)
        if self.at("["):
            if self.declarations[name_tok.text] is None:
                raise CSyntaxError(name_tok.line, name_tok.col, f"an array ({name_tok.text!r} is a scalar)")
            self.advance()
            idx = self.expression()
            self.expect("]")
            target = CIndex(name_tok.text, idx, name_tok.line)
        elif self.declarations[name_tok.text] is not None:
            raise CSyntaxError(name_tok.line, name_tok.col, f"a scalar ({name_tok.text!r} is an array)")
        if self.at("++") or self.at("--"):
            op = self.advance()
            delta = CBin("+" if op.text == "++" else "-", target, CLit(1), op.line)
            return Assign(target, delta, op.line)
        for compound in ("+=", "-=", "*=", "/=", "%="):
            if self.at(compound):
                self.advance()
                rhs = self.expression()
                return Assign(target, CBin(compound[0], target, rhs, name_tok.line), name_tok.line)
        self.expect("=")
        return Assign(target, self.expression(), name_tok.line)

    def _check_declared(self, tok: _Tok):
        if tok.text not in self.declarations:
            raise UndeclaredVariable(tok.text, tok.line)

    def _check_declared_scalar(self, tok: _Tok):
        self._check_declared(tok)
        if self.declarations[tok.text] is not None:
            raise CSyntaxError(tok.line, tok.col, f"a scalar ({tok.text!r} is an array)")

    # --- expressions (C precedence) ---

    def expression(self) -> CExpr:
        return self.or_expr()

    def _binary_left(self, ops: tuple[str, ...], sub) -> CExpr:
        left = sub()
        while self.cur.kind == "punct" and self.cur.text in ops:
            op = self.advance()
            left = CBin(op.text, left, sub(), op.line)
        return left

    def or_expr(self) -> CExpr:
        return self._binary_left(("||",), self.and_expr)

    def and_expr(self) -> CExpr:
        return self._binary_left(("&&",), self.eq_expr)

    def eq_expr(self) -> CExpr:
        return self._binary_left(("==", "!="), self.rel_expr)

    def rel_expr(self) -> CExpr:
        return self._binary_left(("<", "<=", ">", ">="), self.add_expr)

    def add_expr(self) -> CExpr:
        return self._binary_left(("+", "-"), self.mul_expr)

    def mul_expr(self) -> CExpr:
        return self._binary_left(("*", "/", "%"), self.unary_expr)

    def unary_expr(self) -> CExpr:
        if self.cur.kind == "punct" and self.cur.text in ("-", "!"):
            op = self.advance()
            return CUnary(op.text, self.unary_expr(), op.line)
        return self.postfix()

    def postfix(self) -> CExpr:
        t = self.cur
        if t.kind == "num":
            self.advance()
            return CLit(int(t.text), t.line)
        if t.kind == "ident":
            self.advance()
            self._check_declared(t)
            if self.at("["):
                if self.declarations[t.text] is None:
                    raise CSyntaxError(t.line, t.col, f"an array ({t.text!r} is a scalar)")
                self.advance()
                idx = self.expression()
                self.expect("]")
                return CIndex(t.text, idx, t.line)
            if self.declarations[t.text] is not None:
                raise CSyntaxError(t.line, t.col, f"a scalar ({t.text!r} is an array)")
            return CVar(t.text, t.line)
        if self.at("("):
            self.advance()
            e = self.expression()
            self.expect(")")
            return e
        raise CSyntaxError(t.line, t.col, "an operand")


def _split_format(fmt: str, line: int) -> list[str | None]:
    """Split a printf format into literal runs and None markers for %d."""
    segments: list[str | None] = []
    buf: list[str] = []
    i = 0
    while i < len(fmt):
        if fmt[i] == "%":
            if fmt[i : i + 2] == "%%":
                buf.append("%")
                i += 2
                continue
            if fmt[i : i + 2] != "%d":
                raise CSyntaxError(line, 1, "only %d conversions in printf")
            if buf:
                segments.append("".join(buf))
                buf = []
            segments.append(None)
            i += 2
        else:
            buf.append(fmt[i])
            i += 1
    if buf:
        segments.append("".join(buf))
    return segments


def parse_program(source: str) -> Program:
    """Parse and analyze; raises CSyntaxError or UndeclaredVariable."""
    return _Parser(_lex(source)).program()
