/**
 * Client-side expression pre-parser, for instant syntax hints only.
 *
 * Mirrors the server grammar (or < and < comparison < add < mul < unary)
 * but is never authoritative: a red box with a hint is still submittable,
 * the server decides.
 */

export type ParseHint =
  | { ok: true; blank: boolean }
  | { ok: false; offset: number; reason: string };

const OP_CHARS = new Set("+-*/%<>=!&|");
const KNOWN_OPS = new Set([
  "+", "-", "*", "/", "%",
  "<", "<=", ">", ">=", "=", "==", "!=",
  "&&", "||", "!",
]);
const KEYWORDS = new Set(["and", "or", "not", "mod", "true", "false"]);

interface Token {
  kind: "num" | "ident" | "kw" | "op" | "lparen" | "rparen" | "end";
  text: string;
  offset: number;
}

class HintError extends Error {
  constructor(public reason: string, public offset: number) {
    super(reason);
  }
}

function isDigit(c: string): boolean {
  return c >= "0" && c <= "9";
}

function isWordStart(c: string): boolean {
  return /[A-Za-z_]/.test(c);
}

function tokenize(text: string): Token[] {
  const tokens: Token[] = [];
  let i = 0;
  while (i < text.length) {
    const c = text[i];
    if (/\s/.test(c)) {
      i += 1;
      continue;
    }
    const start = i;
    if (isDigit(c)) {
      while (i < text.length && isDigit(text[i])) i += 1;
      tokens.push({ kind: "num", text: text.slice(start, i), offset: start });
    } else if (isWordStart(c)) {
      while (i < text.length && /[A-Za-z0-9_]/.test(text[i])) i += 1;
      const word = text.slice(start, i);
      tokens.push({ kind: KEYWORDS.has(word) ? "kw" : "ident", text: word, offset: start });
    } else if (c === "(") {
      tokens.push({ kind: "lparen", text: c, offset: start });
      i += 1;
    } else if (c === ")") {
      tokens.push({ kind: "rparen", text: c, offset: start });
      i += 1;
    } else if (OP_CHARS.has(c)) {
      while (i < text.length && OP_CHARS.has(text[i])) i += 1;
      const cluster = text.slice(start, i);
      if (!KNOWN_OPS.has(cluster)) {
        throw new HintError(`unknown operator ${JSON.stringify(cluster)}`, start);
      }
      tokens.push({ kind: "op", text: cluster, offset: start });
    } else {
      throw new HintError(`unexpected character ${JSON.stringify(c)}`, start);
    }
  }
  tokens.push({ kind: "end", text: "", offset: text.length });
  return tokens;
}

const SPELLING: Record<string, string> = { "==": "=", "&&": "and", "||": "or", "!": "not", mod: "%" };

class Parser {
  pos = 0;

  constructor(private tokens: Token[]) {}

  get cur(): Token {
    return this.tokens[this.pos];
  }

  atOp(...ops: string[]): boolean {
    const t = this.cur;
    if (t.kind !== "op" && t.kind !== "kw") return false;
    return ops.includes(SPELLING[t.text] ?? t.text);
  }

  fail(expected: string): never {
    const t = this.cur;
    const got = t.kind === "end" ? "end of input" : JSON.stringify(t.text);
    throw new HintError(`expected ${expected}, got ${got}`, t.offset);
  }

  parse(): void {
    this.orExpr();
    if (this.cur.kind !== "end") this.fail("end of input");
  }

  binary(ops: string[], sub: () => void): void {
    sub.call(this);
    while (this.atOp(...ops)) {
      this.pos += 1;
      sub.call(this);
    }
  }

  orExpr(): void {
    this.binary(["or"], this.andExpr);
  }

  andExpr(): void {
    this.binary(["and"], this.cmpExpr);
  }

  cmpExpr(): void {
    this.binary(["<", "<=", ">", ">=", "=", "!="], this.addExpr);
  }

  addExpr(): void {
    this.binary(["+", "-"], this.mulExpr);
  }

  mulExpr(): void {
    this.binary(["*", "/", "%"], this.unary);
  }

  unary(): void {
    if (this.atOp("not")) {
      this.pos += 1;
      this.unary();
      return;
    }
    if (this.cur.kind === "op" && this.cur.text === "-") {
      const minus = this.cur;
      this.pos += 1;
      const next: Token = this.tokens[this.pos];
      if (next.kind !== "num") {
        throw new HintError("expected number after unary '-'", minus.offset);
      }
      this.pos += 1;
      return;
    }
    this.primary();
  }

  primary(): void {
    const t = this.cur;
    if (t.kind === "num" || t.kind === "ident") {
      this.pos += 1;
      return;
    }
    if (t.kind === "kw" && (t.text === "true" || t.text === "false")) {
      this.pos += 1;
      return;
    }
    if (t.kind === "lparen") {
      this.pos += 1;
      this.orExpr();
      if (this.cur.kind !== "rparen") this.fail("')'");
      this.pos += 1;
      return;
    }
    this.fail("an operand");
  }
}

/** Never throws: a hint, not a gate. */
export function parseHint(text: string): ParseHint {
  if (text.trim() === "") {
    return { ok: true, blank: true };
  }
  try {
    new Parser(tokenize(text)).parse();
    return { ok: true, blank: false };
  } catch (err) {
    if (err instanceof HintError) {
      return { ok: false, offset: err.offset, reason: err.reason };
    }
    throw err;
  }
}
