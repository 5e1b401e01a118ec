"""Text formats: polynomial expressions and map files.

Map file grammar::

    # comment
    name: pasferme            (optional)
    vars: x1 x2 x3
    targets: a1 a2 a3         (optional, defaults to a1 .. an)
    map:
    x1^3 - x1*x2*x3
    x2*x3
    x3*x1

Expressions use ``+ - * / ^`` and parentheses; ``/`` only divides by a
non-zero constant, which is how rational literals ``p/q`` are written.
Implicit multiplication (``2x``, ``x y``) is rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from gmpy2 import mpq

from .polycore import GREVLEX, MonomialOrder, Polynomial, PolyMap, VariableContext, default_targets

USER_IDENT = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*\Z")
_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*/^()]))")


class MapParseError(ValueError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.message = message


@dataclass
class _Tok:
    kind: str  # num, ident, op, end
    text: str
    col: int


def _tokenize(text: str, line: int) -> list[_Tok]:
    toks, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            col = pos + len(text[pos:]) - len(text[pos:].lstrip()) + 1
            raise MapParseError(f"unexpected character {text[col - 1]!r}", line, col)
        col = m.start(m.lastindex) + 1
        if m.group(1):
            toks.append(_Tok("num", m.group(1), col))
        elif m.group(2):
            toks.append(_Tok("ident", m.group(2), col))
        else:
            toks.append(_Tok("op", "^" if m.group(3) == "**" else m.group(3), col))
        pos = m.end()
    toks.append(_Tok("end", "", len(text) + 1))
    return toks


class _ExprParser:
    def __init__(self, text: str, ctx: VariableContext, line: int):
        self.toks = _tokenize(text, line)
        self.i = 0
        self.ctx = ctx
        self.line = line

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.toks[self.i]
        raise MapParseError(msg, self.line, tok.col)

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def parse(self) -> Polynomial:
        if self.tok.kind == "end":
            self.error("empty expression")
        p = self.expr()
        if self.tok.kind != "end":
            self.error(f"unexpected {self.tok.text!r}")
        return p

    def expr(self) -> Polynomial:
        p = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.take().text
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> Polynomial:
        p = self.unary()
        while True:
            t = self.tok
            if t.kind == "op" and t.text in "*/":
                self.take()
                q = self.unary()
                if t.text == "*":
                    p = p * q
                else:
                    if not q.is_constant() or q.is_zero():
                        self.error("division only by a non-zero constant", t)
                    p = p / q.constant_value()
            elif t.kind in ("num", "ident") or (t.kind == "op" and t.text == "("):
                self.error("implicit multiplication is not allowed; use '*'")
            else:
                return p

    def unary(self) -> Polynomial:
        if self.tok.kind == "op" and self.tok.text in "+-":
            op = self.take().text
            p = self.unary()
            return -p if op == "-" else p
        return self.power()

    def power(self) -> Polynomial:
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.take()
            t = self.take()
            if t.kind != "num":
                self.error("exponent must be a non-negative integer literal", t)
            base = base ** int(t.text)
        return base

    def atom(self) -> Polynomial:
        t = self.take()
        if t.kind == "num":
            return self.ctx.const(int(t.text))
        if t.kind == "ident":
            if t.text not in self.ctx.names:
                self.error(f"unknown variable {t.text!r}", t)
            return self.ctx.var(t.text)
        if t.kind == "op" and t.text == "(":
            p = self.expr()
            if not (self.tok.kind == "op" and self.tok.text == ")"):
                self.error("expected ')'")
            self.take()
            return p
        self.error("expected a number, variable or '('", t)


def parse_polynomial(text: str, ctx: VariableContext, line: int = 1) -> Polynomial:
    return _ExprParser(text, ctx, line).parse()


def _render_coeff(c: mpq) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def render_polynomial(p: Polynomial) -> str:
    """Terms in the ring's order; ``^`` for powers and explicit ``*``."""
    if p.is_zero():
        return "0"
    parts = []
    for m, c in p.items():
        mono = "*".join(nm if e == 1 else f"{nm}^{e}" for nm, e in zip(p.ctx.names, m) if e)
        mag = abs(c)
        if mono:
            body = mono if mag == 1 else f"{_render_coeff(mag)}*{mono}"
        else:
            body = _render_coeff(mag)
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append((" - " if c < 0 else " + ") + body)
    return "".join(parts)


def parse_map(text: str, *, rectangular: bool = False, order: MonomialOrder = GREVLEX) -> PolyMap:
    """Parse a map file into a PolyMap; errors carry line and column."""
    name, names, targets, comps, in_map = "", None, None, [], False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        stripped = line.strip()
        head = re.match(r"(name|vars|targets|map)\s*:(.*)\Z", stripped)
        if head:
            key, rest = head.group(1), head.group(2).strip()
            col = raw.index(key) + 1
            if in_map:
                raise MapParseError(f"'{key}:' declaration after 'map:'", lineno, col)
            if key == "name":
                name = rest
            elif key in ("vars", "targets"):
                ids = rest.replace(",", " ").split()
                if not ids:
                    raise MapParseError(f"empty {key} declaration", lineno, col)
                for ident in ids:
                    if not USER_IDENT.match(ident):
                        raise MapParseError(f"invalid identifier {ident!r}", lineno, raw.index(ident) + 1)
                if len(set(ids)) != len(ids):
                    raise MapParseError(f"duplicate identifier in {key}", lineno, col)
                if key == "vars":
                    names = tuple(ids)
                else:
                    targets = tuple(ids)
            else:
                if names is None:
                    raise MapParseError("'map:' before 'vars:'", lineno, col)
                in_map = True
                if rest:
                    raise MapParseError("components go on the lines after 'map:'", lineno, col)
            continue
        if not in_map:
            raise MapParseError("expected 'vars:' or 'map:' declaration", lineno, len(raw) - len(raw.lstrip()) + 1)
        offset = len(line) - len(line.lstrip())
        try:
            comps.append(parse_polynomial(line.strip(), VariableContext(names, order), lineno))
        except MapParseError as err:
            raise MapParseError(err.message, lineno, err.column + offset) from None
    if names is None:
        raise MapParseError("missing 'vars:' declaration", 1, 1)
    if not comps:
        raise MapParseError("map has no components", 1, 1)
    if not rectangular and len(comps) != len(names):
        raise MapParseError(f"arity mismatch: {len(comps)} components for {len(names)} variables", 1, 1)
    if targets is None:
        targets = default_targets(len(comps), names)
    elif len(targets) != len(comps):
        raise MapParseError(f"{len(targets)} target names for {len(comps)} components", 1, 1)
    try:
        return PolyMap(VariableContext(names, order), targets, tuple(comps), name)
    except ValueError as err:
        raise MapParseError(str(err), 1, 1) from None


def render_map(F: PolyMap) -> str:
    lines = []
    if F.name:
        lines.append(f"name: {F.name}")
    lines.append("vars: " + " ".join(F.source.names))
    lines.append("targets: " + " ".join(F.targets))
    lines.append("map:")
    lines.extend(render_polynomial(c) for c in F.components)
    return "\n".join(lines) + "\n"
