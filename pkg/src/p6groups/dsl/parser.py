"""Lexer and recursive-descent parser for ``.p6`` presentation files.

A file is a sequence of family blocks, optionally preceded by a
``convention`` line.  Statements end at a newline or ``;``; newlines inside
parentheses or brackets are ignored.  Errors are collected (with recovery
at the next statement) and raised together as :class:`DslSyntaxError`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import DslSyntaxError
from . import ast as A

MAX_DIAGNOSTICS = 20

KEYWORDS = {
    "family", "label", "rank", "gens", "param", "pow", "comm", "def", "when", "else",
    "convention", "mod", "and", "or", "not", "first", "let", "in",
}
STATEMENTS = {"gens", "param", "pow", "comm", "def", "when"}
BUILTIN_NAMES = {"p", "nu", "omega"}
FUNCTIONS = {"square": 1}

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<nl>\n)
  | (?P<int>[0-9]+)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<str>"[^"\n]*")
  | (?P<op>\.\.|\+\+|==|!=|<=|>=|[-+*/^<>()\[\]{},:;=])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # int, name, str, op, nl, eof
    text: str
    line: int
    col: int

    @property
    def loc(self) -> A.Loc:
        return A.Loc(self.line, self.col)


@dataclass(frozen=True)
class Diagnostic:
    line: int
    col: int
    message: str

    def __str__(self):
        return f"line {self.line}, column {self.col}: {self.message}"


class _Abort(Exception):
    pass


def tokenize(text: str, diags: list[Diagnostic]) -> list[Token]:
    out: list[Token] = []
    depth = 0
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            diags.append(Diagnostic(line, col, f"unexpected character {text[pos]!r}"))
            pos += 1
            continue
        kind = m.lastgroup
        s = m.group()
        pos = m.end()
        if kind == "nl":
            if depth == 0:
                out.append(Token("nl", "\n", line, col))
            line += 1
            line_start = pos
            continue
        if kind in ("ws", "comment"):
            continue
        if kind == "op":
            if s in "([":
                depth += 1
            elif s in ")]" and depth > 0:
                depth -= 1
        if kind == "str":
            s = s[1:-1]
        out.append(Token(kind, s, line, col))
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


class Parser:
    def __init__(self, text: str):
        self.diags: list[Diagnostic] = []
        self.toks = tokenize(text, self.diags)
        self.i = 0

    # -- token helpers ---------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str, kind: str | None = None) -> bool:
        t = self.tok
        return t.text == text and (kind is None or t.kind == kind) and t.kind not in ("str", "eof")

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.i += 1
        return t

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        self.diags.append(Diagnostic(tok.line, tok.col, message))
        if len(self.diags) >= MAX_DIAGNOSTICS:
            raise _Abort
        raise SyntaxError(message)

    def note(self, message: str, loc: A.Loc | None):
        """Record a semantic diagnostic without unwinding the parse."""
        line, col = (loc.line, loc.col) if loc else (self.tok.line, self.tok.col)
        self.diags.append(Diagnostic(line, col, message))
        if len(self.diags) >= MAX_DIAGNOSTICS:
            raise _Abort

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self._show(self.tok)}")
        return self.advance()

    def expect_kind(self, kind: str, what: str) -> Token:
        if self.tok.kind != kind:
            self.error(f"expected {what}, found {self._show(self.tok)}")
        return self.advance()

    def expect_int(self) -> int:
        return int(self.expect_kind("int", "an integer").text)

    @staticmethod
    def _show(t: Token) -> str:
        return {"nl": "end of line", "eof": "end of input"}.get(t.kind, repr(t.text))

    def skip_separators(self):
        while self.tok.kind == "nl" or self.at(";"):
            self.advance()

    def end_statement(self):
        if self.tok.kind in ("nl", "eof") or self.at(";") or self.at("}") or self.at("{"):
            return
        self.error(f"unexpected {self._show(self.tok)} after statement")

    def recover(self):
        while self.tok.kind not in ("nl", "eof") and not self.at(";"):
            self.advance()

    # -- file level --------------------------------------------------------

    def parse_file(self) -> list[A.FamilySpec]:
        specs: list[A.FamilySpec] = []
        conv = A.Convention()
        try:
            while True:
                self.skip_separators()
                if self.tok.kind == "eof":
                    break
                try:
                    if self.at("convention", "name"):
                        conv = self.parse_convention()
                    elif self.at("family", "name"):
                        spec = self.parse_family(conv)
                        if spec is not None:
                            specs.append(spec)
                    else:
                        self.error(f"expected 'family' or 'convention', found {self._show(self.tok)}")
                except SyntaxError:
                    self.recover()
        except _Abort:
            pass
        if self.diags:
            diags = sorted(self.diags, key=lambda d: (d.line, d.col))
            raise DslSyntaxError(diags[:MAX_DIAGNOSTICS])
        return specs

    def parse_convention(self) -> A.Convention:
        self.advance()
        fields = {}
        while self.tok.kind == "name":
            key = self.advance()
            self.expect("=")
            parts = [self.expect_kind("name", "a value").text]
            while self.at("-") and self.peek().kind == "name":
                self.advance()
                parts.append(self.advance().text)
            fields[key.text] = ("-".join(parts), key)
        self.end_statement()
        bracket, btok = fields.pop("bracket", ("left-normed", None))
        order, otok = fields.pop("order", ("ij", None))
        for key, (_, t) in fields.items():
            self.note(f"unknown convention field {key!r}", t.loc)
        if bracket != "left-normed":
            self.note(f"unsupported bracket convention {bracket!r}", btok.loc)
        if order not in ("ij", "ji"):
            self.note(f"order must be 'ij' or 'ji', not {order!r}", otok.loc)
            order = "ij"
        return A.Convention(bracket, order)

    def parse_family(self, conv: A.Convention) -> A.FamilySpec | None:
        start = self.advance()
        family = self.expect_int()
        label = ""
        if self.at("label", "name"):
            self.advance()
            label = self.expect_kind("str", "a quoted label").text
        self.expect("rank")
        rank = self.expect_int()
        body = _Body(family, label, rank, conv, start.loc)
        if not 1 <= family <= 43:
            self.note(f"family index {family} outside 1..43", start.loc)
        braced = False
        while True:
            try:
                self.skip_separators()
                t = self.tok
                if t.kind == "eof" or self.at("family", "name") or self.at("convention", "name"):
                    if braced:
                        self.error("missing '}' before end of family block")
                    break
                if self.at("{"):
                    if braced:
                        self.error("nested '{'")
                    braced = True
                    self.advance()
                    continue
                if self.at("}"):
                    if not braced:
                        self.error("unmatched '}'")
                    self.advance()
                    self.end_statement()
                    break
                if t.kind == "name" and t.text in STATEMENTS:
                    getattr(self, f"stmt_{t.text}")(body)
                    self.end_statement()
                else:
                    self.error(f"expected a statement, found {self._show(t)}")
            except SyntaxError:
                self.recover()
        return body.finish(self)

    # -- statements --------------------------------------------------------

    def stmt_gens(self, body: _Body):
        tok = self.advance()
        if body.gens_loc is not None:
            self.note("duplicate 'gens' statement", tok.loc)
        body.gens_loc = tok.loc
        while True:
            first = self.expect_kind("name", "a generator name")
            names = [first.text]
            if self.at(".."):
                self.advance()
                last = self.expect_kind("name", "a generator name")
                names = _expand_range(first.text, last.text)
                if names is None:
                    self.error(f"bad generator range {first.text}..{last.text}", first)
            for g in names:
                if not re.fullmatch(r"[ab][1-9][0-9]*", g):
                    self.note(f"generator names must look like a<i> or b<i>, got {g!r}", first.loc)
                elif g in body.gens:
                    self.note(f"generator {g} declared twice", first.loc)
                else:
                    body.gens.append(g)
            if not self.at(","):
                break
            self.advance()

    def stmt_param(self, body: _Body):
        tok = self.advance()
        if self.at("("):
            self.advance()
            names = [self.expect_kind("name", "a parameter name").text]
            while self.at(","):
                self.advance()
                names.append(self.expect_kind("name", "a parameter name").text)
            self.expect(")")
        else:
            names = [self.expect_kind("name", "a parameter name").text]
        self.expect("in")
        values = self.expr()
        for n in names:
            if n in KEYWORDS or n in BUILTIN_NAMES or n in FUNCTIONS or re.fullmatch(r"[ab][0-9]+", n):
                self.note(f"{n!r} cannot be used as a parameter name", tok.loc)
            elif n in body.param_names():
                self.note(f"parameter {n} declared twice", tok.loc)
        body.check_expr(self, values, set(body.param_names()))
        body.params.append(A.ParamDecl(tuple(names), values, tok.loc))

    def stmt_when(self, body: _Body):
        tok = self.advance()
        cond = self.expr()
        if body.condition is not None:
            self.note("duplicate block condition", tok.loc)
        body.check_expr(self, cond, set())
        body.condition = cond

    def stmt_pow(self, body: _Body):
        tok = self.advance()
        g = self.expect_kind("name", "a generator")
        self.expect("^")
        pt = self.expect_kind("name", "'p'")
        if pt.text != "p":
            self.error("power relations must have the form g^p = word", pt)
        self.expect("=")
        word = self.word()
        body.powers.append(A.PowerRel(g.text, word, tok.loc))

    def stmt_comm(self, body: _Body):
        tok = self.advance()
        self.expect("[")
        x = self.expect_kind("name", "a generator")
        self.expect(",")
        y = self.expect_kind("name", "a generator")
        self.expect("]")
        self.expect("=")
        word = self.word()
        body.comms.append(A.CommRel(x.text, y.text, word, tok.loc))

    def stmt_def(self, body: _Body):
        tok = self.advance()
        g = self.expect_kind("name", "a generator")
        self.expect("=")
        word = self.word()
        body.defs.append(A.DefRel(g.text, word, tok.loc))

    # -- words -------------------------------------------------------------

    def word(self) -> A.Word:
        if self.tok.kind == "int" and self.tok.text == "1":
            self.advance()
            return ()
        letters = [self.letter()]
        while self.at("*"):
            self.advance()
            letters.append(self.letter())
        return tuple(letters)

    def letter(self) -> tuple[str, A.Expr]:
        g = self.expect_kind("name", "a generator")
        if g.text in KEYWORDS:
            self.error(f"expected a generator, found {g.text!r}", g)
        if self.at("^"):
            self.advance()
            return (g.text, self.exponent())
        return (g.text, A.Num(1, g.loc))

    def exponent(self) -> A.Expr:
        t = self.tok
        if self.at("-"):
            self.advance()
            inner = self.exponent()
            if isinstance(inner, A.Num):
                return A.Num(-inner.value, t.loc)
            return A.Unary("-", inner, t.loc)
        if t.kind == "int":
            self.advance()
            return A.Num(int(t.text), t.loc)
        if t.kind == "name" and t.text not in KEYWORDS:
            self.advance()
            return A.Name(t.text, t.loc)
        if self.at("("):
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        self.error(f"expected an exponent, found {self._show(t)}")

    # -- expressions -------------------------------------------------------

    def expr(self) -> A.Expr:
        e = self.or_expr()
        if self.at("when", "name"):
            t = self.advance()
            cond = self.or_expr()
            self.expect("else")
            other = self.expr()
            return A.Choice(e, cond, other, t.loc)
        return e

    def or_expr(self) -> A.Expr:
        e = self.and_expr()
        while self.at("or", "name"):
            t = self.advance()
            e = A.Binary("or", e, self.and_expr(), t.loc)
        return e

    def and_expr(self) -> A.Expr:
        e = self.not_expr()
        while self.at("and", "name"):
            t = self.advance()
            e = A.Binary("and", e, self.not_expr(), t.loc)
        return e

    def not_expr(self) -> A.Expr:
        if self.at("not", "name"):
            t = self.advance()
            return A.Unary("not", self.not_expr(), t.loc)
        return self.comparison()

    def comparison(self) -> A.Expr:
        e = self.concat()
        if self.tok.kind == "op" and self.tok.text in ("==", "!=", "<", "<=", ">", ">="):
            t = self.advance()
            e = A.Binary(t.text, e, self.concat(), t.loc)
            if self.tok.kind == "op" and self.tok.text in ("==", "!=", "<", "<=", ">", ">="):
                self.error("comparisons cannot be chained")
        return e

    def concat(self) -> A.Expr:
        e = self.range_expr()
        while self.at("++", "op"):
            t = self.advance()
            e = A.Binary("++", e, self.range_expr(), t.loc)
        return e

    def range_expr(self) -> A.Expr:
        e = self.additive()
        if self.at("..", "op"):
            t = self.advance()
            return A.Range(e, self.additive(), t.loc)
        return e

    def additive(self) -> A.Expr:
        e = self.term()
        while self.tok.kind == "op" and self.tok.text in ("+", "-"):
            t = self.advance()
            e = A.Binary(t.text, e, self.term(), t.loc)
        return e

    def term(self) -> A.Expr:
        e = self.unary()
        while (self.tok.kind == "op" and self.tok.text in ("*", "/")) or self.at("mod", "name"):
            t = self.advance()
            e = A.Binary(t.text, e, self.unary(), t.loc)
        return e

    def unary(self) -> A.Expr:
        if self.at("-", "op"):
            t = self.advance()
            inner = self.unary()
            if isinstance(inner, A.Num):
                return A.Num(-inner.value, t.loc)
            return A.Unary("-", inner, t.loc)
        return self.power()

    def power(self) -> A.Expr:
        e = self.atom()
        if self.at("^", "op"):
            t = self.advance()
            return A.Binary("^", e, self.unary(), t.loc)
        return e

    def atom(self) -> A.Expr:
        t = self.tok
        if t.kind == "int":
            self.advance()
            return A.Num(int(t.text), t.loc)
        if t.kind == "name":
            if t.text == "first":
                self.advance()
                self.expect("{")
                elem = self.expr()
                self.expect(":")
                return self.comprehension(elem, t.loc, first=True)
            if t.text in KEYWORDS:
                self.error(f"unexpected keyword {t.text!r}")
            self.advance()
            if self.at("(", "op"):
                self.advance()
                args = [self.expr()]
                while self.at(","):
                    self.advance()
                    args.append(self.expr())
                self.expect(")")
                return A.Call(t.text, tuple(args), t.loc)
            return A.Name(t.text, t.loc)
        if self.at("(", "op"):
            self.advance()
            items = [self.expr()]
            while self.at(","):
                self.advance()
                items.append(self.expr())
            self.expect(")")
            return items[0] if len(items) == 1 else A.TupleExpr(tuple(items), t.loc)
        if self.at("{", "op"):
            self.advance()
            if self.at("}"):
                self.advance()
                return A.ListExpr((), t.loc)
            first = self.expr()
            if self.at(":"):
                self.advance()
                return self.comprehension(first, t.loc)
            items = [first]
            while self.at(","):
                self.advance()
                items.append(self.expr())
            self.expect("}")
            return A.ListExpr(tuple(items), t.loc)
        self.error(f"expected an expression, found {self._show(t)}")

    def comprehension(self, elem: A.Expr, loc: A.Loc, first: bool = False) -> A.Comprehension:
        clauses = [self.clause()]
        while self.at(","):
            self.advance()
            clauses.append(self.clause())
        self.expect("}")
        return A.Comprehension(elem, tuple(clauses), first, loc)

    def _target_ahead(self) -> int:
        """Length of a binding target at the cursor followed by 'in', else 0."""
        t = self.tok
        if t.kind == "name" and t.text not in KEYWORDS and self.peek().text == "in":
            return 1
        if self.at("("):
            k = 1
            while True:
                if self.peek(k).kind != "name":
                    return 0
                if self.peek(k + 1).text == ",":
                    k += 2
                    continue
                if self.peek(k + 1).text == ")" and self.peek(k + 2).text == "in":
                    return k + 2
                return 0
        return 0

    def target(self) -> tuple[str, ...]:
        if self.at("("):
            self.advance()
            names = [self.expect_kind("name", "a name").text]
            while self.at(","):
                self.advance()
                names.append(self.expect_kind("name", "a name").text)
            self.expect(")")
            return tuple(names)
        return (self.expect_kind("name", "a name").text,)

    def clause(self) -> A.Clause:
        if self.at("let", "name"):
            self.advance()
            target = self.target()
            self.expect("=")
            return A.LetClause(target, self.expr())
        if self._target_ahead():
            target = self.target()
            self.expect("in")
            return A.ForClause(target, self.expr())
        return A.FilterClause(self.expr())


def _expand_range(a: str, b: str) -> list[str] | None:
    ma, mb = re.fullmatch(r"([ab])([0-9]+)", a), re.fullmatch(r"([ab])([0-9]+)", b)
    if not ma or not mb or ma.group(1) != mb.group(1):
        return None
    lo, hi = int(ma.group(2)), int(mb.group(2))
    if lo > hi:
        return None
    return [f"{ma.group(1)}{k}" for k in range(lo, hi + 1)]


class _Body:
    """Statements of one family block, checked once the block is complete."""

    def __init__(self, family, label, rank, conv, loc):
        self.family, self.label, self.rank, self.conv, self.loc = family, label, rank, conv, loc
        self.gens: list[str] = []
        self.gens_loc = None
        self.params: list[A.ParamDecl] = []
        self.condition = None
        self.powers: list[A.PowerRel] = []
        self.comms: list[A.CommRel] = []
        self.defs: list[A.DefRel] = []

    def param_names(self) -> list[str]:
        return [n for d in self.params for n in d.names]

    def check_expr(self, parser: Parser, e: A.Expr, bound: set[str]):
        for name, loc in _free_names(e, bound | BUILTIN_NAMES):
            parser.note(f"undeclared name {name!r}", loc)

    def finish(self, parser: Parser) -> A.FamilySpec | None:
        note = parser.note
        if self.gens_loc is None:
            note("family block has no 'gens' statement", self.loc)
        gens = set(self.gens)
        params = set(self.param_names())

        def check_word(word, loc, allowed=None):
            for g, e in word:
                if g not in gens:
                    note(f"undeclared generator {g}", loc)
                elif allowed is not None and g not in allowed:
                    note(f"generator {g} is not allowed here", loc)
                for name, nloc in _free_names(e, params | BUILTIN_NAMES):
                    note(f"undeclared name {name!r}", nloc or loc)

        seen_pow = set()
        for r in self.powers:
            if r.gen not in gens:
                note(f"undeclared generator {r.gen}", r.loc)
            if r.gen in seen_pow:
                note(f"duplicate power relation for {r.gen}", r.loc)
            seen_pow.add(r.gen)
            check_word(r.word, r.loc)
        seen_pair = set()
        for r in self.comms:
            for g in (r.left, r.right):
                if g not in gens:
                    note(f"undeclared generator {g}", r.loc)
            if r.left == r.right:
                note(f"commutator [{r.left},{r.right}] has equal entries", r.loc)
            key = frozenset((r.left, r.right))
            if key in seen_pair:
                note(f"duplicate commutator relation for the pair {r.left}, {r.right}", r.loc)
            seen_pair.add(key)
            check_word(r.word, r.loc)
        defined = set()
        betas = {g for g in gens if g.startswith("b")}
        for r in self.defs:
            if not r.gen.startswith("a") or r.gen not in gens:
                note(f"definitions must define a declared a-generator, not {r.gen}", r.loc)
            if r.gen in defined:
                note(f"generator {r.gen} defined twice", r.loc)
            defined.add(r.gen)
            check_word(r.word, r.loc, allowed=betas)
        if self.rank == 6 and (betas or self.defs):
            note("rank-6 families use a-generators only", self.loc)
        return A.FamilySpec(
            family=self.family, label=self.label, rank=self.rank,
            generators=tuple(self.gens), params=tuple(self.params),
            condition=self.condition, powers=tuple(self.powers), comms=tuple(self.comms),
            defs=tuple(self.defs), convention=self.conv, loc=self.loc)


def _free_names(e: A.Expr, bound: set[str]):
    """(name, loc) for every name used in ``e`` that ``bound`` does not cover."""
    if isinstance(e, A.Name):
        if e.id not in bound:
            yield e.id, e.loc
    elif isinstance(e, A.Num):
        return
    elif isinstance(e, A.Unary):
        yield from _free_names(e.operand, bound)
    elif isinstance(e, (A.Binary,)):
        yield from _free_names(e.left, bound)
        yield from _free_names(e.right, bound)
    elif isinstance(e, A.Call):
        if e.func not in FUNCTIONS:
            yield e.func, e.loc
        elif len(e.args) != FUNCTIONS[e.func]:
            yield f"{e.func}/{len(e.args)}", e.loc
        for a in e.args:
            yield from _free_names(a, bound)
    elif isinstance(e, (A.TupleExpr, A.ListExpr)):
        for a in e.items:
            yield from _free_names(a, bound)
    elif isinstance(e, A.Range):
        yield from _free_names(e.lo, bound)
        yield from _free_names(e.hi, bound)
    elif isinstance(e, A.Choice):
        for a in (e.then, e.cond, e.other):
            yield from _free_names(a, bound)
    elif isinstance(e, A.Comprehension):
        inner = set(bound)
        for c in e.clauses:
            if isinstance(c, A.ForClause):
                yield from _free_names(c.source, inner)
                inner |= set(c.target)
            elif isinstance(c, A.LetClause):
                yield from _free_names(c.value, inner)
                inner |= set(c.target)
            else:
                yield from _free_names(c.cond, inner)
        yield from _free_names(e.elem, inner)


def parse(text: str) -> list[A.FamilySpec]:
    """Parse DSL source into family specs; raises DslSyntaxError with diagnostics."""
    return Parser(text).parse_file()
