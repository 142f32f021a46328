"""Recursive-descent parser for the model language.

The grammar (``//`` starts a line comment):

    model     := (channel | vardecl | procdecl)*
    channel   := "channel" ["int"] IDENT ("," IDENT)* ";"
    vardecl   := ["wrap"] "int" IDENT ["=" INT] ("," IDENT ["=" INT])* ";"
    procdecl  := ["property"] "process" IDENT "{"
                     vardecl*
                     "state" IDENT ("," IDENT)* ";"
                     "init" IDENT ";"
                     ["accept" IDENT ("," IDENT)* ";"]
                     ["trans" [trans ("," trans)*] ";"]
                 "}"
    trans     := IDENT "->" IDENT "{" [guard] [syncc] [effect] "}"
    guard     := "guard" expr ";"
    syncc     := "sync" IDENT ("!" [expr] | "?" [IDENT]) ";"
    effect    := "effect" IDENT "=" expr ("," IDENT "=" expr)* ";"

Expressions use C-like precedence, loosest first:
``||``, ``&&``, comparisons, ``+ -``, ``* mod``, unary ``!``.
"""

from __future__ import annotations

from .model import (
    Assign,
    BinOp,
    ChannelDecl,
    Expr,
    IntLit,
    Model,
    Name,
    NotOp,
    Process,
    RECEIVE,
    SEND,
    SyncAction,
    Transition,
    VarDecl,
)

KEYWORDS = frozenset(
    {
        "channel",
        "int",
        "wrap",
        "process",
        "property",
        "state",
        "init",
        "accept",
        "trans",
        "guard",
        "sync",
        "effect",
        "mod",
    }
)

_TWO_CHAR = ("->", "==", "!=", "<=", ">=", "&&", "||")
_ONE_CHAR = "{}();,!?=<>+-*"


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class _Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind: str, text: str, line: int, col: int):
        self.kind = kind  # "ident" | "int" | "punct" | "eof"
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self) -> str:
        return f"_Token({self.kind}, {self.text!r})"


def _tokenize(text: str) -> list[_Token]:
    out: list[_Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if text[i : i + 2] in _TWO_CHAR:
            out.append(_Token("punct", text[i : i + 2], line, col))
            i += 2
            col += 2
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            out.append(_Token("int", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            out.append(_Token("ident", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c in _ONE_CHAR:
            out.append(_Token("punct", c, line, col))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {c!r}", line, col)
    out.append(_Token("eof", "", line, col))
    return out


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    # -- token plumbing ----------------------------------------------------

    @property
    def cur(self) -> _Token:
        return self.tokens[self.pos]

    def error(self, message: str) -> ParseError:
        t = self.cur
        got = "end of input" if t.kind == "eof" else repr(t.text)
        return ParseError(f"{message}, got {got}", t.line, t.col)

    def accept(self, text: str) -> bool:
        t = self.cur
        if t.text == text and t.kind in ("punct", "ident"):
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            raise self.error(f"expected {text!r}")

    def ident(self, what: str = "identifier") -> str:
        t = self.cur
        if t.kind != "ident" or t.text in KEYWORDS:
            raise self.error(f"expected {what}")
        self.pos += 1
        return t.text

    def intlit(self) -> int:
        t = self.cur
        if t.kind != "int":
            raise self.error("expected integer literal")
        self.pos += 1
        return int(t.text)

    def at_keyword(self, kw: str) -> bool:
        return self.cur.kind == "ident" and self.cur.text == kw

    # -- expressions --------------------------------------------------------

    def expression(self) -> Expr:
        return self._or()

    def _or(self) -> Expr:
        e = self._and()
        while self.accept("||"):
            e = BinOp("||", e, self._and())
        return e

    def _and(self) -> Expr:
        e = self._cmp()
        while self.accept("&&"):
            e = BinOp("&&", e, self._cmp())
        return e

    def _cmp(self) -> Expr:
        e = self._add()
        while True:
            for op in ("==", "!=", "<=", ">=", "<", ">"):
                if self.accept(op):
                    e = BinOp(op, e, self._add())
                    break
            else:
                return e

    def _add(self) -> Expr:
        e = self._mul()
        while True:
            if self.accept("+"):
                e = BinOp("+", e, self._mul())
            elif self.accept("-"):
                e = BinOp("-", e, self._mul())
            else:
                return e

    def _mul(self) -> Expr:
        e = self._unary()
        while True:
            if self.accept("*"):
                e = BinOp("*", e, self._unary())
            elif self.at_keyword("mod"):
                self.pos += 1
                e = BinOp("mod", e, self._unary())
            else:
                return e

    def _unary(self) -> Expr:
        if self.accept("!"):
            return NotOp(self._unary())
        return self._primary()

    def _primary(self) -> Expr:
        t = self.cur
        if t.kind == "int":
            self.pos += 1
            return IntLit(int(t.text))
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.pos += 1
            return Name(t.text)
        if self.accept("("):
            e = self.expression()
            self.expect(")")
            return e
        raise self.error("expected expression")

    # -- declarations --------------------------------------------------------

    def var_decl_line(self, wrap: bool) -> list[VarDecl]:
        self.expect("int")
        out = []
        while True:
            name = self.ident("variable name")
            init = 0
            if self.accept("="):
                init = self.intlit()
            out.append(VarDecl(name, init, wrap))
            if not self.accept(","):
                break
        self.expect(";")
        return out

    def channel_line(self) -> list[ChannelDecl]:
        arity = 1 if self.accept("int") else 0
        out = []
        while True:
            out.append(ChannelDecl(self.ident("channel name"), arity))
            if not self.accept(","):
                break
        self.expect(";")
        return out

    def name_list(self) -> tuple[str, ...]:
        names = [self.ident("state name")]
        while self.accept(","):
            names.append(self.ident("state name"))
        self.expect(";")
        return tuple(names)

    def sync_action(self) -> SyncAction:
        channel = self.ident("channel name")
        if self.accept("!"):
            payload = None
            if not (self.cur.kind == "punct" and self.cur.text == ";"):
                payload = self.expression()
            return SyncAction(channel, SEND, payload=payload)
        if self.accept("?"):
            target = None
            if not (self.cur.kind == "punct" and self.cur.text == ";"):
                target = self.ident("variable name")
            return SyncAction(channel, RECEIVE, target=target)
        raise self.error("expected '!' or '?' after channel name")

    def transition(self) -> Transition:
        src = self.ident("state name")
        self.expect("->")
        dst = self.ident("state name")
        self.expect("{")
        guard = None
        sync = None
        effects: tuple[Assign, ...] = ()
        if self.accept("guard"):
            guard = self.expression()
            self.expect(";")
        if self.accept("sync"):
            sync = self.sync_action()
            self.expect(";")
        if self.accept("effect"):
            assigns = []
            while True:
                target = self.ident("variable name")
                self.expect("=")
                assigns.append(Assign(target, self.expression()))
                if not self.accept(","):
                    break
            self.expect(";")
            effects = tuple(assigns)
        self.expect("}")
        return Transition(src, dst, guard, sync, effects)

    def process(self) -> Process:
        self.expect("process")
        name = self.ident("process name")
        self.expect("{")
        local_vars: list[VarDecl] = []
        while True:
            if self.at_keyword("wrap"):
                self.pos += 1
                local_vars.extend(self.var_decl_line(wrap=True))
            elif self.at_keyword("int"):
                local_vars.extend(self.var_decl_line(wrap=False))
            else:
                break
        self.expect("state")
        states = self.name_list()
        self.expect("init")
        init = self.ident("state name")
        self.expect(";")
        accepting: tuple[str, ...] = ()
        if self.accept("accept"):
            accepting = self.name_list()
        transitions: list[Transition] = []
        if self.accept("trans"):
            if not self.accept(";"):
                while True:
                    transitions.append(self.transition())
                    if not self.accept(","):
                        break
                self.expect(";")
        self.expect("}")
        return Process(name, states, init, accepting, tuple(local_vars), tuple(transitions))

    def model(self) -> Model:
        channels: list[ChannelDecl] = []
        globals_: list[VarDecl] = []
        processes: list[Process] = []
        property_process: str | None = None
        while self.cur.kind != "eof":
            if self.accept("channel"):
                channels.extend(self.channel_line())
            elif self.at_keyword("wrap"):
                self.pos += 1
                globals_.extend(self.var_decl_line(wrap=True))
            elif self.at_keyword("int"):
                globals_.extend(self.var_decl_line(wrap=False))
            elif self.at_keyword("property"):
                self.pos += 1
                p = self.process()
                if property_process is not None:
                    raise self.error("only one property process is allowed")
                property_process = p.name
                processes.append(p)
            elif self.at_keyword("process"):
                processes.append(self.process())
            else:
                raise self.error("expected a channel, variable, or process declaration")
        return Model(tuple(channels), tuple(globals_), tuple(processes), property_process)


def parse_model(text: str) -> Model:
    """Parse a full model.  Raises ParseError with line:col on bad input."""
    return _Parser(text).model()


def parse_expression(text: str) -> Expr:
    """Parse a standalone expression (used by the skeleton format too)."""
    p = _Parser(text)
    e = p.expression()
    if p.cur.kind != "eof":
        raise p.error("unexpected trailing input after expression")
    return e
