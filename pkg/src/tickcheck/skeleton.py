"""Timing-annotated process skeletons.

A skeleton is a transition system whose edges may carry timing triggers
(``within``/``inwindow``/``afterdelay`` a named timer) and timer-arming
clauses (``set t LB UB``).  It compiles to plain untimed models through two
different clock encodings (see generate.py); this module owns the AST, the
line-oriented text format, and the structural validation both encodings
depend on.

Validation enforces a strict location discipline that makes the two
encodings interchangeable: a timer is *consumed* at a location if some edge
out of it triggers on that timer, every edge entering a location must arm
exactly the timers consumed there (no more, no fewer), and the initial
location consumes nothing.  Timers are therefore armed exactly on entry to
the location that uses them, which pins down when they count down in both
encodings.

Format (one declaration per line, ``#`` comments)::

    shared NAME = INT
    process NAME init LOC
    timer NAME
    var NAME = INT
    edge SRC -> DST [within T|inwindow T|afterdelay T] [set T LB UB]*
                    [guard EXPR] [effect NAME = EXPR, ...]

``timer``/``var``/``edge`` lines belong to the most recent ``process``.
Bounds are nonnegative integers, ``inf`` (upper bound only), or variable
names; ``afterdelay`` timers must be armed with structurally equal bounds.
Expressions may read a timer by name, which denotes its remaining upper
count at evaluation time.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .model import Assign, Expr, VarDecl, expr_names
from .parser import KEYWORDS, ParseError, parse_expression

__all__ = [
    "INFINITE",
    "TimerSet",
    "Trigger",
    "SkeletonEdge",
    "SkeletonProcess",
    "TickConfig",
    "TimedSkeleton",
    "ValidationError",
    "parse_skeleton",
    "validate_skeleton",
]

INFINITE = "inf"

TRIGGER_KINDS = ("within", "inwindow", "afterdelay")

_FORMAT_WORDS = frozenset(
    ("process", "init", "timer", "var", "shared", "edge", "set", "guard", "effect")
    + TRIGGER_KINDS
    + (INFINITE,)
)

# identifiers the generators claim for themselves
_RESERVED_EXACT = frozenset({"Tick", "now"})
_RESERVED_PREFIXES = ("ub_", "lb_", "chan_", "tick_", "tick")


class ValidationError(Exception):
    """A structurally ill-formed skeleton."""


@dataclass(frozen=True)
class TimerSet:
    """Arm ``timer`` with bounds; each bound is an int, a variable name, or
    INFINITE (upper bound only)."""

    timer: str
    lb: int | str
    ub: int | str


@dataclass(frozen=True)
class Trigger:
    kind: str  # within | inwindow | afterdelay
    timer: str


@dataclass(frozen=True)
class SkeletonEdge:
    src: str
    dst: str
    trigger: Trigger | None = None
    sets: tuple[TimerSet, ...] = ()
    guard: Expr | None = None
    effects: tuple[Assign, ...] = ()


@dataclass(frozen=True)
class SkeletonProcess:
    name: str
    init: str
    timers: tuple[str, ...] = ()
    locals: tuple[VarDecl, ...] = ()
    edges: tuple[SkeletonEdge, ...] = ()

    @property
    def locations(self) -> tuple[str, ...]:
        seen = {self.init: None}
        for e in self.edges:
            seen.setdefault(e.src, None)
            seen.setdefault(e.dst, None)
        return tuple(seen)

    def consumed_at(self, loc: str) -> tuple[str, ...]:
        """Timers some edge out of ``loc`` triggers on, in declaration order."""
        used = {e.trigger.timer for e in self.edges if e.src == loc and e.trigger}
        return tuple(t for t in self.timers if t in used)


@dataclass(frozen=True)
class TickConfig:
    """Knobs shared by both encodings: ``emit_now`` forces the running clock
    variable even when nothing reads it, ``maximal`` is its wrap modulus,
    ``infinity`` the sentinel an inactive upper timer parks at."""

    emit_now: bool = False
    maximal: int = 65535
    infinity: int = 65535


@dataclass(frozen=True)
class TimedSkeleton:
    processes: tuple[SkeletonProcess, ...]
    shared: tuple[VarDecl, ...] = ()
    config: TickConfig = field(default_factory=TickConfig)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"->|==|!=|<=|>=|&&|\|\||[A-Za-z_][A-Za-z0-9_]*|[0-9]+|[-+*/()!<>=,]"
)
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")


def _tokens(line: str, lineno: int) -> list[str]:
    out = []
    pos = 0
    for m in _TOKEN_RE.finditer(line):
        if line[pos : m.start()].strip():
            raise ParseError(
                f"unexpected character {line[pos:m.start()].strip()[0]!r}",
                lineno,
                pos + 1,
            )
        out.append(m.group(0))
        pos = m.end()
    if line[pos:].strip():
        raise ParseError(
            f"unexpected character {line[pos:].strip()[0]!r}", lineno, pos + 1
        )
    return out


class _Line:
    """Cursor over one line's tokens."""

    def __init__(self, toks: list[str], lineno: int):
        self.toks = toks
        self.i = 0
        self.lineno = lineno

    def peek(self) -> str | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self, what: str) -> str:
        t = self.peek()
        if t is None:
            raise ParseError(f"expected {what} at end of line", self.lineno, 1)
        self.i += 1
        return t

    def ident(self, what: str) -> str:
        t = self.next(what)
        if not _IDENT_RE.match(t) or t in _FORMAT_WORDS:
            raise ParseError(f"expected {what}, got {t!r}", self.lineno, 1)
        return t

    def expect(self, text: str) -> None:
        t = self.next(repr(text))
        if t != text:
            raise ParseError(f"expected {text!r}, got {t!r}", self.lineno, 1)

    def done(self) -> bool:
        return self.i >= len(self.toks)


def _expr_tokens(ln: _Line) -> list[str]:
    """Consume tokens until the next top-level clause keyword or line end."""
    out = []
    while not ln.done() and ln.peek() not in _FORMAT_WORDS:
        out.append(ln.next("expression"))
    return out


def _parse_clause_expr(toks: list[str], lineno: int) -> Expr:
    if not toks:
        raise ParseError("empty expression", lineno, 1)
    try:
        return parse_expression(" ".join(toks))
    except ParseError as e:
        raise ParseError(e.message, lineno, 1)


def _bound(tok: str, lineno: int) -> int | str:
    if tok.isdigit():
        return int(tok)
    if tok == INFINITE:
        return INFINITE
    if _IDENT_RE.match(tok) and tok not in _FORMAT_WORDS:
        return tok
    raise ParseError(f"expected a bound (integer, name, or inf), got {tok!r}", lineno, 1)


def _parse_edge(ln: _Line) -> SkeletonEdge:
    src = ln.ident("source location")
    ln.expect("->")
    dst = ln.ident("target location")
    trigger: Trigger | None = None
    sets: list[TimerSet] = []
    guard: Expr | None = None
    effects: list[Assign] = []
    while not ln.done():
        word = ln.next("clause keyword")
        if word in TRIGGER_KINDS:
            if trigger is not None:
                raise ParseError("more than one trigger on an edge", ln.lineno, 1)
            trigger = Trigger(word, ln.ident("timer name"))
        elif word == "set":
            timer = ln.ident("timer name")
            lb = _bound(ln.next("lower bound"), ln.lineno)
            ub = _bound(ln.next("upper bound"), ln.lineno)
            sets.append(TimerSet(timer, lb, ub))
        elif word == "guard":
            if guard is not None:
                raise ParseError("more than one guard clause", ln.lineno, 1)
            guard = _parse_clause_expr(_expr_tokens(ln), ln.lineno)
        elif word == "effect":
            toks = _expr_tokens(ln)
            # split on top-level commas; each piece is NAME = EXPR
            piece: list[str] = []
            depth = 0
            pieces = []
            for t in toks:
                if t == "(":
                    depth += 1
                elif t == ")":
                    depth -= 1
                if t == "," and depth == 0:
                    pieces.append(piece)
                    piece = []
                else:
                    piece.append(t)
            pieces.append(piece)
            for p in pieces:
                if len(p) < 3 or p[1] != "=" or not _IDENT_RE.match(p[0]):
                    raise ParseError(
                        "effect clause expects NAME = EXPR assignments", ln.lineno, 1
                    )
                effects.append(Assign(p[0], _parse_clause_expr(p[2:], ln.lineno)))
        else:
            raise ParseError(f"unknown edge clause {word!r}", ln.lineno, 1)
    return SkeletonEdge(src, dst, trigger, tuple(sets), guard, tuple(effects))


def parse_skeleton(text: str) -> TimedSkeleton:
    """Parse and validate the line-oriented skeleton format."""
    shared: list[VarDecl] = []
    procs: list[dict] = []  # name, init, timers, locals, edges

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        ln = _Line(_tokens(line, lineno), lineno)
        word = ln.next("declaration keyword")
        if word == "shared":
            name = ln.ident("variable name")
            ln.expect("=")
            init = ln.next("integer")
            if not init.isdigit():
                raise ParseError(f"expected integer, got {init!r}", lineno, 1)
            shared.append(VarDecl(name, int(init)))
        elif word == "process":
            name = ln.ident("process name")
            ln.expect("init")
            procs.append(
                {
                    "name": name,
                    "init": ln.ident("initial location"),
                    "timers": [],
                    "locals": [],
                    "edges": [],
                }
            )
        elif word in ("timer", "var", "edge"):
            if not procs:
                raise ParseError(f"{word!r} line before any process", lineno, 1)
            cur = procs[-1]
            if word == "timer":
                cur["timers"].append(ln.ident("timer name"))
            elif word == "var":
                name = ln.ident("variable name")
                ln.expect("=")
                init = ln.next("integer")
                if not init.isdigit():
                    raise ParseError(f"expected integer, got {init!r}", lineno, 1)
                cur["locals"].append(VarDecl(name, int(init)))
            else:
                cur["edges"].append(_parse_edge(ln))
        else:
            raise ParseError(f"unknown declaration {word!r}", lineno, 1)
        if not ln.done():
            raise ParseError(f"trailing input {ln.peek()!r}", lineno, 1)

    sk = TimedSkeleton(
        processes=tuple(
            SkeletonProcess(
                p["name"],
                p["init"],
                tuple(p["timers"]),
                tuple(p["locals"]),
                tuple(p["edges"]),
            )
            for p in procs
        ),
        shared=tuple(shared),
    )
    validate_skeleton(sk)
    return sk


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def _check_name(kind: str, name: str) -> None:
    if name in _RESERVED_EXACT or name in KEYWORDS or name in _FORMAT_WORDS:
        raise ValidationError(f"{kind} name {name!r} is reserved")
    for pre in _RESERVED_PREFIXES:
        if name.startswith(pre):
            raise ValidationError(
                f"{kind} name {name!r} uses reserved prefix {pre!r}"
            )


def validate_skeleton(sk: TimedSkeleton) -> None:
    """Raise ValidationError on the first structural problem found."""
    cfg = sk.config
    if cfg.maximal < 2:
        raise ValidationError("clock modulus must be at least 2")
    if cfg.infinity < 1 or cfg.infinity > 65535:
        raise ValidationError("infinity sentinel must be within 1..65535")
    if not sk.processes:
        raise ValidationError("skeleton declares no process")

    shared_names = set()
    for v in sk.shared:
        _check_name("shared variable", v.name)
        if v.name in shared_names:
            raise ValidationError(f"duplicate shared variable {v.name!r}")
        shared_names.add(v.name)
        if not 0 <= v.init <= 65535:
            raise ValidationError(f"initial value of {v.name!r} out of range")

    proc_names = set()
    for p in sk.processes:
        _check_name("process", p.name)
        if p.name in proc_names:
            raise ValidationError(f"duplicate process {p.name!r}")
        proc_names.add(p.name)
        _validate_process(sk, p)


def _validate_process(sk: TimedSkeleton, p: SkeletonProcess) -> None:
    cfg = sk.config
    shared_names = {v.name for v in sk.shared}
    local_names = set()
    for v in p.locals:
        _check_name("variable", v.name)
        if v.name in local_names or v.name in shared_names:
            raise ValidationError(f"{p.name}: variable {v.name!r} already declared")
        local_names.add(v.name)
        if not 0 <= v.init <= 65535:
            raise ValidationError(f"{p.name}: initial value of {v.name!r} out of range")
    timer_names = set()
    for t in p.timers:
        _check_name("timer", t)
        if t in timer_names or t in local_names or t in shared_names:
            raise ValidationError(f"{p.name}: timer {t!r} already declared")
        timer_names.add(t)
    for loc in p.locations:
        _check_name("location", loc)

    readable = shared_names | local_names | timer_names | {"now"}
    writable = shared_names | local_names
    set_somewhere = {s.timer for e in p.edges for s in e.sets}
    afterdelay_timers = {
        e.trigger.timer for e in p.edges if e.trigger and e.trigger.kind == "afterdelay"
    }

    def check_expr(e: Expr, where: str) -> None:
        for name in expr_names(e):
            if name not in readable:
                raise ValidationError(f"{p.name}: {where} reads undeclared {name!r}")

    for e in p.edges:
        where = f"edge {e.src} -> {e.dst}"
        if e.trigger:
            t = e.trigger.timer
            if t not in timer_names:
                raise ValidationError(f"{p.name}: {where} triggers on undeclared {t!r}")
            if t not in set_somewhere:
                raise ValidationError(
                    f"{p.name}: {where} triggers on {t!r}, which no edge sets"
                )
        if e.guard is not None:
            check_expr(e.guard, f"{where} guard")
        for a in e.effects:
            if a.target not in writable:
                raise ValidationError(
                    f"{p.name}: {where} assigns to non-variable {a.target!r}"
                )
            check_expr(a.value, f"{where} effect")
        seen_sets = set()
        for s in e.sets:
            if s.timer not in timer_names:
                raise ValidationError(f"{p.name}: {where} sets undeclared {s.timer!r}")
            if s.timer in seen_sets:
                raise ValidationError(f"{p.name}: {where} sets {s.timer!r} twice")
            seen_sets.add(s.timer)
            for which, b in (("lower", s.lb), ("upper", s.ub)):
                if isinstance(b, int):
                    if not 0 <= b < cfg.infinity:
                        raise ValidationError(
                            f"{p.name}: {where} {which} bound {b} outside 0..{cfg.infinity - 1}"
                        )
                elif b == INFINITE:
                    if which == "lower":
                        raise ValidationError(
                            f"{p.name}: {where} lower bound cannot be inf"
                        )
                elif b not in readable:
                    raise ValidationError(
                        f"{p.name}: {where} bound reads undeclared {b!r}"
                    )
            if isinstance(s.lb, int) and isinstance(s.ub, int) and s.lb > s.ub:
                raise ValidationError(
                    f"{p.name}: {where} sets {s.timer!r} with lower bound above upper"
                )
            if s.timer in afterdelay_timers and s.lb != s.ub:
                raise ValidationError(
                    f"{p.name}: {where} must set fixed-delay timer {s.timer!r} "
                    "with equal bounds"
                )

    # location discipline: arm exactly on entry
    init_consumed = p.consumed_at(p.init)
    if init_consumed:
        raise ValidationError(
            f"{p.name}: initial location {p.init!r} waits on "
            f"{init_consumed[0]!r}, which nothing has armed yet"
        )
    for e in p.edges:
        where = f"edge {e.src} -> {e.dst}"
        needed = set(p.consumed_at(e.dst))
        armed = {s.timer for s in e.sets}
        for t in sorted(needed - armed):
            raise ValidationError(
                f"{p.name}: {where} enters {e.dst!r} without setting {t!r}, "
                f"which {e.dst!r} waits on"
            )
        for t in sorted(armed - needed):
            raise ValidationError(
                f"{p.name}: {where} sets {t!r}, which {e.dst!r} does not wait on"
            )
