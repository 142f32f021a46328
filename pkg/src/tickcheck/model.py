"""Model AST for the process/channel input language.

A model is a set of finite-state processes over bounded integer variables
(domain 0..65535), communicating by rendezvous channels and guarded
transitions.  All AST nodes are frozen dataclasses, so two models compare
equal exactly when they are structurally identical; ``render_model`` and the
parser round-trip through that equality.

Expression semantics are C-like: comparisons and the boolean connectives
yield 0/1, a guard passes when its value is nonzero, and arithmetic is exact
integer arithmetic.  ``mod`` is floor modulo with ``a mod 0 = a``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

DOMAIN_MAX = 65535
WRAP_MODULUS = DOMAIN_MAX + 1

# Largest magnitude any expression node may statically reach (keeps the
# compiled engine safely inside 64-bit arithmetic).
VALUE_BOUND = 2**62


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------


class Expr:
    """Base class for expression nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class IntLit(Expr):
    value: int

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class Name(Expr):
    ident: str

    def __str__(self) -> str:
        return self.ident


@dataclass(frozen=True)
class BinOp(Expr):
    op: str  # one of: || && == != < <= > >= + - * mod
    left: Expr
    right: Expr

    def __str__(self) -> str:
        return render_expr(self)


@dataclass(frozen=True)
class NotOp(Expr):
    operand: Expr

    def __str__(self) -> str:
        return render_expr(self)


# Lower number binds looser.  Comparison operators are non-associative in
# spirit but parse left-to-right like C.
PRECEDENCE = {
    "||": 1,
    "&&": 2,
    "==": 3,
    "!=": 3,
    "<": 3,
    "<=": 3,
    ">": 3,
    ">=": 3,
    "+": 4,
    "-": 4,
    "*": 5,
    "mod": 5,
}
_UNARY_PRECEDENCE = 6

COMPARISONS = ("==", "!=", "<", "<=", ">", ">=")
BOOLEAN_OPS = ("&&", "||")
ARITHMETIC_OPS = ("+", "-", "*", "mod")


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return PRECEDENCE[e.op]
    if isinstance(e, NotOp):
        return _UNARY_PRECEDENCE
    return 7  # literals and names never need parentheses


def render_expr(e: Expr) -> str:
    """Render an expression with the fewest parentheses that re-parse to it."""
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, Name):
        return e.ident
    if isinstance(e, NotOp):
        inner = render_expr(e.operand)
        if _prec(e.operand) < _UNARY_PRECEDENCE:
            inner = f"({inner})"
        return f"!{inner}"
    if isinstance(e, BinOp):
        p = PRECEDENCE[e.op]
        left = render_expr(e.left)
        right = render_expr(e.right)
        # Binary operators parse left-associatively, so the left child only
        # needs parentheses when it binds looser, the right child also when
        # it binds equally.
        if _prec(e.left) < p:
            left = f"({left})"
        if _prec(e.right) <= p:
            right = f"({right})"
        return f"{left} {e.op} {right}"
    raise TypeError(f"not an expression node: {e!r}")


def expr_names(e: Expr) -> set[str]:
    """All variable names referenced by an expression."""
    if isinstance(e, Name):
        return {e.ident}
    if isinstance(e, BinOp):
        return expr_names(e.left) | expr_names(e.right)
    if isinstance(e, NotOp):
        return expr_names(e.operand)
    return set()


def iter_exprs(e: Expr):
    """Yield ``e`` and every subexpression."""
    yield e
    if isinstance(e, BinOp):
        yield from iter_exprs(e.left)
        yield from iter_exprs(e.right)
    elif isinstance(e, NotOp):
        yield from iter_exprs(e.operand)


def expr_magnitude_bound(e: Expr) -> int:
    """Static bound on abs(value) of ``e``, assuming variables stay in domain.

    Used to reject models whose intermediate arithmetic could leave the range
    the compiled engine evaluates in.  Callers must apply it to every node
    (see ``iter_exprs``): a comparison yields 0/1 no matter how large its
    operands grew.
    """
    if isinstance(e, IntLit):
        return abs(e.value)
    if isinstance(e, Name):
        return DOMAIN_MAX
    if isinstance(e, NotOp):
        return 1
    if isinstance(e, BinOp):
        if e.op in COMPARISONS or e.op in BOOLEAN_OPS:
            return 1
        a = expr_magnitude_bound(e.left)
        b = expr_magnitude_bound(e.right)
        if e.op == "+" or e.op == "-":
            return a + b
        if e.op == "*":
            return a * b
        if e.op == "mod":
            # floor-mod result is below abs(divisor); with divisor 0 it is
            # the dividend itself.
            return max(a, b)
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# Model structure
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VarDecl:
    """A bounded integer variable.  ``wrap`` assignments reduce mod 65536
    instead of raising on domain overflow."""

    name: str
    init: int = 0
    wrap: bool = False


@dataclass(frozen=True)
class ChannelDecl:
    """Rendezvous channel; arity 0 is pure synchronization, arity 1 carries
    one integer from sender to receiver."""

    name: str
    arity: int = 0


@dataclass(frozen=True)
class Assign:
    target: str
    value: Expr

    def __str__(self) -> str:
        return f"{self.target} = {render_expr(self.value)}"


SEND = "send"
RECEIVE = "receive"


@dataclass(frozen=True)
class SyncAction:
    """``channel!expr`` (send) or ``channel?var`` (receive); the payload /
    destination is absent on arity-0 channels."""

    channel: str
    direction: str  # SEND or RECEIVE
    payload: Expr | None = None  # send only
    target: str | None = None  # receive only

    def __str__(self) -> str:
        if self.direction == SEND:
            return f"{self.channel}!{render_expr(self.payload) if self.payload else ''}"
        return f"{self.channel}?{self.target or ''}"


@dataclass(frozen=True)
class Transition:
    src: str
    dst: str
    guard: Expr | None = None
    sync: SyncAction | None = None
    effects: tuple[Assign, ...] = ()


@dataclass(frozen=True)
class Process:
    name: str
    states: tuple[str, ...]
    init: str
    accepting: tuple[str, ...] = ()
    locals: tuple[VarDecl, ...] = ()
    transitions: tuple[Transition, ...] = ()


@dataclass(frozen=True)
class Model:
    channels: tuple[ChannelDecl, ...] = ()
    globals: tuple[VarDecl, ...] = ()
    processes: tuple[Process, ...] = ()
    property_process: str | None = None  # name of the process marked `property`


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Diagnostic:
    """One validation finding; ``process`` names the enclosing process when
    the finding is local to one."""

    message: str
    process: str | None = None

    def __str__(self) -> str:
        if self.process:
            return f"process {self.process}: {self.message}"
        return self.message


def _dupes(names: list[str]) -> list[str]:
    seen: set[str] = set()
    out = []
    for n in names:
        if n in seen and n not in out:
            out.append(n)
        seen.add(n)
    return out


def _check_var_decl(v: VarDecl, where: str | None, out: list[Diagnostic]) -> None:
    if not 0 <= v.init <= DOMAIN_MAX:
        out.append(
            Diagnostic(f"initial value {v.init} of '{v.name}' outside 0..{DOMAIN_MAX}", where)
        )


def _check_expr(e: Expr, known: set[str], what: str, where: str | None, out: list[Diagnostic]) -> None:
    for n in sorted(expr_names(e)):
        if n not in known:
            out.append(Diagnostic(f"{what} references undeclared variable '{n}'", where))
    if any(expr_magnitude_bound(sub) > VALUE_BOUND for sub in iter_exprs(e)):
        out.append(Diagnostic(f"{what} can exceed the evaluator's value range", where))


def validate_model(m: Model) -> list[Diagnostic]:
    """Structural checks.  Returns all findings (empty list = valid); never
    raises.  A model with findings must not be compiled or explored."""
    out: list[Diagnostic] = []

    if not m.processes:
        out.append(Diagnostic("model declares no process, so it has no initial state"))

    for d in _dupes([c.name for c in m.channels]):
        out.append(Diagnostic(f"duplicate channel '{d}'"))
    for d in _dupes([g.name for g in m.globals]):
        out.append(Diagnostic(f"duplicate global variable '{d}'"))
    for d in _dupes([p.name for p in m.processes]):
        out.append(Diagnostic(f"duplicate process '{d}'"))

    for g in m.globals:
        _check_var_decl(g, None, out)

    channels = {c.name: c for c in m.channels}
    global_names = {g.name for g in m.globals}

    if m.property_process is not None and m.property_process not in {
        p.name for p in m.processes
    }:
        out.append(Diagnostic(f"property process '{m.property_process}' is not declared"))

    for p in m.processes:
        w = p.name
        for d in _dupes([v.name for v in p.locals]):
            out.append(Diagnostic(f"duplicate local variable '{d}'", w))
        for v in p.locals:
            _check_var_decl(v, w, out)
        for d in _dupes(list(p.states)):
            out.append(Diagnostic(f"duplicate state '{d}'", w))
        states = set(p.states)
        if not p.states:
            out.append(Diagnostic("no states declared", w))
        if p.init not in states:
            out.append(Diagnostic(f"initial state '{p.init}' not declared", w))
        for a in p.accepting:
            if a not in states:
                out.append(Diagnostic(f"accepting state '{a}' not declared", w))

        known = global_names | {v.name for v in p.locals}
        writable = known  # all variables are writable from their scope

        for i, t in enumerate(p.transitions):
            at = f"transition {i} ({t.src} -> {t.dst})"
            if t.src not in states:
                out.append(Diagnostic(f"{at}: unknown source state", w))
            if t.dst not in states:
                out.append(Diagnostic(f"{at}: unknown target state", w))
            if t.guard is not None:
                _check_expr(t.guard, known, f"{at}: guard", w, out)
            if t.sync is not None:
                s = t.sync
                ch = channels.get(s.channel)
                if ch is None:
                    out.append(Diagnostic(f"{at}: undeclared channel '{s.channel}'", w))
                else:
                    if s.direction == SEND:
                        if ch.arity == 0 and s.payload is not None:
                            out.append(
                                Diagnostic(f"{at}: channel '{ch.name}' carries no value", w)
                            )
                        if ch.arity == 1 and s.payload is None:
                            out.append(
                                Diagnostic(f"{at}: send on '{ch.name}' needs a value", w)
                            )
                    else:
                        if ch.arity == 0 and s.target is not None:
                            out.append(
                                Diagnostic(f"{at}: channel '{ch.name}' carries no value", w)
                            )
                        if ch.arity == 1 and s.target is None:
                            out.append(
                                Diagnostic(f"{at}: receive on '{ch.name}' needs a variable", w)
                            )
                if s.payload is not None:
                    _check_expr(s.payload, known, f"{at}: sync value", w, out)
                if s.target is not None and s.target not in writable:
                    out.append(
                        Diagnostic(f"{at}: receive into undeclared variable '{s.target}'", w)
                    )
            for a in t.effects:
                if a.target not in writable:
                    out.append(
                        Diagnostic(f"{at}: assignment to undeclared variable '{a.target}'", w)
                    )
                _check_expr(a.value, known, f"{at}: effect", w, out)

    return out


# ---------------------------------------------------------------------------
# Rendering (canonical concrete syntax)
# ---------------------------------------------------------------------------


def _render_var_decls(decls: tuple[VarDecl, ...], indent: str) -> list[str]:
    lines = []
    for v in decls:
        prefix = "wrap int" if v.wrap else "int"
        if v.init:
            lines.append(f"{indent}{prefix} {v.name} = {v.init};")
        else:
            lines.append(f"{indent}{prefix} {v.name};")
    return lines


def _render_transition(t: Transition) -> str:
    clauses = []
    if t.guard is not None:
        clauses.append(f"guard {render_expr(t.guard)};")
    if t.sync is not None:
        clauses.append(f"sync {t.sync};")
    if t.effects:
        clauses.append("effect " + ", ".join(str(a) for a in t.effects) + ";")
    body = " ".join(clauses)
    return f"{t.src} -> {t.dst} {{ {body} }}" if body else f"{t.src} -> {t.dst} {{}}"


def render_model(m: Model) -> str:
    """Canonical text form; ``parse_model(render_model(m)) == m``."""
    lines: list[str] = []
    for c in m.channels:
        if c.arity == 0:
            lines.append(f"channel {c.name};")
        else:
            lines.append(f"channel int {c.name};")
    lines.extend(_render_var_decls(m.globals, ""))
    for p in m.processes:
        if lines:
            lines.append("")
        head = "property process" if p.name == m.property_process else "process"
        lines.append(f"{head} {p.name} {{")
        lines.extend(_render_var_decls(p.locals, "  "))
        lines.append("  state " + ", ".join(p.states) + ";")
        lines.append(f"  init {p.init};")
        if p.accepting:
            lines.append("  accept " + ", ".join(p.accepting) + ";")
        if p.transitions:
            lines.append("  trans")
            rendered = [_render_transition(t) for t in p.transitions]
            for i, r in enumerate(rendered):
                sep = "," if i < len(rendered) - 1 else ";"
                lines.append(f"    {r}{sep}")
        lines.append("}")
    return "\n".join(lines) + "\n"
