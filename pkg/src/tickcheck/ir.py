"""Flat intermediate representation the exploration engines run on.

``compile_model`` lowers a validated Model to:

* a slot vector: all globals, then per process one location slot followed by
  its locals.  A state is a tuple of slot values; its canonical byte encoding
  is the big-endian 16-bit packing of the slots (injective because every slot
  value fits 0..65535).
* stack bytecode for every expression (shared by the pure-Python and the
  compiled engine, so both evaluate identically),
* flat transition records and two choice tables: solo transitions, then
  rendezvous sender/receiver pairs.  The global choice numbering is
  ``0..len(solos)-1`` for solos followed by the pairs, which fixes the
  deterministic successor order everywhere.

Step semantics (pinned here for both engines): guards and a send payload are
evaluated in the pre-state; the payload transfer is applied first, then the
sender's effect list, then the receiver's, each assignment seeing the writes
before it.  An assignment outside 0..65535 raises DomainError unless the
variable was declared ``wrap``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import lru_cache

from .model import (
    BinOp,
    DOMAIN_MAX,
    Expr,
    IntLit,
    Model,
    Name,
    NotOp,
    SEND,
    validate_model,
)

# Opcodes.  Binary ops pop right then left, push one result.
(
    OP_CONST,
    OP_LOAD,
    OP_ADD,
    OP_SUB,
    OP_MUL,
    OP_MOD,
    OP_EQ,
    OP_NE,
    OP_LT,
    OP_LE,
    OP_GT,
    OP_GE,
    OP_AND,
    OP_OR,
    OP_NOT,
) = range(15)

_BINOPS = {
    "+": OP_ADD,
    "-": OP_SUB,
    "*": OP_MUL,
    "mod": OP_MOD,
    "==": OP_EQ,
    "!=": OP_NE,
    "<": OP_LT,
    "<=": OP_LE,
    ">": OP_GT,
    ">=": OP_GE,
    "&&": OP_AND,
    "||": OP_OR,
}

MAX_STACK = 64

Code = tuple[tuple[int, int], ...]


class CompileError(Exception):
    """The model cannot be lowered (it would fail validation)."""


class DomainError(Exception):
    """A runtime assignment left the 0..65535 domain on a non-wrap variable."""

    def __init__(self, variable: str, value: int):
        super().__init__(f"value {value} assigned to '{variable}' is outside 0..{DOMAIN_MAX}")
        self.variable = variable
        self.value = value


class LimitExceeded(Exception):
    """State-space exploration hit the state limit."""

    def __init__(self, states_seen: int):
        super().__init__(f"state limit exceeded after {states_seen} states")
        self.states_seen = states_seen


def floor_mod(a: int, b: int) -> int:
    """Floor modulo with ``a mod 0 = a`` (matches both engines)."""
    return a if b == 0 else a % b


def compile_expr(e: Expr, resolve: dict[str, int]) -> Code:
    out: list[tuple[int, int]] = []

    def emit(node: Expr) -> None:
        if isinstance(node, IntLit):
            out.append((OP_CONST, node.value))
        elif isinstance(node, Name):
            slot = resolve.get(node.ident)
            if slot is None:
                raise CompileError(f"undeclared variable '{node.ident}'")
            out.append((OP_LOAD, slot))
        elif isinstance(node, NotOp):
            emit(node.operand)
            out.append((OP_NOT, 0))
        elif isinstance(node, BinOp):
            emit(node.left)
            emit(node.right)
            out.append((_BINOPS[node.op], 0))
        else:
            raise CompileError(f"cannot compile {node!r}")

    emit(e)
    # Stack depth check: binary ops consume one net slot, pushes add one.
    depth = peak = 0
    for op, _ in out:
        if op in (OP_CONST, OP_LOAD):
            depth += 1
            peak = max(peak, depth)
        elif op != OP_NOT:
            depth -= 1
    if peak > MAX_STACK:
        raise CompileError("expression too deep for the evaluator stack")
    return tuple(out)


@dataclass(frozen=True)
class SlotInfo:
    name: str  # qualified display name ("x", "P.loc", "P.t")
    kind: str  # "global" | "loc" | "local"
    proc: int | None
    init: int
    wrap: bool


@dataclass(frozen=True)
class CompiledEffect:
    slot: int
    code: Code
    wrap: bool


@dataclass(frozen=True)
class CompiledTransition:
    proc: int
    index: int  # position in its process's transition list
    src: int  # location numbers within the process
    dst: int
    guard: Code | None
    channel: int  # -1 when not synchronizing
    is_send: bool
    payload: Code | None
    recv_slot: int  # -1 when none
    recv_wrap: bool
    effects: tuple[CompiledEffect, ...]


@dataclass
class CompiledModel:
    source: Model
    slots: tuple[SlotInfo, ...]
    init: tuple[int, ...]
    loc_slot: tuple[int, ...]  # per process: index of its location slot
    loc_names: tuple[tuple[str, ...], ...]
    transitions: tuple[CompiledTransition, ...]
    solos: tuple[int, ...]  # transition ids
    pairs: tuple[tuple[int, int], ...]  # (sender tid, receiver tid)
    global_scope: dict[str, int]  # name -> slot, globals only
    proc_scopes: tuple[dict[str, int], ...]  # per process, locals shadow globals

    @property
    def n_choices(self) -> int:
        return len(self.solos) + len(self.pairs)

    @property
    def struct_format(self) -> str:
        return f">{len(self.slots)}H"

    def encode(self, values) -> bytes:
        return struct.pack(self.struct_format, *values)

    def decode(self, data: bytes) -> tuple[int, ...]:
        return struct.unpack(self.struct_format, data)

    def choice_transitions(self, choice_id: int):
        """The (sender?, receiver?) transition ids behind a global choice id:
        ``(tid, None)`` for a solo, ``(send_tid, recv_tid)`` for a pair."""
        if choice_id < len(self.solos):
            return self.solos[choice_id], None
        send, recv = self.pairs[choice_id - len(self.solos)]
        return send, recv


@lru_cache(maxsize=128)
def compile_model(m: Model) -> CompiledModel:
    problems = validate_model(m)
    if problems:
        raise CompileError(f"invalid model: {problems[0]}" + (
            f" (+{len(problems) - 1} more)" if len(problems) > 1 else ""
        ))

    slots: list[SlotInfo] = []
    global_scope: dict[str, int] = {}
    for g in m.globals:
        global_scope[g.name] = len(slots)
        slots.append(SlotInfo(g.name, "global", None, g.init, g.wrap))

    loc_slot: list[int] = []
    proc_scopes: list[dict[str, int]] = []
    loc_names: list[tuple[str, ...]] = []
    for pi, p in enumerate(m.processes):
        loc_slot.append(len(slots))
        slots.append(SlotInfo(f"{p.name}.loc", "loc", pi, p.states.index(p.init), False))
        scope = dict(global_scope)
        for v in p.locals:
            scope[v.name] = len(slots)
            slots.append(SlotInfo(f"{p.name}.{v.name}", "local", pi, v.init, v.wrap))
        proc_scopes.append(scope)
        loc_names.append(p.states)

    wrap_of = {i: s.wrap for i, s in enumerate(slots)}

    transitions: list[CompiledTransition] = []
    for pi, p in enumerate(m.processes):
        scope = proc_scopes[pi]
        state_no = {s: i for i, s in enumerate(p.states)}
        for ti, t in enumerate(p.transitions):
            guard = compile_expr(t.guard, scope) if t.guard is not None else None
            channel, is_send, payload, recv_slot, recv_wrap = -1, False, None, -1, False
            if t.sync is not None:
                channel = next(
                    i for i, c in enumerate(m.channels) if c.name == t.sync.channel
                )
                is_send = t.sync.direction == SEND
                if t.sync.payload is not None:
                    payload = compile_expr(t.sync.payload, scope)
                if t.sync.target is not None:
                    recv_slot = scope[t.sync.target]
                    recv_wrap = wrap_of[recv_slot]
            effects = tuple(
                CompiledEffect(scope[a.target], compile_expr(a.value, scope), wrap_of[scope[a.target]])
                for a in t.effects
            )
            transitions.append(
                CompiledTransition(
                    pi,
                    ti,
                    state_no[t.src],
                    state_no[t.dst],
                    guard,
                    channel,
                    is_send,
                    payload,
                    recv_slot,
                    recv_wrap,
                    effects,
                )
            )

    solos = tuple(i for i, t in enumerate(transitions) if t.channel < 0)
    sends = [i for i, t in enumerate(transitions) if t.channel >= 0 and t.is_send]
    recvs = [i for i, t in enumerate(transitions) if t.channel >= 0 and not t.is_send]
    pairs = tuple(
        (s, r)
        for s in sends
        for r in recvs
        if transitions[s].channel == transitions[r].channel
        and transitions[s].proc != transitions[r].proc
    )

    return CompiledModel(
        source=m,
        slots=tuple(slots),
        init=tuple(s.init for s in slots),
        loc_slot=tuple(loc_slot),
        loc_names=tuple(loc_names),
        transitions=tuple(transitions),
        solos=solos,
        pairs=pairs,
        global_scope=global_scope,
        proc_scopes=tuple(proc_scopes),
    )
