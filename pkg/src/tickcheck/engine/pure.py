"""Pure-Python exploration engine.

Each bytecode expression is translated once into a Python lambda (the stack
program is symbolically evaluated into a single expression string), so the
interpreter loop runs at CPython speed instead of one dispatch per opcode.
Semantics must match the compiled engine bit for bit; the cross-engine tests
hold both to the same successor lists.
"""

from __future__ import annotations

from collections import deque

from ..ir import (
    Code,
    CompiledModel,
    DomainError,
    LimitExceeded,
    OP_ADD,
    OP_AND,
    OP_CONST,
    OP_EQ,
    OP_GE,
    OP_GT,
    OP_LE,
    OP_LOAD,
    OP_LT,
    OP_MOD,
    OP_MUL,
    OP_NE,
    OP_NOT,
    OP_OR,
    OP_SUB,
    floor_mod,
)
from ..model import WRAP_MODULUS

_CMP = {OP_EQ: "==", OP_NE: "!=", OP_LT: "<", OP_LE: "<=", OP_GT: ">", OP_GE: ">="}
_ARITH = {OP_ADD: "+", OP_SUB: "-", OP_MUL: "*"}


def _code_to_source(code: Code) -> str:
    stack: list[str] = []
    for op, arg in code:
        if op == OP_CONST:
            stack.append(str(arg))
        elif op == OP_LOAD:
            stack.append(f"s[{arg}]")
        elif op in _ARITH:
            b, a = stack.pop(), stack.pop()
            stack.append(f"({a} {_ARITH[op]} {b})")
        elif op == OP_MOD:
            b, a = stack.pop(), stack.pop()
            stack.append(f"_fmod({a}, {b})")
        elif op in _CMP:
            b, a = stack.pop(), stack.pop()
            stack.append(f"(1 if {a} {_CMP[op]} {b} else 0)")
        elif op == OP_AND:
            b, a = stack.pop(), stack.pop()
            stack.append(f"(1 if {a} != 0 and {b} != 0 else 0)")
        elif op == OP_OR:
            b, a = stack.pop(), stack.pop()
            stack.append(f"(1 if {a} != 0 or {b} != 0 else 0)")
        elif op == OP_NOT:
            a = stack.pop()
            stack.append(f"(1 if {a} == 0 else 0)")
        else:
            raise ValueError(f"unknown opcode {op}")
    assert len(stack) == 1
    return stack[0]


def compile_code(code: Code):
    """Bytecode -> callable(state_sequence) -> int."""
    return eval(f"lambda s: {_code_to_source(code)}", {"_fmod": floor_mod})


class _Trans:
    """Per-transition closures, precomputed once per model."""

    __slots__ = ("proc", "loc_slot", "src", "dst", "guard", "payload", "recv_slot", "recv_wrap", "effects")

    def __init__(self, cm: CompiledModel, tid: int):
        t = cm.transitions[tid]
        self.proc = t.proc
        self.loc_slot = cm.loc_slot[t.proc]
        self.src = t.src
        self.dst = t.dst
        self.guard = compile_code(t.guard) if t.guard is not None else None
        self.payload = compile_code(t.payload) if t.payload is not None else None
        self.recv_slot = t.recv_slot
        self.recv_wrap = t.recv_wrap
        self.effects = tuple(
            (e.slot, compile_code(e.code), e.wrap, cm.slots[e.slot].name) for e in t.effects
        )


class PureEngine:
    name = "pure"

    def __init__(self, cm: CompiledModel):
        self.cm = cm
        self._trans = [_Trans(cm, i) for i in range(len(cm.transitions))]
        self._solo = [(cid, self._trans[tid]) for cid, tid in enumerate(cm.solos)]
        self._pairs = [
            (len(cm.solos) + i, self._trans[s], self._trans[r])
            for i, (s, r) in enumerate(cm.pairs)
        ]
        self._exprs: list = []

    # -- states --------------------------------------------------------------

    def init_bytes(self) -> bytes:
        return self.cm.encode(self.cm.init)

    def decode(self, data: bytes) -> tuple[int, ...]:
        return self.cm.decode(data)

    def encode(self, values) -> bytes:
        return self.cm.encode(values)

    # -- predicate registry (used by the product construction) ---------------

    def add_expr(self, code: Code) -> int:
        self._exprs.append(compile_code(code))
        return len(self._exprs) - 1

    def eval_expr(self, expr_id: int, data: bytes) -> int:
        return self._exprs[expr_id](self.cm.decode(data))

    # -- stepping -------------------------------------------------------------

    def _store(self, s: list[int], slot: int, value: int, wrap: bool, name: str) -> None:
        if 0 <= value < WRAP_MODULUS:
            s[slot] = value
        elif wrap:
            s[slot] = value % WRAP_MODULUS
        else:
            raise DomainError(name, value)

    def _fire_solo(self, s, t: _Trans) -> list[int]:
        ns = list(s)
        ns[t.loc_slot] = t.dst
        for slot, fn, wrap, name in t.effects:
            self._store(ns, slot, fn(ns), wrap, name)
        return ns

    def _fire_pair(self, s, ts: _Trans, tr: _Trans) -> list[int]:
        ns = list(s)
        ns[ts.loc_slot] = ts.dst
        ns[tr.loc_slot] = tr.dst
        if ts.payload is not None:
            # payload reads the pre-state
            self._store(
                ns,
                tr.recv_slot,
                ts.payload(s),
                tr.recv_wrap,
                self.cm.slots[tr.recv_slot].name,
            )
        for slot, fn, wrap, name in ts.effects:
            self._store(ns, slot, fn(ns), wrap, name)
        for slot, fn, wrap, name in tr.effects:
            self._store(ns, slot, fn(ns), wrap, name)
        return ns

    def _enabled_trans(self, s):
        """(choice id, solo transition or sender/receiver pair) for every
        enabled choice; guards only, no effects run."""
        out = []
        for cid, t in self._solo:
            if s[t.loc_slot] != t.src:
                continue
            if t.guard is not None and t.guard(s) == 0:
                continue
            out.append((cid, t, None))
        for cid, ts, tr in self._pairs:
            if s[ts.loc_slot] != ts.src or s[tr.loc_slot] != tr.src:
                continue
            if ts.guard is not None and ts.guard(s) == 0:
                continue
            if tr.guard is not None and tr.guard(s) == 0:
                continue
            out.append((cid, ts, tr))
        return out

    def _successor_lists(self, s) -> list[tuple[int, list[int]]]:
        return [
            (cid, self._fire_solo(s, t) if tr is None else self._fire_pair(s, t, tr))
            for cid, t, tr in self._enabled_trans(s)
        ]

    def enabled(self, data: bytes) -> list[int]:
        """Choice ids enabled in this state (guards only)."""
        return [cid for cid, _, _ in self._enabled_trans(self.cm.decode(data))]

    def fire(self, data: bytes, choice_id: int) -> bytes:
        """Execute one enabled choice.  Raises ValueError when it is not
        enabled, DomainError when one of its own effects overflows."""
        s = self.cm.decode(data)
        for cid, t, tr in self._enabled_trans(s):
            if cid == choice_id:
                ns = self._fire_solo(s, t) if tr is None else self._fire_pair(s, t, tr)
                return self.cm.encode(ns)
        raise ValueError(f"choice {choice_id} is not enabled")

    def successors(self, data: bytes) -> list[tuple[int, bytes]]:
        s = self.cm.decode(data)
        return [(cid, self.cm.encode(ns)) for cid, ns in self._successor_lists(s)]

    # -- reachability ----------------------------------------------------------

    def explore(self, limit: int | None = None) -> tuple[int, int, int, int]:
        """BFS over the full state space.

        Returns (states, transitions, deadlocks, max_depth); raises
        LimitExceeded when more than ``limit`` distinct states appear.
        """
        encode = self.cm.encode
        init = list(self.cm.init)
        visited = {encode(init)}
        queue = deque([(init, 0)])
        states, transitions, deadlocks, max_depth = 1, 0, 0, 0
        while queue:
            s, depth = queue.popleft()
            succ = self._successor_lists(s)
            transitions += len(succ)
            if not succ:
                deadlocks += 1
            for _, ns in succ:
                key = encode(ns)
                if key not in visited:
                    if limit is not None and states >= limit:
                        raise LimitExceeded(states)
                    visited.add(key)
                    states += 1
                    if depth + 1 > max_depth:
                        max_depth = depth + 1
                    queue.append((ns, depth + 1))
        return states, transitions, deadlocks, max_depth
