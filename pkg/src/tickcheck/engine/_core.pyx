# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled exploration engine.

Same contract as engine.pure.PureEngine, down to successor order, domain
errors, and the canonical big-endian 16-bit state encoding; the cross-engine
tests compare the two directly.  States cross the API boundary as bytes, the
inner loops run on C arrays.
"""

from collections import deque

from cpython.bytes cimport PyBytes_AsString, PyBytes_FromStringAndSize

from libc.stdlib cimport free, malloc
from libc.string cimport memcpy

from ..ir import (
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
)

cdef int C_CONST = OP_CONST
cdef int C_LOAD = OP_LOAD
cdef int C_ADD = OP_ADD
cdef int C_SUB = OP_SUB
cdef int C_MUL = OP_MUL
cdef int C_MOD = OP_MOD
cdef int C_EQ = OP_EQ
cdef int C_NE = OP_NE
cdef int C_LT = OP_LT
cdef int C_LE = OP_LE
cdef int C_GT = OP_GT
cdef int C_GE = OP_GE
cdef int C_AND = OP_AND
cdef int C_OR = OP_OR
cdef int C_NOT = OP_NOT

DEF EVAL_STACK = 64
DEF WRAP_MOD = 65536


cdef inline long long floor_mod(long long a, long long b) nogil:
    if b == 0:
        return a
    cdef long long r = a % b
    if r != 0 and ((r < 0) != (b < 0)):
        r += b
    return r


cdef struct Trans:
    int loc_slot
    int src
    int dst
    int guard       # expression id, -1 when absent
    int payload     # expression id, -1 when absent
    int recv_slot   # -1 when absent
    unsigned char recv_wrap
    int eff_off
    int eff_len


cdef class CoreEngine:
    cdef readonly object cm
    cdef public str name

    cdef int n_slots
    cdef int n_trans, n_solo, n_pair, n_choices
    cdef unsigned short *init_vals
    cdef unsigned char *slot_wrap
    cdef Trans *trans
    cdef int *solo_tid
    cdef int *pair_send
    cdef int *pair_recv
    # effect pool
    cdef int *eff_slot
    cdef int *eff_expr
    cdef unsigned char *eff_wrap
    # expression pool (ops/args flattened, exprs indexed by offset/length)
    cdef int *ex_off
    cdef int *ex_len
    cdef int *ops
    cdef long long *args
    cdef int n_ex, ex_cap, pool_len, pool_cap
    # scratch buffers
    cdef unsigned short *cur
    cdef unsigned short *nxt
    cdef list slot_names

    def __cinit__(self, cm):
        self.cm = cm
        self.name = "c"
        cdef int i, j
        self.n_slots = len(cm.slots)
        self.slot_names = [s.name for s in cm.slots]

        self.init_vals = <unsigned short *> malloc(self.n_slots * sizeof(unsigned short))
        self.slot_wrap = <unsigned char *> malloc(self.n_slots)
        for i in range(self.n_slots):
            self.init_vals[i] = cm.init[i]
            self.slot_wrap[i] = 1 if cm.slots[i].wrap else 0

        # expression pool: collect model expressions first
        self.n_ex = 0
        self.ex_cap = 8
        self.pool_len = 0
        self.pool_cap = 64
        self.ex_off = <int *> malloc(self.ex_cap * sizeof(int))
        self.ex_len = <int *> malloc(self.ex_cap * sizeof(int))
        self.ops = <int *> malloc(self.pool_cap * sizeof(int))
        self.args = <long long *> malloc(self.pool_cap * sizeof(long long))

        self.n_trans = len(cm.transitions)
        self.trans = <Trans *> malloc(self.n_trans * sizeof(Trans))
        n_eff = sum(len(t.effects) for t in cm.transitions)
        self.eff_slot = <int *> malloc(max(n_eff, 1) * sizeof(int))
        self.eff_expr = <int *> malloc(max(n_eff, 1) * sizeof(int))
        self.eff_wrap = <unsigned char *> malloc(max(n_eff, 1))

        cdef int eff_at = 0
        for i, t in enumerate(cm.transitions):
            self.trans[i].loc_slot = cm.loc_slot[t.proc]
            self.trans[i].src = t.src
            self.trans[i].dst = t.dst
            self.trans[i].guard = self._intern(t.guard) if t.guard is not None else -1
            self.trans[i].payload = self._intern(t.payload) if t.payload is not None else -1
            self.trans[i].recv_slot = t.recv_slot
            self.trans[i].recv_wrap = 1 if t.recv_wrap else 0
            self.trans[i].eff_off = eff_at
            self.trans[i].eff_len = len(t.effects)
            for e in t.effects:
                self.eff_slot[eff_at] = e.slot
                self.eff_expr[eff_at] = self._intern(e.code)
                self.eff_wrap[eff_at] = 1 if e.wrap else 0
                eff_at += 1

        self.n_solo = len(cm.solos)
        self.n_pair = len(cm.pairs)
        self.n_choices = self.n_solo + self.n_pair
        self.solo_tid = <int *> malloc(max(self.n_solo, 1) * sizeof(int))
        for i in range(self.n_solo):
            self.solo_tid[i] = cm.solos[i]
        self.pair_send = <int *> malloc(max(self.n_pair, 1) * sizeof(int))
        self.pair_recv = <int *> malloc(max(self.n_pair, 1) * sizeof(int))
        for i in range(self.n_pair):
            self.pair_send[i] = cm.pairs[i][0]
            self.pair_recv[i] = cm.pairs[i][1]

        self.cur = <unsigned short *> malloc(self.n_slots * sizeof(unsigned short))
        self.nxt = <unsigned short *> malloc(self.n_slots * sizeof(unsigned short))

    def __dealloc__(self):
        free(self.init_vals)
        free(self.slot_wrap)
        free(self.trans)
        free(self.solo_tid)
        free(self.pair_send)
        free(self.pair_recv)
        free(self.eff_slot)
        free(self.eff_expr)
        free(self.eff_wrap)
        free(self.ex_off)
        free(self.ex_len)
        free(self.ops)
        free(self.args)
        free(self.cur)
        free(self.nxt)

    # -- expression pool -------------------------------------------------------

    cdef int _intern(self, code) except -2:
        """Append bytecode to the pool, return its expression id."""
        cdef int need = len(code)
        cdef int *new_ops
        cdef long long *new_args
        cdef int cap, i
        if self.pool_len + need > self.pool_cap:
            cap = self.pool_cap
            while self.pool_len + need > cap:
                cap *= 2
            new_ops = <int *> malloc(cap * sizeof(int))
            new_args = <long long *> malloc(cap * sizeof(long long))
            memcpy(new_ops, self.ops, self.pool_len * sizeof(int))
            memcpy(new_args, self.args, self.pool_len * sizeof(long long))
            free(self.ops)
            free(self.args)
            self.ops = new_ops
            self.args = new_args
            self.pool_cap = cap
        if self.n_ex == self.ex_cap:
            self.ex_cap *= 2
            new_ops = <int *> malloc(self.ex_cap * sizeof(int))
            memcpy(new_ops, self.ex_off, self.n_ex * sizeof(int))
            free(self.ex_off)
            self.ex_off = new_ops
            new_ops = <int *> malloc(self.ex_cap * sizeof(int))
            memcpy(new_ops, self.ex_len, self.n_ex * sizeof(int))
            free(self.ex_len)
            self.ex_len = new_ops
        self.ex_off[self.n_ex] = self.pool_len
        self.ex_len[self.n_ex] = need
        for op, arg in code:
            self.ops[self.pool_len] = op
            self.args[self.pool_len] = arg
            self.pool_len += 1
        self.n_ex += 1
        return self.n_ex - 1

    def add_expr(self, code) -> int:
        return self._intern(tuple(code))

    # -- state codec -------------------------------------------------------------

    cdef void _decode(self, bytes data, unsigned short *out):
        cdef const unsigned char *p = <const unsigned char *> PyBytes_AsString(data)
        cdef int i
        for i in range(self.n_slots):
            out[i] = (<unsigned short> p[2 * i] << 8) | p[2 * i + 1]

    cdef bytes _encode(self, unsigned short *s):
        cdef int i
        cdef bytes b = PyBytes_FromStringAndSize(NULL, 2 * self.n_slots)
        cdef unsigned char *p = <unsigned char *> PyBytes_AsString(b)
        for i in range(self.n_slots):
            p[2 * i] = s[i] >> 8
            p[2 * i + 1] = s[i] & 0xFF
        return b

    def init_bytes(self) -> bytes:
        return self._encode(self.init_vals)

    def decode(self, bytes data):
        return self.cm.decode(data)

    def encode(self, values) -> bytes:
        return self.cm.encode(values)

    # -- evaluation ----------------------------------------------------------------

    cdef long long _eval(self, int eid, unsigned short *s) nogil:
        cdef long long stack[EVAL_STACK]
        cdef int sp = 0
        cdef int i = self.ex_off[eid]
        cdef int end = i + self.ex_len[eid]
        cdef int op
        cdef long long a, b
        while i < end:
            op = self.ops[i]
            if op == C_LOAD:
                stack[sp] = s[self.args[i]]
                sp += 1
            elif op == C_CONST:
                stack[sp] = self.args[i]
                sp += 1
            elif op == C_NOT:
                stack[sp - 1] = 1 if stack[sp - 1] == 0 else 0
            else:
                sp -= 1
                b = stack[sp]
                a = stack[sp - 1]
                if op == C_ADD:
                    stack[sp - 1] = a + b
                elif op == C_SUB:
                    stack[sp - 1] = a - b
                elif op == C_MUL:
                    stack[sp - 1] = a * b
                elif op == C_MOD:
                    stack[sp - 1] = floor_mod(a, b)
                elif op == C_EQ:
                    stack[sp - 1] = 1 if a == b else 0
                elif op == C_NE:
                    stack[sp - 1] = 1 if a != b else 0
                elif op == C_LT:
                    stack[sp - 1] = 1 if a < b else 0
                elif op == C_LE:
                    stack[sp - 1] = 1 if a <= b else 0
                elif op == C_GT:
                    stack[sp - 1] = 1 if a > b else 0
                elif op == C_GE:
                    stack[sp - 1] = 1 if a >= b else 0
                elif op == C_AND:
                    stack[sp - 1] = 1 if (a != 0 and b != 0) else 0
                else:  # C_OR
                    stack[sp - 1] = 1 if (a != 0 or b != 0) else 0
            i += 1
        return stack[0]

    def eval_expr(self, int eid, bytes data) -> int:
        self._decode(data, self.cur)
        return self._eval(eid, self.cur)

    # -- stepping -------------------------------------------------------------------

    cdef inline int _store(self, unsigned short *s, int slot, long long v,
                           unsigned char wrap, long long *bad) nogil:
        if 0 <= v < WRAP_MOD:
            s[slot] = <unsigned short> v
        elif wrap:
            s[slot] = <unsigned short> floor_mod(v, WRAP_MOD)
        else:
            bad[0] = v
            return slot
        return -1

    cdef int _enabled_c(self, unsigned short *s, int *out) nogil:
        """Fill ``out`` with enabled choice ids; returns the count."""
        cdef int n = 0
        cdef int k, tid
        cdef Trans *t
        cdef Trans *u
        for k in range(self.n_solo):
            t = &self.trans[self.solo_tid[k]]
            if s[t.loc_slot] != t.src:
                continue
            if t.guard >= 0 and self._eval(t.guard, s) == 0:
                continue
            out[n] = k
            n += 1
        for k in range(self.n_pair):
            t = &self.trans[self.pair_send[k]]
            u = &self.trans[self.pair_recv[k]]
            if s[t.loc_slot] != t.src or s[u.loc_slot] != u.src:
                continue
            if t.guard >= 0 and self._eval(t.guard, s) == 0:
                continue
            if u.guard >= 0 and self._eval(u.guard, s) == 0:
                continue
            out[n] = self.n_solo + k
            n += 1
        return n

    cdef int _fire_c(self, unsigned short *s, int cid, unsigned short *out,
                     long long *bad) nogil:
        """Apply choice ``cid`` to ``s`` writing ``out``.  Returns -1 on
        success, else the slot whose assignment left the domain (value in
        ``bad``)."""
        cdef Trans *t
        cdef Trans *u = NULL
        cdef int j, r
        cdef long long v
        if cid < self.n_solo:
            t = &self.trans[self.solo_tid[cid]]
        else:
            t = &self.trans[self.pair_send[cid - self.n_solo]]
            u = &self.trans[self.pair_recv[cid - self.n_solo]]
        memcpy(out, s, self.n_slots * sizeof(unsigned short))
        out[t.loc_slot] = t.dst
        if u != NULL:
            out[u.loc_slot] = u.dst
            if t.payload >= 0:
                v = self._eval(t.payload, s)  # payload reads the pre-state
                r = self._store(out, u.recv_slot, v, u.recv_wrap, bad)
                if r >= 0:
                    return r
        for j in range(t.eff_off, t.eff_off + t.eff_len):
            v = self._eval(self.eff_expr[j], out)
            r = self._store(out, self.eff_slot[j], v, self.eff_wrap[j], bad)
            if r >= 0:
                return r
        if u != NULL:
            for j in range(u.eff_off, u.eff_off + u.eff_len):
                v = self._eval(self.eff_expr[j], out)
                r = self._store(out, self.eff_slot[j], v, self.eff_wrap[j], bad)
                if r >= 0:
                    return r
        return -1

    def enabled(self, bytes data) -> list:
        cdef int *cids = <int *> malloc(max(self.n_choices, 1) * sizeof(int))
        cdef int n, i
        try:
            self._decode(data, self.cur)
            n = self._enabled_c(self.cur, cids)
            return [cids[i] for i in range(n)]
        finally:
            free(cids)

    def fire(self, bytes data, int choice_id) -> bytes:
        cdef long long bad = 0
        cdef int r
        self._decode(data, self.cur)
        cdef int *cids = <int *> malloc(max(self.n_choices, 1) * sizeof(int))
        cdef int n, i, found = 0
        try:
            n = self._enabled_c(self.cur, cids)
            for i in range(n):
                if cids[i] == choice_id:
                    found = 1
                    break
        finally:
            free(cids)
        if not found:
            raise ValueError(f"choice {choice_id} is not enabled")
        r = self._fire_c(self.cur, choice_id, self.nxt, &bad)
        if r >= 0:
            raise DomainError(self.slot_names[r], bad)
        return self._encode(self.nxt)

    def successors(self, bytes data) -> list:
        cdef int *cids = <int *> malloc(max(self.n_choices, 1) * sizeof(int))
        cdef long long bad = 0
        cdef int n, i, r
        cdef list out = []
        try:
            self._decode(data, self.cur)
            n = self._enabled_c(self.cur, cids)
            for i in range(n):
                r = self._fire_c(self.cur, cids[i], self.nxt, &bad)
                if r >= 0:
                    raise DomainError(self.slot_names[r], bad)
                out.append((cids[i], self._encode(self.nxt)))
            return out
        finally:
            free(cids)

    # -- reachability --------------------------------------------------------------

    def explore(self, limit=None):
        """BFS over the state space; see PureEngine.explore for the contract."""
        cdef long long max_states = -1 if limit is None else <long long> limit
        cdef long long states = 1, transitions = 0, deadlocks = 0, max_depth = 0
        cdef int n, i, r, depth
        cdef long long bad = 0
        cdef int *cids = <int *> malloc(max(self.n_choices, 1) * sizeof(int))
        visited = {self.init_bytes()}
        queue = deque([(self.init_bytes(), 0)])
        try:
            while queue:
                data, depth = queue.popleft()
                self._decode(<bytes> data, self.cur)
                n = self._enabled_c(self.cur, cids)
                transitions += n
                if n == 0:
                    deadlocks += 1
                for i in range(n):
                    r = self._fire_c(self.cur, cids[i], self.nxt, &bad)
                    if r >= 0:
                        raise DomainError(self.slot_names[r], bad)
                    key = self._encode(self.nxt)
                    if key not in visited:
                        if max_states >= 0 and states >= max_states:
                            raise LimitExceeded(states)
                        visited.add(key)
                        states += 1
                        if depth + 1 > max_depth:
                            max_depth = depth + 1
                        queue.append((key, depth + 1))
            return states, transitions, deadlocks, max_depth
        finally:
            free(cids)
