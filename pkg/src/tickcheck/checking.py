"""LTL verification: product construction, cycle search, counterexamples.

``verify`` negates the formula, translates it to a Büchi automaton, and
searches the on-the-fly product of the model's state graph with the
automaton for a reachable accepting cycle.  The automaton reads the
valuation of the state being *entered*; deadlocked system states get an
implicit self-loop (stutter extension) so finite behaviours are judged on
their infinite stuttering continuation.

Two search algorithms are provided: ``ndfs`` (nested depth-first search,
finds a counterexample without materializing the product) and ``owcty``
(materializes the reachable product once, then alternates
reachable-from-accepting restriction with iterated removal of in-degree-zero
states until a fixpoint; the residue is nonempty exactly when an accepting
cycle exists).

Counterexamples are lassos over product states.  Every lasso returned has
been replayed before ``verify`` returns: the system half through the engine,
the automaton half through the edge labels, so a reported violation is a
real execution, not an artifact of the search."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .engine import make_engine
from .explorer import Rendezvous, Solo, StateVector, choice_from_id, format_state
from .ir import CompileError, LimitExceeded, compile_expr, compile_model
from .ltl import BuchiAutomaton, Formula, Not, to_buchi
from .model import Model

__all__ = [
    "ProductState",
    "Step",
    "Lasso",
    "ProductStats",
    "Verdict",
    "verify",
    "render_trace",
]


@dataclass(frozen=True)
class ProductState:
    """System state paired with the automaton state entered after reading it."""

    system: StateVector
    automaton: int


@dataclass(frozen=True)
class Step:
    """One move of the product; ``choice`` is None for a stutter step on a
    deadlocked system state."""

    choice: Solo | Rendezvous | None
    state: ProductState


@dataclass(frozen=True)
class Lasso:
    """``initial`` then ``stem`` reaches the cycle entry; ``cycle`` returns
    to it (its last state equals the stem's last state, or ``initial`` when
    the stem is empty)."""

    initial: ProductState
    stem: tuple[Step, ...]
    cycle: tuple[Step, ...]


@dataclass(frozen=True)
class ProductStats:
    """Distinct product states seen and product edges enumerated.  Complete
    exploration sizes when the property holds; on a violation they cover
    the part searched before the cycle was found."""

    states: int
    transitions: int


@dataclass(frozen=True)
class Verdict:
    holds: bool
    counterexample: Lasso | None
    stats: ProductStats
    algorithm: str


class _Product:
    """On-the-fly product of the system graph with an automaton.

    Nodes are (state bytes, automaton index); edges carry the engine choice
    id, or None for a stutter step.
    """

    def __init__(self, m: Model, ba: BuchiAutomaton, engine: str | None = None,
                 stutter: bool = True):
        self.cm = compile_model(m)
        self.engine = make_engine(self.cm, engine)
        self.ba = ba
        self.stutter = stutter
        try:
            self._atom_ids = [
                self.engine.add_expr(compile_expr(a.expr, self.cm.global_scope))
                for a in ba.atoms
            ]
        except CompileError as e:
            raise CompileError(f"formula atoms must range over global variables: {e}")
        self._vals_cache: dict[bytes, tuple[bool, ...]] = {}

    def vals(self, data: bytes) -> tuple[bool, ...]:
        v = self._vals_cache.get(data)
        if v is None:
            v = tuple(self.engine.eval_expr(i, data) != 0 for i in self._atom_ids)
            self._vals_cache[data] = v
        return v

    def initials(self) -> list[tuple[bytes, int]]:
        data = self.engine.init_bytes()
        v = self.vals(data)
        return [
            (data, q) for label, q in self.ba.initial if self.ba.label_holds(label, v)
        ]

    def successors(self, node: tuple[bytes, int]):
        data, q = node
        sys_succ = self.engine.successors(data)
        if not sys_succ and self.stutter:
            sys_succ = [(None, data)]
        out = []
        for cid, nd in sys_succ:
            v = self.vals(nd)
            for label, q2 in self.ba.edges[q]:
                if self.ba.label_holds(label, v):
                    out.append(((nd, q2), cid))
        return list(dict.fromkeys(out))

    def accepting(self, node: tuple[bytes, int]) -> bool:
        return node[1] in self.ba.accepting

    def public_state(self, node: tuple[bytes, int]) -> ProductState:
        return ProductState(StateVector(self.cm.decode(node[0])), node[1])

    def public_choice(self, cid: int | None):
        return None if cid is None else choice_from_id(self.cm, cid)


def _count(n_seen: int, limit: int | None) -> int:
    if limit is not None and n_seen >= limit:
        raise LimitExceeded(n_seen)
    return n_seen + 1


# ---------------------------------------------------------------------------
# Nested depth-first search
# ---------------------------------------------------------------------------


def _ndfs(prod: _Product, limit: int | None):
    """Returns ((initial, stem, cycle) as (node, choice) lists or None,
    states seen, edges enumerated)."""
    blue: set = set()
    red: set = set()
    on_stack: dict = {}  # node -> index in the current blue stack
    states = 0
    transitions = 0

    for root in prod.initials():
        if root in blue:
            continue
        states = _count(states, limit)
        root_succ = prod.successors(root)
        transitions += len(root_succ)
        # stack entries: (node, successor list, cursor, choice that entered)
        stack = [(root, root_succ, 0, None)]
        on_stack[root] = 0
        while stack:
            node, succ, i, entered = stack[-1]
            if i < len(succ):
                stack[-1] = (node, succ, i + 1, entered)
                nxt, choice = succ[i]
                if nxt in on_stack and (prod.accepting(node) or prod.accepting(nxt)):
                    # this edge closes a cycle through the blue stack, and
                    # some state on it accepts
                    j = on_stack[nxt]
                    stem = [(stack[k][0], stack[k][3]) for k in range(1, j + 1)]
                    cycle = [
                        (stack[k][0], stack[k][3]) for k in range(j + 1, len(stack))
                    ] + [(nxt, choice)]
                    return (stack[0][0], stem, cycle), states, transitions
                if nxt not in blue and nxt not in on_stack:
                    states = _count(states, limit)
                    nsucc = prod.successors(nxt)
                    transitions += len(nsucc)
                    on_stack[nxt] = len(stack)
                    stack.append((nxt, nsucc, 0, choice))
                continue
            # post-order: all successors handled
            if prod.accepting(node):
                found = _red_search(prod, node, on_stack, red)
                if found is not None:
                    met, path = found
                    stem = [(stack[k][0], stack[k][3]) for k in range(1, len(stack))]
                    if met == node:
                        cycle = path
                    else:
                        j = on_stack[met]
                        tail = [
                            (stack[k][0], stack[k][3])
                            for k in range(j + 1, len(stack))
                        ]
                        cycle = path + tail
                    return (stack[0][0], stem, cycle), states, transitions
            stack.pop()
            del on_stack[node]
            blue.add(node)
    return None, states, transitions


def _red_search(prod: _Product, seed, on_stack, red):
    """Depth-first from ``seed``.  Reaching ``seed`` or any node on the blue
    stack closes an accepting cycle through ``seed``; red marks persist
    across calls, which keeps the whole nested search linear.  Returns
    (node met, (node, choice) steps from seed to it) or None."""
    parent: dict = {}
    stack = [(seed, prod.successors(seed), 0)]
    while stack:
        u, succ, i = stack[-1]
        if i >= len(succ):
            stack.pop()
            continue
        stack[-1] = (u, succ, i + 1)
        v, choice = succ[i]
        if v == seed or v in on_stack:
            steps = [(v, choice)]
            cur = u
            while cur != seed:
                cur_parent, cur_choice = parent[cur]
                steps.append((cur, cur_choice))
                cur = cur_parent
            steps.reverse()
            return v, steps
        if v not in red:
            red.add(v)
            parent[v] = (u, choice)
            stack.append((v, prod.successors(v), 0))
    return None


# ---------------------------------------------------------------------------
# One-way-catch-them-young over the materialized product
# ---------------------------------------------------------------------------


def _owcty(prod: _Product, limit: int | None):
    # materialize the reachable product graph once; interning a new node
    # queues it for expansion exactly once
    nodes: list = []
    index: dict = {}
    succ: list[list[tuple[int, int | None]]] = []
    frontier: deque[int] = deque()

    def intern(node) -> int:
        j = index.get(node)
        if j is None:
            _count(len(nodes), limit)
            j = len(nodes)
            index[node] = j
            nodes.append(node)
            succ.append([])
            frontier.append(j)
        return j

    roots = [intern(n) for n in prod.initials()]
    transitions = 0
    while frontier:
        j = frontier.popleft()
        for node2, cid in prod.successors(nodes[j]):
            succ[j].append((intern(node2), cid))
            transitions += 1

    n = len(nodes)
    accepting = [prod.accepting(nodes[j]) for j in range(n)]
    alive = bytearray(b"\x01" * n)

    changed = True
    while changed:
        # restrict to states reachable from a surviving accepting state
        reach = bytearray(n)
        stack = [j for j in range(n) if alive[j] and accepting[j]]
        for j in stack:
            reach[j] = 1
        while stack:
            j = stack.pop()
            for k, _ in succ[j]:
                if alive[k] and not reach[k]:
                    reach[k] = 1
                    stack.append(k)
        changed = any(alive[j] and not reach[j] for j in range(n))
        alive = reach

        # iteratively drop states nothing inside points at
        indeg = [0] * n
        for j in range(n):
            if alive[j]:
                for k, _ in succ[j]:
                    if alive[k]:
                        indeg[k] += 1
        queue = deque(j for j in range(n) if alive[j] and indeg[j] == 0)
        while queue:
            j = queue.popleft()
            alive[j] = 0
            changed = True
            for k, _ in succ[j]:
                if alive[k]:
                    indeg[k] -= 1
                    if indeg[k] == 0:
                        queue.append(k)

    if not any(alive):
        return None, n, transitions

    # counterexample: first surviving accepting state that can reach itself
    # inside the residue
    def bfs_path(starts, goal, restrict):
        """starts: list of (node index, first step).  Returns steps to goal."""
        parents: dict[int, tuple[int, int | None] | None] = {}
        q = deque()
        for j, via in starts:
            if j not in parents:
                parents[j] = via
                q.append(j)
        while q:
            j = q.popleft()
            if j == goal:
                steps = []
                cur = j
                while True:
                    via = parents[cur]
                    steps.append((cur, via[1]))
                    if via[0] is None:
                        break
                    cur = via[0]
                steps.reverse()
                return steps
            for k, cid in succ[j]:
                if restrict is not None and not restrict[k]:
                    continue
                if k not in parents:
                    parents[k] = (j, cid)
                    q.append(k)
        return None

    for a in range(n):
        if not (alive[a] and accepting[a]):
            continue
        cycle_idx = bfs_path(
            [(k, (None, cid)) for k, cid in succ[a] if alive[k]], a, alive
        )
        if cycle_idx is None:
            continue
        # stem: shortest path from an initial node to the cycle entry; the
        # first bfs_path entry is the root itself (choice None), not a step
        if a in roots:
            initial = nodes[a]
            stem = []
        else:
            stem_idx = bfs_path([(r, (None, None)) for r in roots], a, None)
            initial = nodes[stem_idx[0][0]]
            stem = [(nodes[j], cid) for j, cid in stem_idx[1:]]
        cycle = [(nodes[j], cid) for j, cid in cycle_idx]
        return (initial, stem, cycle), n, transitions
    return None, n, transitions


# ---------------------------------------------------------------------------
# Public entry point
# ---------------------------------------------------------------------------


def verify(
    m: Model,
    formula: Formula,
    algorithm: str = "ndfs",
    max_states: int | None = None,
    engine: str | None = None,
    stutter: bool = True,
) -> Verdict:
    """Check whether every run of ``m`` satisfies ``formula``.

    ``max_states`` bounds distinct *product* states; exceeding it raises
    LimitExceeded.  ``engine`` picks the exploration engine ("pure"/"c").
    """
    if algorithm not in ("ndfs", "owcty"):
        raise ValueError(f"unknown algorithm {algorithm!r}")
    ba = to_buchi(Not(formula))
    if ba.n_states == 0:
        # the negation is unsatisfiable; nothing to search
        return Verdict(True, None, ProductStats(0, 0), algorithm)
    prod = _Product(m, ba, engine=engine, stutter=stutter)
    search = _ndfs if algorithm == "ndfs" else _owcty
    raw, states, transitions = search(prod, max_states)
    stats = ProductStats(states, transitions)
    if raw is None:
        return Verdict(True, None, stats, algorithm)
    initial, stem, cycle = raw
    lasso = Lasso(
        prod.public_state(initial),
        tuple(Step(prod.public_choice(c), prod.public_state(nd)) for nd, c in stem),
        tuple(Step(prod.public_choice(c), prod.public_state(nd)) for nd, c in cycle),
    )
    _replay(prod, initial, stem, cycle)
    return Verdict(False, lasso, stats, algorithm)


def _replay(prod: _Product, initial, stem, cycle) -> None:
    """Re-execute a lasso through the product relation; any mismatch is a
    bug in the search, raised loudly rather than reported as a result."""
    if initial not in prod.initials():
        raise AssertionError("lasso initial state is not a product initial state")
    at = initial
    for nd, cid in list(stem) + list(cycle):
        if (nd, cid) not in prod.successors(at):
            raise AssertionError("lasso step is not a product transition")
        at = nd
    entry = stem[-1][0] if stem else initial
    if cycle[-1][0] != entry:
        raise AssertionError("lasso cycle does not return to its entry")
    if not any(prod.accepting(nd) for nd, _ in cycle):
        raise AssertionError("lasso cycle visits no accepting state")


# ---------------------------------------------------------------------------
# Trace rendering
# ---------------------------------------------------------------------------


def _describe_choice(m: Model, choice) -> str:
    if choice is None:
        return "(stutter)"
    if isinstance(choice, Solo):
        p = m.processes[choice.process]
        t = p.transitions[choice.transition]
        return f"{p.name}: {t.src} -> {t.dst}"
    ps = m.processes[choice.sender[0]]
    ts = ps.transitions[choice.sender[1]]
    pr = m.processes[choice.receiver[0]]
    tr = pr.transitions[choice.receiver[1]]
    return (
        f"{ps.name}: {ts.src} -> {ts.dst} | {pr.name}: {tr.src} -> {tr.dst}"
        f" via {ts.sync.channel}"
    )


def render_trace(m: Model, lasso: Lasso) -> str:
    """Plain-text listing: step index, fired transition, changed variables."""
    cm = compile_model(m)
    lines = [f"initial: {format_state(m, lasso.initial.system)}"]
    step_no = 0
    prev = lasso.initial.system.values
    for part, steps in (("stem", lasso.stem), ("cycle", lasso.cycle)):
        if part == "cycle":
            lines.append("cycle:")
        for s in steps:
            cur = s.state.system.values
            diffs = [
                f"{cm.slots[i].name}={cur[i]}"
                for i in range(len(cur))
                if cur[i] != prev[i] and cm.slots[i].kind != "loc"
            ]
            locs = [
                f"{m.processes[cm.slots[i].proc].name}@{cm.loc_names[cm.slots[i].proc][cur[i]]}"
                for i in range(len(cur))
                if cur[i] != prev[i] and cm.slots[i].kind == "loc"
            ]
            detail = " ".join(locs + diffs)
            lines.append(
                f"  {step_no}: {_describe_choice(m, s.choice)}"
                + (f"  [{detail}]" if detail else "")
            )
            prev = cur
            step_no += 1
    return "\n".join(lines)
