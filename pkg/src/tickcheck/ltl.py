"""LTL formulas and their translation to Büchi automata.

Formulas are built over atoms that are comparisons of arithmetic expressions
over global variables (``c < 2``, ``x + 1 == y``).  The surface syntax gives
``!``/``&&``/``||``/``->`` the usual C precedences, ``U`` binds tighter than
the binary boolean connectives and associates to the right, and ``G``/``F``/
``X`` are prefix operators.

The translation is the classic tableau construction: rewrite to negation
normal form (eliminating ``->``, ``F``, ``G`` in favour of until/release),
expand the formula graph into nodes carrying (new, old, next) obligation
sets, read off a generalized automaton with one acceptance set per until,
then degeneralize with the usual counter and finally quotient the result by
iterated bisimulation so the common formulas come out in their canonical
minimal shapes.

The automaton is edge-labeled: each edge carries a conjunction of atom
literals that the *consumed letter* must satisfy, and acceptance is on
states.  ``initial`` lists the edges taken on the very first letter.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import BinOp, COMPARISONS, Expr, expr_names, render_expr
from .parser import ParseError, _Parser


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return render_formula(self)


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class FalseF(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    expr: Expr  # a comparison over globals

    @property
    def key(self) -> str:
        return render_expr(self.expr)


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Next(Formula):
    operand: Formula


@dataclass(frozen=True)
class Always(Formula):
    operand: Formula


@dataclass(frozen=True)
class Eventually(Formula):
    operand: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Release(Formula):
    """Dual of until; produced by normalization, not by the parser."""

    left: Formula
    right: Formula


def render_formula(f: Formula) -> str:
    def bin_side(g: Formula) -> str:
        if isinstance(g, (And, Or, Implies, Until, Release)):
            return f"({render_formula(g)})"
        return render_formula(g)

    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, Atom):
        return f.key
    if isinstance(f, Not):
        return f"!{bin_side(f.operand)}"
    if isinstance(f, And):
        return f"{bin_side(f.left)} && {bin_side(f.right)}"
    if isinstance(f, Or):
        return f"{bin_side(f.left)} || {bin_side(f.right)}"
    if isinstance(f, Implies):
        return f"{bin_side(f.left)} -> {bin_side(f.right)}"
    if isinstance(f, Next):
        return f"X {bin_side(f.operand)}"
    if isinstance(f, Always):
        return f"G {bin_side(f.operand)}"
    if isinstance(f, Eventually):
        return f"F {bin_side(f.operand)}"
    if isinstance(f, Until):
        return f"{bin_side(f.left)} U {bin_side(f.right)}"
    if isinstance(f, Release):
        return f"{bin_side(f.left)} R {bin_side(f.right)}"
    raise TypeError(f"not a formula: {f!r}")


def formula_atoms(f: Formula) -> list[Atom]:
    """Atoms in canonical (key-sorted, deduplicated) order."""
    found: dict[str, Atom] = {}

    def walk(g: Formula) -> None:
        if isinstance(g, Atom):
            found.setdefault(g.key, g)
        elif isinstance(g, (Not, Next, Always, Eventually)):
            walk(g.operand)
        elif isinstance(g, (And, Or, Implies, Until, Release)):
            walk(g.left)
            walk(g.right)

    walk(f)
    return [found[k] for k in sorted(found)]


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_PREFIX = {"G": Always, "F": Eventually, "X": Next}
_RESERVED = {"G", "F", "X", "U", "true", "false"}


class _LtlParser(_Parser):
    """Layered on the expression tokenizer; atoms reuse the arithmetic
    parser up to the additive level."""

    def formula(self) -> Formula:
        return self._implies()

    def _implies(self) -> Formula:
        left = self._or_f()
        if self.accept("->"):
            return Implies(left, self._implies())
        return left

    def _or_f(self) -> Formula:
        e = self._and_f()
        while self.accept("||"):
            e = Or(e, self._and_f())
        return e

    def _and_f(self) -> Formula:
        e = self._until()
        while self.accept("&&"):
            e = And(e, self._until())
        return e

    def _until(self) -> Formula:
        left = self._unary_f()
        if self.cur.kind == "ident" and self.cur.text == "U":
            self.pos += 1
            return Until(left, self._until())
        return left

    def _unary_f(self) -> Formula:
        t = self.cur
        if t.kind == "punct" and t.text == "!":
            self.pos += 1
            return Not(self._unary_f())
        if t.kind == "ident" and t.text in _PREFIX:
            self.pos += 1
            return _PREFIX[t.text](self._unary_f())
        return self._primary_f()

    def _primary_f(self) -> Formula:
        t = self.cur
        if t.kind == "ident" and t.text == "true":
            self.pos += 1
            return TrueF()
        if t.kind == "ident" and t.text == "false":
            self.pos += 1
            return FalseF()
        if t.kind == "punct" and t.text == "(":
            # either a parenthesized formula or a parenthesized arithmetic
            # expression starting an atom; try the formula reading first
            save = self.pos
            self.pos += 1
            try:
                f = self.formula()
                self.expect(")")
            except ParseError:
                self.pos = save
                return self._atom()
            # '(p) U q' style continuations are handled by the callers; a
            # comparison after the ')' means this was an atom's operand
            if self.cur.kind == "punct" and self.cur.text in COMPARISONS:
                self.pos = save
                return self._atom()
            return f
        return self._atom()

    def _atom(self) -> Formula:
        left = self._add()
        for op in COMPARISONS:
            if self.accept(op):
                right = self._add()
                return Atom(BinOp(op, left, right))
        raise self.error("expected a comparison operator")


def parse_ltl(text: str) -> Formula:
    """Parse a formula; raises ParseError on bad input."""
    p = _LtlParser(text)
    f = p.formula()
    if p.cur.kind != "eof":
        raise p.error("unexpected trailing input after formula")
    for name in sorted(n for a in formula_atoms(f) for n in expr_names(a.expr)):
        if name in _RESERVED:
            raise ParseError(f"'{name}' cannot be used as a variable in formulas", 1, 1)
    return f


# ---------------------------------------------------------------------------
# Negation normal form
# ---------------------------------------------------------------------------


def nnf(f: Formula, negated: bool = False) -> Formula:
    """Rewrite to literals, And/Or, Next, Until, Release."""
    if isinstance(f, TrueF):
        return FalseF() if negated else TrueF()
    if isinstance(f, FalseF):
        return TrueF() if negated else FalseF()
    if isinstance(f, Atom):
        return Not(f) if negated else f
    if isinstance(f, Not):
        return nnf(f.operand, not negated)
    if isinstance(f, Implies):
        return nnf(Or(Not(f.left), f.right), negated)
    if isinstance(f, And):
        cls = Or if negated else And
        return cls(nnf(f.left, negated), nnf(f.right, negated))
    if isinstance(f, Or):
        cls = And if negated else Or
        return cls(nnf(f.left, negated), nnf(f.right, negated))
    if isinstance(f, Next):
        return Next(nnf(f.operand, negated))
    if isinstance(f, Eventually):  # F a = true U a
        return nnf(Until(TrueF(), f.operand), negated)
    if isinstance(f, Always):  # G a = false R a
        return nnf(Release(FalseF(), f.operand), negated)
    if isinstance(f, Until):
        cls = Release if negated else Until
        return cls(nnf(f.left, negated), nnf(f.right, negated))
    if isinstance(f, Release):
        cls = Until if negated else Release
        return cls(nnf(f.left, negated), nnf(f.right, negated))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Tableau expansion
# ---------------------------------------------------------------------------


def _sort_key(f: Formula):
    return repr(f)


class _Node:
    __slots__ = ("id", "incoming", "new", "old", "next")

    def __init__(self, id_: int, incoming: set[int], new: set, old: set, next_: set):
        self.id = id_
        self.incoming = incoming
        self.new = new
        self.old = old
        self.next = next_


_INIT = 0  # virtual predecessor id of initial nodes


def _expand(f: Formula):
    """Tableau node expansion; returns finished nodes keyed by id."""
    nodes: dict[int, _Node] = {}
    counter = [1]

    def fresh(incoming, new, old, next_) -> _Node:
        counter[0] += 1
        return _Node(counter[0], set(incoming), set(new), set(old), set(next_))

    stack = [fresh({_INIT}, {f}, set(), set())]
    while stack:
        n = stack.pop()
        if not n.new:
            twin = next(
                (q for q in nodes.values() if q.old == n.old and q.next == n.next), None
            )
            if twin is not None:
                twin.incoming |= n.incoming
                continue
            nodes[n.id] = n
            stack.append(fresh({n.id}, n.next, set(), set()))
            continue
        g = min(n.new, key=_sort_key)
        n.new.discard(g)
        if isinstance(g, FalseF):
            continue  # contradiction, drop the node
        if isinstance(g, TrueF):
            n.old.add(g)  # recorded so until-fulfilment can see it
            stack.append(n)
            continue
        if isinstance(g, Atom) or (isinstance(g, Not) and isinstance(g.operand, Atom)):
            negation = g.operand if isinstance(g, Not) else Not(g)
            if negation in n.old:
                continue  # p && !p, drop
            n.old.add(g)
            stack.append(n)
            continue
        if isinstance(g, And):
            n.old.add(g)
            n.new |= {g.left, g.right} - n.old
            stack.append(n)
            continue
        if isinstance(g, Next):
            n.old.add(g)
            n.next.add(g.operand)
            stack.append(n)
            continue
        if isinstance(g, (Or, Until, Release)):
            n.old.add(g)
            if isinstance(g, Or):
                first, second = {g.left}, {g.right}
                first_next, second_next = set(), set()
            elif isinstance(g, Until):  # a U b = b || (a && X(a U b))
                first, second = {g.left}, {g.right}
                first_next, second_next = {g}, set()
            else:  # a R b = (a && b) || (b && X(a R b))
                first, second = {g.right}, {g.left, g.right}
                first_next, second_next = {g}, set()
            other = fresh(n.incoming, n.new | (second - n.old), n.old, n.next | second_next)
            n.new |= first - n.old
            n.next |= first_next
            stack.append(other)
            stack.append(n)
            continue
        raise TypeError(f"unexpected formula in tableau: {g!r}")
    return nodes


@dataclass(frozen=True)
class BuchiAutomaton:
    """Edge-labeled automaton with state-based acceptance.

    A label is a frozenset of (atom index, wanted truth) pairs, a conjunction
    the consumed letter must satisfy; the empty label is "true".  ``initial``
    edges consume the first letter of the word.
    """

    atoms: tuple[Atom, ...]
    n_states: int
    initial: tuple[tuple[frozenset, int], ...]
    edges: tuple[tuple[tuple[frozenset, int], ...], ...]
    accepting: frozenset

    def label_holds(self, label: frozenset, letter_vals) -> bool:
        return all(bool(letter_vals[i]) == want for i, want in label)


def _label_of(old: set, atom_index: dict[str, int]) -> frozenset:
    lits = set()
    for g in old:
        if isinstance(g, Atom):
            lits.add((atom_index[g.key], True))
        elif isinstance(g, Not) and isinstance(g.operand, Atom):
            lits.add((atom_index[g.operand.key], False))
    return frozenset(lits)


def to_buchi(f: Formula) -> BuchiAutomaton:
    """Translate ``f`` (not its negation) into an equivalent automaton."""
    norm = nnf(f)
    atoms = tuple(formula_atoms(norm))
    atom_index = {a.key: i for i, a in enumerate(atoms)}
    nodes = _expand(norm)

    untils = sorted(
        {g for n in nodes.values() for g in n.old if isinstance(g, Until)},
        key=_sort_key,
    )

    # generalized automaton, one acceptance set per until
    ids = sorted(nodes)
    labels = {i: _label_of(nodes[i].old, atom_index) for i in ids}
    fulfil = {
        i: tuple(u not in nodes[i].old or u.right in nodes[i].old for u in untils)
        for i in ids
    }

    k = len(untils)

    def advance(base: int, node_id: int) -> int:
        j = base
        while j < k and fulfil[node_id][j]:
            j += 1
        return j

    # counter degeneralization (skipped when there is no until)
    state_ix: dict[tuple[int, int], int] = {}
    ba_edges: list[list[tuple[frozenset, int]]] = []
    ba_init: list[tuple[frozenset, int]] = []
    accepting: set[int] = set()

    def state_for(node_id: int, ctr: int) -> int:
        key = (node_id, ctr)
        if key not in state_ix:
            state_ix[key] = len(ba_edges)
            ba_edges.append([])
            if ctr == k:
                accepting.add(state_ix[key])
        return state_ix[key]

    # explicit worklist over reachable (node, counter) pairs
    out_edges: dict[int, list[int]] = {i: [] for i in ids}
    for i in ids:
        for pred in nodes[i].incoming:
            if pred != _INIT:
                out_edges[pred].append(i)
    seen: set[tuple[int, int]] = set()
    work: list[tuple[int, int]] = []
    for i in ids:
        if _INIT in nodes[i].incoming:
            ctr = advance(0, i)
            ba_init.append((labels[i], state_for(i, ctr)))
            if (i, ctr) not in seen:
                seen.add((i, ctr))
                work.append((i, ctr))
    while work:
        i, ctr = work.pop()
        src = state_for(i, ctr)
        base = 0 if ctr == k else ctr
        for j in sorted(out_edges[i]):
            nctr = advance(base, j)
            ba_edges[src].append((labels[j], state_for(j, nctr)))
            if (j, nctr) not in seen:
                seen.add((j, nctr))
                work.append((j, nctr))

    ba = BuchiAutomaton(
        atoms,
        len(ba_edges),
        tuple(ba_init),
        tuple(tuple(e) for e in ba_edges),
        frozenset(accepting),
    )
    return _simplify(ba)


# ---------------------------------------------------------------------------
# Simplification
# ---------------------------------------------------------------------------


def _simplify(ba: BuchiAutomaton) -> BuchiAutomaton:
    """Prune states that cannot contribute to an accepted word, then
    quotient by iterated outgoing-signature equivalence (a forward
    bisimulation, so the language is preserved exactly)."""
    n = ba.n_states
    edges = [list(dict.fromkeys(e)) for e in ba.edges]
    initial = list(dict.fromkeys(ba.initial))
    alive = [True] * n

    # reachable from some initial edge
    reach: set[int] = set()
    stack = [q for _, q in initial]
    while stack:
        q = stack.pop()
        if q in reach:
            continue
        reach.add(q)
        stack.extend(d for _, d in edges[q])

    # a state contributes to some accepted word only if it can reach an
    # accepting state that can reach itself; everything else is dead weight
    def forward(starts: list[int]) -> set[int]:
        out: set[int] = set()
        stk = list(starts)
        while stk:
            q = stk.pop()
            if q in out:
                continue
            out.add(q)
            stk.extend(d for _, d in edges[q])
        return out

    cores = [
        a
        for a in range(n)
        if a in ba.accepting and a in reach and a in forward([d for _, d in edges[a]])
    ]
    rev: list[list[int]] = [[] for _ in range(n)]
    for q in range(n):
        for _, d in edges[q]:
            rev[d].append(q)
    productive: set[int] = set()
    stack = list(cores)
    while stack:
        q = stack.pop()
        if q in productive:
            continue
        productive.add(q)
        stack.extend(rev[q])
    for q in range(n):
        alive[q] = q in reach and q in productive
    for q in range(n):
        if alive[q]:
            edges[q] = [(l, d) for l, d in edges[q] if alive[d]]
    initial = [(l, q) for l, q in initial if alive[q]]

    live = [q for q in range(n) if alive[q]]
    if not live:
        return BuchiAutomaton(ba.atoms, 0, (), (), frozenset())

    # partition refinement on (acceptance, outgoing signature)
    block = {q: (1 if q in ba.accepting else 0) for q in live}
    while True:
        sig = {
            q: (block[q], frozenset((l, block[d]) for l, d in edges[q])) for q in live
        }
        renumber: dict = {}
        for q in live:
            renumber.setdefault(sig[q], len(renumber))
        new_block = {q: renumber[sig[q]] for q in live}
        if new_block == block:
            break
        block = new_block

    n_blocks = len(set(block.values()))
    rep: dict[int, int] = {}
    for q in live:  # first state of each block is its representative
        rep.setdefault(block[q], q)
    out_edges = []
    for b in range(n_blocks):
        q = rep[b]
        out_edges.append(tuple(dict.fromkeys((l, block[d]) for l, d in edges[q])))
    new_initial = tuple(dict.fromkeys((l, block[q]) for l, q in initial))
    new_accepting = frozenset(b for b in range(n_blocks) if rep[b] in ba.accepting)
    return BuchiAutomaton(ba.atoms, n_blocks, new_initial, tuple(out_edges), new_accepting)


# ---------------------------------------------------------------------------
# Direct lasso acceptance (used by tests and counterexample verification)
# ---------------------------------------------------------------------------


def accepts_lasso(ba: BuchiAutomaton, stem, cycle) -> bool:
    """Does the automaton accept stem + cycle^ω?

    Letters are collections of atom *keys* that hold at that instant.
    Decided by searching the finite (position, state) graph for a reachable
    cycle through an accepting state.
    """
    letters = [frozenset(l) for l in list(stem) + list(cycle)]
    n = len(letters)
    assert len(cycle) >= 1

    def nxt(i: int) -> int:
        return i + 1 if i + 1 < n else len(stem)

    def vals(i: int):
        return [a.key in letters[i] for a in ba.atoms]

    start = [
        (nxt(0), q) for l, q in ba.initial if ba.label_holds(l, vals(0))
    ]
    seen = set(start)
    stack = list(start)
    nodes = set(start)
    while stack:
        i, q = stack.pop()
        for l, d in ba.edges[q]:
            if ba.label_holds(l, vals(i)):
                node = (nxt(i), d)
                if node not in seen:
                    seen.add(node)
                    stack.append(node)
                    nodes.add(node)

    # a node lies on a cycle iff it can reach itself
    for node in sorted(nodes):
        if node[1] not in ba.accepting:
            continue
        frontier = [node]
        visited = set()
        while frontier:
            i, q = frontier.pop()
            for l, d in ba.edges[q]:
                if ba.label_holds(l, vals(i)):
                    nn = (nxt(i), d)
                    if nn == node:
                        return True
                    if nn not in visited:
                        visited.add(nn)
                        frontier.append(nn)
    return False
