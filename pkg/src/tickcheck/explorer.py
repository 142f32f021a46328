"""Public state-space API: states, enabled choices, stepping, reachability.

States are immutable flat vectors: all global variables (declaration order),
then for each process its location index followed by its local variables.
``encode_state`` gives the canonical big-endian 16-bit byte string, injective
over the slot vector, usable as a hash key everywhere.

An execution choice is either one process firing a transition on its own
(``Solo``) or a matched sender/receiver pair (``Rendezvous``).
``enabled_choices`` orders them deterministically: solos in (process,
transition) declaration order, then pairs ordered by sender then receiver.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engine import make_engine
from .ir import CompiledModel, LimitExceeded, compile_model
from .model import Model

__all__ = [
    "StateVector",
    "Solo",
    "Rendezvous",
    "ReachabilityReport",
    "LimitExceeded",
    "initial_state",
    "enabled_choices",
    "apply_choice",
    "encode_state",
    "explore_reachable",
    "format_state",
]


@dataclass(frozen=True)
class StateVector:
    """Immutable snapshot of every slot value."""

    values: tuple[int, ...]


@dataclass(frozen=True)
class Solo:
    process: int  # index into model.processes
    transition: int  # index into that process's transitions


@dataclass(frozen=True)
class Rendezvous:
    sender: tuple[int, int]  # (process index, transition index)
    receiver: tuple[int, int]


@dataclass(frozen=True)
class ReachabilityReport:
    state_count: int
    transition_count: int
    deadlock_count: int
    max_depth: int


def _engine_for(m: Model, engine: str | None = None):
    return make_engine(compile_model(m), engine)


def choice_from_id(cm: CompiledModel, choice_id: int):
    """Translate an engine-level choice id into the public representation."""
    send_tid, recv_tid = cm.choice_transitions(choice_id)
    ts = cm.transitions[send_tid]
    if recv_tid is None:
        return Solo(ts.proc, ts.index)
    tr = cm.transitions[recv_tid]
    return Rendezvous((ts.proc, ts.index), (tr.proc, tr.index))


def initial_state(m: Model) -> StateVector:
    return StateVector(compile_model(m).init)


def encode_state(m: Model, s: StateVector) -> bytes:
    return compile_model(m).encode(s.values)


def enabled_choices(m: Model, s: StateVector) -> list:
    """All choices executable from ``s``, in the canonical order.  Only
    guards are evaluated; effects run when a choice is applied."""
    cm = compile_model(m)
    eng = _engine_for(m)
    return [choice_from_id(cm, cid) for cid in eng.enabled(cm.encode(s.values))]


def apply_choice(m: Model, s: StateVector, choice) -> StateVector:
    """Execute one choice atomically.  Raises ValueError when the choice is
    not enabled in ``s`` (stale location, false guard, unmatched sync), and
    DomainError when one of the choice's own effects leaves the domain."""
    cm = compile_model(m)
    eng = _engine_for(m)
    for cid in eng.enabled(cm.encode(s.values)):
        if choice_from_id(cm, cid) == choice:
            return StateVector(cm.decode(eng.fire(cm.encode(s.values), cid)))
    raise ValueError(f"choice {choice} is not enabled in this state")


def explore_reachable(
    m: Model, max_states: int | None = None, engine: str | None = None
) -> ReachabilityReport:
    """Breadth-first reachability over the whole model.

    ``max_states`` bounds the number of distinct states stored; finding one
    more raises LimitExceeded carrying the count seen so far.
    """
    states, transitions, deadlocks, depth = _engine_for(m, engine).explore(max_states)
    return ReachabilityReport(states, transitions, deadlocks, depth)


def format_state(m: Model, s: StateVector) -> str:
    """One-line display: ``P@loc`` per process, then ``var=value`` pairs."""
    cm = compile_model(m)
    parts = []
    for pi, p in enumerate(m.processes):
        parts.append(f"{p.name}@{cm.loc_names[pi][s.values[cm.loc_slot[pi]]]}")
    for i, info in enumerate(cm.slots):
        if info.kind != "loc":
            parts.append(f"{info.name}={s.values[i]}")
    return " ".join(parts)
