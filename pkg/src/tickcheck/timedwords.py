"""Exhaustive timed-word enumeration over generated models.

A *timed word* records which skeleton edges a run fired and how many of the
firing process's ticks had elapsed by then: one event per edge firing,
labeled ``(process name, source, target)`` and stamped with the process's
own tick count.  In the global-clock build every tick advances every
process, so all stamps share one clock; in the distributed build a
process's count is the number of rendezvous it has completed with the Tick
cycler.  Each raw run (every prefix of every execution) yields one word
after a stable sort by stamp, so simultaneous events keep their firing
order; the result is the set of those words.

Enumeration is exhaustive below two cutoffs — no clock may pass
``max_time`` and no run may fire more than ``max_events`` edges — making
word sets finite and directly comparable across the two encodings with the
identical cutoffs.
"""

from __future__ import annotations

from .engine import make_engine
from .explorer import Rendezvous, Solo, choice_from_id
from .generate import gen_ledm, gen_sedm
from .ir import compile_model
from .skeleton import TimedSkeleton

__all__ = ["Event", "enumerate_timed_words"]

# ((process name, source location, target location), tick stamp)
Event = tuple[tuple[str, str, str], int]


def enumerate_timed_words(
    sk: TimedSkeleton,
    method: str,
    max_time: int,
    max_events: int,
    engine: str | None = None,
) -> frozenset[tuple[Event, ...]]:
    if method == "ledm":
        model = gen_ledm(sk)
    elif method == "sedm":
        model = gen_sedm(sk)
    else:
        raise ValueError(f"unknown method {method!r}")

    cm = compile_model(model)
    eng = make_engine(cm, engine)
    n = len(sk.processes)
    labels = [
        [(p.name, e.src, e.dst) for e in p.edges] for p in sk.processes
    ]
    n_edges = [len(p.edges) for p in sk.processes]

    def classify(choice):
        """(kind, payload): ("tick", clock indexes to advance) or
        ("event", (process index, edge index))."""
        if isinstance(choice, Solo):
            if choice.process == n:
                return "tick", range(n)  # global clock: everyone advances
            assert choice.transition < n_edges[choice.process]
            return "event", (choice.process, choice.transition)
        assert isinstance(choice, Rendezvous) and choice.sender[0] == n
        return "tick", (choice.receiver[0],)

    memo: dict[tuple[bytes, tuple[int, ...], int], frozenset] = {}

    def tails(state: bytes, clocks: tuple[int, ...], events_left: int) -> frozenset:
        key = (state, clocks, events_left)
        hit = memo.get(key)
        if hit is not None:
            return hit
        out = {()}  # a run may stop being observed anywhere
        for cid in eng.enabled(state):
            kind, payload = classify(choice_from_id(cm, cid))
            if kind == "tick":
                advanced = list(clocks)
                for i in payload:
                    advanced[i] += 1
                if max(advanced) > max_time:
                    continue
                out |= tails(eng.fire(state, cid), tuple(advanced), events_left)
            else:
                if events_left == 0:
                    continue
                pi, ei = payload
                ev = (labels[pi][ei], clocks[pi])
                for w in tails(eng.fire(state, cid), clocks, events_left - 1):
                    out.add((ev,) + w)
        result = frozenset(out)
        memo[key] = result
        return result

    raw = tails(cm.encode(cm.init), (0,) * n, max_events)
    return frozenset(tuple(sorted(w, key=lambda ev: ev[1])) for w in raw)
