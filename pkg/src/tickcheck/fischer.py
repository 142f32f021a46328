"""Fischer's timed mutual-exclusion protocol as a benchmark family.

Each thread ``i`` runs the classic loop over a shared lock variable ``x``
(0 = free) and a critical-section counter ``c``::

    ncs -> a              (request)
    a   -> b   when x == 0, arming a write deadline of delta ticks
    b   -> c   within the deadline: x := i, arming the test window
    c   -> a   in the window, if x != i   (lost the race, retry)
    c   -> cs  in the window, if x == i   (won: c := c + 1)
    cs  -> ncs x := 0, c := c - 1

The test window is armed as ``(eps + 2, eps_upper + 2)``: one extra tick
because the deadline bound must be beaten *strictly*, and one more because
in the distributed encoding two local clocks can disagree by a tick within
one round-robin cycle.  With that margin and ``delta <= eps``, every
competitor's write lands before anyone tests, and mutual exclusion
``G (c < 2)`` holds in both encodings.  Passing ``eps=0`` shrinks the
window below the write deadline and lets two threads pass the test
together — the canonical seeded bug for counterexample demos.
"""

from __future__ import annotations

from dataclasses import dataclass

from .generate import gen_ledm, gen_sedm
from .ltl import Formula, parse_ltl
from .model import Assign, BinOp, IntLit, Model, Name, VarDecl
from .skeleton import (
    SkeletonEdge,
    SkeletonProcess,
    TimedSkeleton,
    TimerSet,
    Trigger,
    ValidationError,
    validate_skeleton,
)

__all__ = ["METHODS", "ALGORITHMS", "FischerConfig", "fischer_skeleton", "build_fischer"]

METHODS = ("ledm", "sedm")
ALGORITHMS = ("ndfs", "owcty")


@dataclass(frozen=True)
class FischerConfig:
    n_threads: int
    T: int  # default for delta, eps, and eps_upper
    method: str = "ledm"
    algorithm: str = "ndfs"


def fischer_skeleton(
    n_threads: int,
    T: int,
    delta: int | None = None,
    eps: int | None = None,
    eps_upper: int | None = None,
) -> TimedSkeleton:
    """The protocol skeleton; ``delta``/``eps``/``eps_upper`` default to ``T``."""
    if n_threads < 1:
        raise ValidationError("need at least one thread")
    if T < 1:
        raise ValidationError("the tick bound T must be at least 1")
    delta = T if delta is None else delta
    eps = T if eps is None else eps
    eps_upper = T if eps_upper is None else eps_upper
    if eps > eps_upper:
        raise ValidationError("test window opens after it closes")

    procs = []
    for i in range(1, n_threads + 1):
        mine = IntLit(i)
        procs.append(
            SkeletonProcess(
                name=f"P{i}",
                init="ncs",
                timers=("tb", "tc"),
                edges=(
                    SkeletonEdge("ncs", "a"),
                    SkeletonEdge(
                        "a",
                        "b",
                        None,
                        (TimerSet("tb", 0, delta),),
                        BinOp("==", Name("x"), IntLit(0)),
                    ),
                    SkeletonEdge(
                        "b",
                        "c",
                        Trigger("within", "tb"),
                        (TimerSet("tc", eps + 2, eps_upper + 2),),
                        None,
                        (Assign("x", mine),),
                    ),
                    SkeletonEdge(
                        "c", "a", Trigger("within", "tc"), (), BinOp("!=", Name("x"), mine)
                    ),
                    SkeletonEdge(
                        "c",
                        "cs",
                        Trigger("within", "tc"),
                        (),
                        BinOp("==", Name("x"), mine),
                        (Assign("c", BinOp("+", Name("c"), IntLit(1))),),
                    ),
                    SkeletonEdge(
                        "cs",
                        "ncs",
                        None,
                        (),
                        None,
                        (
                            Assign("c", BinOp("-", Name("c"), IntLit(1))),
                            Assign("x", IntLit(0)),
                        ),
                    ),
                ),
            )
        )
    sk = TimedSkeleton(tuple(procs), (VarDecl("x", 0), VarDecl("c", 0)))
    validate_skeleton(sk)
    return sk


def build_fischer(cfg: FischerConfig) -> tuple[Model, Formula]:
    """The model for ``cfg`` plus the mutual-exclusion property to check."""
    if cfg.method not in METHODS:
        raise ValueError(f"unknown method {cfg.method!r}")
    if cfg.algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {cfg.algorithm!r}")
    sk = fischer_skeleton(cfg.n_threads, cfg.T)
    model = gen_ledm(sk) if cfg.method == "ledm" else gen_sedm(sk)
    return model, parse_ltl("G (c < 2)")
