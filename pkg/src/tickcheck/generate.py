"""Compile timed skeletons into plain untimed models.

Two encodings of the same discrete-time semantics:

``gen_ledm``
    One extra ``Tick`` process with a single guarded self-loop advances
    every armed timer of every process at once.  Each timer becomes a pair
    of global countdown variables ``ub_<proc>_<timer>`` / ``lb_<proc>_<timer>``;
    the Tick loop is enabled only while no upper countdown has hit zero, so
    deadlines stop time until the waiting edge fires.

``gen_sedm``
    Time is distributed: the ``Tick`` process cycles through rendezvous
    channels ``chan_1 .. chan_N``, one per skeleton process, and each
    process advances its own local countdowns (``ub_<timer>`` / ``lb_<timer>``)
    in a receiving self-loop on its channel.  A process whose upper
    countdown hit zero refuses its rendezvous, which stalls the whole tick
    cycle — the distributed equivalent of the stopped clock.

Both encodings share the edge translation: a ``within``/``afterdelay``
trigger becomes the guard ``lb == 0``, ``inwindow`` becomes
``lb == 0 && ub > 0``, timers the edge leaves behind are parked at
``(infinity, 0)``, and arming clauses load both countdowns.  Timer names
read inside guards, effects, or bounds denote the remaining upper count and
are rewritten to the corresponding countdown variable.
"""

from __future__ import annotations

from .model import (
    RECEIVE,
    SEND,
    Assign,
    BinOp,
    ChannelDecl,
    Expr,
    IntLit,
    Model,
    Name,
    NotOp,
    Process,
    SyncAction,
    Transition,
    VarDecl,
    expr_names,
    validate_model,
)
from .skeleton import (
    INFINITE,
    SkeletonEdge,
    SkeletonProcess,
    TickConfig,
    TimedSkeleton,
    TimerSet,
    Trigger,
    ValidationError,
    validate_skeleton,
)

__all__ = ["gen_ledm", "gen_sedm", "preemptive_skeleton", "gen_preemptive_demo"]


def _rewrite(e: Expr, mapping: dict[str, str]) -> Expr:
    if isinstance(e, Name):
        return Name(mapping.get(e.ident, e.ident))
    if isinstance(e, BinOp):
        return BinOp(e.op, _rewrite(e.left, mapping), _rewrite(e.right, mapping))
    if isinstance(e, NotOp):
        return NotOp(_rewrite(e.operand, mapping))
    return e


def _conj(parts: list[Expr]) -> Expr | None:
    if not parts:
        return None
    out = parts[0]
    for p in parts[1:]:
        out = BinOp("&&", out, p)
    return out


def _reads_now(p: SkeletonProcess) -> bool:
    for e in p.edges:
        exprs = list(a.value for a in e.effects)
        if e.guard is not None:
            exprs.append(e.guard)
        if any("now" in expr_names(x) for x in exprs):
            return True
    return False


def _bound_expr(b: int | str, mapping: dict[str, str], infinity: int) -> Expr:
    if isinstance(b, int):
        return IntLit(b)
    if b == INFINITE:
        return IntLit(infinity)
    return Name(mapping.get(b, b))


def _trigger_guard(tr: Trigger, ub: str, lb: str) -> Expr:
    at_lower = BinOp("==", Name(lb), IntLit(0))
    if tr.kind == "inwindow":
        return BinOp("&&", at_lower, BinOp(">", Name(ub), IntLit(0)))
    return at_lower  # within and afterdelay both wait out the lower bound


def _edge_transition(
    e: SkeletonEdge,
    p: SkeletonProcess,
    ub_of: dict[str, str],
    lb_of: dict[str, str],
    cfg: TickConfig,
) -> Transition:
    mapping = ub_of  # timer reads mean the remaining upper count
    parts: list[Expr] = []
    if e.trigger is not None:
        t = e.trigger.timer
        parts.append(_trigger_guard(e.trigger, ub_of[t], lb_of[t]))
    if e.guard is not None:
        parts.append(_rewrite(e.guard, mapping))
    effects = [Assign(a.target, _rewrite(a.value, mapping)) for a in e.effects]
    armed = {s.timer for s in e.sets}
    for t in p.consumed_at(e.src):
        if t not in armed:  # leaving the wait: park the countdowns
            effects.append(Assign(ub_of[t], IntLit(cfg.infinity)))
            effects.append(Assign(lb_of[t], IntLit(0)))
    for s in e.sets:
        effects.append(Assign(ub_of[s.timer], _bound_expr(s.ub, mapping, cfg.infinity)))
        effects.append(Assign(lb_of[s.timer], _bound_expr(s.lb, mapping, cfg.infinity)))
    return Transition(e.src, e.dst, _conj(parts), None, tuple(effects))


def _advance_now(maximal: int) -> Assign:
    return Assign("now", BinOp("mod", BinOp("+", Name("now"), IntLit(1)), IntLit(maximal)))


def _countdown(ub: str, lb: str, infinity: int) -> list[Assign]:
    """One tick's worth of decrement; parked values stay put."""
    return [
        Assign(ub, BinOp("-", Name(ub), BinOp("!=", Name(ub), IntLit(infinity)))),
        Assign(lb, BinOp("-", Name(lb), BinOp("!=", Name(lb), IntLit(0)))),
    ]


def _checked(m: Model) -> Model:
    diags = validate_model(m)
    if diags:
        raise ValidationError(
            "generated model failed validation: " + "; ".join(str(d) for d in diags)
        )
    return m


def gen_ledm(sk: TimedSkeleton) -> Model:
    """Global-clock encoding: one Tick process drives every timer."""
    validate_skeleton(sk)
    cfg = sk.config
    emit_now = cfg.emit_now or any(_reads_now(p) for p in sk.processes)

    globals_: list[VarDecl] = list(sk.shared)
    if emit_now:
        globals_.append(VarDecl("now", 0))
    pairs: list[tuple[str, str]] = []  # (ub name, lb name) over all processes
    ub_names: dict[tuple[str, str], str] = {}
    lb_names: dict[tuple[str, str], str] = {}
    for p in sk.processes:
        for t in p.timers:
            ub, lb = f"ub_{p.name}_{t}", f"lb_{p.name}_{t}"
            ub_names[p.name, t], lb_names[p.name, t] = ub, lb
            globals_.append(VarDecl(ub, cfg.infinity))
            globals_.append(VarDecl(lb, 0))
            pairs.append((ub, lb))

    procs: list[Process] = []
    for p in sk.processes:
        ub_of = {t: ub_names[p.name, t] for t in p.timers}
        lb_of = {t: lb_names[p.name, t] for t in p.timers}
        procs.append(
            Process(
                p.name,
                p.locations,
                p.init,
                (),
                p.locals,
                tuple(_edge_transition(e, p, ub_of, lb_of, cfg) for e in p.edges),
            )
        )

    tick_effects: list[Assign] = [_advance_now(cfg.maximal)] if emit_now else []
    for ub, lb in pairs:
        tick_effects.extend(_countdown(ub, lb, cfg.infinity))
    tick_guard = _conj([BinOp(">", Name(ub), IntLit(0)) for ub, _ in pairs])
    procs.append(
        Process(
            "Tick",
            ("tick",),
            "tick",
            (),
            (),
            (Transition("tick", "tick", tick_guard, None, tuple(tick_effects)),),
        )
    )
    return _checked(Model((), tuple(globals_), tuple(procs)))


def gen_sedm(sk: TimedSkeleton) -> Model:
    """Distributed-clock encoding: the Tick process hands each skeleton
    process its tick over a dedicated rendezvous channel."""
    validate_skeleton(sk)
    cfg = sk.config
    n = len(sk.processes)
    channels = tuple(ChannelDecl(f"chan_{i}", 0) for i in range(1, n + 1))

    procs: list[Process] = []
    for i, p in enumerate(sk.processes, start=1):
        ub_of = {t: f"ub_{t}" for t in p.timers}
        lb_of = {t: f"lb_{t}" for t in p.timers}
        emit_now = cfg.emit_now or _reads_now(p)
        locals_: list[VarDecl] = list(p.locals)
        if emit_now:
            locals_.append(VarDecl("now", 0))
        for t in p.timers:
            locals_.append(VarDecl(ub_of[t], cfg.infinity))
            locals_.append(VarDecl(lb_of[t], 0))

        transitions = [_edge_transition(e, p, ub_of, lb_of, cfg) for e in p.edges]
        for loc in p.locations:
            consumed = p.consumed_at(loc)
            guard = _conj([BinOp(">", Name(ub_of[t]), IntLit(0)) for t in consumed])
            effects: list[Assign] = [_advance_now(cfg.maximal)] if emit_now else []
            for t in consumed:
                effects.extend(_countdown(ub_of[t], lb_of[t], cfg.infinity))
            transitions.append(
                Transition(
                    loc,
                    loc,
                    guard,
                    SyncAction(f"chan_{i}", RECEIVE),
                    tuple(effects),
                )
            )
        procs.append(
            Process(p.name, p.locations, p.init, (), tuple(locals_), tuple(transitions))
        )

    tick_states = tuple(f"tick_{i}" for i in range(1, n + 1))
    tick_transitions = tuple(
        Transition(
            f"tick_{i}",
            f"tick_{i % n + 1}",
            None,
            SyncAction(f"chan_{i}", SEND),
            (),
        )
        for i in range(1, n + 1)
    )
    procs.append(Process("Tick", tick_states, "tick_1", (), (), tick_transitions))
    return _checked(Model(channels, tuple(sk.shared), tuple(procs)))


# ---------------------------------------------------------------------------
# Preemptive-scheduling demo
# ---------------------------------------------------------------------------


def preemptive_skeleton(n_low: int, exec_ticks: int) -> TimedSkeleton:
    """Tasks contend for one resource; higher task index wins.

    Task ``k`` grabs the resource whenever a lower-priority task (or nobody)
    holds it, then needs ``exec_ticks`` ticks of work, tracked by the
    fixed-delay timer ``w``.  If a higher-priority task snatches the
    resource mid-run, the victim banks the remaining work (``timeToGo = w``)
    and waits; once the resource frees up it re-arms ``w`` with the banked
    remainder, so preempted work resumes instead of restarting.
    """
    if n_low < 0:
        raise ValidationError("need a nonnegative number of low-priority tasks")
    if exec_ticks < 1:
        raise ValidationError("tasks need at least one tick of work")
    procs = []
    for tag in range(1, n_low + 2):
        grab = (Assign("isROccupied", IntLit(tag)),)
        rearm = (TimerSet("w", "timeToGo", "timeToGo"),)
        procs.append(
            SkeletonProcess(
                name=f"Task{tag}",
                init="idle",
                timers=("w",),
                locals=(VarDecl("timeToGo", exec_ticks),),
                edges=(
                    SkeletonEdge(
                        "idle",
                        "exec",
                        None,
                        rearm,
                        BinOp("<", Name("isROccupied"), IntLit(tag)),
                        grab,
                    ),
                    SkeletonEdge(
                        "exec",
                        "done",
                        Trigger("afterdelay", "w"),
                        (),
                        None,
                        (Assign("isROccupied", IntLit(0)),),
                    ),
                    SkeletonEdge(
                        "exec",
                        "deprived",
                        None,
                        (),
                        BinOp(
                            "&&",
                            BinOp("!=", Name("isROccupied"), IntLit(tag)),
                            BinOp(">", Name("w"), IntLit(0)),
                        ),
                        (Assign("timeToGo", Name("w")),),
                    ),
                    SkeletonEdge(
                        "deprived",
                        "exec",
                        None,
                        rearm,
                        BinOp("==", Name("isROccupied"), IntLit(0)),
                        grab,
                    ),
                ),
            )
        )
    sk = TimedSkeleton(tuple(procs), (VarDecl("isROccupied", 0),))
    validate_skeleton(sk)
    return sk


def gen_preemptive_demo(n_low: int, exec_ticks: int, method: str = "ledm") -> Model:
    sk = preemptive_skeleton(n_low, exec_ticks)
    if method == "ledm":
        return gen_ledm(sk)
    if method == "sedm":
        return gen_sedm(sk)
    raise ValueError(f"unknown method {method!r}")
