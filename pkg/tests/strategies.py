"""Hypothesis strategies for random small-but-valid models.

Generated variables are always declared ``wrap`` and every effect value is
taken mod 4, so random walks can never raise a domain error and state spaces
stay small enough for the brute-force oracle.
"""

from __future__ import annotations

from hypothesis import strategies as st

from tickcheck.model import (
    Assign,
    BinOp,
    ChannelDecl,
    IntLit,
    Model,
    Name,
    NotOp,
    Process,
    RECEIVE,
    SEND,
    SyncAction,
    Transition,
    VarDecl,
    validate_model,
)

_ARITH = ["+", "-", "*", "mod"]
_CMP = ["==", "!=", "<", "<=", ">", ">="]
_BOOL = ["&&", "||"]


def exprs(names: list[str], depth: int = 2):
    leaf = st.one_of(
        st.integers(min_value=0, max_value=3).map(IntLit),
        *([st.sampled_from(names).map(Name)] if names else []),
    )
    if depth == 0:
        return leaf
    sub = exprs(names, depth - 1)
    return st.one_of(
        leaf,
        st.tuples(st.sampled_from(_ARITH + _CMP + _BOOL), sub, sub).map(
            lambda t: BinOp(*t)
        ),
        sub.map(NotOp),
    )


@st.composite
def models(draw):
    n_globals = draw(st.integers(0, 2))
    globals_ = tuple(
        VarDecl(f"g{i}", draw(st.integers(0, 3)), wrap=True) for i in range(n_globals)
    )
    channels = []
    if draw(st.booleans()):
        channels.append(ChannelDecl("c0", 0))
    if draw(st.booleans()):
        channels.append(ChannelDecl("d0", 1))

    n_procs = draw(st.integers(1, 2))
    procs = []
    for pi in range(n_procs):
        n_locals = draw(st.integers(0, 1))
        locals_ = tuple(
            VarDecl(f"v{j}", draw(st.integers(0, 3)), wrap=True) for j in range(n_locals)
        )
        names = [g.name for g in globals_] + [v.name for v in locals_]
        n_states = draw(st.integers(1, 3))
        states = tuple(f"s{k}" for k in range(n_states))
        n_trans = draw(st.integers(0, 4))
        trans = []
        for _ in range(n_trans):
            src = draw(st.sampled_from(states))
            dst = draw(st.sampled_from(states))
            guard = draw(st.none() | exprs(names, 1))
            sync = None
            if channels and draw(st.integers(0, 2)) == 0:
                ch = draw(st.sampled_from(channels))
                if draw(st.booleans()):
                    payload = draw(exprs(names, 1)) if ch.arity else None
                    sync = SyncAction(ch.name, SEND, payload=payload)
                else:
                    target = draw(st.sampled_from(names)) if ch.arity and names else None
                    if ch.arity and target is None:
                        sync = None  # no variable to receive into
                    else:
                        sync = SyncAction(ch.name, RECEIVE, target=target)
            effects = tuple(
                Assign(draw(st.sampled_from(names)), BinOp("mod", draw(exprs(names)), IntLit(4)))
                for _ in range(draw(st.integers(0, 2)) if names else 0)
            )
            trans.append(Transition(src, dst, guard, sync, effects))
        procs.append(
            Process(f"P{pi}", states, states[0], (), locals_, tuple(trans))
        )
    return Model(tuple(channels), globals_, tuple(procs))


def valid_models():
    return models().filter(lambda m: not validate_model(m))
