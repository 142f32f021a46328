"""The timed mutual-exclusion benchmark family: skeleton shape, safety
verdicts, and the seeded-bug counterexample replay."""

import pytest

from tickcheck.checking import verify
from tickcheck.explorer import apply_choice
from tickcheck.fischer import (
    ALGORITHMS,
    METHODS,
    FischerConfig,
    build_fischer,
    fischer_skeleton,
)
from tickcheck.generate import gen_ledm, gen_sedm
from tickcheck.ir import compile_model
from tickcheck.ltl import parse_ltl
from tickcheck.model import BinOp, IntLit, Name
from tickcheck.skeleton import TimerSet, ValidationError


def test_skeleton_shape():
    sk = fischer_skeleton(2, 1)
    assert [p.name for p in sk.processes] == ["P1", "P2"]
    assert [(v.name, v.init) for v in sk.shared] == [("x", 0), ("c", 0)]
    for i, p in enumerate(sk.processes, start=1):
        assert p.init == "ncs"
        assert p.timers == ("tb", "tc")
        assert [(e.src, e.dst) for e in p.edges] == [
            ("ncs", "a"),
            ("a", "b"),
            ("b", "c"),
            ("c", "a"),
            ("c", "cs"),
            ("cs", "ncs"),
        ]
        request, claim, write, retry, enter, leave = p.edges
        assert claim.guard == BinOp("==", Name("x"), IntLit(0))
        assert write.effects[0].target == "x"
        assert write.effects[0].value == IntLit(i)
        assert retry.guard == BinOp("!=", Name("x"), IntLit(i))
        assert enter.guard == BinOp("==", Name("x"), IntLit(i))
        assert enter.effects[0].target == "c"
        assert [a.target for a in leave.effects] == ["c", "x"]


def test_bounds_default_to_T_with_skew_margin():
    sk = fischer_skeleton(1, 3)
    claim, write = sk.processes[0].edges[1], sk.processes[0].edges[2]
    # the write deadline is T; the test window gets the +2 margin (strict
    # beat of the deadline, plus one tick of distributed clock skew)
    assert claim.sets == (TimerSet("tb", 0, 3),)
    assert write.sets == (TimerSet("tc", 5, 5),)


def test_explicit_bounds_respected():
    sk = fischer_skeleton(1, 1, delta=2, eps=3, eps_upper=4)
    claim, write = sk.processes[0].edges[1], sk.processes[0].edges[2]
    assert claim.sets == (TimerSet("tb", 0, 2),)
    assert write.sets == (TimerSet("tc", 5, 6),)


def test_skeleton_parameter_validation():
    with pytest.raises(ValidationError):
        fischer_skeleton(0, 1)
    with pytest.raises(ValidationError):
        fischer_skeleton(1, 0)
    with pytest.raises(ValidationError):
        fischer_skeleton(1, 1, eps=3, eps_upper=2)


def test_build_fischer_returns_model_and_property():
    m, f = build_fischer(FischerConfig(2, 1, "ledm", "ndfs"))
    assert f == parse_ltl("G (c < 2)")
    assert m.processes[-1].name == "Tick"
    assert {v.name for v in m.globals} >= {"x", "c"}
    m2, _ = build_fischer(FischerConfig(2, 1, "sedm", "owcty"))
    assert [c.name for c in m2.channels] == ["chan_1", "chan_2"]


def test_build_fischer_rejects_unknown_settings():
    with pytest.raises(ValueError):
        build_fischer(FischerConfig(1, 1, "zedm", "ndfs"))
    with pytest.raises(ValueError):
        build_fischer(FischerConfig(1, 1, "ledm", "bfs"))


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("T", [1, 2])
def test_mutual_exclusion_holds_everywhere(n, T):
    verdicts = set()
    for method in METHODS:
        m, f = build_fischer(FischerConfig(n, T, method))
        for algorithm in ALGORITHMS:
            verdicts.add(verify(m, f, algorithm).holds)
    assert verdicts == {True}


def test_critical_section_is_actually_reached():
    # the safety verdict must not be vacuous: some run does enter
    m, _ = build_fischer(FischerConfig(1, 1, "ledm"))
    assert not verify(m, parse_ltl("G (c < 1)")).holds


def _value_of(m, state, name):
    return state.values[compile_model(m).global_scope[name]]


@pytest.mark.parametrize("method", METHODS)
def test_shrunken_window_breaks_exclusion_and_replays(method):
    # eps = 0 arms the test window before the rival's write deadline has
    # passed, resurrecting the race the timing bounds exist to prevent
    sk = fischer_skeleton(2, 2, eps=0)
    m = gen_ledm(sk) if method == "ledm" else gen_sedm(sk)
    f = parse_ltl("G (c < 2)")
    result = verify(m, f, "ndfs")
    assert not result.holds
    assert verify(m, f, "owcty").holds is False

    lasso = result.counterexample
    peak = 0
    at = lasso.initial.system
    peak = max(peak, _value_of(m, at, "c"))
    for step in lasso.stem + lasso.cycle:
        if step.choice is not None:
            at = apply_choice(m, at, step.choice)
            assert at == step.state.system
        else:  # stutter extension on a deadlock: state stays put
            assert step.state.system == at
        peak = max(peak, _value_of(m, at, "c"))
    assert peak == 2


def test_configs_are_hashable_grid_keys():
    grid = {FischerConfig(n, T) for n in (1, 2) for T in (1, 2)}
    assert len(grid) == 4
