"""tickcheck: explicit-state LTL checking for process/channel models, plus
generators that compile timing-annotated skeletons into plain untimed models
via discrete-time encodings."""

from .model import (
    Assign,
    BinOp,
    ChannelDecl,
    Diagnostic,
    DOMAIN_MAX,
    Expr,
    IntLit,
    Model,
    Name,
    NotOp,
    Process,
    SyncAction,
    Transition,
    VarDecl,
    render_model,
    validate_model,
)
from .parser import ParseError, parse_expression, parse_model
from .ir import CompileError, DomainError, LimitExceeded
from .explorer import (
    ReachabilityReport,
    Rendezvous,
    Solo,
    StateVector,
    apply_choice,
    enabled_choices,
    encode_state,
    explore_reachable,
    format_state,
    initial_state,
)
from .ltl import Formula, parse_ltl, to_buchi
from .checking import Lasso, ProductStats, Step, Verdict, render_trace, verify
from .skeleton import (
    SkeletonEdge,
    SkeletonProcess,
    TickConfig,
    TimedSkeleton,
    TimerSet,
    Trigger,
    ValidationError,
    parse_skeleton,
    validate_skeleton,
)
from .generate import gen_ledm, gen_preemptive_demo, gen_sedm, preemptive_skeleton
from .timedwords import enumerate_timed_words
from .fischer import FischerConfig, build_fischer, fischer_skeleton
from .bench import BenchmarkRecord, emit_table, run_benchmark

__version__ = "0.1.0"
