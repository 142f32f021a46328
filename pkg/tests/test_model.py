"""Validation diagnostics and expression utilities."""

import pytest

from tickcheck.model import (
    BinOp,
    IntLit,
    Name,
    VALUE_BOUND,
    expr_magnitude_bound,
    expr_names,
    validate_model,
)
from tickcheck.parser import parse_expression, parse_model


def diags(text):
    return [str(d) for d in validate_model(parse_model(text))]


# (model text, fragment expected in some diagnostic)
BAD_MODELS = [
    ("", "no process"),
    ("channel a, a;", "duplicate channel 'a'"),
    ("int x; int x;", "duplicate global variable 'x'"),
    ("process P { state a; init a; } process P { state a; init a; }", "duplicate process"),
    ("int x = 70000; process P { state a; init a; }", "outside 0..65535"),
    ("process P { int v; int v; state a; init a; }", "duplicate local variable 'v'"),
    ("process P { state a, a; init a; }", "duplicate state 'a'"),
    ("process P { state a; init b; }", "initial state 'b' not declared"),
    ("process P { state a; init a; accept z; }", "accepting state 'z' not declared"),
    ("process P { state a; init a; trans a -> z {}; }", "unknown target state"),
    ("process P { state a; init a; trans z -> a {}; }", "unknown source state"),
    (
        "process P { state a; init a; trans a -> a { guard y == 0; }; }",
        "undeclared variable 'y'",
    ),
    (
        "process P { state a; init a; trans a -> a { effect y = 1; }; }",
        "assignment to undeclared variable 'y'",
    ),
    (
        "process P { state a; init a; trans a -> a { sync ch!; }; }",
        "undeclared channel 'ch'",
    ),
    (
        "channel c; process P { state a; init a; trans a -> a { sync c!1; }; }",
        "carries no value",
    ),
    (
        "channel int d; process P { state a; init a; trans a -> a { sync d!; }; }",
        "needs a value",
    ),
    (
        "channel int d; process P { state a; init a; trans a -> a { sync d?; }; }",
        "needs a variable",
    ),
    (
        "channel c; process P { state a; init a; trans a -> a { sync c?x; }; }",
        "carries no value",
    ),
]


@pytest.mark.parametrize("text,fragment", BAD_MODELS)
def test_diagnostics(text, fragment):
    found = diags(text)
    assert any(fragment in d for d in found), f"{fragment!r} not in {found}"


def test_clean_model_has_no_diagnostics():
    assert (
        diags(
            "channel int d; int x;"
            " process P { state a, b; init a;"
            " trans a -> b { guard x < 3; sync d!x + 1; effect x = x * 2; }; }"
            " process Q { int y; state r; init r;"
            " trans r -> r { sync d?y; }; }"
        )
        == []
    )


def test_diagnostics_name_the_process():
    out = validate_model(parse_model("process Badly { state a; init nope; }"))
    assert out and out[0].process == "Badly"
    assert "Badly" in str(out[0])


def test_validation_never_raises_on_weird_models():
    # a model that is structurally odd in several ways at once
    out = diags(
        "channel c; process P { state a; init q;"
        " trans a -> a { guard zz; sync c!come + 1; effect qq = 1; }; }"
    )
    assert len(out) >= 3


def test_magnitude_bound_flags_huge_products():
    # 65535^4 exceeds the evaluator range; the validator must say so
    big = "x * x * x * x * 65535"
    m = parse_model(
        f"int x; process P {{ state a; init a; trans a -> a {{ guard {big} > 0; }}; }}"
    )
    assert any("value range" in str(d) for d in validate_model(m))
    # while a mere product of two variables stays comfortably inside
    e = parse_expression("x * x")
    assert expr_magnitude_bound(e) == 65535 * 65535 < VALUE_BOUND


def test_expr_helpers():
    e = parse_expression("a + b * c mod 2 - a")
    assert expr_names(e) == {"a", "b", "c"}
    assert expr_magnitude_bound(IntLit(7)) == 7
    assert expr_magnitude_bound(BinOp("==", Name("a"), Name("b"))) == 1
