import numpy as np
import pytest
from hypothesis import given, strategies as st

from magorlicz.errors import ParseError, PointEvaluationError
from magorlicz.expr import (Binary, Call, Const, Imag, Num, Unary, Var, evaluate,
                            parse_expression, tokenize)


def ev(src, **env):
    return evaluate(parse_expression(src, variables=tuple(env) or ("x1",)),
                    {k: np.asarray(v, dtype=float) for k, v in env.items()})


@pytest.mark.parametrize("src, expected", [
    ("1 + 2 * 3", 7.0),
    ("(1 + 2) * 3", 9.0),
    ("2 ^ 3 ^ 2", 512.0),
    ("-2 ^ 2", -4.0),
    ("2 ^ -1", 0.5),
    ("8 / 4 / 2", 1.0),
    ("10 - 4 - 3", 3.0),
    ("sqrt(16) + abs(-3)", 7.0),
    ("exp(log(5))", 5.0),
    ("1.5e2 + .5", 150.5),
])
def test_precedence_and_associativity(src, expected):
    assert float(ev(src, x1=0.0)) == pytest.approx(expected, rel=1e-15)


def test_variables_and_constants():
    assert float(ev("x1 * x2 + pi", x1=2.0, x2=3.0)) == pytest.approx(6 + np.pi)
    z = evaluate(parse_expression("exp(i * pi)", dimension=1), {"x1": np.zeros(())})
    assert complex(z) == pytest.approx(-1.0 + 0j, abs=1e-15)


def test_vectorised_evaluation():
    x = np.linspace(0, 1, 7)
    out = evaluate(parse_expression("1 - x1^2", dimension=1), {"x1": x})
    np.testing.assert_allclose(out, 1 - x ** 2)


def test_is_complex():
    assert parse_expression("x1 + i", dimension=1).is_complex()
    assert not parse_expression("sin(x1)", dimension=1).is_complex()


@pytest.mark.parametrize("src, offset", [
    ("x1 + ", 5),
    ("x1 * * 2", 5),
    ("(x1 + 1", 7),
    ("x3", 0),
    ("foo(x1)", 0),
    ("x1 $ 2", 3),
    ("sin(x1, x1)", 0),
])
def test_parse_errors_carry_offsets(src, offset):
    with pytest.raises(ParseError) as info:
        parse_expression(src, dimension=2)
    assert info.value.offset == offset
    assert f"at offset {offset}" in str(info.value)


def test_empty_expression():
    with pytest.raises(ParseError):
        parse_expression("   ", dimension=1)


def test_tokens_end_at_length():
    toks = tokenize("x1+2")
    assert toks[-1].kind == "end" and toks[-1].offset == 4


@pytest.mark.parametrize("src, x", [
    ("1 / x1", [1.0, 0.0]),
    ("log(x1)", [1.0, -1.0]),
    ("sqrt(x1)", [-2.0]),
    ("x1 ^ 0.5", [-1.0]),
    ("x1 ^ -1", [0.0]),
])
def test_point_errors_locate_the_point(src, x):
    with pytest.raises(PointEvaluationError) as info:
        ev(src, x1=x)
    assert info.value.point is not None


def test_point_error_reports_coordinates():
    with pytest.raises(PointEvaluationError) as info:
        ev("1 / (x1 - x2)", x1=[1.0, 2.0], x2=[0.0, 2.0])
    assert info.value.point == (2.0, 2.0)


# random ASTs for the pretty-print round trip
_leaves = st.one_of(
    st.floats(0, 1e6, allow_nan=False, allow_infinity=False).map(Num),
    st.sampled_from(["x1", "x2"]).map(Var),
    st.sampled_from(["pi", "e"]).map(Const),
    st.just(Imag()),
)
_trees = st.recursive(_leaves, lambda sub: st.one_of(
    st.builds(Unary, st.just("-"), sub),
    st.builds(Binary, st.sampled_from("+-*/^"), sub, sub),
    st.builds(lambda f, a: Call(f, (a,)), st.sampled_from(["sin", "exp", "abs"]), sub),
), max_leaves=12)


@given(_trees)
def test_pretty_print_round_trip(tree):
    again = parse_expression(str(tree), dimension=2)
    assert again == tree
    assert str(again) == str(tree)
