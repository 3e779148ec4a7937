from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from padicradius.expr import ExprError, parse_ast, parse_expr, render, render_ast
from padicradius.field import PrimeConfig
from padicradius.laurent import LaurentPoly, RatFunc

from strategies import laurent_polys

CFG = PrimeConfig(3, 2, -1)


def test_examples():
    pi = CFG.pi
    assert parse_expr("pi*(1 - 3*T^2)", CFG) == LaurentPoly(CFG, {0: pi, 2: pi * (-3)})
    one_plus_t = LaurentPoly(CFG, {0: 1, 1: 1})
    assert parse_expr("1/(1+T)", CFG) == RatFunc(LaurentPoly.const(CFG, 1), one_plus_t)
    assert parse_expr("T^-1 + 2", CFG) == LaurentPoly(CFG, {-1: 1, 0: 2})


def test_precedence():
    assert parse_expr("-T^2", CFG) == LaurentPoly(CFG, {2: -1})
    assert parse_expr("2*T^2/4 - 1", CFG) == LaurentPoly(CFG, {0: -1, 2: Fraction(1, 2)})
    assert parse_expr("T^(-2)", CFG) == LaurentPoly(CFG, {-2: 1})
    assert parse_expr("pi^2", CFG) == LaurentPoly.const(CFG, -3)


@pytest.mark.parametrize("text, fragment", [
    ("x + 1", "unknown symbol"),
    ("T^1.5", "exponent must be an integer"),
    ("T^pi", "exponent must be an integer"),
    ("1/(T-T)", "division by zero"),
    ("(1 + T", "expected ')'"),
    ("", "empty expression"),
    ("1 +", "unexpected end"),
    ("0.5*T", "decimal literals"),
])
def test_errors_carry_position(text, fragment):
    with pytest.raises(ExprError) as exc:
        parse_expr(text, CFG)
    assert fragment in str(exc.value)
    assert "position" in str(exc.value)


def test_ast_render_round_trip():
    for text in ["pi*(1 - 3*T^2)", "-(T + 1)^-2 / 3", "T^(-1) - pi"]:
        a = parse_ast(text)
        assert parse_ast(render_ast(a)) == parse_ast(render_ast(parse_ast(render_ast(a))))
        assert parse_expr(render_ast(a), CFG) == parse_expr(text, CFG)


@given(st.data())
def test_render_round_trip(data):
    num = data.draw(laurent_polys(CFG))
    den = data.draw(laurent_polys(CFG))
    f = num if den.is_zero() else RatFunc(num, den)
    assert RatFunc.lift(parse_expr(render(f), CFG)) == RatFunc.lift(f)
