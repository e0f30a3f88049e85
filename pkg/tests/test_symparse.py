"""Expression grammar: parsing, canonical printing, error positions."""

from fractions import Fraction

import pytest

from rotlog import symop
from rotlog.symop import ExactScalar, SymOp
from rotlog.symparse import ExpressionError, UnknownSymbolError, parse_operator


def test_basic_terms():
    assert parse_operator("x*dy - y*dx") == symop.rotation_generator("z")
    assert parse_operator("x * dy") == symop.normal_order(["x", "dy"])


def test_commutator_bracket_evaluates():
    ihbar = ExactScalar((0, 1), hbar_power=1)
    assert parse_operator("[Lx, Ly]") == symop.angular_momentum("z") * ihbar


def test_check_zero_expression():
    assert parse_operator("[Lx, Ly] - i*hbar*Lz").is_zero


def test_unordered_product():
    # dx x^2 = x^2 dx + 2x  (frozen from brute-force application)
    expected = symop.normal_order(["x", "x", "dx"]) + symop.normal_order(["x"]) * 2
    assert parse_operator("dx*x^2") == expected


def test_rational_and_decimal_constants():
    assert parse_operator("1/2*x + 0.5*x") == symop.coordinate("x")
    assert parse_operator("3/4") == SymOp.identity(ExactScalar(Fraction(3, 4)))


def test_powers_and_parens():
    assert parse_operator("(x + y)^2") == parse_operator("x^2 + 2*x*y + y^2")


def test_unary_minus():
    assert parse_operator("-x*dy") == -symop.normal_order(["x", "dy"])
    assert parse_operator("2 - -2") == SymOp.identity(4)
    assert parse_operator("-2 + 2").is_zero


def test_implicit_multiplication():
    assert parse_operator("2i hbar x") == parse_operator("2*i*hbar*x")


def test_hbar_and_imaginary_unit():
    lz = parse_operator("-i*hbar*(x*dy - y*dx)")
    assert lz == symop.angular_momentum("z")


def test_print_parse_fixed_point():
    cases = [
        "x*dy - y*dx",
        "[Lx, Ly]",
        "dx*x^2",
        "1/2*i*x^3*dz - 7*hbar*y",
        "(1/2 + 3i)*x*dy",
        "[x, -i*hbar*dx]",
        "0",
    ]
    for text in cases:
        once = parse_operator(text)
        assert parse_operator(str(once)) == once, f"round trip failed for {text!r}"


def test_syntax_error_position():
    with pytest.raises(ExpressionError) as err:
        parse_operator("x*(y + ")
    assert err.value.position == len("x*(y + ")
    with pytest.raises(ExpressionError):
        parse_operator("x +* y")


def test_unknown_symbol():
    with pytest.raises(UnknownSymbolError) as err:
        parse_operator("x + foo")
    assert err.value.position == 4


def test_rational_requires_integers():
    with pytest.raises(ExpressionError):
        parse_operator("1.5/2")


def test_negative_power_rejected():
    with pytest.raises(ExpressionError):
        parse_operator("x^-1")
