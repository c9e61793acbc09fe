import math

import numpy as np
import pytest

from reflectode import InvalidInputError, parse_forcing
from reflectode.expr import ExpressionError


def test_squared_cosine():
    f = parse_forcing("cos(3*t)^2")
    t = np.linspace(-2, 2, 11)
    np.testing.assert_array_equal(f(t), np.cos(3 * t) ** 2)
    assert f.breakpoints == () and f.singular_points == ()


def test_bump_values_and_edges():
    f = parse_forcing("bump(1)")
    assert f.breakpoints == (0.0, 1.0)
    assert f(0.5) == 3.0
    assert f(-0.1) == 0.0 and f(1.2) == 0.0


def test_negative_power_of_abs_is_singular():
    f = parse_forcing("abs(t)^(-0.5)")
    assert f.singular_points == (0.0,)
    assert f.breakpoints == ()
    assert f(4.0) == 0.5


@pytest.mark.parametrize(
    "text, value",
    [("2^3^2", 512.0), ("-2^2", -4.0), ("2*-3", -6.0), ("1 - 2 - 3", -4.0), ("12/3/2", 2.0), ("pi", math.pi),
     ("e", math.e), ("pow(2, 10)", 1024.0), ("ln(e^2)", 2.0), ("+t", 1.5), ("1e-3*1000", 1.0), (".5", 0.5)],
)
def test_precedence_and_constants(text, value):
    assert parse_forcing(text)(1.5) == pytest.approx(value, rel=1e-15)


def test_rational_forcing_from_odd_reflection_example():
    f = parse_forcing("(2*t^2 - 2*t + 2)/(1+t^2)^2")
    assert f(1.0) == pytest.approx(0.5)


def test_step_and_kink_metadata():
    f = parse_forcing("step(-1, 2) + abs(3*t - 1) + ln(t + 4)")
    assert f.breakpoints == (-1.0, 1 / 3, 2.0)
    assert f.singular_points == (-4.0,)
    assert f(0.0) == pytest.approx(1 + 1 + math.log(4))


def test_singular_zero_is_not_negative_zero():
    (point,) = parse_forcing("pow(-t, -0.3)").singular_points
    assert math.copysign(1.0, point) == 1.0


def test_forcing_conversion_keeps_metadata():
    forcing = parse_forcing("bump(2)").to_forcing()
    assert forcing.breakpoints == (0.0, 2.0)
    assert forcing.label == "bump(2)"


@pytest.mark.parametrize(
    "text, offset",
    [("cos(t", 5), ("2 +", 3), ("t $ 2", 2), ("foo(t)", 0), ("x + 1", 0), ("sin(t, t)", 0), ("bump(t)", 5),
     ("(1 + t))", 7), ("", 0)],
)
def test_errors_carry_offsets(text, offset):
    with pytest.raises(ExpressionError) as info:
        parse_forcing(text)
    assert info.value.offset == offset
    assert f"offset {offset}" in str(info.value)


def test_expression_errors_are_invalid_input():
    with pytest.raises(InvalidInputError):
        parse_forcing("1 +* 2")
    with pytest.raises(InvalidInputError):
        parse_forcing(3.0)
