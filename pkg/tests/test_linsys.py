"""Tests for exact rationals and the dense LU solver."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nlosc.linsys import (
    DenseSystem,
    Rational,
    SingularMatrixError,
    lu_solve,
    rational,
    to_real,
)


# ---------------------------------------------------------------------------
# rationals
# ---------------------------------------------------------------------------


def test_rational_normalizes():
    q = rational(2, 4)
    assert q == Rational(1, 2)
    assert q.numerator == 1 and q.denominator == 2


def test_rational_sign_lives_in_numerator():
    q = rational(1, -2)
    assert q.numerator == -1 and q.denominator == 2


def test_weight_normalization_identity_is_exact():
    # 2*(1/6) + 2*(1/6) + 1/3 == 1 with no rounding
    total = 2 * rational(1, 6) + 2 * rational(1, 6) + rational(1, 3)
    assert total == 1


def test_to_real_is_correctly_rounded():
    assert to_real(rational(-1, 720)) == -1.0 / 720.0


def test_rational_accepts_strings():
    assert rational("31/180") == Rational(31, 180)


def test_rational_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        rational(1, 0)


def test_rational_rejects_floats():
    with pytest.raises(TypeError):
        rational(0.5)


small_rationals = st.builds(
    Rational,
    st.integers(min_value=-40, max_value=40),
    st.integers(min_value=1, max_value=40),
)


@given(small_rationals, small_rationals, small_rationals)
def test_rational_arithmetic_is_exact(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


# ---------------------------------------------------------------------------
# dense solver
# ---------------------------------------------------------------------------


def test_lu_identity():
    system = DenseSystem(np.eye(2), np.array([3.0, -1.0]))
    assert np.allclose(lu_solve(system), [3.0, -1.0], rtol=0, atol=0)


def test_lu_two_by_two():
    system = DenseSystem(np.array([[2.0, 1.0], [1.0, 3.0]]), np.array([4.0, 7.0]))
    assert lu_solve(system) == pytest.approx([1.0, 2.0], rel=1e-14)


def test_lu_singular():
    system = DenseSystem(np.array([[1.0, 1.0], [2.0, 2.0]]), np.array([1.0, 0.0]))
    with pytest.raises(SingularMatrixError):
        lu_solve(system)


def test_lu_requires_pivoting():
    # zero leading pivot is fine with row exchanges
    system = DenseSystem(np.array([[0.0, 1.0], [1.0, 0.0]]), np.array([5.0, 7.0]))
    assert lu_solve(system) == pytest.approx([7.0, 5.0], rel=1e-15)


def test_dense_system_validates_shapes():
    with pytest.raises(ValueError):
        DenseSystem(np.zeros((2, 3)), np.zeros(2))
    with pytest.raises(ValueError):
        DenseSystem(np.zeros((2, 2)), np.zeros(3))


def test_lu_rejects_non_finite():
    with pytest.raises(ValueError):
        lu_solve(DenseSystem(np.array([[1.0, np.nan], [0.0, 1.0]]), np.zeros(2)))


@pytest.mark.parametrize("size", [5, 20, 80, 200])
def test_lu_residual_on_well_conditioned_systems(size):
    rng = np.random.default_rng(size)
    # diagonally dominated random matrices stay far from singular
    a = rng.standard_normal((size, size)) + size * np.eye(size)
    assert np.linalg.cond(a) < 1e6
    b = rng.standard_normal(size)
    x = lu_solve(DenseSystem(a, b))
    residual = np.max(np.abs(a @ x - b))
    assert residual <= 1e-10 * (1.0 + np.max(np.abs(b)))
    assert residual / (np.max(np.abs(b)) + np.max(np.abs(a)) * np.max(np.abs(x))) <= 1e-9
