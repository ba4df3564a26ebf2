import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from despeckle.grid import divergence, gradient, inner, norm1, norm2, norm_inf, tv_norm


def test_gradient_footnote_example():
    z = gradient([[0, 0], [0, 1]])
    np.testing.assert_array_equal(z[0], [[0, 1], [0, 0]])
    np.testing.assert_array_equal(z[1], [[0, 0], [1, 0]])


@pytest.mark.parametrize("shape", [(1, 1), (3, 7), (6, 6)])
def test_gradient_of_constant_vanishes(shape):
    assert not gradient(np.full(shape, 4.2)).any()


def test_gradient_single_pixel():
    np.testing.assert_array_equal(gradient([[5.0]]), np.zeros((2, 1, 1)))


def test_gradient_boundary_rows_are_zero():
    u = np.random.default_rng(0).standard_normal((5, 4))
    z = gradient(u)
    assert not z[0, -1].any()
    assert not z[1, :, -1].any()


def test_divergence_footnote_example():
    z = np.zeros((2, 2, 2))
    z[0] = [[1, 0], [0, 0]]
    np.testing.assert_array_equal(divergence(z), [[1, 0], [-1, 0]])


def test_divergence_of_zero_field():
    assert not divergence(np.zeros((2, 3, 5))).any()


def test_divergence_rejects_bad_shape():
    with pytest.raises(ValueError):
        divergence(np.zeros((3, 4, 4)))


@settings(max_examples=60, deadline=None)
@given(m=st.integers(1, 20), n=st.integers(1, 20), seed=st.integers(0, 2**32 - 1))
def test_adjointness(m, n, seed):
    rng = np.random.default_rng(seed)
    u = rng.standard_normal((m, n))
    z = rng.standard_normal((2, m, n))
    lhs = inner(gradient(u), z)
    assert abs(lhs + inner(u, divergence(z))) <= 1e-10 * (abs(lhs) + 1)


def test_div_grad_operator_norm_below_eight():
    rng = np.random.default_rng(1)
    for _ in range(20):
        u = rng.standard_normal((9, 13))
        u /= norm2(u)
        assert norm2(divergence(gradient(u))) <= 8.0


def test_tv_examples():
    assert tv_norm(np.full((4, 4), 3.0)) == 0.0
    assert tv_norm([[0, 0], [0, 1]]) == pytest.approx(2.0)


def test_tv_shift_invariant_and_positive():
    u = np.random.default_rng(2).standard_normal((8, 8))
    assert tv_norm(u) > 0
    assert tv_norm(u + 17.0) == pytest.approx(tv_norm(u), rel=1e-12)


def test_tv_is_isotropic_pixel_sum():
    u = np.array([[0.0, 3.0], [4.0, 0.0]])
    # pixel (0,0): (4, 3) -> 5; (0,1): (-3, 0) -> 3; (1,0): (0, -4) -> 4
    assert tv_norm(u) == pytest.approx(12.0)


def test_norms():
    u = np.random.default_rng(3).standard_normal((3, 4))
    assert inner(u, u) == pytest.approx(norm2(u) ** 2)
    assert norm1(np.zeros((2, 2))) == 0.0
    assert norm_inf([[3, -4]]) == 4.0


def test_inner_shape_mismatch():
    with pytest.raises(ValueError):
        inner(np.zeros((2, 2)), np.zeros((2, 3)))
