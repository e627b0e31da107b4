"""
Unit tests for dense helpers, MLP stacks and the gradient oracle.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from relkd.exceptions import DimensionError, GradientOracleError
from relkd.numerics import (
    Layer,
    MlpParams,
    RngStream,
    assert_grad_close,
    fd_grad,
    init_mlp,
    l2_normalize_rows,
    matmul,
    mlp_backward,
    mlp_forward,
    softmax_rows,
)

finite_rows = arrays(
    np.float64,
    st.tuples(st.integers(1, 5), st.integers(1, 6)),
    elements=st.floats(-50, 50, allow_nan=False, allow_infinity=False),
)


class TestMatmul:
    """Tests for matmul."""

    def test_identity(self):
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        np.testing.assert_array_equal(matmul(np.eye(2), a), a)

    def test_zero_vector(self):
        out = matmul(np.array([[1.0, 2.0], [3.0, 4.0]]), np.zeros((2, 1)))
        np.testing.assert_array_equal(out, [[0.0], [0.0]])

    def test_hand_expansion(self):
        out = matmul(np.array([[1.0, 2.0], [3.0, 4.0]]), np.ones((2, 1)))
        np.testing.assert_array_equal(out, [[3.0], [7.0]])

    def test_shape_mismatch_raises(self):
        with pytest.raises(DimensionError):
            matmul(np.ones((2, 3)), np.ones((2, 3)))


class TestSoftmax:
    """Tests for softmax_rows."""

    def test_symmetric_row(self):
        np.testing.assert_allclose(softmax_rows(np.zeros((1, 2))), [[0.5, 0.5]])

    def test_constant_row(self):
        np.testing.assert_allclose(softmax_rows(np.full((1, 3), 7.0)), [[1 / 3, 1 / 3, 1 / 3]])

    def test_closed_form(self):
        out = softmax_rows(np.array([[1.0, 0.0]]))
        np.testing.assert_allclose(out, [[0.731059, 0.268941]], atol=1e-6)

    def test_large_logits_are_stable(self):
        out = softmax_rows(np.array([[1000.0, 0.0, -1000.0]]))
        assert np.all(np.isfinite(out))
        assert out[0, 0] == pytest.approx(1.0)

    @given(finite_rows, st.floats(-100, 100))
    def test_rows_sum_to_one_and_shift_invariant(self, logits, shift):
        p = softmax_rows(logits)
        assert np.all(p >= 0)
        np.testing.assert_allclose(p.sum(axis=1), 1.0, atol=1e-12)
        np.testing.assert_allclose(softmax_rows(logits + shift), p, atol=1e-12)


class TestL2Normalize:
    """Tests for l2_normalize_rows."""

    def test_three_four_five(self):
        np.testing.assert_allclose(l2_normalize_rows(np.array([[3.0, 4.0]])), [[0.6, 0.8]])

    def test_zero_row_guard(self):
        np.testing.assert_array_equal(l2_normalize_rows(np.zeros((1, 2)), eps=1e-12), [[0.0, 0.0]])

    def test_diagonal(self):
        np.testing.assert_allclose(l2_normalize_rows(np.ones((1, 2))), [[0.707107, 0.707107]], atol=1e-6)


class TestMlp:
    """Tests for mlp_forward / mlp_backward."""

    def test_zero_weights_give_zero_output(self):
        params = MlpParams(layers=[Layer(np.zeros((3, 2)), np.zeros(2))])
        out, _ = mlp_forward(params, np.random.default_rng(0).normal(size=(4, 3)))
        np.testing.assert_array_equal(out, np.zeros((4, 2)))

    def test_identity_layer(self):
        x = np.arange(6.0).reshape(2, 3)
        out, _ = mlp_forward(MlpParams.identity(3), x)
        np.testing.assert_array_equal(out, x)

    def test_zero_upstream_gives_zero_gradients(self):
        params = init_mlp([2, 4, 3], RngStream(1), "tanh")
        x = RngStream(2).normal(size=(5, 2))
        _, cache = mlp_forward(params, x)
        grads, gx = mlp_backward(params, cache, np.zeros((5, 3)))
        assert all(np.all(g == 0) for g in grads.parameters())
        assert np.all(gx == 0)

    def test_linear_adjoint(self):
        w = np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])
        params = MlpParams(layers=[Layer(w, np.zeros(2))])
        _, cache = mlp_forward(params, np.ones((1, 3)))
        _, gx = mlp_backward(params, cache, np.array([[1.0, 0.0]]))
        np.testing.assert_array_equal(gx, w[:, [0]].T)

    def test_input_width_mismatch(self):
        with pytest.raises(DimensionError):
            mlp_forward(init_mlp([2, 3], RngStream(0)), np.ones((1, 5)))

    def test_layers_must_compose(self):
        with pytest.raises(DimensionError):
            MlpParams(layers=[Layer(np.ones((2, 3)), np.zeros(3)), Layer(np.ones((4, 1)), np.zeros(1))],
                      activations=["relu"])

    @pytest.mark.parametrize("activation", ["tanh", "relu"])
    def test_backward_matches_oracle(self, activation):
        checked = 0
        for seed in range(1000):
            rng = RngStream(seed)
            params = init_mlp([2, 4, 3], rng.child("init"), activation)
            params = params.with_parameters([a + 0.1 * rng.child("bias").normal(size=a.shape) for a in params.parameters()])
            x = rng.child("x").normal(size=(3, 2))
            probe = rng.child("probe").normal(size=(3, 3))
            _, cache = mlp_forward(params, x)
            if activation == "relu" and np.min(np.abs(cache.pre_activations[0])) < 1e-3:
                continue  # too close to the kink for a central difference
            grads, gx = mlp_backward(params, cache, probe)

            def loss_of_params(vec):
                return float(np.sum(mlp_forward(params.unflatten(vec), x)[0] * probe))

            def loss_of_input(xv):
                return float(np.sum(mlp_forward(params, xv)[0] * probe))

            assert_grad_close(grads.flatten(), fd_grad(loss_of_params, params.flatten(), 1e-5))
            assert_grad_close(gx, fd_grad(loss_of_input, x, 1e-5))
            checked += 1
        assert checked >= 500

    def test_flatten_unflatten(self):
        params = init_mlp([3, 5, 2], RngStream(4))
        again = params.unflatten(params.flatten())
        for a, b in zip(params.parameters(), again.parameters()):
            np.testing.assert_array_equal(a, b)


class TestFdGrad:
    """Tests for the finite-difference oracle."""

    def test_quadratic(self):
        np.testing.assert_allclose(fd_grad(lambda x: float(np.sum(x**2)), np.array([1.0, 2.0])), [2.0, 4.0], atol=1e-6)

    def test_constant(self):
        np.testing.assert_array_equal(fd_grad(lambda x: 3.0, np.array([1.0, -1.0])), [0.0, 0.0])

    def test_sine(self):
        np.testing.assert_allclose(fd_grad(lambda x: float(np.sin(x[0])), np.array([0.0])), [1.0], atol=1e-6)

    def test_non_finite_raises(self):
        with pytest.raises(GradientOracleError):
            fd_grad(lambda x: float("inf"), np.array([0.0]))

    def test_step_must_be_positive(self):
        with pytest.raises(ValueError):
            fd_grad(lambda x: 0.0, np.array([0.0]), h=0.0)


class TestRngStream:
    """Tests for seeded streams."""

    def test_same_seed_same_draws(self):
        np.testing.assert_array_equal(RngStream(7).normal(size=10), RngStream(7).normal(size=10))

    def test_child_independent_of_draw_order(self):
        a = RngStream(3)
        a.child("init").normal(size=100)
        first = a.child("noise").normal(size=5)
        second = RngStream(3).child("noise").normal(size=5)
        np.testing.assert_array_equal(first, second)

    def test_children_differ(self):
        root = RngStream(3)
        assert not np.array_equal(root.child("a").normal(size=5), root.child("b").normal(size=5))

    def test_bitwise_identical_forward(self):
        outs = []
        for _ in range(2):
            rng = RngStream(11)
            params = init_mlp([4, 8, 2], rng.child("init"), "tanh")
            outs.append(mlp_forward(params, rng.child("x").normal(size=(6, 4)))[0])
        assert outs[0].tobytes() == outs[1].tobytes()
