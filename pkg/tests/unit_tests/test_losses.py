"""
Unit tests for classification losses.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relkd.exceptions import ConfigurationError, DimensionError, LabelError
from relkd.losses import (
    ComboLoss,
    LossFactory,
    active_passive,
    ael,
    agce,
    ce,
    combo,
    gce,
    mae,
    nce,
    sce,
)
from relkd.models import LossSpec, RobustParams
from relkd.numerics import RngStream, assert_grad_close, fd_grad, softmax_rows

ALL_LOSSES = LossFactory.names()


def _batch(seed, B=3, C=4, scale=1.5):
    rng = RngStream(seed)
    return rng.child("z").normal(0.0, scale, (B, C)), rng.child("y").integers(0, C, B)


class TestCrossEntropy:
    """Tests for ce."""

    def test_uniform_logits(self):
        out = ce(np.zeros((3, 10)), np.array([0, 4, 9]))
        assert out.value == pytest.approx(math.log(10), abs=1e-9)

    def test_confident_correct_is_zero(self):
        assert ce(np.array([[60.0, -60.0]]), np.array([0])).value == pytest.approx(0.0, abs=1e-12)

    def test_gradient_closed_form(self):
        z = np.array([[1.0, 0.0]])
        out = ce(z, np.array([1]))
        np.testing.assert_allclose(out.grad_logits, softmax_rows(z) - np.array([[0.0, 1.0]]))

    def test_label_out_of_range(self):
        with pytest.raises(LabelError):
            ce(np.zeros((2, 3)), np.array([0, 3]))

    def test_label_count_mismatch(self):
        with pytest.raises(DimensionError):
            ce(np.zeros((2, 3)), np.array([0]))


class TestGce:
    """Tests for gce."""

    def test_confident_correct_is_zero(self):
        assert gce(np.array([[60.0, -60.0]]), np.array([0])).value == pytest.approx(0.0, abs=1e-12)

    def test_scalar_oracle(self):
        # logits giving p_y = 0.1 over two classes
        z = np.array([[math.log(0.1), math.log(0.9)]])
        assert gce(z, np.array([0]), q=0.7).value == pytest.approx((1 - 0.1**0.7) / 0.7, rel=1e-12)

    def test_small_q_approaches_ce(self):
        z, y = _batch(7, B=16, C=4, scale=1.0)
        assert abs(gce(z, y, q=1e-4).value - ce(z, y).value) < 1e-3

    @pytest.mark.parametrize("q", [0.0, -0.5, 1.5])
    def test_q_out_of_range(self, q):
        with pytest.raises(ConfigurationError):
            gce(np.zeros((1, 2)), np.array([0]), q=q)


class TestSce:
    """Tests for sce."""

    def test_uniform_two_classes(self):
        out = sce(np.zeros((1, 2)), np.array([1]), a=1.0, b=1.0, A=-4.0)
        # CE = ln 2, RCE = -A (1 - p_y) = 2
        assert out.value == pytest.approx(math.log(2) + 2.0, abs=1e-12)

    def test_confident_correct_is_zero(self):
        assert sce(np.array([[60.0, -60.0]]), np.array([0])).value == pytest.approx(0.0, abs=1e-12)

    def test_invalid_params(self):
        with pytest.raises(ConfigurationError):
            sce(np.zeros((1, 2)), np.array([0]), a=0.0)
        with pytest.raises(ConfigurationError):
            sce(np.zeros((1, 2)), np.array([0]), A=1.0)


class TestActivePassive:
    """Tests for the active/passive family."""

    def test_mae_minimum(self):
        assert mae(np.array([[60.0, -60.0]]), np.array([0])).value == pytest.approx(0.0, abs=1e-12)

    def test_ael_minimum(self):
        out = ael(np.array([[60.0, -60.0]]), np.array([0]), a=2.5)
        assert out.value == pytest.approx(math.exp(-1 / 2.5), abs=1e-12)

    def test_agce_minimum_is_zero(self):
        assert agce(np.array([[60.0, -60.0]]), np.array([0])).value == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("C", [2, 5, 10])
    def test_nce_uniform(self, C):
        assert nce(np.zeros((2, C)), np.array([0, 1])).value == pytest.approx(1.0 / C, abs=1e-12)

    def test_dispatch_is_case_insensitive(self):
        z, y = _batch(1)
        assert active_passive("agce", z, y).value == active_passive("AGCE", z, y).value

    def test_unknown_kind(self):
        with pytest.raises(ConfigurationError):
            active_passive("hinge", np.zeros((1, 2)), np.array([0]))

    def test_invalid_params(self):
        with pytest.raises(ConfigurationError):
            active_passive("AUL", np.zeros((1, 2)), np.array([0]), RobustParams(aul_a=0.5))
        with pytest.raises(ConfigurationError):
            active_passive("AEL", np.zeros((1, 2)), np.array([0]), RobustParams(ael_a=0.0))


class TestCombo:
    """Tests for combo."""

    def test_passive_weight_zero_is_active(self):
        z, y = _batch(2)
        out = combo(nce, mae, 1.0, 0.0)(z, y)
        ref = nce(z, y)
        assert out.value == ref.value
        np.testing.assert_array_equal(out.grad_logits, ref.grad_logits)

    def test_zero_weights(self):
        z, y = _batch(3)
        out = combo(nce, mae, 0.0, 0.0)(z, y)
        assert out.value == 0.0
        assert np.all(out.grad_logits == 0.0)

    def test_negative_weight(self):
        with pytest.raises(ConfigurationError):
            combo(nce, mae, -1.0, 1.0)

    def test_combo_loss_name(self):
        assert ComboLoss("NCE", "AGCE").name == "nce_agce"


class TestLossFactory:
    """Tests for LossFactory."""

    @pytest.mark.parametrize("name", ALL_LOSSES)
    def test_creates_every_registered_loss(self, name):
        loss = LossFactory.create(LossSpec(name=name))
        assert loss.name == name
        out = loss(*_batch(0))
        assert np.isfinite(out.value)

    def test_unknown_loss(self):
        with pytest.raises(ConfigurationError, match="loss.name"):
            LossFactory.create(LossSpec(name="focal"))

    def test_params_flow_through(self):
        z, y = _batch(4)
        loss = LossFactory.create(LossSpec(name="gce", params=RobustParams(gce_q=0.3)))
        assert loss(z, y).value == gce(z, y, q=0.3).value


class TestLossProperties:
    """Properties shared by every loss."""

    @pytest.mark.parametrize("name", ALL_LOSSES)
    def test_gradient_matches_oracle(self, name):
        loss = LossFactory.create(LossSpec(name=name))
        for seed in range(500):
            z, y = _batch(seed)
            analytic = loss(z, y).grad_logits
            numeric = fd_grad(lambda v: loss(v, y).value, z, 1e-5)
            assert_grad_close(analytic, numeric, rtol=1e-4, atol=1e-8)

    @pytest.mark.parametrize("name", ALL_LOSSES)
    def test_shift_invariance(self, name):
        loss = LossFactory.create(LossSpec(name=name))
        for seed in range(50):
            z, y = _batch(seed, B=5, C=6)
            shift = RngStream(seed).child("shift").uniform(-20.0, 20.0, (5, 1))
            assert loss(z + shift, y).value == pytest.approx(loss(z, y).value, abs=1e-9)

    @pytest.mark.parametrize("name", ALL_LOSSES)
    def test_permutation_equivariance(self, name):
        loss = LossFactory.create(LossSpec(name=name))
        z, y = _batch(11, B=7, C=5)
        perm = RngStream(11).child("perm").permutation(7)
        base = loss(z, y)
        permuted = loss(z[perm], y[perm])
        assert permuted.value == pytest.approx(base.value, abs=1e-12)
        np.testing.assert_allclose(permuted.grad_logits, base.grad_logits[perm], atol=1e-15)

    @settings(max_examples=100, deadline=None)
    @given(
        st.integers(0, 2**31 - 1),
        st.floats(0.1, 20.0),
        st.sampled_from(["ce", "gce", "sce", "mae"]),
    )
    def test_nonnegative(self, seed, scale, name):
        loss = LossFactory.create(LossSpec(name=name))
        z, y = _batch(seed, B=6, C=5, scale=scale)
        assert loss(z, y).value >= 0.0
