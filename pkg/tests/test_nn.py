import math

import numpy as np
import pytest

from oracles import fd_net_gradients, rel_err
from sdanet.errors import ContractError, ShapeError
from sdanet.linalg import Rng
from sdanet.nn import (
    ActivationKind,
    DenseLayer,
    Loss,
    SgdConfig,
    activate,
    activate_grad,
    affine_forward,
    backprop,
    cross_entropy_recon,
    init_dense_layer,
    nll_loss,
    sgd_step,
    shuffled_batches,
)

SIG = ActivationKind.SIGMOID
LIN = ActivationKind.LINEAR
SOFT = ActivationKind.SOFTMAX


def layer(w, b, act):
    return DenseLayer(np.array(w, dtype=np.float64), np.array(b, dtype=np.float64), act)


class TestActivate:
    def test_sigmoid_zero(self):
        assert activate(SIG, np.array([0.0]))[0] == 0.5

    def test_softmax_constant_vector(self):
        for c in (-5.0, 0.0, 3.0, 700.0):
            out = activate(SOFT, np.full(3, c))
            assert np.allclose(out, 1 / 3, atol=1e-15)

    def test_softmax_direct_evaluation(self):
        out = activate(SOFT, np.array([1.0, 2.0, 3.0]))
        e = np.exp([1.0, 2.0, 3.0])
        assert np.allclose(out, e / e.sum(), atol=1e-12)
        assert np.allclose(out, [0.09003, 0.24473, 0.66524], atol=5e-6)

    def test_ranges(self):
        # strict open-interval bounds hold away from float saturation
        pre = np.linspace(-5, 5, 101)
        assert np.all((activate(SIG, pre) > 0) & (activate(SIG, pre) < 1))
        assert np.all(np.abs(activate(ActivationKind.TANH, pre)) < 1)
        wide = np.linspace(-30, 30, 101)
        assert np.all(np.abs(activate(ActivationKind.TANH, wide)) <= 1)
        assert np.all(activate(ActivationKind.RELU, wide) >= 0)
        assert np.array_equal(activate(LIN, wide), wide)

    def test_softmax_rows_of_batch(self):
        out = activate(SOFT, np.array([[1.0, 1.0], [0.0, 10.0]]))
        assert np.allclose(out.sum(axis=1), 1.0, atol=1e-12)


class TestActivateGrad:
    def test_sigmoid_half(self):
        assert activate_grad(SIG, np.array([0.5]))[0] == 0.25

    def test_tanh_zero(self):
        assert activate_grad(ActivationKind.TANH, np.array([0.0]))[0] == 1.0

    def test_relu_at_kink_is_zero(self):
        assert activate_grad(ActivationKind.RELU, np.array([0.0]))[0] == 0.0

    def test_softmax_refused(self):
        with pytest.raises(ContractError):
            activate_grad(SOFT, np.array([0.5, 0.5]))


class TestAffineForward:
    def test_identity(self):
        lay = layer(np.eye(3), [0, 0, 0], LIN)
        x = np.array([1.0, -2.0, 3.0])
        pre, out = affine_forward(lay, x)
        assert np.array_equal(out, x) and np.array_equal(pre, x)

    def test_bias_only(self):
        lay = layer([[0.0, 0.0]], [3.0], LIN)
        for x in ([0.0, 0.0], [5.0, -1.0]):
            assert affine_forward(lay, np.array(x))[1][0] == 3.0

    def test_sigmoid_at_zero_pre(self):
        lay = layer([[1.0, 1.0]], [0.0], SIG)
        assert affine_forward(lay, np.array([0.0, 0.0]))[1][0] == 0.5

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            affine_forward(layer([[1.0, 2.0]], [0.0], LIN), np.zeros(3))


class TestCrossEntropyRecon:
    def test_perfect_binary_reconstruction(self):
        assert cross_entropy_recon(np.array([1.0, 0.0]), np.array([1.0, 0.0])) == pytest.approx(0.0, abs=1e-10)

    def test_half(self):
        assert cross_entropy_recon(np.array([0.5]), np.array([0.5])) == pytest.approx(math.log(2), rel=1e-12)

    def test_direct_evaluation(self):
        got = cross_entropy_recon(np.array([1.0, 0.0]), np.array([0.9, 0.2]))
        assert got == pytest.approx(-(math.log(0.9) + math.log(0.8)), rel=1e-10)
        assert got == pytest.approx(0.32850, abs=5e-6)

    def test_length_mismatch(self):
        with pytest.raises(ShapeError):
            cross_entropy_recon(np.zeros(3), np.full(2, 0.5))

    def test_minimum_at_perfect_reconstruction(self):
        rng = np.random.default_rng(5)
        x = (rng.random(8) > 0.5).astype(np.float64)
        floor = cross_entropy_recon(x, x)
        for _ in range(50):
            assert cross_entropy_recon(x, rng.random(8)) >= floor


class TestNllLoss:
    def test_certain_correct(self):
        probs = np.zeros(4)
        probs[0] = 1.0
        assert nll_loss(probs, 0) == 0.0

    def test_uniform_ten(self):
        assert nll_loss(np.full(10, 0.1), 3) == pytest.approx(math.log(10), rel=1e-12)

    def test_direct(self):
        assert nll_loss(np.array([0.1, 0.9]), 1) == pytest.approx(-math.log(0.9), rel=1e-12)
        assert nll_loss(np.array([0.1, 0.9]), 1) == pytest.approx(0.10536, abs=5e-6)

    def test_label_out_of_range(self):
        with pytest.raises(ValueError):
            nll_loss(np.array([0.5, 0.5]), 2)


class TestSgdStep:
    def test_zero_gradient_is_identity(self):
        lay = layer([[1.0, 2.0]], [3.0], LIN)
        sgd_step([lay], [(np.zeros((1, 2)), np.zeros(1))], SgdConfig(0.5, 1, 1, 0))
        assert np.array_equal(lay.weights, [[1, 2]]) and lay.bias[0] == 3.0

    def test_single_arithmetic_step(self):
        lay = layer([[2.0]], [0.0], LIN)
        sgd_step([lay], [(np.array([[0.5]]), np.zeros(1))], SgdConfig(1.0, 1, 1, 0))
        assert lay.weights[0, 0] == 1.5

    def test_two_steps_equal_summed_gradients(self):
        g1 = (np.array([[0.25]]), np.array([0.5]))
        g2 = (np.array([[-1.0]]), np.array([0.125]))
        cfg = SgdConfig(0.3, 1, 1, 0)
        a = layer([[2.0]], [1.0], LIN)
        sgd_step([a], [g1], cfg)
        sgd_step([a], [g2], cfg)
        b = layer([[2.0]], [1.0], LIN)
        sgd_step([b], [(g1[0] + g2[0], g1[1] + g2[1])], cfg)
        assert np.allclose(a.weights, b.weights, atol=1e-15)
        assert np.allclose(a.bias, b.bias, atol=1e-15)

    def test_learning_rate_zero_is_identity(self):
        lay = layer([[1.0]], [1.0], LIN)
        sgd_step([lay], [(np.array([[5.0]]), np.array([5.0]))], SgdConfig(0.0, 1, 1, 0))
        assert lay.weights[0, 0] == 1.0 and lay.bias[0] == 1.0

    def test_shape_mismatch(self):
        lay = layer([[1.0]], [0.0], LIN)
        with pytest.raises(ShapeError):
            sgd_step([lay], [(np.zeros((2, 2)), np.zeros(1))], SgdConfig(0.1, 1, 1, 0))


class TestSgdConfig:
    def test_negative_learning_rate_rejected(self):
        with pytest.raises(ValueError):
            SgdConfig(-0.1, 1, 1, 0)

    def test_bad_batch_size_rejected(self):
        with pytest.raises(ValueError):
            SgdConfig(0.1, 0, 1, 0)


class TestBackprop:
    def test_softmax_nll_output_delta(self):
        # Zero weights give uniform probs [0.5, 0.5]; the fused delta is
        # probs - one_hot(0) = [-0.5, 0.5], visible directly in db.
        lay = layer(np.zeros((2, 3)), np.zeros(2), SOFT)
        grads, _ = backprop([lay], np.array([1.0, 2.0, 3.0]), 0, Loss.SOFTMAX_NLL)
        dW, db = grads[0]
        assert np.allclose(db, [-0.5, 0.5], atol=1e-15)
        assert np.allclose(dW, np.outer([-0.5, 0.5], [1.0, 2.0, 3.0]), atol=1e-15)

    def test_matches_finite_differences_on_654_net(self):
        rng = Rng(13)
        layers = [
            init_dense_layer(6, 5, SIG, rng.split("l0")),
            init_dense_layer(5, 4, SOFT, rng.split("l1")),
        ]
        x = rng.split("x").uniform(0, 1, (3, 6))
        y = np.array([0, 3, 1])
        analytic, _ = backprop(layers, x, y, Loss.SOFTMAX_NLL)
        numeric = fd_net_gradients(layers, x, y, Loss.SOFTMAX_NLL)
        for (aw, ab), (nw, nb) in zip(analytic, numeric):
            assert rel_err(aw, nw) < 1e-4
            assert rel_err(ab, nb) < 1e-4

    def test_duplicated_example_doubles_contribution(self):
        rng = Rng(21)
        layers = [init_dense_layer(4, 3, SOFT, rng)]
        x = rng.uniform(0, 1, 4)
        single, _ = backprop(layers, x[None, :], [1], Loss.SOFTMAX_NLL)
        doubled, _ = backprop(layers, np.vstack([x, x]), [1, 1], Loss.SOFTMAX_NLL)
        assert np.allclose(doubled[0][0], 2 * single[0][0], atol=1e-12)
        assert np.allclose(doubled[0][1], 2 * single[0][1], atol=1e-12)

    def test_incompatible_loss_activation(self):
        lay = layer(np.zeros((2, 2)), np.zeros(2), LIN)
        with pytest.raises(ContractError):
            backprop([lay], np.zeros(2), np.zeros(2), Loss.RECON_CROSS_ENTROPY)

    def test_label_out_of_range(self):
        lay = layer(np.zeros((2, 2)), np.zeros(2), SOFT)
        with pytest.raises(ValueError):
            backprop([lay], np.zeros(2), 5, Loss.SOFTMAX_NLL)


class TestInitDenseLayer:
    def test_sigmoid_bounds(self):
        lay = init_dense_layer(30, 20, SIG, Rng(0))
        limit = 4 * math.sqrt(6 / 50)
        assert np.all(np.abs(lay.weights) <= limit)
        assert np.max(np.abs(lay.weights)) > limit / 4  # actually spreads out
        assert np.array_equal(lay.bias, np.zeros(20))

    def test_other_bounds(self):
        limit = math.sqrt(6 / 50)
        for act in (ActivationKind.TANH, ActivationKind.RELU, SOFT, LIN):
            lay = init_dense_layer(30, 20, act, Rng(1))
            assert np.all(np.abs(lay.weights) <= limit)

    def test_deterministic(self):
        a = init_dense_layer(7, 5, SIG, Rng(9))
        b = init_dense_layer(7, 5, SIG, Rng(9))
        assert np.array_equal(a.weights, b.weights)


class TestShuffledBatches:
    def test_partition(self):
        batches = shuffled_batches(10, 3, Rng(2))
        assert [len(b) for b in batches] == [3, 3, 3, 1]
        assert sorted(np.concatenate(batches).tolist()) == list(range(10))

    def test_batch_larger_than_n(self):
        batches = shuffled_batches(4, 100, Rng(2))
        assert len(batches) == 1 and len(batches[0]) == 4


class TestDenseLayerInvariants:
    def test_bias_weight_row_mismatch_rejected(self):
        with pytest.raises(ShapeError):
            DenseLayer(np.zeros((2, 3)), np.zeros(3), LIN)

    def test_nonfinite_rejected(self):
        w = np.zeros((2, 2))
        w[0, 0] = np.nan
        with pytest.raises(ValueError):
            DenseLayer(w, np.zeros(2), LIN)
