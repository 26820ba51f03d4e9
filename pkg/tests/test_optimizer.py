import copy

import numpy as np
import pytest

from mlpinit.errors import ShapeError, ValidationError
from mlpinit.initializers import KAIMING_NORMAL, Family
from mlpinit.network import Gradients, Topology, build_model
from mlpinit.numerics import Rng
from mlpinit.optimizer import Hyperparams, SgdMomentumState, preset_hyperparams, sgd_step


def constant_grads(model, value):
    return Gradients(
        d_weights=[np.full_like(layer.weights, value) for layer in model.layers],
        d_bias=[np.full_like(layer.bias, value) for layer in model.layers],
    )


class TestPresets:
    # all 18 published values: (topology, family) -> (bs, lr, momentum)
    EXPECTED = {
        (Topology.ONE_LAYER, Family.XAVIER): (24, 0.0001, 0.6),
        (Topology.TWO_LAYER, Family.XAVIER): (24, 0.006, 0.7),
        (Topology.THREE_LAYER, Family.XAVIER): (36, 0.006, 0.7),
        (Topology.ONE_LAYER, Family.KAIMING): (36, 0.0001, 0.6),
        (Topology.TWO_LAYER, Family.KAIMING): (36, 0.003, 0.7),
        (Topology.THREE_LAYER, Family.KAIMING): (36, 0.0002, 0.6),
    }

    @pytest.mark.parametrize("cell", list(EXPECTED), ids=lambda c: f"{c[0].value}L-{c[1].value}")
    def test_preset_values_exact(self, cell):
        hp = preset_hyperparams(*cell)
        bs, lr, m = self.EXPECTED[cell]
        assert hp.batch_size == bs
        assert hp.learning_rate == lr
        assert hp.momentum == m


class TestHyperparams:
    def test_validation(self):
        with pytest.raises(ValidationError):
            Hyperparams(0, 0.1, 0.5)
        with pytest.raises(ValidationError):
            Hyperparams(8, 0.0, 0.5)
        with pytest.raises(ValidationError):
            Hyperparams(8, 0.1, 1.0)
        with pytest.raises(ValidationError):
            Hyperparams(8, 0.1, -0.1)


class TestSgdStep:
    def test_zero_momentum_is_plain_gradient_descent(self):
        model = build_model(Rng(1), Topology.TWO_LAYER, KAIMING_NORMAL)
        reference = copy.deepcopy(model)
        grads = constant_grads(model, 0.25)
        hp = Hyperparams(8, 0.01, 0.0)
        sgd_step(SgdMomentumState(model), model, grads, hp)
        for layer, ref in zip(model.layers, reference.layers):
            np.testing.assert_allclose(
                layer.weights, ref.weights - 0.01 * 0.25, atol=1e-15
            )

    def test_zero_gradient_is_a_fixed_point(self):
        model = build_model(Rng(2), Topology.ONE_LAYER, KAIMING_NORMAL)
        reference = copy.deepcopy(model)
        state = SgdMomentumState(model)
        grads = constant_grads(model, 0.0)
        for _ in range(5):
            sgd_step(state, model, grads, Hyperparams(8, 0.1, 0.9))
        for layer, ref in zip(model.layers, reference.layers):
            np.testing.assert_array_equal(layer.weights, ref.weights)
        for v in state.v_weights:
            np.testing.assert_array_equal(v, 0.0)

    def test_second_update_magnitude_with_momentum(self):
        # v1 = g, v2 = 0.6 g + g = 1.6 g, so step 2 moves lr * 1.6 * g
        model = build_model(Rng(3), Topology.ONE_LAYER, KAIMING_NORMAL)
        g, lr = 0.5, 0.01
        grads = constant_grads(model, g)
        state = SgdMomentumState(model)
        hp = Hyperparams(8, lr, 0.6)
        sgd_step(state, model, grads, hp)
        after_first = model.layers[0].weights.copy()
        sgd_step(state, model, grads, hp)
        delta = after_first - model.layers[0].weights
        np.testing.assert_allclose(delta, lr * 1.6 * g, atol=1e-15)

    @pytest.mark.parametrize("momentum", [0.0, 0.3, 0.6, 0.9])
    def test_velocity_recurrence_under_constant_gradient(self, momentum):
        model = build_model(Rng(4), Topology.ONE_LAYER, KAIMING_NORMAL)
        g = 0.125
        grads = constant_grads(model, g)
        state = SgdMomentumState(model)
        hp = Hyperparams(8, 1e-3, momentum)
        k = 12
        for _ in range(k):
            sgd_step(state, model, grads, hp)
        if momentum == 0.0:
            expected = g
        else:
            expected = g * (1.0 - momentum**k) / (1.0 - momentum)
        np.testing.assert_allclose(state.v_weights[0], expected, atol=1e-12)

    def test_update_is_deterministic(self):
        def run():
            model = build_model(Rng(5), Topology.THREE_LAYER, KAIMING_NORMAL)
            state = SgdMomentumState(model)
            rng = Rng(99)
            for _ in range(3):
                grads = Gradients(
                    d_weights=[
                        rng.normal(l.weights.size).reshape(l.weights.shape)
                        for l in model.layers
                    ],
                    d_bias=[rng.normal(l.bias.size) for l in model.layers],
                )
                sgd_step(state, model, grads, Hyperparams(8, 0.01, 0.6))
            return model

        a, b = run(), run()
        for la, lb in zip(a.layers, b.layers):
            np.testing.assert_array_equal(la.weights, lb.weights)
            np.testing.assert_array_equal(la.bias, lb.bias)

    def test_shape_mismatch_rejected(self):
        model = build_model(Rng(6), Topology.ONE_LAYER, KAIMING_NORMAL)
        other = build_model(Rng(6), Topology.TWO_LAYER, KAIMING_NORMAL)
        grads = constant_grads(other, 0.1)
        with pytest.raises(ShapeError):
            sgd_step(SgdMomentumState(model), model, grads, Hyperparams(8, 0.1, 0.0))
