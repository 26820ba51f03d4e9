"""MLP topologies, forward/backward propagation, and gradient verification.

Hidden layers use ReLU; the output layer is a 4-way softmax trained with mean
cross-entropy. "N-layer" counts weight layers, so the 1-layer network is a
single 85->4 affine map plus softmax (multinomial logistic regression), the
2-layer network inserts a 50-unit hidden layer, and the 3-layer network uses
hidden sizes 50 and 20.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .data import N_CLASSES, N_FEATURES
from .errors import ShapeError, ValidationError
from .initializers import InitScheme, initialize
from .numerics import Rng, _check_labels, as_matrix, cross_entropy, relu, softmax

HIDDEN_1 = 50
HIDDEN_2 = 20


class Topology(Enum):
    ONE_LAYER = 1
    TWO_LAYER = 2
    THREE_LAYER = 3

    @property
    def layer_dims(self) -> tuple[int, ...]:
        """Dimension chain input -> hiddens -> output."""
        return {
            Topology.ONE_LAYER: (N_FEATURES, N_CLASSES),
            Topology.TWO_LAYER: (N_FEATURES, HIDDEN_1, N_CLASSES),
            Topology.THREE_LAYER: (N_FEATURES, HIDDEN_1, HIDDEN_2, N_CLASSES),
        }[self]

    @property
    def n_weight_layers(self) -> int:
        return len(self.layer_dims) - 1


@dataclass
class Layer:
    """One affine layer: weights (out_dim, in_dim) and bias (out_dim,)."""

    weights: np.ndarray
    bias: np.ndarray


@dataclass
class MlpModel:
    topology: Topology
    layers: list[Layer]

    @property
    def n_features(self) -> int:
        return self.layers[0].weights.shape[1]

    def parameter_arrays(self):
        """All parameter arrays, weights before bias per layer."""
        for layer in self.layers:
            yield layer.weights
            yield layer.bias


@dataclass
class Gradients:
    """Loss gradients, shape-congruent with the model they came from."""

    d_weights: list[np.ndarray]
    d_bias: list[np.ndarray]


@dataclass
class ForwardPass:
    """Everything backward needs: per-layer inputs, pre-activations, probs.

    ``activations[0]`` is the input batch, ``activations[i]`` the output of
    layer i (ReLU for hidden layers, softmax probabilities for the last).
    """

    activations: list[np.ndarray]
    pre_activations: list[np.ndarray]

    @property
    def probs(self) -> np.ndarray:
        return self.activations[-1]


def build_model(rng: Rng, topology: Topology, scheme: InitScheme) -> MlpModel:
    """Initialize a model: weights per ``scheme`` with fan_in = input dim, biases zero."""
    dims = topology.layer_dims
    layers = []
    for in_dim, out_dim in zip(dims[:-1], dims[1:]):
        weights = initialize(rng, scheme, fan_in=in_dim, rows=out_dim, cols=in_dim)
        layers.append(Layer(weights=weights, bias=np.zeros(out_dim)))
    return MlpModel(topology=topology, layers=layers)


def _check_batch(model: MlpModel, batch) -> np.ndarray:
    batch = as_matrix(batch)
    if batch.shape[1] != model.n_features:
        raise ShapeError(
            f"batch has {batch.shape[1]} features, model expects {model.n_features}"
        )
    return batch


def forward(model: MlpModel, batch) -> ForwardPass:
    """Run the batch through the network, retaining intermediates for backprop."""
    a = _check_batch(model, batch)
    activations = [a]
    pre_activations = []
    last = len(model.layers) - 1
    for i, layer in enumerate(model.layers):
        z = a @ layer.weights.T + layer.bias
        pre_activations.append(z)
        a = softmax(z) if i == last else relu(z)
        activations.append(a)
    return ForwardPass(activations=activations, pre_activations=pre_activations)


def backward(model: MlpModel, fwd: ForwardPass, labels) -> Gradients:
    """Gradients of the mean cross-entropy loss for the cached forward pass.

    The output delta is (probs - one_hot) / batch_size; the ReLU gate passes
    gradient only where the pre-activation was strictly positive (subgradient
    0 at exactly 0).
    """
    probs = fwd.probs
    batch_size = probs.shape[0]
    labels = _check_labels(labels, batch_size, probs.shape[1])
    n_layers = len(model.layers)
    if len(fwd.activations) != n_layers + 1 or len(fwd.pre_activations) != n_layers:
        raise ShapeError("forward cache does not match the model's layer count")
    delta = probs.copy()
    delta[np.arange(batch_size), labels] -= 1.0
    delta /= batch_size
    d_weights: list[np.ndarray] = [None] * n_layers  # type: ignore[list-item]
    d_bias: list[np.ndarray] = [None] * n_layers  # type: ignore[list-item]
    for i in range(n_layers - 1, -1, -1):
        layer_input = fwd.activations[i]
        if layer_input.shape[1] != model.layers[i].weights.shape[1]:
            raise ShapeError(
                f"cached activation {layer_input.shape} does not match "
                f"layer {i} weights {model.layers[i].weights.shape}"
            )
        d_weights[i] = delta.T @ layer_input
        d_bias[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ model.layers[i].weights) * (
                fwd.pre_activations[i - 1] > 0.0
            )
    return Gradients(d_weights=d_weights, d_bias=d_bias)


def batch_loss(model: MlpModel, batch, labels) -> float:
    """Mean cross-entropy of the model's predictions on ``batch``."""
    return cross_entropy(forward(model, batch).probs, labels)


def predict(model: MlpModel, batch) -> np.ndarray:
    """Argmax class per row; ties resolve to the lowest class index."""
    return np.argmax(forward(model, batch).probs, axis=1)


def grad_check(model: MlpModel, batch, labels, epsilon: float = 1e-5) -> float:
    """Compare analytic gradients against central finite differences.

    Returns the maximum over all parameters of
    ``|analytic - numeric| / max(|analytic| + |numeric|, 1e-12)``.
    """
    if not 1e-7 <= epsilon <= 1e-3:
        raise ValidationError(f"epsilon must lie in [1e-7, 1e-3], got {epsilon}")
    batch = _check_batch(model, batch)
    grads = backward(model, forward(model, batch), labels)
    max_err = 0.0
    for layer, d_w, d_b in zip(model.layers, grads.d_weights, grads.d_bias):
        for params, analytic in ((layer.weights, d_w), (layer.bias, d_b)):
            flat_grad = analytic.ravel()
            for idx in range(params.size):
                original = params.flat[idx]
                params.flat[idx] = original + epsilon
                loss_plus = batch_loss(model, batch, labels)
                params.flat[idx] = original - epsilon
                loss_minus = batch_loss(model, batch, labels)
                params.flat[idx] = original
                numeric = (loss_plus - loss_minus) / (2.0 * epsilon)
                a = flat_grad[idx]
                err = abs(a - numeric) / max(abs(a) + abs(numeric), 1e-12)
                if err > max_err:
                    max_err = err
    return max_err
