import numpy as np
import pytest

from errors import DimensionError, NonFiniteError
from network import (
    Activation,
    BatchItem,
    NetworkParams,
    apply_delta,
    backprop,
    batch_backprop,
    forward,
    gradients,
    init_network,
)
from network.mlp import batch_loss, forward_batch


def _loss(net, x, t):
    y = forward(net, x).output
    return 0.5 * float(np.sum((y - t) ** 2))


def _zero_net(sizes=(3, 4, 2)):
    return NetworkParams(sizes, (np.zeros((sizes[1], sizes[0] + 1)), np.zeros((sizes[2], sizes[1] + 1))))


def test_init_is_deterministic_per_seed():
    a = init_network([12, 8, 2], seed=7)
    b = init_network([12, 8, 2], seed=7)
    c = init_network([12, 8, 2], seed=8)
    for wa, wb in zip(a.weights, b.weights):
        assert np.array_equal(wa, wb)
    assert not np.array_equal(a.weights[0], c.weights[0])


def test_init_shapes_and_range():
    net = init_network([12, 8, 2], seed=1)
    assert net.weights[0].shape == (8, 13)
    assert net.weights[1].shape == (2, 9)
    assert net.max_abs_weight() <= 0.5


@pytest.mark.parametrize("sizes", [[0, 8, 2], [12, -1, 2], [12, 2]])
def test_init_rejects_bad_sizes(sizes):
    with pytest.raises(DimensionError):
        init_network(sizes, seed=0)


def test_forward_zero_weights():
    acts = forward(_zero_net(), np.zeros(3))
    assert np.array_equal(acts.per_layer[1], np.full(4, 0.5))
    assert np.array_equal(acts.output, np.zeros(2))
    assert len(acts.per_layer) == 3


def test_forward_single_saturated_path():
    net = _zero_net()
    w0 = net.weights[0].copy()
    w1 = net.weights[1].copy()
    w0[0, -1] = 50.0  # hidden unit 0 saturates high
    w1[0, 0] = 0.7
    net = NetworkParams(net.layer_sizes, (w0, w1))
    output = forward(net, np.array([0.3, -0.2, 0.9])).output
    assert output[0] == pytest.approx(0.7, abs=1e-12)
    assert output[1] == 0.0


def test_forward_rejects_bad_input():
    net = init_network([3, 4, 2], seed=0)
    with pytest.raises(NonFiniteError):
        forward(net, np.array([0.0, np.nan, 1.0]))
    with pytest.raises(DimensionError):
        forward(net, np.zeros(4))


def test_backprop_fixed_point():
    net = init_network([12, 16, 2], seed=3)
    x = np.random.default_rng(0).uniform(0, 1, 12)
    target = forward(net, x).output.copy()
    updated = backprop(net, x, target, 0.3)
    for before, after in zip(net.weights, updated.weights):
        assert np.array_equal(before, after)


def test_backprop_rejects_non_finite_target():
    net = init_network([3, 4, 2], seed=0)
    with pytest.raises(NonFiniteError):
        backprop(net, np.zeros(3), np.array([np.inf, 0.0]), 0.1)


def test_gradients_match_central_differences():
    rng = np.random.default_rng(2024)
    h = 1e-5
    for trial in range(100):
        net = init_network([12, 16, 2], seed=trial)
        x = rng.uniform(0, 1, 12)
        t = rng.normal(size=2)
        analytic = gradients(net, x, t)
        for layer, grad in enumerate(analytic):
            for idx in np.ndindex(grad.shape):
                delta = np.zeros_like(grad)
                delta[idx] = h
                plus = _loss(apply_delta(net, layer, delta), x, t)
                minus = _loss(apply_delta(net, layer, -delta), x, t)
                numeric = (plus - minus) / (2 * h)
                scale = max(abs(grad[idx]), abs(numeric), 1e-4)
                assert abs(grad[idx] - numeric) / scale < 1e-5, (trial, layer, idx)


def test_backprop_step_lowers_loss():
    rng = np.random.default_rng(5)
    net = init_network([4, 3, 2], seed=11)
    x = rng.uniform(0, 1, 4)
    target = forward(net, x).output + rng.normal(scale=0.05, size=2)
    before = _loss(net, x, target)
    after = _loss(backprop(net, x, target, 0.3), x, target)
    assert after < before


def test_output_gradient_uses_forward_activations():
    net = init_network([5, 4, 2], seed=9)
    x = np.linspace(0, 1, 5)
    t = np.array([1.0, -1.0])
    acts = forward(net, x)
    expected = -np.outer(t - acts.output, np.append(acts.per_layer[1], 1.0))
    assert np.allclose(gradients(net, x, t)[1], expected, atol=1e-15)


def test_batch_backprop_fixed_point():
    net = init_network([6, 5, 2], seed=4)
    rng = np.random.default_rng(1)
    items = []
    for _ in range(5):
        x = rng.uniform(0, 1, 6)
        items.append(BatchItem(x, forward(net, x).output.copy()))
    updated = batch_backprop(net, items, 0.3, 50)
    for before, after in zip(net.weights, updated.weights):
        assert np.array_equal(before, after)


def test_batch_backprop_reduces_loss():
    net = init_network([6, 5, 2], seed=4)
    item = BatchItem(np.linspace(0, 1, 6), np.array([1.0, -1.0]))
    inputs = item.input[None, :]
    targets = item.target[None, :]
    before = batch_loss(forward_batch(net, inputs)[1], targets)
    trained = batch_backprop(net, [item], 0.3, 500)
    after = batch_loss(forward_batch(trained, inputs)[1], targets)
    assert after < before


def test_batch_backprop_single_iteration_matches_mean_gradient():
    net = init_network([6, 5, 2], seed=8)
    rng = np.random.default_rng(3)
    items = [BatchItem(rng.uniform(0, 1, 6), rng.normal(size=2)) for _ in range(7)]
    rate = 0.01

    per_item = [gradients(net, item.input, item.target) for item in items]
    expected = [
        w - rate * np.mean([g[layer] for g in per_item], axis=0)
        for layer, w in enumerate(net.weights)
    ]
    updated = batch_backprop(net, items, rate, max_iterations=1)
    for want, got in zip(expected, updated.weights):
        assert np.allclose(got, want, rtol=0, atol=1e-12)


def test_batch_backprop_rejects_empty_batch():
    with pytest.raises(ValueError):
        batch_backprop(init_network([3, 2, 2], seed=0), [], 0.3, 10)


def test_apply_delta():
    net = init_network([12, 8, 2], seed=5)
    zero = apply_delta(net, 0, np.zeros_like(net.weights[0]))
    assert np.array_equal(zero.weights[0], net.weights[0])

    cleared = apply_delta(net, 1, -net.weights[1])
    assert np.array_equal(cleared.weights[1], np.zeros_like(net.weights[1]))
    assert np.array_equal(cleared.weights[0], net.weights[0])

    delta = np.random.default_rng(0).normal(size=net.weights[0].shape)
    restored = apply_delta(apply_delta(net, 0, delta), 0, -delta)
    assert np.allclose(restored.weights[0], net.weights[0], rtol=0, atol=1e-15)


def test_apply_delta_rejects_bad_layer_and_shape():
    net = init_network([4, 3, 2], seed=0)
    with pytest.raises(DimensionError):
        apply_delta(net, 2, np.zeros((2, 4)))
    with pytest.raises(DimensionError):
        apply_delta(net, 0, np.zeros((2, 4)))


def test_flat_serialization_layout():
    net = init_network([3, 2, 2], seed=6)
    flat = net.to_flat()
    assert flat.dtype == np.float64
    assert flat.size == 2 * 4 + 2 * 3
    # first row of the first layer: three input weights then its bias
    assert np.array_equal(flat[:4], net.weights[0][0])
    rebuilt = NetworkParams.from_flat(net.layer_sizes, flat)
    for a, b in zip(net.weights, rebuilt.weights):
        assert np.array_equal(a, b)


def _with_activations(net, hidden, output):
    return NetworkParams(net.layer_sizes, net.weights, hidden, output)


def test_forward_follows_the_activation_fields():
    net = init_network([4, 3, 2], seed=12)
    x = np.linspace(0, 1, 4)
    pre_output = forward(net, x).output

    squashed = forward(_with_activations(net, Activation.LOGISTIC, Activation.LOGISTIC), x).output
    assert np.allclose(squashed, 1.0 / (1.0 + np.exp(-pre_output)), rtol=0, atol=1e-15)

    w0, w1 = net.weights
    linear = forward(_with_activations(net, Activation.IDENTITY, Activation.IDENTITY), x)
    assert np.allclose(linear.per_layer[1], w0 @ np.append(x, 1.0), rtol=0, atol=1e-15)
    assert np.allclose(linear.output, w1 @ np.append(linear.per_layer[1], 1.0), rtol=0, atol=1e-15)


@pytest.mark.parametrize("hidden, output", [
    (Activation.LOGISTIC, Activation.LOGISTIC),
    (Activation.IDENTITY, Activation.IDENTITY),
])
def test_gradients_follow_the_activation_fields(hidden, output):
    rng = np.random.default_rng(77)
    h = 1e-5
    net = _with_activations(init_network([5, 4, 2], seed=3), hidden, output)
    x = rng.uniform(0, 1, 5)
    t = rng.normal(size=2)
    for layer, grad in enumerate(gradients(net, x, t)):
        for idx in np.ndindex(grad.shape):
            delta = np.zeros_like(grad)
            delta[idx] = h
            numeric = (_loss(apply_delta(net, layer, delta), x, t)
                       - _loss(apply_delta(net, layer, -delta), x, t)) / (2 * h)
            scale = max(abs(grad[idx]), abs(numeric), 1e-4)
            assert abs(grad[idx] - numeric) / scale < 1e-5, (layer, idx)


def test_activation_fields_survive_updates():
    net = _with_activations(init_network([4, 3, 2], seed=1), Activation.LOGISTIC, Activation.LOGISTIC)
    x = np.linspace(0, 1, 4)
    stepped = backprop(net, x, np.array([0.9, 0.1]), 0.3)
    batched = batch_backprop(net, [BatchItem(x, np.array([0.9, 0.1]))], 0.3, 5)
    shifted = apply_delta(net, 0, np.zeros_like(net.weights[0]))
    for updated in (stepped, batched, shifted):
        assert updated.output_activation is Activation.LOGISTIC


def test_batch_backprop_with_logistic_output_matches_mean_gradient():
    net = _with_activations(init_network([6, 5, 2], seed=8), Activation.LOGISTIC, Activation.LOGISTIC)
    rng = np.random.default_rng(4)
    items = [BatchItem(rng.uniform(0, 1, 6), rng.uniform(0, 1, 2)) for _ in range(7)]
    rate = 0.01

    per_item = [gradients(net, item.input, item.target) for item in items]
    expected = [
        w - rate * np.mean([g[layer] for g in per_item], axis=0)
        for layer, w in enumerate(net.weights)
    ]
    updated = batch_backprop(net, items, rate, max_iterations=1)
    for want, got in zip(expected, updated.weights):
        assert np.allclose(got, want, rtol=0, atol=1e-12)


def test_batch_backprop_leaves_the_argument_untouched():
    net = init_network([6, 5, 2], seed=2)
    before = [w.copy() for w in net.weights]
    rng = np.random.default_rng(6)
    items = [BatchItem(rng.uniform(0, 1, 6), rng.normal(size=2)) for _ in range(31)]
    batch_backprop(net, items, 0.3, 200)
    for want, got in zip(before, net.weights):
        assert np.array_equal(want, got)
