import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mna.net import (CompositionError, FormatError, Layer, MultiplicativeNetwork, NetworkError, NeuronSpec,
                     NumericalOverflow, VersionError, affine_network, append_linear_head, compose_parallel,
                     count_resources, deserialize, evaluate, evaluate_batch, from_document, hidden_states,
                     pad_to_depth, scale_output, serialize, to_document)
from mna.poly import Polynomial, horner_eval, realize_monomial_poly


def reference_eval(net, x):
    """Neuron-by-neuron loop over the recursion, independent of the vectorized path."""
    y = list(np.atleast_1d(np.asarray(x, dtype=float)))
    for layer in net.layers:
        nxt = []
        for nrn in layer.neurons():
            j1, j2 = nrn.product_pair
            v = sum(w * yy for w, yy in zip(nrn.linear_weights, y)) + nrn.product_coeff * y[j1] * y[j2] + nrn.bias
            nxt.append(v)
        y = nxt
    return [sum(w * yy for w, yy in zip(row, y)) + b for row, b in zip(net.head_weights, net.head_bias)]


def random_net(rng, d, widths, gate_prob=0.5, n_out=1):
    layers, prev = [], d
    for w in widths:
        neurons = []
        for _ in range(w):
            a = rng.uniform(-1, 1) if rng.random() < gate_prob else 0.0
            neurons.append(NeuronSpec(tuple(rng.uniform(-1, 1, prev)), a,
                                      tuple(int(v) for v in rng.integers(0, prev, 2)), rng.uniform(-1, 1)))
        layers.append(Layer.from_neurons(neurons, prev))
        prev = w
    return MultiplicativeNetwork(d, tuple(layers), rng.uniform(-1, 1, (n_out, prev)), rng.uniform(-1, 1, n_out))


def test_affine_head_only():
    net = affine_network([2.0, 0.0], 1.0)
    assert evaluate(net, [3, 5]) == 7.0
    assert count_resources(net) == (1, 0)


def test_single_squaring_neuron():
    layer = Layer.from_neurons([NeuronSpec((0.0,), 1.0, (0, 0), 0.0)], 1)
    net = MultiplicativeNetwork(1, (layer,), [[1.0]], [0.0])
    assert evaluate(net, [3]) == 9.0


def test_small_poly_value_and_resources():
    p = Polynomial((1, 2, 3))
    assert evaluate(realize_monomial_poly(p), 0.5) == pytest.approx(horner_eval(p, 0.5), abs=1e-15)
    assert evaluate(realize_monomial_poly(p), 0.5) == pytest.approx(2.75)
    assert count_resources(realize_monomial_poly(Polynomial(np.ones(6)))) == (6, 15)


def test_dimension_mismatch_rejected():
    with pytest.raises(NetworkError):
        evaluate(affine_network([1.0, 1.0], 0.0), [1.0])


def test_overflow_names_layer():
    layer = Layer.from_neurons([NeuronSpec((0.0,), 1.0, (0, 0))], 1)
    net = MultiplicativeNetwork(1, (layer, layer, layer), [[1.0]], [0.0])
    with pytest.raises(NumericalOverflow) as info:
        evaluate(net, [1e200])
    assert info.value.layer == 1


def test_invalid_pair_rejected():
    with pytest.raises(ValueError):
        Layer.from_neurons([NeuronSpec((1.0, 0.0), 1.0, (0, 2))], 2)


def test_matches_reference_evaluator():
    rng = np.random.default_rng(0)
    for _ in range(20):
        net = random_net(rng, 3, [4, 5, 3], n_out=2)
        for x in rng.uniform(-1, 1, (5, 3)):
            np.testing.assert_allclose(evaluate(net, x), reference_eval(net, x), rtol=1e-12, atol=1e-12)


def test_hidden_states_shapes():
    net = random_net(np.random.default_rng(1), 2, [3, 4])
    hs = hidden_states(net, np.zeros((7, 2)))
    assert [h.shape for h in hs] == [(7, 3), (7, 4)]


def test_parallel_resources_add():
    rng = np.random.default_rng(2)
    a, b = random_net(rng, 2, [3, 3, 3]), random_net(rng, 2, [3, 3, 3])
    comp = compose_parallel([a, b])
    assert count_resources(comp) == (4, 18)
    assert comp.widths == [6, 6, 6]


def test_parallel_maps_match_two_pass_oracle():
    rng = np.random.default_rng(3)
    p = Polynomial(rng.uniform(-1, 1, 4))
    net = realize_monomial_poly(p)
    w1, w2 = np.array([[0.3, -0.7]]), np.array([[1.1, 0.4]])
    comp = append_linear_head(compose_parallel([net, net], [w1, w2]), [1.0, 1.0], 0.0)
    X = rng.uniform(0, 1, (100, 2))
    direct = horner_eval(p, X @ w1[0]) + horner_eval(p, X @ w2[0])
    np.testing.assert_allclose(evaluate_batch(comp, X), direct, rtol=1e-12, atol=1e-12)


def test_identical_nets_mean_equals_single():
    rng = np.random.default_rng(4)
    net = random_net(rng, 2, [3, 2])
    k = 5
    comp = append_linear_head(compose_parallel([net] * k), np.full(k, 1 / k), 0.0)
    X = rng.uniform(-1, 1, (50, 2))
    np.testing.assert_allclose(evaluate_batch(comp, X), evaluate_batch(net, X), rtol=1e-12, atol=1e-12)


def test_parallel_one_hot_recovers_sub_outputs():
    rng = np.random.default_rng(5)
    nets = [random_net(rng, 2, [3, 2]), random_net(rng, 2, [4]), random_net(rng, 2, [2, 2, 2])]
    comp = compose_parallel(nets)
    X = rng.uniform(-1, 1, (40, 2))
    out = evaluate_batch(comp, X)
    for k, net in enumerate(nets):
        one_hot = np.eye(len(nets))[k]
        np.testing.assert_allclose(evaluate_batch(append_linear_head(comp, one_hot, 0.0), X),
                                   evaluate_batch(net, X), rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(out[:, k], evaluate_batch(net, X), rtol=1e-12, atol=1e-12)
    assert comp.depth == 4
    assert comp.neurons == sum(n.neurons for n in nets) + (4 - 3) * 2 + (4 - 2) * 4


def test_parallel_without_padding_rejects_mixed_depths():
    rng = np.random.default_rng(6)
    with pytest.raises(CompositionError):
        compose_parallel([random_net(rng, 1, [2]), random_net(rng, 1, [2, 2])], pad=False)


def test_mixed_coordinate_gate_gets_input_layer():
    # (w.x)^2 in d = 2 cannot sit in one neuron; the composer adds a shared map layer.
    sq = MultiplicativeNetwork(1, (Layer.from_neurons([NeuronSpec((0.0,), 1.0, (0, 0))], 1),), [[1.0]], [0.0])
    A = np.array([[0.5, 2.0]])
    comp = compose_parallel([sq], [A])
    X = np.random.default_rng(7).uniform(-1, 1, (30, 2))
    np.testing.assert_allclose(evaluate_batch(comp, X), (X @ A[0]) ** 2, rtol=1e-12)
    assert comp.depth == sq.depth + 1


def test_head_weights_length_checked():
    net = realize_monomial_poly(Polynomial((1, 1, 1)))
    with pytest.raises(NetworkError):
        append_linear_head(net, [1.0, 2.0], 0.0)


def test_zero_head_is_constant():
    rng = np.random.default_rng(8)
    net = append_linear_head(random_net(rng, 2, [3]), np.zeros(3), 4.5)
    np.testing.assert_array_equal(evaluate_batch(net, rng.uniform(-1, 1, (10, 2))), 4.5)


def test_pad_to_depth_preserves_values():
    rng = np.random.default_rng(9)
    net = random_net(rng, 2, [3, 2])
    X = rng.uniform(-1, 1, (20, 2))
    padded = pad_to_depth(net, 6)
    assert padded.depth == 6
    np.testing.assert_allclose(evaluate_batch(padded, X), evaluate_batch(net, X), rtol=1e-14)


@given(st.integers(0, 2**32 - 1), st.floats(-3, 3, allow_nan=False))
def test_head_linearity(seed, alpha):
    rng = np.random.default_rng(seed)
    net = random_net(rng, 2, [3, 3])
    X = rng.uniform(-1, 1, (10, 2))
    np.testing.assert_allclose(evaluate_batch(scale_output(net, alpha), X), alpha * evaluate_batch(net, X),
                               rtol=1e-12, atol=1e-12)


@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_restriction_to_line_is_low_degree_polynomial(seed, n_layers):
    rng = np.random.default_rng(seed)
    net = random_net(rng, 2, [2] * n_layers, gate_prob=1.0)
    x0, v = rng.uniform(-1, 1, 2), rng.uniform(-1, 1, 2)
    deg = 2 ** (net.depth - 1)
    t_fit = np.cos(np.pi * (np.arange(deg + 1) + 0.5) / (deg + 1))
    vals = evaluate_batch(net, x0 + t_fit[:, None] * v)
    coef = np.polynomial.chebyshev.chebfit(t_fit, vals, deg)
    t_test = rng.uniform(-1, 1, 25)
    got = evaluate_batch(net, x0 + t_test[:, None] * v)
    scale = 1 + np.max(np.abs(got))
    np.testing.assert_allclose(np.polynomial.chebyshev.chebval(t_test, coef), got, atol=1e-9 * scale)


@given(st.integers(0, 2**32 - 1))
def test_serialize_round_trip(seed):
    rng = np.random.default_rng(seed)
    net = random_net(rng, int(rng.integers(1, 4)), list(rng.integers(1, 5, int(rng.integers(0, 4)))),
                     n_out=int(rng.integers(1, 3)))
    back = deserialize(serialize(net))
    assert back == net


def test_minimal_document():
    doc = to_document(affine_network([1.5], -2.0))
    assert doc["layers"] == [] and doc["version"] == 1
    assert evaluate(from_document(doc), [2.0]) == 1.0


def test_degree_twenty_document_reevaluates_identically():
    p = Polynomial(np.random.default_rng(10).uniform(-1, 1, 21))
    net = realize_monomial_poly(p)
    x = np.linspace(-1, 1, 1000)
    np.testing.assert_array_equal(evaluate_batch(deserialize(serialize(net)), x), evaluate_batch(net, x))


def test_document_matches_schema():
    net = realize_monomial_poly(Polynomial((1, 2, 3)))
    doc = json.loads(serialize(net))
    nrn = doc["layers"][0][1]
    assert set(nrn) == {"w", "a", "pair", "b"}
    assert nrn["a"] == 1.0 and nrn["pair"] == [0, 0]


def test_schema_violation_reports_path():
    doc = to_document(realize_monomial_poly(Polynomial((1, 2, 3))))
    doc["layers"][1][2]["pair"] = [0, 7]
    with pytest.raises(FormatError) as info:
        from_document(doc)
    assert "$.layers[1][2]" in str(info.value)


def test_version_mismatch():
    doc = to_document(affine_network([1.0], 0.0))
    doc["version"] = 2
    with pytest.raises(VersionError):
        from_document(doc)


def test_garbage_bytes_rejected():
    with pytest.raises(FormatError):
        deserialize(b"{not json")
