import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from passcast import mlp
from passcast.mlp import (
    DimensionMismatch,
    EmptyDataset,
    InvalidArchitecture,
    ModelFormatError,
    TrainConfig,
)

from oracles import numeric_grad_rel_error


def onehot(k, n=11):
    v = np.zeros(n)
    v[k] = 1.0
    return v


# --- init -----------------------------------------------------------------


def test_init_is_deterministic_and_glorot_bounded():
    a = mlp.init_model([385, 64, 11], seed=5)
    b = mlp.init_model([385, 64, 11], seed=5)
    c = mlp.init_model([385, 64, 11], seed=6)
    assert a == b and a != c
    assert [w.shape for w in a.weights] == [(64, 385), (11, 64)]
    assert all(np.all(bias == 0) for bias in a.biases)
    for w, (fan_in, fan_out) in zip(a.weights, [(385, 64), (64, 11)]):
        assert np.abs(w).max() <= math.sqrt(6 / (fan_in + fan_out))


@pytest.mark.parametrize("sizes", [[], [385], [385, 0, 11], [-1, 11]])
def test_invalid_architecture(sizes):
    with pytest.raises(InvalidArchitecture):
        mlp.init_model(sizes)


# --- forward / loss ---------------------------------------------------------


def test_all_zero_parameters_give_uniform_output():
    m = mlp.init_model([92, 16, 11])
    for w in m.weights:
        w[:] = 0
    p = mlp.forward(m, np.ones(92))
    np.testing.assert_allclose(p, np.full(11, 1 / 11), atol=1e-15)
    assert mlp.loss(p, onehot(0)) == pytest.approx(math.log(11), abs=1e-12)


def test_loss_identities():
    assert mlp.loss(onehot(3), onehot(3)) == 0.0
    p = np.zeros(11)
    p[:2] = 0.5
    assert mlp.loss(p, onehot(1)) == pytest.approx(math.log(2), abs=1e-15)
    # zero probability is clamped, not infinite
    assert mlp.loss(onehot(0), onehot(5)) == pytest.approx(-math.log(mlp.PROB_FLOOR))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-50, 50))
def test_softmax_sums_to_one_and_ignores_common_shift(seed, shift):
    m = mlp.init_model([20, 8, 11], seed)
    x = mlp.make_rng(seed).uniform(-1.5, 1.5, 20)
    p = mlp.forward(m, x)
    assert abs(p.sum() - 1) <= 1e-9 and np.all(p > 0)
    m.biases[-1] = m.biases[-1] + shift
    np.testing.assert_allclose(mlp.forward(m, x), p, atol=1e-12)


def test_softmax_is_stable_for_huge_logits():
    p = mlp.softmax(np.array([1000.0, 999.0] + [-1000.0] * 9))
    assert np.all(np.isfinite(p)) and p[0] > p[1] > p[2]


def test_wrong_input_length():
    m = mlp.init_model([385, 64, 11])
    with pytest.raises(DimensionMismatch):
        mlp.forward(m, np.zeros(352))


def test_logit_monotonicity():
    m = mlp.init_model([10, 11], seed=2)
    x = np.linspace(-1, 1, 10)
    base = mlp.forward(m, x)
    m.biases[0][4] += 0.7
    bumped = mlp.forward(m, x)
    assert bumped[4] > base[4]
    others = np.delete(np.arange(11), 4)
    assert np.all(bumped[others] < base[others])


def test_batch_and_single_rows_agree():
    m = mlp.init_model([30, 12, 11], seed=8)
    X = mlp.make_rng(1).uniform(-1, 1, (5, 30))
    P = mlp.forward(m, X)
    for row, p in zip(X, P):
        np.testing.assert_allclose(mlp.forward(m, row), p, atol=1e-15)


# --- gradients --------------------------------------------------------------


@pytest.mark.parametrize("sizes", [[5, 11], [7, 4, 11], [12, 6, 5, 11], [92, 16, 11]])
def test_gradient_matches_finite_differences(sizes):
    m = mlp.init_model(sizes, seed=len(sizes))
    x = mlp.make_rng(4).uniform(-1, 1, sizes[0])
    assert numeric_grad_rel_error(m, x, onehot(6)) < 1e-4


def test_output_layer_gradient_is_p_minus_y():
    m = mlp.init_model([6, 11], seed=1)
    x = np.linspace(-1, 1, 6)
    y = onehot(2)
    g = mlp.backward(m, x, y)
    np.testing.assert_allclose(g.biases[-1], mlp.forward(m, x) - y, atol=1e-15)
    np.testing.assert_allclose(g.weights[-1], np.outer(mlp.forward(m, x) - y, x), atol=1e-15)


def test_zero_input_gives_zero_first_layer_weight_gradient():
    m = mlp.init_model([9, 5, 11], seed=3)
    g = mlp.backward(m, np.zeros(9), onehot(0))
    assert np.all(g.weights[0] == 0)


# --- training -----------------------------------------------------------------


def test_overfits_a_single_sample():
    X = mlp.make_rng(0).uniform(-1, 1, (1, 20))
    cfg = TrainConfig(learning_rate=0.1, batch_size=1, epochs=200, seed=0, validation_fraction=0.0)
    model, hist = mlp.train(X, [7], [20, 16, 11], cfg)
    assert hist[-1].train_loss < 0.01
    assert mlp.predict_topk(model, X[0], 1)[0][0] == 7


def test_training_is_deterministic():
    rng = mlp.make_rng(3)
    X, y = rng.uniform(-1, 1, (60, 10)), rng.integers(1, 12, 60)
    cfg = TrainConfig(learning_rate=0.05, epochs=5, seed=11)
    a, ha = mlp.train(X, y, [10, 8, 11], cfg)
    b, hb = mlp.train(X, y, [10, 8, 11], cfg)
    assert a == b and ha.to_csv() == hb.to_csv()
    c, _ = mlp.train(X, y, [10, 8, 11], TrainConfig(learning_rate=0.05, epochs=5, seed=12))
    assert a != c


def test_zero_learning_rate_leaves_init_untouched():
    rng = mlp.make_rng(3)
    X, y = rng.uniform(-1, 1, (40, 10)), rng.integers(1, 12, 40)
    model, _ = mlp.train(X, y, [10, 8, 11], TrainConfig(learning_rate=0.0, epochs=3, seed=4))
    assert model == mlp.init_model([10, 8, 11], 4)


def test_zero_epochs_returns_initial_model():
    X, y = np.zeros((4, 10)), [1, 2, 3, 4]
    model, hist = mlp.train(X, y, [10, 11], TrainConfig(epochs=0, seed=9))
    assert model == mlp.init_model([10, 11], 9) and len(hist) == 0


def test_empty_and_mismatched_datasets():
    with pytest.raises(EmptyDataset):
        mlp.train(np.zeros((0, 10)), [], [10, 11])
    with pytest.raises(DimensionMismatch):
        mlp.train(np.zeros((3, 10)), [1, 2, 3], [12, 11])


def test_full_batch_loss_does_not_increase_with_small_steps():
    rng = mlp.make_rng(21)
    X, y = rng.uniform(-1, 1, (50, 15)), rng.integers(1, 12, 50)
    cfg = TrainConfig(learning_rate=1e-3, batch_size=50, epochs=20, seed=1, validation_fraction=0.0)
    _, hist = mlp.train(X, y, [15, 10, 11], cfg)
    losses = [e.train_loss for e in hist.epochs]
    for prev, cur in zip(losses, losses[1:]):
        assert cur <= prev * 1.05
    assert losses[-1] < losses[0]


def test_split_is_seeded_and_disjoint():
    tr, va = mlp.split_indices(100, 0.2, seed=3)
    assert len(va) == 20 and len(tr) == 80
    assert set(tr).isdisjoint(va) and set(tr) | set(va) == set(range(100))
    tr2, va2 = mlp.split_indices(100, 0.2, seed=3)
    assert np.array_equal(va, va2)


def test_history_csv_header():
    X, y = mlp.make_rng(0).uniform(-1, 1, (10, 4)), np.arange(1, 11)
    _, hist = mlp.train(X, y, [4, 11], TrainConfig(epochs=2))
    lines = hist.to_csv().splitlines()
    assert lines[0] == "epoch,train_loss,val_loss,val_top1,val_top2"
    assert len(lines) == 3 and lines[1].startswith("1,")


# --- top-k ------------------------------------------------------------------


def test_topk_ties_prefer_lower_unum():
    m = mlp.init_model([4, 11])
    m.weights[0][:] = 0
    assert [u for u, _ in mlp.predict_topk(m, np.zeros(4), 2)] == [1, 2]


@settings(max_examples=30, deadline=None)
@given(st.permutations(list(range(11))))
def test_topk_follows_probability_order(perm):
    m = mlp.init_model([3, 11])
    m.weights[0][:] = 0
    m.biases[0][:] = np.array(perm, dtype=float)
    top = mlp.predict_topk(m, np.zeros(3), 11)
    assert [u for u, _ in top] == [int(np.argmax(np.array(perm) == 10 - i)) + 1 for i in range(11)]
    ps = [p for _, p in top]
    assert ps == sorted(ps, reverse=True)


def test_topk_rejects_bad_k():
    m = mlp.init_model([3, 11])
    with pytest.raises(ValueError):
        mlp.predict_topk(m, np.zeros(3), 0)


# --- model file -------------------------------------------------------------


def test_save_load_round_trip(tmp_path):
    m = mlp.init_model([385, 64, 11], seed=17)
    m.biases[0][:] = np.linspace(-1, 1, 64) / 3
    path = tmp_path / "m.txt"
    mlp.save(m, path)
    back = mlp.load(path)
    assert back == m
    assert mlp.dumps(back) == path.read_text()


def test_truncated_model_file():
    text = mlp.dumps(mlp.init_model([5, 3, 11]))
    with pytest.raises(ModelFormatError):
        mlp.loads("\n".join(text.splitlines()[:-2]))


@pytest.mark.parametrize(
    "mutate",
    [
        lambda t: t.replace("v1", "v99", 1),
        lambda t: t.replace("PASSCAST-MODEL", "OTHER", 1),
        lambda t: t.replace("layers: 5 3 11", "layers: 5 x 11"),
        lambda t: t + "1 2 3\n",
        lambda t: t.replace("W 1", "W 7"),
    ],
)
def test_malformed_model_files(mutate):
    text = mlp.dumps(mlp.init_model([5, 3, 11]))
    with pytest.raises(ModelFormatError):
        mlp.loads(mutate(text))


def test_load_from_file_object():
    m = mlp.init_model([4, 11], seed=2)
    buf = io.StringIO()
    mlp.save(m, buf)
    buf.seek(0)
    assert mlp.load(buf) == m
