import math

import numpy as np
import pytest

from qrws.surrogate import (
    SurrogateModel,
    TrainConfig,
    forward,
    forward_batch,
    init_model,
    load_model,
    loss_gradients,
    mse_loss,
    save_model,
    stack_datasets,
    train,
)
from qrws.sweep import SweepDataset

PI = math.pi


def zero_model(sizes=(3, 4, 1)):
    sizes = list(sizes)
    weights = [np.zeros((a, b)) for a, b in zip(sizes[:-1], sizes[1:])]
    biases = [np.zeros(b) for b in sizes[1:]]
    return SurrogateModel(sizes, weights, biases)


def toy_dataset(n=400, seed=0):
    rng = np.random.default_rng(seed)
    phi = rng.uniform(0, 2 * PI, n)
    zeta = rng.uniform(0, 2 * PI, n)
    # smooth synthetic target inside (0, 0.5)
    p = 0.25 + 0.2 * np.sin(phi) * np.cos(zeta)
    return SweepDataset(phi, zeta, 4, p, {"mode": "random", "seed": seed})


class TestForward:
    def test_zero_weights_give_quarter(self):
        model = zero_model()
        for args in [(0.0, 0.0, 2), (PI, PI, 8), (5.0, 1.0, 16)]:
            assert forward(model, *args) == pytest.approx(0.25)

    def test_output_bounds(self):
        rng = np.random.default_rng(1)
        model = init_model(TrainConfig(hidden_layers=2, hidden_units=8), rng)
        X = np.column_stack([rng.uniform(0, 2 * PI, 200),
                             rng.uniform(0, 2 * PI, 200),
                             rng.integers(2, 17, 200)])
        p = forward_batch(model, X)
        assert np.all(p > 0) and np.all(p < 0.5)
        for w in model.weights:
            w *= 50.0  # saturate the head; may round to the 0.5 endpoint
        p = forward_batch(model, X)
        assert np.all(p >= 0) and np.all(p <= 0.5)

    def test_malformed_shapes_rejected(self):
        with pytest.raises(ValueError):
            SurrogateModel([3, 4, 1], [np.zeros((3, 5)), np.zeros((4, 1))],
                           [np.zeros(4), np.zeros(1)])
        with pytest.raises(ValueError):
            SurrogateModel([3, 4, 1], [np.zeros((3, 4)), np.zeros((4, 1))],
                           [np.zeros(3), np.zeros(1)])


class TestGradients:
    def test_backprop_matches_finite_differences(self):
        rng = np.random.default_rng(42)
        model = init_model(TrainConfig(hidden_layers=2, hidden_units=6, seed=42), rng)
        X = np.column_stack([rng.uniform(0, 2 * PI, 32),
                             rng.uniform(0, 2 * PI, 32),
                             rng.uniform(2, 16, 32)])
        y = rng.uniform(0.01, 0.45, 32)
        gw, gb = loss_gradients(model, X, y)
        eps = 1e-6
        checked = 0
        while checked < 100:
            k = int(rng.integers(len(model.weights)))
            i = int(rng.integers(model.weights[k].shape[0]))
            j = int(rng.integers(model.weights[k].shape[1]))
            orig = model.weights[k][i, j]
            model.weights[k][i, j] = orig + eps
            up = mse_loss(model, X, y)
            model.weights[k][i, j] = orig - eps
            down = mse_loss(model, X, y)
            model.weights[k][i, j] = orig
            numeric = (up - down) / (2 * eps)
            analytic = gw[k][i, j]
            if abs(numeric) < 1e-10 and abs(analytic) < 1e-10:
                continue
            rel = abs(analytic - numeric) / max(abs(analytic), abs(numeric))
            assert rel < 1e-4, f"layer {k} ({i},{j}): {analytic} vs {numeric}"
            checked += 1

    def test_bias_gradients(self):
        rng = np.random.default_rng(43)
        model = init_model(TrainConfig(hidden_layers=1, hidden_units=5, seed=43), rng)
        X = np.array([[1.0, 2.0, 4.0], [0.5, 3.0, 8.0]])
        y = np.array([0.2, 0.3])
        _, gb = loss_gradients(model, X, y)
        eps = 1e-6
        for k in range(len(model.biases)):
            for j in range(len(model.biases[k])):
                orig = model.biases[k][j]
                model.biases[k][j] = orig + eps
                up = mse_loss(model, X, y)
                model.biases[k][j] = orig - eps
                down = mse_loss(model, X, y)
                model.biases[k][j] = orig
                numeric = (up - down) / (2 * eps)
                assert gb[k][j] == pytest.approx(numeric, rel=1e-4, abs=1e-9)


class TestTrain:
    CONFIG = TrainConfig(hidden_layers=2, hidden_units=16, epochs=50,
                         batch_size=64, seed=3)

    def test_loss_decreases(self):
        model, report = train([toy_dataset()], self.CONFIG)
        assert report.train_history[-1] < report.train_history[0]
        assert len(report.train_history) == self.CONFIG.epochs
        assert len(report.val_history) == self.CONFIG.epochs

    def test_deterministic(self):
        m1, r1 = train([toy_dataset()], self.CONFIG)
        m2, r2 = train([toy_dataset()], self.CONFIG)
        for w1, w2 in zip(m1.weights, m2.weights):
            assert np.array_equal(w1, w2)
        assert r1.train_history == r2.train_history

    def test_divergence_aborts(self):
        bad = toy_dataset()
        bad.p[0] = np.nan
        with pytest.raises(RuntimeError, match="diverged"):
            train([bad], TrainConfig(hidden_layers=1, hidden_units=4, epochs=2,
                                     batch_size=512, seed=1))

    def test_too_few_records(self):
        tiny = SweepDataset(np.zeros(2), np.zeros(2), 4, np.full(2, 0.1), {})
        with pytest.raises(ValueError):
            train([tiny], self.CONFIG)

    def test_stack_datasets(self):
        X, y = stack_datasets([toy_dataset(10, 0), toy_dataset(5, 1)])
        assert X.shape == (15, 3)
        assert y.shape == (15,)
        assert set(X[:, 2]) == {4.0}


class TestSerialization:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(9)
        model = init_model(TrainConfig(hidden_layers=2, hidden_units=7), rng)
        path = tmp_path / "model.json"
        save_model(model, path)
        back = load_model(path)
        assert back.layer_sizes == model.layer_sizes
        assert back.activation == model.activation
        assert back.input_scale == model.input_scale
        for a, b in zip(model.weights, back.weights):
            assert np.array_equal(a, b)
        X = np.array([[1.0, 2.0, 5.0]])
        assert forward_batch(back, X)[0] == forward_batch(model, X)[0]

    def test_rejects_unknown_format(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"format": "something-else"}')
        with pytest.raises(ValueError, match="format"):
            load_model(path)
