"""Feed-forward neural surrogate for the probability landscape.

A small fully-connected network maps normalized (phi/2pi, zeta/2pi, m/16) to
the success probability.  Hidden layers use tanh; the head is a sigmoid
scaled by 0.5, so predictions stay inside (0, 0.5) by construction (the
simulated probabilities never leave that band).  Training minimizes mean
squared error with mini-batch Adam; everything is driven by one seeded
generator, so a (seed, hyperparameters, dataset) triple reproduces the model
exactly.

Trained on grid sweeps for coin sizes 2..10, the surrogate extrapolates the
landscape to larger coins; ``predict_alpha_ml`` runs the ridge-and-fit
pipeline on a predicted surface to estimate the optimal sinusoidal-relation
parameter for coin sizes outside the training range.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .sweep import SweepDataset

FORMAT_TAG = "qrws-surrogate-v1"
TWO_PI = 2.0 * math.pi

#: Input normalization: phi and zeta by 2pi, m by the largest coin size the
#: surrogate is meant to extrapolate to.
INPUT_SCALE = (TWO_PI, TWO_PI, 16.0)


@dataclass
class SurrogateModel:
    """Weights of the landscape regressor.

    ``weights[k]`` has shape (fan_in, fan_out); layer sizes chain from the
    3 inputs through the hidden layers to the single output.
    """

    layer_sizes: list[int]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    input_scale: tuple[float, float, float] = INPUT_SCALE
    activation: str = "tanh"

    def __post_init__(self):
        if self.activation != "tanh":
            raise ValueError(f"unsupported activation {self.activation!r}")
        expected = list(zip(self.layer_sizes[:-1], self.layer_sizes[1:]))
        shapes = [w.shape for w in self.weights]
        if shapes != expected or len(self.biases) != len(self.weights):
            raise ValueError(f"weight shapes {shapes} do not chain as {expected}")
        for b, (_, out) in zip(self.biases, expected):
            if b.shape != (out,):
                raise ValueError(f"bias shape {b.shape} does not match fan-out {out}")


@dataclass
class TrainReport:
    epochs: int
    final_train_loss: float
    final_val_loss: float
    train_history: list[float] = field(default_factory=list)
    val_history: list[float] = field(default_factory=list)


@dataclass
class TrainConfig:
    """Surrogate training hyperparameters (all defaults reproducible)."""

    hidden_layers: int = 4
    hidden_units: int = 128
    epochs: int = 400
    batch_size: int = 256
    learning_rate: float = 1e-3
    # piecewise learning-rate decay: (epoch fraction, multiplier)
    lr_schedule: tuple[tuple[float, float], ...] = ((0.625, 0.3), (0.875, 0.1))
    val_fraction: float = 0.1
    seed: int = 12345

    def lr_at(self, epoch: int) -> float:
        lr = self.learning_rate
        for frac, mult in self.lr_schedule:
            if epoch >= frac * self.epochs:
                lr = self.learning_rate * mult
        return lr


def _normalize(X: np.ndarray, scale) -> np.ndarray:
    return X / np.asarray(scale)


def forward_batch(model: SurrogateModel, X: np.ndarray) -> np.ndarray:
    """Predictions for raw inputs X of shape (N, 3) = (phi, zeta, m)."""
    h = _normalize(np.asarray(X, dtype=float), model.input_scale)
    last = len(model.weights) - 1
    for k, (W, b) in enumerate(zip(model.weights, model.biases)):
        z = h @ W + b
        h = np.tanh(z) if k < last else 0.5 / (1.0 + np.exp(-z))
    return h[:, 0]


def forward(model: SurrogateModel, phi: float, zeta: float, m: float) -> float:
    """Predicted probability at a single (phi, zeta, m)."""
    return float(forward_batch(model, np.array([[phi, zeta, m]]))[0])


def _activations(model: SurrogateModel, Xn: np.ndarray) -> list[np.ndarray]:
    acts = [Xn]
    last = len(model.weights) - 1
    h = Xn
    for k, (W, b) in enumerate(zip(model.weights, model.biases)):
        z = h @ W + b
        h = np.tanh(z) if k < last else 0.5 / (1.0 + np.exp(-z))
        acts.append(h)
    return acts


def mse_loss(model: SurrogateModel, X: np.ndarray, y: np.ndarray) -> float:
    """Mean squared error of the model on raw inputs X against targets y."""
    pred = forward_batch(model, X)
    return float(np.mean((pred - y) ** 2))


def loss_gradients(model: SurrogateModel, X: np.ndarray, y: np.ndarray):
    """Backpropagated d(MSE)/d(weights), d(MSE)/d(biases) for a batch."""
    Xn = _normalize(np.asarray(X, dtype=float), model.input_scale)
    y = np.asarray(y, dtype=float).reshape(-1, 1)
    acts = _activations(model, Xn)
    out = acts[-1]
    d = 2.0 * (out - y) / len(y)
    # head: out = 0.5 * sigmoid(z), so d out/d z = out (1 - 2 out) ... careful:
    # with s = sigmoid(z) = 2 out, d out/d z = 0.5 s (1 - s)
    s = 2.0 * out
    d = d * 0.5 * s * (1.0 - s)
    grads_w = [None] * len(model.weights)
    grads_b = [None] * len(model.biases)
    for k in range(len(model.weights) - 1, -1, -1):
        grads_w[k] = acts[k].T @ d
        grads_b[k] = d.sum(axis=0)
        if k > 0:
            d = (d @ model.weights[k].T) * (1.0 - acts[k] ** 2)
    return grads_w, grads_b


def init_model(config: TrainConfig, rng: np.random.Generator) -> SurrogateModel:
    sizes = [3] + [config.hidden_units] * config.hidden_layers + [1]
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        scale = math.sqrt(2.0 / (fan_in + fan_out))
        weights.append(rng.normal(0.0, scale, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return SurrogateModel(sizes, weights, biases)


def stack_datasets(datasets: Sequence[SweepDataset]):
    """Concatenate sweep datasets into raw (X, y) training arrays."""
    X = np.concatenate(
        [np.column_stack([d.phi, d.zeta, np.full(len(d), float(d.m))]) for d in datasets]
    )
    y = np.concatenate([d.p for d in datasets])
    return X, y


def train(
    datasets: Sequence[SweepDataset],
    config: Optional[TrainConfig] = None,
) -> tuple[SurrogateModel, TrainReport]:
    """Fit the surrogate to sweep datasets with mini-batch Adam.

    A deterministic seeded shuffle carves off ``val_fraction`` of the records
    for validation; per-epoch train and validation MSE are recorded in the
    report.  Divergence (non-finite loss) aborts with a diagnostic.
    """
    config = config or TrainConfig()
    X, y = stack_datasets(datasets)
    if len(X) < 10:
        raise ValueError("not enough training records")
    rng = np.random.default_rng(config.seed)
    perm = rng.permutation(len(X))
    n_val = max(1, int(round(config.val_fraction * len(X))))
    val_idx, train_idx = perm[:n_val], perm[n_val:]
    Xt, yt = X[train_idx], y[train_idx]
    Xv, yv = X[val_idx], y[val_idx]

    model = init_model(config, rng)
    mw = [np.zeros_like(w) for w in model.weights]
    vw = [np.zeros_like(w) for w in model.weights]
    mb = [np.zeros_like(b) for b in model.biases]
    vb = [np.zeros_like(b) for b in model.biases]
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    step = 0
    train_hist, val_hist = [], []

    for epoch in range(config.epochs):
        lr = config.lr_at(epoch)
        order = rng.permutation(len(Xt))
        epoch_loss = 0.0
        for start in range(0, len(Xt), config.batch_size):
            batch = order[start:start + config.batch_size]
            gw, gb = loss_gradients(model, Xt[batch], yt[batch])
            step += 1
            c1 = 1.0 - beta1 ** step
            c2 = 1.0 - beta2 ** step
            for k in range(len(model.weights)):
                mw[k] = beta1 * mw[k] + (1 - beta1) * gw[k]
                vw[k] = beta2 * vw[k] + (1 - beta2) * gw[k] ** 2
                mb[k] = beta1 * mb[k] + (1 - beta1) * gb[k]
                vb[k] = beta2 * vb[k] + (1 - beta2) * gb[k] ** 2
                model.weights[k] -= lr * (mw[k] / c1) / (np.sqrt(vw[k] / c2) + eps)
                model.biases[k] -= lr * (mb[k] / c1) / (np.sqrt(vb[k] / c2) + eps)
            epoch_loss += mse_loss(model, Xt[batch], yt[batch]) * len(batch)
        train_loss = epoch_loss / len(Xt)
        val_loss = mse_loss(model, Xv, yv)
        if not (math.isfinite(train_loss) and math.isfinite(val_loss)):
            raise RuntimeError(
                f"training diverged at epoch {epoch}: "
                f"train={train_loss}, val={val_loss}"
            )
        train_hist.append(train_loss)
        val_hist.append(val_loss)

    report = TrainReport(config.epochs, train_hist[-1], val_hist[-1], train_hist, val_hist)
    return model, report


def predict_surface(model: SurrogateModel, m: int, steps: int = 180) -> SweepDataset:
    """Predicted landscape at coin size ``m`` on a steps x steps grid."""
    grid = np.arange(1, steps + 1) * TWO_PI / steps
    pp, zz = np.meshgrid(grid, grid, indexing="ij")
    X = np.column_stack([pp.ravel(), zz.ravel(), np.full(pp.size, float(m))])
    p = forward_batch(model, X)
    meta = {"mode": "grid", "phi_steps": steps, "zeta_steps": steps,
            "m": int(m), "source": "surrogate"}
    return SweepDataset(pp.ravel(), zz.ravel(), m, p, meta)


def predict_alpha_ml(model: SurrogateModel, m: int, steps: int = 180) -> float:
    """Optimal sinusoidal-relation alpha from the predicted landscape."""
    from .analysis import extract_ridge, fit_alpha

    surface = predict_surface(model, m, steps)
    return fit_alpha(extract_ridge(surface))


# ---------------------------------------------------------------------------
# serialization

def save_model(model: SurrogateModel, path: Path | str) -> None:
    doc = {
        "format": FORMAT_TAG,
        "layer_sizes": model.layer_sizes,
        "weights": [w.ravel().tolist() for w in model.weights],
        "biases": [b.tolist() for b in model.biases],
        "input_scale": list(model.input_scale),
        "activation": model.activation,
    }
    with open(Path(path), "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_model(path: Path | str) -> SurrogateModel:
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != FORMAT_TAG:
        raise ValueError(f"unrecognized model format {doc.get('format')!r}")
    sizes = doc["layer_sizes"]
    weights = [
        np.asarray(flat, dtype=float).reshape(fan_in, fan_out)
        for flat, fan_in, fan_out in zip(doc["weights"], sizes[:-1], sizes[1:])
    ]
    biases = [np.asarray(b, dtype=float) for b in doc["biases"]]
    return SurrogateModel(sizes, weights, biases,
                          tuple(doc["input_scale"]), doc["activation"])
