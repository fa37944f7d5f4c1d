"""Minimal fully connected network: ReLU hidden layers, softmax output,
cross-entropy loss, Adam updates. Deterministic given the config seed."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .svm import DimensionMismatch, EmptyDataset

N_CLASSES = 5


@dataclass(frozen=True)
class MlpConfig:
    layer_widths: tuple[int, ...] = (16, 16, 8)
    batch_size: int = 256
    learning_rate: float = 1e-5
    epochs: int = 50
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if any(w < 1 for w in self.layer_widths):
            raise ValueError(f"layer widths must be >= 1: {self.layer_widths}")


@dataclass
class MlpModel:
    weights: list[np.ndarray]  # weights[l]: (fan_in, fan_out)
    biases: list[np.ndarray]
    config: MlpConfig
    feature_schema: dict = field(default_factory=dict)
    training_curve: list[tuple[int, float, float]] = field(default_factory=list)

    model_type = "mlp"

    @property
    def dim(self) -> int:
        return self.weights[0].shape[0]

    def decision_scores(self, x) -> np.ndarray:
        return forward(self, x)

    def to_dict(self) -> dict:
        return {
            "format_version": 1,
            "model_type": "mlp",
            "feature_schema": self.feature_schema,
            "classes": list(range(N_CLASSES)),
            "layer_widths": list(self.config.layer_widths),
            "weights": [[list(map(float, row)) for row in W] for W in self.weights],
            "biases": [list(map(float, b)) for b in self.biases],
            "config": {
                "batch_size": self.config.batch_size,
                "learning_rate": self.config.learning_rate,
                "epochs": self.config.epochs,
                "seed": self.config.seed,
            },
            "training_curve": [
                [int(e), float(l), float(a)] for e, l, a in self.training_curve
            ],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "MlpModel":
        cfg = obj.get("config", {})
        config = MlpConfig(
            layer_widths=tuple(obj["layer_widths"]),
            batch_size=int(cfg.get("batch_size", 256)),
            learning_rate=float(cfg.get("learning_rate", 1e-5)),
            epochs=int(cfg.get("epochs", 0)),
            seed=int(cfg.get("seed", 0)),
        )
        return cls(
            weights=[np.asarray(W, dtype=np.float64) for W in obj["weights"]],
            biases=[np.asarray(b, dtype=np.float64) for b in obj["biases"]],
            config=config,
            feature_schema=obj.get("feature_schema", {}),
            training_curve=[tuple(row) for row in obj.get("training_curve", [])],
        )


def init_model(input_dim: int, config: MlpConfig,
               feature_schema: dict | None = None) -> MlpModel:
    """Glorot-uniform initialization from the config seed."""
    rng = np.random.default_rng(config.seed)
    sizes = [input_dim, *config.layer_widths, N_CLASSES]
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpModel(weights=weights, biases=biases, config=config,
                    feature_schema=feature_schema or {"kind": "raw", "dim": input_dim})


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - np.max(z, axis=-1, keepdims=True)
    e = np.exp(z)
    return e / np.sum(e, axis=-1, keepdims=True)


def _forward_batch(model: MlpModel, X: np.ndarray):
    """Returns (activations, pre_activations, probs)."""
    acts = [X]
    pres = []
    h = X
    last = len(model.weights) - 1
    for l, (W, b) in enumerate(zip(model.weights, model.biases)):
        z = h @ W + b
        pres.append(z)
        h = z if l == last else np.maximum(z, 0.0)
        acts.append(h)
    return acts, pres, _softmax(pres[-1])


def forward(model: MlpModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.dim,):
        raise DimensionMismatch(f"expected input dim {model.dim}, got {x.shape}")
    return _forward_batch(model, x[None, :])[2][0]


def _loss_and_grads(model: MlpModel, X: np.ndarray, y: np.ndarray):
    n = X.shape[0]
    acts, pres, probs = _forward_batch(model, X)
    logp = np.log(np.maximum(probs[np.arange(n), y], 1e-300))
    loss = -float(np.mean(logp))
    delta = probs.copy()
    delta[np.arange(n), y] -= 1.0
    delta /= n
    gw = [None] * len(model.weights)
    gb = [None] * len(model.biases)
    for l in range(len(model.weights) - 1, -1, -1):
        gw[l] = acts[l].T @ delta
        gb[l] = delta.sum(axis=0)
        if l > 0:
            delta = (delta @ model.weights[l].T) * (pres[l - 1] > 0.0)
    return loss, gw, gb, probs


def dataset_metrics(model: MlpModel, X: np.ndarray, y: np.ndarray):
    n = X.shape[0]
    _, _, probs = _forward_batch(model, X)
    logp = np.log(np.maximum(probs[np.arange(n), y], 1e-300))
    loss = -float(np.mean(logp))
    acc = float(np.mean(np.argmax(probs, axis=1) == y))
    return loss, acc


def train_mlp(X, y, config: MlpConfig,
              feature_schema: dict | None = None) -> MlpModel:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise EmptyDataset("training set must contain at least one row")
    if y.shape != (X.shape[0],):
        raise DimensionMismatch(f"X has {X.shape[0]} rows but y has shape {y.shape}")
    n = X.shape[0]
    model = init_model(X.shape[1], config, feature_schema)
    rng = np.random.default_rng(config.seed + 1)
    m_w = [np.zeros_like(W) for W in model.weights]
    v_w = [np.zeros_like(W) for W in model.weights]
    m_b = [np.zeros_like(b) for b in model.biases]
    v_b = [np.zeros_like(b) for b in model.biases]
    t = 0
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            _, gw, gb, _ = _loss_and_grads(model, X[idx], y[idx])
            t += 1
            bc1 = 1.0 - config.beta1 ** t
            bc2 = 1.0 - config.beta2 ** t
            for l in range(len(model.weights)):
                for g, param, m, v in ((gw[l], model.weights[l], m_w[l], v_w[l]),
                                       (gb[l], model.biases[l], m_b[l], v_b[l])):
                    m *= config.beta1
                    m += (1.0 - config.beta1) * g
                    v *= config.beta2
                    v += (1.0 - config.beta2) * g * g
                    param -= config.learning_rate * (m / bc1) / (np.sqrt(v / bc2) + config.eps)
        loss, acc = dataset_metrics(model, X, y)
        model.training_curve.append((epoch, loss, acc))
    return model


def curve_to_csv(model: MlpModel) -> str:
    lines = ["epoch,loss,accuracy"]
    for epoch, loss, acc in model.training_curve:
        lines.append(f"{epoch},{loss!r},{acc!r}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class GradCheckResult:
    max_rel_error: float
    kink_units: tuple[tuple[int, int], ...]  # (layer, unit) with exact-zero pre-activation


def gradient_check(model: MlpModel, x, y: int, h: float = 1e-5) -> GradCheckResult:
    """Analytic gradients vs central finite differences over every parameter.

    Units sitting exactly on the ReLU kink (pre-activation == 0) make the
    loss non-differentiable there; parameters feeding into or out of such
    units are excluded from the max and the units are reported.
    """
    x = np.asarray(x, dtype=np.float64).reshape(1, -1)
    y = np.asarray([y], dtype=np.int64)

    _, pres, _ = _forward_batch(model, x)
    kinks = tuple(
        (l, int(u))
        for l in range(len(pres) - 1)
        for u in np.nonzero(pres[l][0] == 0.0)[0]
    )
    kink_layers = {l for l, _ in kinks}

    _, gw, gb, _ = _loss_and_grads(model, x, y)

    def loss_at() -> float:
        return _loss_and_grads(model, x, y)[0]

    max_err = 0.0
    for l in range(len(model.weights)):
        if any(l <= kl for kl in kink_layers):
            continue
        for grads, params in ((gw[l], model.weights[l]), (gb[l], model.biases[l])):
            flat_p = params.reshape(-1)
            flat_g = grads.reshape(-1)
            for i in range(flat_p.size):
                orig = flat_p[i]
                flat_p[i] = orig + h
                up = loss_at()
                flat_p[i] = orig - h
                down = loss_at()
                flat_p[i] = orig
                numeric = (up - down) / (2.0 * h)
                analytic = flat_g[i]
                denom = max(1e-12, abs(analytic) + abs(numeric))
                max_err = max(max_err, abs(analytic - numeric) / denom)
    return GradCheckResult(max_rel_error=max_err, kink_units=kinks)
