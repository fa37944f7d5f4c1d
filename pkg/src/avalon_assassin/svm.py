"""From-scratch one-vs-rest support vector classifiers.

Linear: primal squared-hinge + L2, solved by damped Newton with Armijo
backtracking (the objective is convex and piecewise quadratic, so Newton
steps converge in a handful of iterations). Kernel: C-SVC dual with an RBF
kernel, solved by SMO-style most-violating-pair updates.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .game_model import NUM_PLAYERS

N_CLASSES = NUM_PLAYERS


class EmptyDataset(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class NonPositiveC(ValueError):
    pass


class NonPositiveGamma(ValueError):
    pass


class BadMask(ValueError):
    pass


@dataclass
class LinearSvcModel:
    weights: np.ndarray  # (5, d)
    biases: np.ndarray  # (5,)
    C: float
    feature_schema: dict
    training_meta: dict = field(default_factory=dict)

    model_type = "linear-svc"

    @property
    def dim(self) -> int:
        return self.weights.shape[1]


@dataclass
class KernelSvcModel:
    support_vectors: list[np.ndarray]  # per class, (m_k, d)
    dual_coefs: list[np.ndarray]  # per class, alpha_i * y_i
    biases: np.ndarray  # (5,)
    gamma: float
    C: float
    feature_schema: dict
    training_meta: dict = field(default_factory=dict)

    model_type = "rbf-svc"

    @property
    def dim(self) -> int:
        for sv in self.support_vectors:
            if sv.shape[0]:
                return sv.shape[1]
        return int(self.feature_schema.get("dim", 0))


def _check_xy(X, y, C):
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise EmptyDataset("training set must contain at least one row")
    if y.shape != (X.shape[0],):
        raise DimensionMismatch(f"X has {X.shape[0]} rows but y has shape {y.shape}")
    if C <= 0:
        raise NonPositiveC(f"C must be positive, got {C}")
    return X, y


def _newton_minimize(X, y_signed, C, max_iter, tol):
    """Minimize the squared-hinge primal; returns (theta, iters, grad_norm)."""
    n, d = X.shape
    theta = np.zeros(d + 1)
    value, grad = _kernels.squared_hinge(theta, X, y_signed, C)
    g0 = max(1.0, float(np.linalg.norm(grad)))
    it = 0
    while it < max_iter:
        gnorm = float(np.linalg.norm(grad))
        if gnorm <= tol * g0:
            break
        w = theta[:-1]
        b = theta[-1]
        margins = 1.0 - y_signed * (X @ w + b)
        active = margins > 0.0
        Xa = X[active]
        # Hessian of the active quadratic piece, bias column appended
        aug = np.hstack([Xa, np.ones((Xa.shape[0], 1))])
        H = 2.0 * C * (aug.T @ aug)
        H[np.arange(d), np.arange(d)] += 1.0
        H[d, d] += 1e-10  # bias is unregularized; keep H nonsingular
        try:
            step = np.linalg.solve(H, -grad)
        except np.linalg.LinAlgError:
            step = -grad
        # Armijo backtracking on the Newton direction
        slope = float(grad @ step)
        if slope >= 0.0:
            step = -grad
            slope = -float(grad @ grad)
        alpha = 1.0
        for _ in range(60):
            cand = theta + alpha * step
            cval, cgrad = _kernels.squared_hinge(cand, X, y_signed, C)
            if cval <= value + 1e-4 * alpha * slope:
                theta, value, grad = cand, cval, cgrad
                break
            alpha *= 0.5
        else:
            break  # no further progress representable in float64
        it += 1
    return theta, it, float(np.linalg.norm(grad))


def linear_objective(w, b, X, y_signed, C) -> float:
    margins = np.maximum(0.0, 1.0 - y_signed * (X @ w + b))
    return 0.5 * float(w @ w) + C * float(margins @ margins)


def train_linear_svc(X, y, C: float = 1.0, max_iter: int = 100_000,
                     tol: float = 1e-6, seed: int = 0,
                     feature_schema: dict | None = None) -> LinearSvcModel:
    X, y = _check_xy(X, y, C)
    n, d = X.shape
    weights = np.zeros((N_CLASSES, d))
    biases = np.zeros(N_CLASSES)
    iters, gnorms = [], []
    absent = sorted(set(range(N_CLASSES)) - set(int(c) for c in y))
    for k in range(N_CLASSES):
        y_signed = np.where(y == k, 1.0, -1.0)
        theta, it, gnorm = _newton_minimize(X, y_signed, C, max_iter, tol)
        weights[k] = theta[:-1]
        biases[k] = theta[-1]
        iters.append(it)
        gnorms.append(gnorm)
    return LinearSvcModel(
        weights=weights,
        biases=biases,
        C=C,
        feature_schema=feature_schema or {"kind": "raw", "dim": d},
        training_meta={
            "iterations": iters,
            "final_grad_norm": gnorms,
            "seed": seed,
            "absent_classes": absent,
        },
    )


def scale_gamma(X) -> float:
    d = X.shape[1]
    var = float(np.var(X))
    if var <= 0.0:
        return 1.0 / d
    return 1.0 / (d * var)


def train_rbf_svc(X, y, C: float = 1.0, gamma: float | None = None,
                  tol: float = 1e-3, max_iter: int | None = None,
                  feature_schema: dict | None = None) -> KernelSvcModel:
    X, y = _check_xy(X, y, C)
    n, d = X.shape
    if gamma is None:
        gamma = scale_gamma(X)
    if gamma <= 0:
        raise NonPositiveGamma(f"gamma must be positive, got {gamma}")
    if max_iter is None:
        max_iter = max(10_000, 200 * n)
    K = _kernels.rbf_kernel(X, X, gamma)
    support_vectors, dual_coefs = [], []
    biases = np.zeros(N_CLASSES)
    gaps, iters = [], []
    for k in range(N_CLASSES):
        y_signed = np.where(y == k, 1.0, -1.0)
        alpha, bias, gap, it = _kernels.smo_solve(K, y_signed, C, tol, max_iter)
        keep = alpha > 1e-12
        support_vectors.append(np.ascontiguousarray(X[keep]))
        dual_coefs.append(alpha[keep] * y_signed[keep])
        biases[k] = bias
        gaps.append(gap)
        iters.append(it)
    return KernelSvcModel(
        support_vectors=support_vectors,
        dual_coefs=dual_coefs,
        biases=biases,
        gamma=gamma,
        C=C,
        feature_schema=feature_schema or {"kind": "raw", "dim": d},
        training_meta={"kkt_gap": gaps, "iterations": iters},
    )


def decision_scores(model, x) -> np.ndarray:
    """Per-seat confidence scores; linear w.x + b, kernel sum a_i y_i K + b."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if isinstance(model, LinearSvcModel):
        if x.shape != (model.dim,):
            raise DimensionMismatch(f"expected dim {model.dim}, got {x.shape}")
        return model.weights @ x + model.biases
    if isinstance(model, KernelSvcModel):
        dim = model.dim
        if dim and x.shape != (dim,):
            raise DimensionMismatch(f"expected dim {dim}, got {x.shape}")
        scores = np.zeros(N_CLASSES)
        for k in range(N_CLASSES):
            sv = model.support_vectors[k]
            if sv.shape[0]:
                kk = _kernels.rbf_kernel(sv, x[None, :], model.gamma)[:, 0]
                scores[k] = float(model.dual_coefs[k] @ kk) + model.biases[k]
            else:
                scores[k] = model.biases[k]
        return scores
    # duck-typed models (e.g. MLP) provide their own score hook
    return np.asarray(model.decision_scores(x), dtype=np.float64)


def masked_argmax(scores, resistance_mask) -> int:
    mask = np.asarray(resistance_mask, dtype=bool)
    if mask.shape != (N_CLASSES,) or int(mask.sum()) != 3:
        raise BadMask(f"resistance mask must have exactly 3 true entries: {mask}")
    scores = np.asarray(scores, dtype=np.float64)
    masked = np.where(mask, scores, -np.inf)
    return int(np.argmax(masked))  # argmax takes the lowest index on ties


def predict_merlin(model, x, resistance_mask) -> int:
    return masked_argmax(decision_scores(model, x), resistance_mask)


# ---------------------------------------------------------------------------
# Serialization: versioned JSON, floats round-trip binary64 exactly.

def model_to_dict(model) -> dict:
    if isinstance(model, LinearSvcModel):
        return {
            "format_version": 1,
            "model_type": model.model_type,
            "feature_schema": model.feature_schema,
            "classes": list(range(N_CLASSES)),
            "C": model.C,
            "weights": [list(map(float, row)) for row in model.weights],
            "biases": list(map(float, model.biases)),
            "training_meta": model.training_meta,
        }
    if isinstance(model, KernelSvcModel):
        return {
            "format_version": 1,
            "model_type": model.model_type,
            "feature_schema": model.feature_schema,
            "classes": list(range(N_CLASSES)),
            "C": model.C,
            "gamma": model.gamma,
            "support_vectors": [
                [list(map(float, row)) for row in sv] for sv in model.support_vectors
            ],
            "dual_coefs": [list(map(float, dc)) for dc in model.dual_coefs],
            "biases": list(map(float, model.biases)),
            "training_meta": model.training_meta,
        }
    return model.to_dict()


def model_from_dict(obj: dict):
    if obj.get("format_version") != 1:
        raise ValueError(f"unsupported model format: {obj.get('format_version')}")
    mtype = obj.get("model_type")
    if mtype == "linear-svc":
        return LinearSvcModel(
            weights=np.asarray(obj["weights"], dtype=np.float64),
            biases=np.asarray(obj["biases"], dtype=np.float64),
            C=float(obj["C"]),
            feature_schema=obj["feature_schema"],
            training_meta=obj.get("training_meta", {}),
        )
    if mtype == "rbf-svc":
        dim = int(obj["feature_schema"].get("dim", 0))
        return KernelSvcModel(
            support_vectors=[
                np.asarray(sv, dtype=np.float64).reshape(len(sv), dim)
                for sv in obj["support_vectors"]
            ],
            dual_coefs=[np.asarray(dc, dtype=np.float64) for dc in obj["dual_coefs"]],
            biases=np.asarray(obj["biases"], dtype=np.float64),
            gamma=float(obj["gamma"]),
            C=float(obj["C"]),
            feature_schema=obj["feature_schema"],
            training_meta=obj.get("training_meta", {}),
        )
    if mtype == "mlp":
        from .mlp import MlpModel
        return MlpModel.from_dict(obj)
    raise ValueError(f"unknown model_type: {mtype}")


def save_model(model, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh)
        fh.write("\n")


def load_model(path):
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
