import json

import numpy as np
import pytest
from scipy.optimize import minimize

from avalon_assassin import _kernels
from avalon_assassin.features import engineered_matrix
from avalon_assassin.simulator import SimConfig, simulate_dataset
from avalon_assassin.svm import (
    BadMask,
    DimensionMismatch,
    EmptyDataset,
    KernelSvcModel,
    LinearSvcModel,
    NonPositiveC,
    decision_scores,
    linear_objective,
    load_model,
    masked_argmax,
    model_from_dict,
    model_to_dict,
    predict_merlin,
    save_model,
    train_linear_svc,
    train_rbf_svc,
)


def reference_minimum(X, y_signed, C):
    """Slow oracle: scipy L-BFGS on the same objective, tight tolerances."""
    def fun(theta):
        return _kernels.squared_hinge_numpy(theta, X, y_signed, C)[0]

    def jac(theta):
        return _kernels.squared_hinge_numpy(theta, X, y_signed, C)[1]

    res = minimize(fun, np.zeros(X.shape[1] + 1), jac=jac, method="L-BFGS-B",
                   options={"maxiter": 50_000, "ftol": 1e-18, "gtol": 1e-12})
    return res.fun


def kkt_violation(X, y_signed, alpha, bias, gamma, C):
    """Independent checker: recompute the kernel and audit every multiplier."""
    K = _kernels.rbf_kernel_numpy(X, X, gamma)
    f = K @ (alpha * y_signed) + bias
    worst = 0.0
    for i in range(len(alpha)):
        margin = y_signed[i] * f[i]
        if alpha[i] <= 1e-9:
            worst = max(worst, 1.0 - margin)
        elif alpha[i] >= C - 1e-9:
            worst = max(worst, margin - 1.0)
        else:
            worst = max(worst, abs(margin - 1.0))
    return worst


def test_separable_pair():
    X = np.array([[1.0], [-1.0]])
    y = np.array([0, 1])
    model = train_linear_svc(X, y, C=1.0)
    assert decision_scores(model, X[0])[0] > decision_scores(model, X[0])[1]
    assert decision_scores(model, X[1])[1] > decision_scores(model, X[1])[0]


def test_matches_slow_reference_on_random_sets():
    rng = np.random.default_rng(42)
    for _ in range(20):
        n = int(rng.integers(5, 51))
        d = int(rng.integers(2, 11))
        X = rng.normal(size=(n, d))
        y = rng.integers(0, 5, size=n)
        model = train_linear_svc(X, y, C=1.0)
        for k in range(5):
            y_signed = np.where(y == k, 1.0, -1.0)
            ref = reference_minimum(X, y_signed, 1.0)
            ours = linear_objective(model.weights[k], model.biases[k], X, y_signed, 1.0)
            assert abs(ours - ref) / max(1.0, abs(ref)) <= 1e-6
            g0 = np.linalg.norm(
                _kernels.squared_hinge_numpy(np.zeros(d + 1), X, y_signed, 1.0)[1])
            assert model.training_meta["final_grad_norm"][k] <= 1e-6 * max(1.0, g0)


def test_local_minimality_perturbation_audit():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(40, 6))
    y = rng.integers(0, 5, size=40)
    model = train_linear_svc(X, y)
    for k in range(5):
        y_signed = np.where(y == k, 1.0, -1.0)
        base = linear_objective(model.weights[k], model.biases[k], X, y_signed, 1.0)
        for _ in range(100):
            dw = rng.normal(size=6)
            dw *= 1e-2 / np.linalg.norm(dw)
            db = rng.normal() * 1e-2
            perturbed = linear_objective(model.weights[k] + dw,
                                         model.biases[k] + db, X, y_signed, 1.0)
            assert perturbed >= base - 1e-9


def test_empty_dataset_and_bad_c():
    with pytest.raises(EmptyDataset):
        train_linear_svc(np.zeros((0, 3)), np.zeros(0, dtype=int))
    with pytest.raises(NonPositiveC):
        train_linear_svc(np.zeros((2, 3)), np.array([0, 1]), C=0.0)
    with pytest.raises(DimensionMismatch):
        train_linear_svc(np.zeros((2, 3)), np.array([0, 1, 2]))


def test_xor_rbf():
    X = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
    y = np.array([0, 0, 1, 1])
    model = train_rbf_svc(X, y, C=10.0, gamma=1.0)
    # verify by enumerating decision values for both present classes
    for x, label in zip(X, y):
        scores = decision_scores(model, x)
        assert int(np.argmax(scores[:2])) == label


def test_rbf_kkt_audit():
    rng = np.random.default_rng(7)
    for trial in range(5):
        n = int(rng.integers(10, 40))
        X = rng.normal(size=(n, 3))
        y = rng.integers(0, 5, size=n)
        model = train_rbf_svc(X, y, C=1.0, tol=1e-3)
        for k in range(5):
            y_signed = np.where(y == k, 1.0, -1.0)
            if (y_signed > 0).sum() == 0:
                continue
            sv = model.support_vectors[k]
            coef = model.dual_coefs[k]
            # rebuild full alpha over the support set only; non-SVs have alpha=0
            alpha = np.abs(coef)
            ys = np.sign(coef)
            worst = kkt_violation(sv, ys, alpha, model.biases[k], model.gamma, 1.0)
            # also audit the dropped points: alpha=0 requires margin >= 1 - tol
            K = _kernels.rbf_kernel_numpy(X, sv, model.gamma)
            f = K @ coef + model.biases[k]
            for i in range(n):
                margin = y_signed[i] * f[i]
                is_sv = any(np.allclose(X[i], s) for s in sv)
                if not is_sv:
                    worst = max(worst, 1.0 - margin)
            assert worst <= 1e-3 + 1e-9


def test_rbf_degenerate_identical_points():
    X = np.ones((6, 2))
    y = np.array([0, 0, 0, 1, 1, 1])
    model = train_rbf_svc(X, y, C=1.0, gamma=1.0)
    for k in (0, 1):
        coef = model.dual_coefs[k]
        assert np.all(np.abs(coef) <= 1.0 + 1e-9)
    scores = decision_scores(model, X[0])
    assert np.all(np.isfinite(scores))


def test_decision_scores_zero_model():
    model = LinearSvcModel(weights=np.zeros((5, 4)), biases=np.zeros(5),
                           C=1.0, feature_schema={"kind": "raw", "dim": 4})
    assert np.array_equal(decision_scores(model, np.ones(4)), np.zeros(5))


def test_decision_scores_linear_arithmetic():
    rng = np.random.default_rng(1)
    W = rng.normal(size=(5, 6))
    b = rng.normal(size=5)
    model = LinearSvcModel(weights=W, biases=b, C=1.0,
                           feature_schema={"kind": "raw", "dim": 6})
    x = rng.normal(size=6)
    direct = np.array([W[k] @ x + b[k] for k in range(5)])
    assert np.allclose(decision_scores(model, x), direct, rtol=0, atol=1e-12)
    # bit-identical across repeated calls (pure function)
    assert np.array_equal(decision_scores(model, x), decision_scores(model, x))
    doubled = np.array([W[k] @ (2 * x) + b[k] for k in range(5)])
    assert np.allclose(decision_scores(model, 2 * x), doubled)


def test_dimension_mismatch_on_scores():
    model = LinearSvcModel(weights=np.zeros((5, 4)), biases=np.zeros(5),
                           C=1.0, feature_schema={"kind": "raw", "dim": 4})
    with pytest.raises(DimensionMismatch):
        decision_scores(model, np.ones(5))


def test_masked_argmax_tie_break():
    assert masked_argmax(np.zeros(5), [True, True, True, False, False]) == 0


def test_masked_argmax_excludes_spies():
    scores = np.array([9.0, 0.0, 0.0, 99.0, 0.0])
    assert masked_argmax(scores, [True, True, True, False, False]) == 0


def test_masked_argmax_shift_invariant():
    rng = np.random.default_rng(5)
    for _ in range(50):
        scores = rng.normal(size=5)
        mask = np.zeros(5, dtype=bool)
        mask[rng.choice(5, 3, replace=False)] = True
        assert masked_argmax(scores, mask) == masked_argmax(scores + 17.3, mask)


def test_bad_mask():
    with pytest.raises(BadMask):
        masked_argmax(np.zeros(5), [True, True, False, False, False])


def test_predicted_seat_never_spy_over_1000_games():
    stream = simulate_dataset(SimConfig(seed=30, num_games=1000, merlin_leak=0.5,
                                        eligible_only=True))
    X, y, masks = engineered_matrix(stream)
    model = train_linear_svc(X[:500], y[:500],
                             feature_schema={"kind": "engineered",
                                             "subset": ["f1", "f2", "f3", "f4"],
                                             "dim": 20})
    for i in range(1000):
        pred = predict_merlin(model, X[i], masks[i])
        assert masks[i][pred]


def test_serialization_round_trip_linear(tmp_path):
    rng = np.random.default_rng(9)
    X = rng.normal(size=(30, 8))
    y = rng.integers(0, 5, size=30)
    model = train_linear_svc(X, y)
    path = tmp_path / "m.json"
    save_model(model, path)
    back = load_model(path)
    for x in rng.normal(size=(10, 8)):
        assert np.array_equal(decision_scores(model, x), decision_scores(back, x))


def test_serialization_round_trip_rbf(tmp_path):
    rng = np.random.default_rng(10)
    X = rng.normal(size=(25, 4))
    y = rng.integers(0, 5, size=25)
    model = train_rbf_svc(X, y, feature_schema={"kind": "raw", "dim": 4})
    path = tmp_path / "m.json"
    save_model(model, path)
    back = load_model(path)
    assert isinstance(back, KernelSvcModel)
    for x in rng.normal(size=(10, 4)):
        assert np.array_equal(decision_scores(model, x), decision_scores(back, x))


def test_model_dict_format():
    model = train_linear_svc(np.array([[1.0], [-1.0]]), np.array([0, 1]))
    obj = model_to_dict(model)
    assert obj["format_version"] == 1
    assert obj["model_type"] == "linear-svc"
    assert obj["classes"] == [0, 1, 2, 3, 4]
    rebuilt = model_from_dict(json.loads(json.dumps(obj)))
    assert np.array_equal(rebuilt.weights, model.weights)


def test_one_vs_rest_encoding():
    # exactly one positive class per row per classifier
    y = np.array([0, 1, 2, 3, 4, 0])
    for k in range(5):
        signed = np.where(y == k, 1.0, -1.0)
        assert ((signed == 1.0).sum(axis=0)) == (y == k).sum()


def test_numba_and_numpy_kernels_agree():
    rng = np.random.default_rng(11)
    X = rng.normal(size=(20, 3))
    Z = rng.normal(size=(7, 3))
    K1 = _kernels.rbf_kernel_numpy(X, Z, 0.7)
    K2 = _kernels._rbf_kernel_loops(X, Z, 0.7)
    assert np.allclose(K1, K2, atol=1e-12)

    theta = rng.normal(size=4)
    y = np.where(rng.random(20) < 0.5, 1.0, -1.0)
    v1, g1 = _kernels.squared_hinge_numpy(theta, X, y, 1.3)
    v2, g2 = _kernels._squared_hinge_loops(theta, X, y, 1.3)
    assert abs(v1 - v2) < 1e-10
    assert np.allclose(g1, g2, atol=1e-10)

    K = _kernels.rbf_kernel_numpy(X, X, 0.7)
    a1, b1, gap1, _ = _kernels.smo_solve_numpy(K, y, 1.0, 1e-4, 100000)
    a2, b2, gap2, _ = _kernels._smo_solve_loops(K, y, 1.0, 1e-4, 100000)
    f1 = K @ (a1 * y) + b1
    f2 = K @ (a2 * y) + b2
    assert gap1 <= 1e-4 and gap2 <= 1e-4
    assert np.allclose(f1, f2, atol=1e-3)
