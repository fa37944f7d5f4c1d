"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

Set AVALON_PURE_NUMPY=1 to force the numpy implementations (used by the
benchmark and by tests that cross-check the two paths). Both paths compute
identical results in exact arithmetic; tiny float differences can arise
from summation order in the kernel matrix.
"""

from __future__ import annotations

import os

import numpy as np

PURE_NUMPY = os.environ.get("AVALON_PURE_NUMPY", "") in ("1", "true", "yes")

_HAVE_NUMBA = False
if not PURE_NUMPY:
    try:
        from numba import njit
        _HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        pass


# ---------------------------------------------------------------------------
# RBF kernel matrix

def rbf_kernel_numpy(X: np.ndarray, Z: np.ndarray, gamma: float) -> np.ndarray:
    xx = np.sum(X * X, axis=1)[:, None]
    zz = np.sum(Z * Z, axis=1)[None, :]
    sq = xx + zz - 2.0 * (X @ Z.T)
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-gamma * sq)


def _rbf_kernel_loops(X, Z, gamma):
    n, d = X.shape
    m = Z.shape[0]
    K = np.empty((n, m))
    for i in range(n):
        for j in range(m):
            sq = 0.0
            for k in range(d):
                diff = X[i, k] - Z[j, k]
                sq += diff * diff
            K[i, j] = np.exp(-gamma * sq)
    return K


# ---------------------------------------------------------------------------
# Squared-hinge primal objective and gradient
#
# F(w, b) = 0.5 ||w||^2 + C * sum_i max(0, 1 - y_i (w.x_i + b))^2
# (bias unregularized). Returns (value, grad) with grad laid out [dw, db].

def squared_hinge_numpy(theta: np.ndarray, X: np.ndarray, y: np.ndarray, C: float):
    w = theta[:-1]
    b = theta[-1]
    margins = 1.0 - y * (X @ w + b)
    active = margins > 0.0
    m = np.where(active, margins, 0.0)
    value = 0.5 * float(w @ w) + C * float(m @ m)
    coef = -2.0 * C * m * y
    grad = np.empty_like(theta)
    grad[:-1] = w + X.T @ coef
    grad[-1] = float(np.sum(coef))
    return value, grad


def _squared_hinge_loops(theta, X, y, C):
    n, d = X.shape
    w = theta[:d]
    b = theta[d]
    value = 0.0
    for k in range(d):
        value += 0.5 * w[k] * w[k]
    grad = np.zeros(d + 1)
    for k in range(d):
        grad[k] = w[k]
    for i in range(n):
        z = b
        for k in range(d):
            z += w[k] * X[i, k]
        m = 1.0 - y[i] * z
        if m > 0.0:
            value += C * m * m
            coef = -2.0 * C * m * y[i]
            for k in range(d):
                grad[k] += coef * X[i, k]
            grad[d] += coef
    return value, grad


# ---------------------------------------------------------------------------
# SMO solver for the C-SVC dual
#
# minimize 0.5 a'Qa - e'a  with Q_ij = y_i y_j K_ij, 0 <= a <= C, y'a = 0,
# by most-violating-pair selection (gradient kept incrementally). Returns
# (alpha, bias, gap, iterations) where gap is the final KKT violation m - M.

_SNAP_EPS = 1e-10


def _snap_py(alpha, k, C):
    # keep box membership exact so the up/low index sets stay consistent
    if alpha[k] < _SNAP_EPS * max(1.0, C):
        alpha[k] = 0.0
    elif alpha[k] > C - _SNAP_EPS * max(1.0, C):
        alpha[k] = C


_snap = _snap_py

def smo_solve_numpy(K: np.ndarray, y: np.ndarray, C: float, tol: float,
                    max_iter: int):
    n = K.shape[0]
    Q = K * np.outer(y, y)
    alpha = np.zeros(n)
    grad = -np.ones(n)  # Q @ alpha - 1
    it = 0
    gap = np.inf
    while it < max_iter:
        yg = -y * grad
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        if not up.any() or not low.any():
            gap = 0.0
            break
        i = int(np.argmax(np.where(up, yg, -np.inf)))
        j = int(np.argmin(np.where(low, yg, np.inf)))
        gap = yg[i] - yg[j]
        if gap <= tol:
            break
        quad = K[i, i] + K[j, j] - 2.0 * K[i, j]
        t = gap / max(quad, 1e-12)
        # box clipping along the feasible direction da_i = y_i t, da_j = -y_j t
        t = min(t, C - alpha[i] if y[i] > 0 else alpha[i])
        t = min(t, alpha[j] if y[j] > 0 else C - alpha[j])
        dai = y[i] * t
        daj = -y[j] * t
        alpha[i] += dai
        alpha[j] += daj
        _snap(alpha, i, C)
        _snap(alpha, j, C)
        grad += Q[:, i] * dai + Q[:, j] * daj
        it += 1
    yg = -y * grad
    up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
    low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
    if up.any() and low.any():
        m = float(np.max(yg[up]))
        M = float(np.min(yg[low]))
        bias = (m + M) / 2.0
        gap = m - M
    else:
        bias = 0.0
        gap = 0.0
    return alpha, bias, float(gap), it


def _smo_solve_loops(K, y, C, tol, max_iter):
    n = K.shape[0]
    alpha = np.zeros(n)
    grad = -np.ones(n)
    it = 0
    gap = np.inf
    while it < max_iter:
        i = -1
        j = -1
        m = -np.inf
        M = np.inf
        for k in range(n):
            yg = -y[k] * grad[k]
            if (y[k] > 0 and alpha[k] < C) or (y[k] < 0 and alpha[k] > 0):
                if yg > m:
                    m = yg
                    i = k
            if (y[k] > 0 and alpha[k] > 0) or (y[k] < 0 and alpha[k] < C):
                if yg < M:
                    M = yg
                    j = k
        if i < 0 or j < 0:
            gap = 0.0
            break
        gap = m - M
        if gap <= tol:
            break
        quad = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if quad < 1e-12:
            quad = 1e-12
        t = gap / quad
        bound_i = C - alpha[i] if y[i] > 0 else alpha[i]
        bound_j = alpha[j] if y[j] > 0 else C - alpha[j]
        if t > bound_i:
            t = bound_i
        if t > bound_j:
            t = bound_j
        dai = y[i] * t
        daj = -y[j] * t
        alpha[i] += dai
        alpha[j] += daj
        snap = 1e-10 * (1.0 if C < 1.0 else C)
        if alpha[i] < snap:
            alpha[i] = 0.0
        elif alpha[i] > C - snap:
            alpha[i] = C
        if alpha[j] < snap:
            alpha[j] = 0.0
        elif alpha[j] > C - snap:
            alpha[j] = C
        for k in range(n):
            grad[k] += y[k] * y[i] * K[k, i] * dai + y[k] * y[j] * K[k, j] * daj
        it += 1
    m = -np.inf
    M = np.inf
    for k in range(n):
        yg = -y[k] * grad[k]
        if (y[k] > 0 and alpha[k] < C) or (y[k] < 0 and alpha[k] > 0):
            if yg > m:
                m = yg
        if (y[k] > 0 and alpha[k] > 0) or (y[k] < 0 and alpha[k] < C):
            if yg < M:
                M = yg
    if m > -np.inf and M < np.inf:
        bias = (m + M) / 2.0
        gap = m - M
    else:
        bias = 0.0
        gap = 0.0
    return alpha, bias, gap, it


if _HAVE_NUMBA:
    rbf_kernel_numba = njit(cache=True)(_rbf_kernel_loops)
    squared_hinge_numba = njit(cache=True)(_squared_hinge_loops)
    smo_solve_numba = njit(cache=True)(_smo_solve_loops)
    rbf_kernel = rbf_kernel_numba
    squared_hinge = squared_hinge_numba
    smo_solve = smo_solve_numba
else:
    rbf_kernel = rbf_kernel_numpy
    squared_hinge = squared_hinge_numpy
    smo_solve = smo_solve_numpy


def backend() -> str:
    return "numba" if _HAVE_NUMBA else "numpy"
