"""Hot numeric kernels, compiled with numba when the backend enables it.

Every kernel is a plain numpy function; :func:`raqst.backend.maybe_jit`
wraps it at import time.  The undecorated originals stay importable as
``<name>_numpy`` so the benchmark can time both paths side by side.
"""

from __future__ import annotations

import numpy as np

from .backend import maybe_jit

_SQRT2 = np.sqrt(2.0)


def _recursive_update(theta, q, gamma0, gamma, p_hat, weight, d):
    # Rank-one weighted least-squares update of (theta, q) for one record.
    qg = q @ gamma
    a = 1.0 / (1.0 / weight + gamma @ qg)
    resid = p_hat - gamma0 / d - gamma @ theta
    theta_new = theta + (a * resid) * qg
    q_new = q - a * (qg.reshape(-1, 1) * qg.reshape(1, -1))
    q_new = 0.5 * (q_new + q_new.T)
    return theta_new, q_new


def _gain(q, gamma, weight):
    # Trace decrease of q produced by absorbing one effect at this weight.
    qg = q @ gamma
    return (qg @ qg) / (1.0 / weight + gamma @ qg)


def _simplex_project(vals):
    # Euclidean projection of a real vector onto the probability simplex.
    u = np.sort(vals)[::-1]
    css = np.cumsum(u)
    k = 0
    for i in range(u.shape[0]):
        if u[i] + (1.0 - css[i]) / (i + 1.0) > 0.0:
            k = i
    tau = (1.0 - css[k]) / (k + 1.0)
    out = vals + tau
    return np.where(out > 0.0, out, 0.0)


def _minp_value(pa, pb, pd, x, y):
    return 0.25 + (pa @ x + pb @ y) / _SQRT2 + y @ (pd @ x)


def _minp_search(pa, pb, pd, x0, y0, tol, max_iter):
    # Alternating minimization of the product-projector probability
    # L(x, y) = 1/4 + (pa.x + pb.y)/sqrt(2) + y.pd.x  on ||x||^2=||y||^2=1/2.
    # Each half-step minimizes the objective exactly in one block, so the
    # L sequence must never increase; max_rise lets the caller assert that.
    r = 1.0 / _SQRT2
    x = x0.copy()
    y = y0.copy()
    l_prev = 0.25 + (pa @ x + pb @ y) / _SQRT2 + y @ (pd @ x)
    max_rise = 0.0
    iters = 0
    for it in range(max_iter):
        gx = pa / _SQRT2 + pd.T @ y
        nx = np.sqrt(gx @ gx)
        if nx > 1e-300:
            x = -(r / nx) * gx
        gy = pb / _SQRT2 + pd @ x
        ny = np.sqrt(gy @ gy)
        if ny > 1e-300:
            y = -(r / ny) * gy
        l_cur = 0.25 + (pa @ x + pb @ y) / _SQRT2 + y @ (pd @ x)
        rise = l_cur - l_prev
        if rise > max_rise:
            max_rise = rise
        iters = it + 1
        if abs(l_cur - l_prev) < tol:
            l_prev = l_cur
            break
        l_prev = l_cur
    return x, y, l_prev, iters, max_rise


# Pure-numpy originals, always available (benchmark + fallback tests).
recursive_update_numpy = _recursive_update
gain_numpy = _gain
simplex_project_numpy = _simplex_project
minp_search_numpy = _minp_search
minp_value_numpy = _minp_value

# Backend-selected versions used by the library.
recursive_update_kernel = maybe_jit(_recursive_update)
gain_kernel = maybe_jit(_gain)
simplex_project_kernel = maybe_jit(_simplex_project)
minp_value_kernel = maybe_jit(_minp_value)
minp_search_kernel = maybe_jit(_minp_search)
