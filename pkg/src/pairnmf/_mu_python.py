"""Pure-numpy multiplicative-update sweeps.

Fallback backend used when the compiled extension is unavailable (or forced
via ``PAIRNMF_BACKEND=python``). Semantics match ``_mu_kernels.pyx``:

* factors are updated H-then-W each sweep,
* the objective trace starts with the post-initialization value and gains
  one entry per sweep,
* iteration stops when the relative objective change drops below
  ``rel_tol`` or after ``max_iters`` sweeps,
* a lam == 0 run of either penalized solver executes exactly the base-NMF
  arithmetic, so its trace is bitwise identical to ``nmf_sweeps``.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse

BACKEND = "python"


def _converged(f_prev: float, f_cur: float, rel_tol: float) -> bool:
    return abs(f_prev - f_cur) < rel_tol * max(abs(f_prev), 1e-300)


def _fidelity(x, w, h) -> float:
    r = x - w @ h
    return 0.5 * float(np.sum(r * r))


def nmf_sweeps(x, w, h, max_iters, rel_tol, eps):
    trace = [_fidelity(x, w, h)]
    for _ in range(max_iters):
        h *= (w.T @ x) / ((w.T @ w) @ h + eps)
        w *= (x @ h.T) / (w @ (h @ h.T) + eps)
        f = _fidelity(x, w, h)
        trace.append(f)
        if _converged(trace[-2], f, rel_tol):
            break
    return w, h, np.asarray(trace)


def gnmf_sweeps(x, w, h, indptr, indices, sdata, deg, lam, max_iters, rel_tol, eps):
    n = x.shape[1]
    s = scipy.sparse.csr_matrix((sdata, indices, indptr), shape=(n, n))
    trace = [_gnmf_objective(x, w, h, s, deg, lam)]
    for _ in range(max_iters):
        if lam == 0.0:
            h *= (w.T @ x) / ((w.T @ w) @ h + eps)
        else:
            hs = (s @ h.T).T  # == h @ s, s is symmetric
            h *= (w.T @ x + lam * hs) / (
                (w.T @ w) @ h + lam * h * deg[None, :] + eps
            )
        w *= (x @ h.T) / (w @ (h @ h.T) + eps)
        f = _gnmf_objective(x, w, h, s, deg, lam)
        trace.append(f)
        if _converged(trace[-2], f, rel_tol):
            break
    return w, h, np.asarray(trace)


def _gnmf_objective(x, w, h, s, deg, lam) -> float:
    f = _fidelity(x, w, h)
    if lam == 0.0:
        return f
    hs = (s @ h.T).T
    tr_hlh = float(np.sum(deg * np.sum(h * h, axis=0)) - np.sum(h * hs))
    return f + 0.5 * lam * tr_hlh


def frnmf_sweeps(x, w, h, e, lam, max_iters, rel_tol, eps):
    trace = [_frnmf_objective(x, w, h, lam)]
    for _ in range(max_iters):
        h *= (w.T @ x) / ((w.T @ w) @ h + eps)
        if lam == 0.0:
            w *= (x @ h.T) / (w @ (h @ h.T) + eps)
        else:
            w *= (x @ h.T + lam * (e @ w)) / (
                w @ (h @ h.T) + (0.5 * lam * lam) * (w @ (w.T @ w)) + eps
            )
        f = _frnmf_objective(x, w, h, lam)
        trace.append(f)
        if _converged(trace[-2], f, rel_tol):
            break
    return w, h, np.asarray(trace)


def _frnmf_objective(x, w, h, lam) -> float:
    # Scatter penalty recorded up to the W-independent constant
    # 0.5*||XX^T||_F^2, so the lam == 0 trace coincides with base NMF:
    # 0.5*||XX^T - lam*WW^T||^2 - 0.5*||XX^T||^2
    #   = -lam*||X^T W||_F^2 + 0.5*lam^2*||W^T W||_F^2.
    f = _fidelity(x, w, h)
    if lam == 0.0:
        return f
    g = x.T @ w
    wtw = w.T @ w
    return f - lam * float(np.sum(g * g)) + 0.5 * lam * lam * float(np.sum(wtw * wtw))
