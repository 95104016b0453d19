"""Shannon, Renyi and Tsallis entropies (bits) and the Harremoes-Topsoe bound.

All functions reduce over the last axis, so a ``(n, d)`` array of
distributions yields ``n`` entropies.
"""

from __future__ import annotations

import numpy as np

_TINY = 1e-300


def as_distribution(p, tol: float = 1e-10) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim == 0 or p.shape[-1] == 0:
        raise ValueError("empty distribution")
    if np.any(p < 0):
        raise ValueError(f"negative probability {p.min():.3e}")
    s = p.sum(axis=-1)
    if np.any(np.abs(s - 1.0) > tol):
        raise ValueError(f"probabilities sum to {np.ravel(s)[np.argmax(np.abs(np.ravel(s) - 1))]:.15g}, not 1")
    return p


def shannon(p) -> np.ndarray | float:
    """``-sum p log2 p`` with ``0 log 0 = 0``."""
    p = as_distribution(p)
    safe = np.where(p < _TINY, 1.0, p)
    h = -np.sum(np.where(p < _TINY, 0.0, p * np.log2(safe)), axis=-1)
    return h if h.ndim else float(h)


def index_of_coincidence(p) -> np.ndarray | float:
    ic = np.sum(np.asarray(p, dtype=float) ** 2, axis=-1)
    return ic if ic.ndim else float(ic)


def _check_order(q: float) -> None:
    if not q > 1:
        raise ValueError(f"entropy order must satisfy q > 1, got {q}")


def renyi(p, q: float = 2.0):
    """``log2(sum p^q) / (1 - q)``."""
    _check_order(q)
    p = as_distribution(p)
    r = np.log2(np.sum(p**q, axis=-1)) / (1.0 - q)
    return r if r.ndim else float(r)


def tsallis(p, q: float = 2.0):
    """``(1 - sum p^q) / (q - 1)``."""
    _check_order(q)
    p = as_distribution(p)
    t = (1.0 - np.sum(p**q, axis=-1)) / (q - 1.0)
    return t if t.ndim else float(t)


def xlog2x(x):
    x = np.asarray(x, dtype=float)
    out = np.where(x > 0, x * np.log2(np.where(x > 0, x, 1.0)), 0.0)
    return out if out.ndim else float(out)


def ht_lower_bound(ic, k: int):
    """Lower bound on Shannon entropy from the index of coincidence.

    For any integer ``k >= 1`` the bound is affine in ``ic``::

        ((k+1) log2(k+1) - k log2 k) - k (k+1) (log2(k+1) - log2 k) * ic

    and is attained by the uniform distribution on ``k`` or ``k+1`` points.
    """
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    k = int(k)
    lk, lk1 = np.log2(k), np.log2(k + 1)
    val = ((k + 1) * lk1 - k * lk) - k * (k + 1) * (lk1 - lk) * np.asarray(ic, dtype=float)
    return val if val.ndim else float(val)
