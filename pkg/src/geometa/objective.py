"""Square-loss alignment objective and its gradients.

For aligned source matrices ``X`` and ``Z`` (both ``d x n``, one column per
shared word) and ``W = U^T B V`` the objective is

    ||X^T W Z - I_n||_F^2 + c ||B||_F^2

The n x n residual is never formed. Expanding the norm gives

    tr(W^T Cxx W Czz) - 2 tr(W Cxz^T) + n + c ||B||_F^2

with ``Cxx = X X^T``, ``Czz = Z Z^T`` and ``Cxz = X Z^T``, so after one
O(n d^2) pass every evaluation costs O(d^3).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embio import AlignedPair
from .errors import DimensionMismatchError
from .manifold import ProductPoint, TangentVector, project_tangent_orth, riem_grad_spd, sym

_GRAM_CHUNK = 65_536


@dataclass(frozen=True, eq=False)
class GramCache:
    cxx: np.ndarray
    czz: np.ndarray
    cxz: np.ndarray
    n: int

    @property
    def d(self) -> int:
        return self.cxx.shape[0]


def gram_from_matrices(x: np.ndarray, z: np.ndarray) -> GramCache:
    """Second moments of two ``(d, n)`` matrices, accumulated over column blocks."""
    x = np.asarray(x, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if x.shape != z.shape or x.ndim != 2:
        raise DimensionMismatchError(f"shape mismatch: {x.shape} vs {z.shape}")
    d, n = x.shape
    if n < 1:
        raise DimensionMismatchError("need at least one word")
    cxx = np.zeros((d, d))
    czz = np.zeros((d, d))
    cxz = np.zeros((d, d))
    for lo in range(0, n, _GRAM_CHUNK):
        xb = x[:, lo:lo + _GRAM_CHUNK]
        zb = z[:, lo:lo + _GRAM_CHUNK]
        cxx += xb @ xb.T
        czz += zb @ zb.T
        cxz += xb @ zb.T
    return GramCache(sym(cxx), sym(czz), cxz, n)


def build_gram_cache(pair: AlignedPair) -> GramCache:
    return gram_from_matrices(pair.x_table.vectors, pair.z_table.vectors)


def _check(p: ProductPoint, cache: GramCache) -> None:
    if p.dim != cache.d:
        raise DimensionMismatchError(f"point has d={p.dim}, data has d={cache.d}")


def _core(p: ProductPoint, cache: GramCache):
    w = p.u.T @ p.b @ p.v
    cww = cache.cxx @ w @ cache.czz
    return w, cww


def loss(p: ProductPoint, cache: GramCache, reg_c: float) -> float:
    _check(p, cache)
    w, cww = _core(p, cache)
    fit = np.sum(w * cww) - 2.0 * np.sum(w * cache.cxz) + cache.n
    return float(fit + reg_c * np.sum(p.b * p.b))


def euclidean_grads(p: ProductPoint, cache: GramCache, reg_c: float):
    """Euclidean partial derivatives ``(gU, gV, gB)`` of :func:`loss`.

    With ``D = Cxx W Czz - Cxz`` the loss gradient in W is ``2 D``, which
    the chain rule through ``W = U^T B V`` splits into::

        gU = 2 B V D^T,   gV = 2 B U D,   gB = 2 U D V^T + 2 c B
    """
    _check(p, cache)
    w, cww = _core(p, cache)
    dmat = cww - cache.cxz
    g_u = 2.0 * p.b @ p.v @ dmat.T
    g_v = 2.0 * p.b @ p.u @ dmat
    g_b = 2.0 * p.u @ dmat @ p.v.T + 2.0 * reg_c * p.b
    return g_u, g_v, g_b


def riemannian_grad(p: ProductPoint, cache: GramCache, reg_c: float) -> TangentVector:
    g_u, g_v, g_b = euclidean_grads(p, cache, reg_c)
    return TangentVector(
        project_tangent_orth(p.u, g_u),
        project_tangent_orth(p.v, g_v),
        riem_grad_spd(p.b, g_b),
    )


def loss_materialized(
    p: ProductPoint, x: np.ndarray, z: np.ndarray, reg_c: float
) -> float:
    """Reference evaluation that builds the full n x n residual. Small n only."""
    resid = x.T @ p.u.T @ p.b @ p.v @ z - np.eye(x.shape[1])
    return float(np.sum(resid * resid) + reg_c * np.sum(p.b * p.b))


def pair_scores(p: ProductPoint, x: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Bilinear scores ``(U x_i)^T B (V z_j)`` for all word pairs, shape ``(n_x, n_z)``."""
    return (p.u @ x).T @ p.b @ (p.v @ z)
